use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::{builtins, Builder, FlatModule, ModuleError};
use crate::syntax::{parse_script, Script, SpecModule};

#[derive(Clone, Debug)]
struct Source {
    ast: SpecModule,
    file: Option<PathBuf>,
}

/// Module sources by name, plus the flattened modules built so far.
///
/// An import that names a module not yet loaded is looked up in the
/// `.cafe` files of the importing file's directory, then in each search
/// directory in order.
#[derive(Debug)]
pub struct Registry {
    search: Vec<PathBuf>,
    sources: HashMap<String, Source>,
    files: HashSet<PathBuf>,
    scanned: HashSet<PathBuf>,
    flat: HashMap<String, Arc<FlatModule>>,
    builtin: Arc<FlatModule>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new(Vec::new())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> ModuleError {
    ModuleError::Io { path: path.display().to_string(), message: e.to_string() }
}

impl Registry {
    pub fn new(search: Vec<PathBuf>) -> Registry {
        Registry {
            search,
            sources: HashMap::new(),
            files: HashSet::new(),
            scanned: HashSet::new(),
            flat: HashMap::new(),
            builtin: Arc::new(FlatModule::builtin()),
        }
    }

    /// Parses a file and registers its modules.
    pub fn load_file(&mut self, path: &Path) -> Result<Script, ModuleError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let canon = path.canonicalize().map_err(|e| io_err(path, e))?;
        let script = parse_script(&text)
            .map_err(|source| ModuleError::Parse { file: path.display().to_string(), source })?;
        if self.files.insert(canon.clone()) {
            self.register(&script, Some(canon), true)?;
        }
        Ok(script)
    }

    /// Parses source text and registers its modules. Imports are resolved
    /// relative to `dir` when given.
    pub fn load_str(&mut self, text: &str, dir: Option<&Path>) -> Result<Script, ModuleError> {
        let script = parse_script(text).map_err(|source| ModuleError::Parse { file: "<input>".into(), source })?;
        let file = dir.map(|d| d.join("<input>"));
        self.register(&script, file, true)?;
        Ok(script)
    }

    fn register(&mut self, script: &Script, file: Option<PathBuf>, strict: bool) -> Result<(), ModuleError> {
        for m in script.modules() {
            if let Some(old) = self.sources.get(&m.name) {
                if !strict || old.file == file {
                    continue;
                }
                let show = |f: &Option<PathBuf>| f.as_ref().map(|p| p.display().to_string()).unwrap_or("<input>".into());
                return Err(ModuleError::DuplicateModule {
                    name: m.name.clone(),
                    first: show(&old.file),
                    second: show(&file),
                });
            }
            self.flat.remove(&m.name);
            self.sources.insert(m.name.clone(), Source { ast: m.clone(), file: file.clone() });
        }
        Ok(())
    }

    /// Registers every parsable `.cafe` file in `dir` without overriding
    /// modules that are already known.
    fn scan(&mut self, dir: &Path) {
        let Ok(canon) = dir.canonicalize() else { return };
        if !self.scanned.insert(canon.clone()) {
            return;
        }
        let Ok(entries) = std::fs::read_dir(&canon) else { return };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "cafe"))
            .collect();
        paths.sort();
        for p in paths {
            if self.files.contains(&p) {
                continue;
            }
            let Ok(text) = std::fs::read_to_string(&p) else { continue };
            if let Ok(script) = parse_script(&text) {
                self.files.insert(p.clone());
                let _ = self.register(&script, Some(p), false);
            }
        }
    }

    fn locate(&mut self, name: &str, from: Option<&Path>) {
        if self.sources.contains_key(name) {
            return;
        }
        let mut dirs: Vec<PathBuf> = from.and_then(|f| f.parent()).map(Path::to_path_buf).into_iter().collect();
        dirs.extend(self.search.iter().cloned());
        for d in dirs {
            self.scan(&d);
            if self.sources.contains_key(name) {
                return;
            }
        }
    }

    pub fn module_names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.sources.keys().cloned().collect();
        v.sort();
        v
    }

    /// The flattened module `name`, building it and its imports on demand.
    pub fn module(&mut self, name: &str) -> Result<Arc<FlatModule>, ModuleError> {
        if builtins::is_builtin(name) {
            return Ok(self.builtin.clone());
        }
        self.locate(name, None);
        if !self.sources.contains_key(name) {
            return Err(ModuleError::UnknownModule(name.to_string()));
        }
        self.build(name, &mut Vec::new())
    }

    fn build(&mut self, name: &str, stack: &mut Vec<String>) -> Result<Arc<FlatModule>, ModuleError> {
        if builtins::is_builtin(name) {
            return Ok(self.builtin.clone());
        }
        if let Some(m) = self.flat.get(name) {
            return Ok(m.clone());
        }
        if let Some(k) = stack.iter().position(|s| s == name) {
            let mut cycle = stack[k..].to_vec();
            cycle.push(name.to_string());
            return Err(ModuleError::CyclicImport(cycle));
        }
        let src = self.sources[name].clone();
        stack.push(name.to_string());
        let mut b = Builder::new(&self.builtin, name, src.ast.denotation);
        for imp in src.ast.imports() {
            for target in &imp.modules {
                self.locate(target, src.file.as_deref());
                if !builtins::is_builtin(target) && !self.sources.contains_key(target) {
                    return Err(ModuleError::UnknownImport { name: target.clone(), span: imp.span });
                }
                let dep = self.build(target, stack)?;
                b.import(&dep, imp.span)?;
            }
        }
        b.declare_all(&src.ast.decls)?;
        stack.pop();
        let m = Arc::new(b.finish());
        self.flat.insert(name.to_string(), m.clone());
        Ok(m)
    }
}
