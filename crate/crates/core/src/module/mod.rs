//! Flattened modules: the union of a module and its transitive imports,
//! with equations elaborated into rewrite rules.

pub mod builtins;
mod registry;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

pub use registry::Registry;

use crate::syntax::{
    parse_equation, parse_term, tokenize, Decl, Denotation, EquationAst, Grammar, OpDeclAst, ParseError, Span, Token,
    VarScope,
};
use crate::term::{Attrs, OpDecl, OpSym, Poly, Signature, Sort, SortError, SortInfo, Term};

#[derive(Debug, Clone, Error)]
pub enum ModuleError {
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("in {module}: {source}")]
    Term { module: String, source: ParseError },
    #[error("in {module} at {span}: {source}")]
    Sort { module: String, span: Span, source: SortError },
    #[error("in {module} at {span}: {message}")]
    Invalid { module: String, span: Span, message: String },
    #[error("unknown module `{name}` imported at {span}")]
    UnknownImport { name: String, span: Span },
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("cyclic import: {}", .0.join(" -> "))]
    CyclicImport(Vec<String>),
    #[error("module `{name}` is defined in both {first} and {second}")]
    DuplicateModule { name: String, first: String, second: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// A conditional rewrite rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub cond: Option<Term>,
    /// Declaring module, or the open block for hypotheses.
    pub module: Arc<str>,
    pub hypothesis: bool,
    pub span: Span,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.cond {
            Some(c) => write!(f, "ceq {} = {} if {} .", self.lhs, self.rhs, c),
            None => write!(f, "eq {} = {} .", self.lhs, self.rhs),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatModule {
    name: String,
    sig: Signature,
    grammar: Grammar,
    vars: VarScope,
    /// Priority order: hypotheses first, then module equations in textual order.
    rules: Vec<Arc<Rule>>,
    hypotheses: usize,
    index: HashMap<Arc<str>, Vec<(usize, Vec<usize>)>>,
    included: Vec<(String, Denotation)>,
}

impl FlatModule {
    /// BOOL and RAT only.
    pub fn builtin() -> FlatModule {
        let sig = builtins::signature().expect("builtin signature");
        let grammar = Grammar::new(&sig);
        FlatModule {
            name: builtins::RAT.to_string(),
            sig,
            grammar,
            vars: VarScope::new(),
            rules: Vec::new(),
            hypotheses: 0,
            index: HashMap::new(),
            included: vec![
                (builtins::BOOL.to_string(), Denotation::Tight),
                (builtins::RAT.to_string(), Denotation::Tight),
            ],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    /// Variables declared by the module itself; visible in open blocks.
    pub fn vars(&self) -> &VarScope {
        &self.vars
    }

    pub fn rules(&self) -> &[Arc<Rule>] {
        &self.rules
    }

    /// Indices into [`FlatModule::rules`] of the rules whose left side has
    /// head `op`, in priority order.
    pub fn rules_for(&self, op: &OpSym) -> &[usize] {
        self.index
            .get(op.name())
            .and_then(|v| v.iter().find(|(a, _)| *a == op.arity()))
            .map(|(_, r)| r.as_slice())
            .unwrap_or(&[])
    }

    pub fn is_memo(&self, op: &OpSym) -> bool {
        self.sig.family(op.name(), op.arity()).is_some_and(|f| f.sym.attrs().memo)
    }

    /// Names of every module flattened into this one, in import order.
    pub fn included(&self) -> impl Iterator<Item = &str> {
        self.included.iter().map(|(n, _)| n.as_str())
    }

    pub fn denotation_of(&self, module: &str) -> Option<Denotation> {
        self.included.iter().find(|(n, _)| n == module).map(|(_, d)| *d)
    }

    pub fn parse_tokens(&self, toks: &[Token]) -> Result<Term, ModuleError> {
        parse_term(toks, &self.grammar, &self.sig, &self.vars)
            .map_err(|source| ModuleError::Term { module: self.name.clone(), source })
    }

    /// Parses a term written in the module's syntax.
    pub fn parse(&self, text: &str) -> Result<Term, ModuleError> {
        let toks = tokenize(text).map_err(|e| ModuleError::Term { module: self.name.clone(), source: e.into() })?;
        self.parse_tokens(&toks)
    }

    /// Constants of a tight sort, for case splitting. `None` for loose
    /// sorts and sorts without constants.
    pub fn enumerate(&self, sort: &Sort) -> Option<Vec<Term>> {
        if *sort == Sort::bool() {
            return Some(vec![Term::Bool(true), Term::Bool(false)]);
        }
        let info = self.sig.sort_info(sort)?;
        if self.denotation_of(&info.module) != Some(Denotation::Tight) || builtins::is_builtin(&info.module) {
            return None;
        }
        let consts: Vec<Term> = self
            .sig
            .families()
            .filter(|f| f.sym.arity() == 0)
            .filter(|f| f.decls.iter().any(|d| d.coarity == *sort && d.module == info.module))
            .map(|f| Term::constant(&f.sym))
            .collect();
        (!consts.is_empty()).then_some(consts)
    }

    fn reindex(&mut self) {
        self.index.clear();
        for (i, r) in self.rules.iter().enumerate() {
            let op = r.lhs.head().expect("rule lhs is an application");
            let slot = self.index.entry(Arc::from(op.name())).or_default();
            match slot.iter_mut().find(|(a, _)| *a == op.arity()) {
                Some((_, v)) => v.push(i),
                None => slot.push((op.arity(), vec![i])),
            }
        }
    }

    /// Starts an open block over this module.
    pub fn open(&self, label: &str) -> Builder {
        let mut m = self.clone();
        m.name = label.to_string();
        Builder { m, module: Arc::from(label), hypothesis: true, grammar_dirty: false }
    }
}

/// Incrementally adds declarations to a flat module.
pub struct Builder {
    m: FlatModule,
    module: Arc<str>,
    /// Open-block mode: new operators must be fresh and equations are
    /// hypotheses with priority over the base module's rules.
    hypothesis: bool,
    grammar_dirty: bool,
}

fn parse_attrs(o: &OpDeclAst, module: &str) -> Result<Attrs, ModuleError> {
    let mut a = Attrs::NONE;
    for w in &o.attrs {
        match w.as_str() {
            "assoc" => a.assoc = true,
            "comm" => a.comm = true,
            "idem" => a.idem = true,
            "memo" => a.memo = true,
            "constr" => {}
            other => {
                return Err(ModuleError::Invalid {
                    module: module.to_string(),
                    span: o.span,
                    message: format!("unsupported attribute `{other}`"),
                })
            }
        }
    }
    Ok(a)
}

impl Builder {
    pub(crate) fn new(base: &FlatModule, name: &str, denotation: Denotation) -> Builder {
        let mut m = base.clone();
        m.name = name.to_string();
        m.vars.clear();
        m.included.push((name.to_string(), denotation));
        Builder { m, module: Arc::from(name), hypothesis: false, grammar_dirty: false }
    }

    fn invalid(&self, span: Span, message: impl Into<String>) -> ModuleError {
        ModuleError::Invalid { module: self.module.to_string(), span, message: message.into() }
    }

    fn sort_err(&self, span: Span, source: SortError) -> ModuleError {
        ModuleError::Sort { module: self.module.to_string(), span, source }
    }

    /// Merges an imported module. Rules of modules already present are
    /// not duplicated.
    pub(crate) fn import(&mut self, other: &FlatModule, span: Span) -> Result<(), ModuleError> {
        self.m.sig.merge(&other.sig).map_err(|e| self.sort_err(span, e))?;
        let known: Vec<String> = self.m.included.iter().map(|(n, _)| n.clone()).collect();
        for r in &other.rules {
            if !known.iter().any(|n| **n == *r.module) {
                self.m.rules.push(r.clone());
            }
        }
        for inc in &other.included {
            if !known.contains(&inc.0) {
                let at = self.m.included.len() - 1;
                self.m.included.insert(at, inc.clone());
            }
        }
        self.grammar_dirty = true;
        Ok(())
    }

    pub fn declare_sorts(&mut self, hidden: bool, groups: &[Vec<String>], span: Span) -> Result<(), ModuleError> {
        for g in groups {
            for s in g {
                let sort = Sort::new(s);
                if !self.m.sig.has_sort(&sort) {
                    self.m.sig.add_sort(sort, SortInfo { hidden, module: self.module.clone() });
                }
            }
        }
        self.declare_subsorts(groups, span)
    }

    fn declare_subsorts(&mut self, groups: &[Vec<String>], span: Span) -> Result<(), ModuleError> {
        for w in groups.windows(2) {
            for lo in &w[0] {
                for up in &w[1] {
                    self.m.sig.add_subsort(&Sort::new(lo), &Sort::new(up)).map_err(|e| self.sort_err(span, e))?;
                }
            }
        }
        Ok(())
    }

    pub fn declare_op(&mut self, o: &OpDeclAst) -> Result<(), ModuleError> {
        let attrs = parse_attrs(o, &self.module)?;
        let coarity = if o.pred { Sort::bool() } else { Sort::new(&o.coarity) };
        let decl = OpDecl {
            arity: o.arity.iter().map(|s| Sort::new(s)).collect(),
            coarity,
            behavioral: o.behavioral,
            module: self.module.clone(),
        };
        for name in &o.names {
            if self.hypothesis && self.m.sig.family(name, decl.arity.len()).is_some() {
                return Err(self.invalid(o.span, format!("`{name}` already exists in the opened module")));
            }
            let holes = name.matches('_').count();
            if holes > 0 && holes != decl.arity.len() {
                return Err(self.invalid(
                    o.span,
                    format!("`{name}` has {holes} placeholders but {} argument sorts", decl.arity.len()),
                ));
            }
            self.m.sig.add_op(name, decl.clone(), attrs, Poly::None).map_err(|e| self.sort_err(o.span, e))?;
            if name.contains('_') {
                self.grammar_dirty = true;
            }
        }
        Ok(())
    }

    pub fn declare_vars(&mut self, names: &[String], sort: &str, span: Span) -> Result<(), ModuleError> {
        let sort = Sort::new(sort);
        if !self.m.sig.has_sort(&sort) {
            return Err(self.sort_err(span, SortError::UnknownSort(sort.to_string())));
        }
        for n in names {
            self.m.vars.insert(n.clone(), sort.clone());
        }
        Ok(())
    }

    fn refresh_grammar(&mut self) {
        if self.grammar_dirty {
            self.m.grammar = Grammar::new(&self.m.sig);
            self.grammar_dirty = false;
        }
    }

    pub fn declare_equation(&mut self, e: &EquationAst) -> Result<(), ModuleError> {
        self.refresh_grammar();
        let p = parse_equation(&e.tokens, e.conditional, e.span, &self.m.grammar, &self.m.sig, &self.m.vars)
            .map_err(|source| ModuleError::Term { module: self.module.to_string(), source })?;
        if p.lhs.head().is_none() {
            return Err(self.invalid(e.span, format!("left side `{}` is not an operator application", p.lhs)));
        }
        let bound = p.lhs.vars();
        let extra = p.rhs.vars().into_iter().chain(p.cond.iter().flat_map(|c| c.vars())).find(|v| !bound.contains(v));
        if let Some(v) = extra {
            return Err(self.invalid(e.span, format!("variable `{}` does not occur in the left side", v.name)));
        }
        let rule = Arc::new(Rule {
            lhs: p.lhs,
            rhs: p.rhs,
            cond: p.cond,
            module: self.module.clone(),
            hypothesis: self.hypothesis,
            span: e.span,
        });
        if self.hypothesis {
            self.m.rules.insert(self.m.hypotheses, rule);
            self.m.hypotheses += 1;
        } else {
            self.m.rules.push(rule);
        }
        Ok(())
    }

    /// Adds one non-import declaration.
    pub fn declare(&mut self, d: &Decl) -> Result<(), ModuleError> {
        match d {
            Decl::Import(i) => Err(self.invalid(i.span, "imports are not allowed here")),
            Decl::Sorts { hidden, groups, span } => self.declare_sorts(*hidden, groups, *span),
            Decl::Op(o) => self.declare_op(o),
            Decl::Vars { names, sort, span } => self.declare_vars(names, sort, *span),
            Decl::Eq(e) => self.declare_equation(e),
        }
    }

    /// Adds module declarations in dependency order: sorts, subsorts,
    /// operators, variables, then equations.
    pub(crate) fn declare_all(&mut self, decls: &[Decl]) -> Result<(), ModuleError> {
        for d in decls {
            if let Decl::Sorts { hidden, groups, .. } = d {
                for s in groups.iter().flatten() {
                    let sort = Sort::new(s);
                    if !self.m.sig.has_sort(&sort) {
                        self.m.sig.add_sort(sort, SortInfo { hidden: *hidden, module: self.module.clone() });
                    }
                }
            }
        }
        for d in decls {
            if let Decl::Sorts { groups, span, .. } = d {
                self.declare_subsorts(groups, *span)?;
            }
        }
        for d in decls {
            match d {
                Decl::Op(o) => self.declare_op(o)?,
                Decl::Vars { names, sort, span } => self.declare_vars(names, sort, *span)?,
                _ => {}
            }
        }
        for d in decls {
            if let Decl::Eq(e) = d {
                self.declare_equation(e)?;
            }
        }
        Ok(())
    }

    /// Current state of the module, usable while more declarations follow.
    pub fn snapshot(&mut self) -> FlatModule {
        self.refresh_grammar();
        let mut m = self.m.clone();
        m.reindex();
        m
    }

    pub fn finish(mut self) -> FlatModule {
        self.refresh_grammar();
        self.m.reindex();
        self.m
    }
}
