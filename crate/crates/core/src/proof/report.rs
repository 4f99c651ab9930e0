//! Running an index: expanding split trees, reducing leaves, reporting.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::index::{Index, IndexKind, Node};
use super::{is_excluded_middle, run_passage, split_cases, Goal, GoalResult, Passage, ProofError, Splitter, Verdict, VerdictKind};
use crate::engine::DEFAULT_BUDGET;
use crate::module::{FlatModule, Registry};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the index's budget.
    pub budget: Option<u64>,
    /// Also reduce the goal at every inner node of the split trees.
    pub internal: bool,
    /// Worker threads; 0 or `None` lets rayon decide.
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafResult {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    pub goal: String,
    pub verdict: VerdictKind,
    /// Normal form when the verdict is not a literal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    pub expected: VerdictKind,
    pub steps: u64,
    pub depth: usize,
    /// Position of the index entry this result belongs to.
    #[serde(skip)]
    pub entry: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assumption {
    pub passage: String,
    pub text: String,
    /// The split has the form `A = B` / `(A = B) = false`.
    pub checked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Coverage {
    pub transition: String,
    pub invariant: String,
    pub leaves: usize,
    pub proved: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: IndexKind,
    pub path: String,
    pub leaves: Vec<LeafResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inner: Vec<LeafResult>,
    pub coverage: Vec<Coverage>,
    pub assumptions: Vec<Assumption>,
    pub lemmas: Vec<Report>,
    /// Every leaf Proved and every required lemma passes.
    pub pass: bool,
    /// Every leaf has its expected verdict.
    pub expectations_met: bool,
}

impl Report {
    /// Counts, assumptions and the verdict, without per-leaf detail.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "pass": self.pass,
            "expectations_met": self.expectations_met,
            "leaves": self.leaves.len(),
            "proved": self.count(VerdictKind::Proved),
            "refuted": self.count(VerdictKind::Refuted),
            "stuck": self.count(VerdictKind::Stuck),
            "exhausted": self.count(VerdictKind::Exhausted),
            "assumptions": self.assumptions.iter().filter(|a| !a.checked).map(|a| &a.text).collect::<std::collections::BTreeSet<_>>(),
            "lemmas": self.lemmas.iter().map(Report::summary).collect::<Vec<_>>(),
        })
    }

    pub fn count(&self, kind: VerdictKind) -> usize {
        self.leaves.iter().filter(|l| l.verdict == kind).count()
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s, 0);
        s
    }

    fn write_text(&self, s: &mut String, indent: usize) {
        let pad = " ".repeat(indent);
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{pad}proof {} [{}]: {verdict}", self.name, self.path);
        let _ = writeln!(
            s,
            "{pad}  leaves: {} (proved {}, refuted {}, stuck {}, exhausted {})",
            self.leaves.len(),
            self.count(VerdictKind::Proved),
            self.count(VerdictKind::Refuted),
            self.count(VerdictKind::Stuck),
            self.count(VerdictKind::Exhausted)
        );
        if !self.coverage.is_empty() {
            let mut invs: Vec<&str> = Vec::new();
            for c in &self.coverage {
                if !invs.contains(&c.invariant.as_str()) {
                    invs.push(&c.invariant);
                }
            }
            let width = self.coverage.iter().map(|c| c.transition.len()).max().unwrap_or(0).max(10);
            let _ = write!(s, "{pad}  {:width$}", "");
            for i in &invs {
                let _ = write!(s, " {i:>9}");
            }
            s.push('\n');
            let mut row: Option<&str> = None;
            for c in &self.coverage {
                if row != Some(c.transition.as_str()) {
                    if row.is_some() {
                        s.push('\n');
                    }
                    let _ = write!(s, "{pad}  {:width$}", c.transition);
                    row = Some(&c.transition);
                }
                let _ = write!(s, " {:>9}", format!("{}/{}", c.proved, c.leaves));
            }
            s.push('\n');
        }
        if !self.assumptions.is_empty() {
            let checked = self.assumptions.iter().filter(|a| a.checked).count();
            let _ = writeln!(
                s,
                "{pad}  case splits by stated cases: {} ({checked} by excluded middle)",
                self.assumptions.len()
            );
            let mut seen = Vec::new();
            for a in self.assumptions.iter().filter(|a| !a.checked) {
                if !seen.contains(&&a.text) {
                    seen.push(&a.text);
                    let _ = writeln!(s, "{pad}    assumed: {}", a.text);
                }
            }
        }
        let id_width = self.leaves.iter().map(|l| l.id.len()).max().unwrap_or(0).min(100);
        for l in &self.leaves {
            let _ = write!(s, "{pad}  {:<id_width$}  {:<9} {:>7}  {}", l.id, l.verdict.to_string(), l.steps, l.goal);
            if let Some(r) = &l.residual {
                let _ = write!(s, " --> {r}");
            }
            if l.verdict != l.expected {
                let _ = write!(s, " (expected {})", l.expected);
            }
            s.push('\n');
        }
        for lemma in &self.lemmas {
            lemma.write_text(s, indent + 2);
        }
    }
}

struct Task {
    entry: usize,
    base: Arc<FlatModule>,
    passage: Passage,
    goal: Goal,
    depth: usize,
    leaf: bool,
}

/// Runs an induction index over reachable states.
pub fn run_induction(path: &Path, opts: &RunOptions) -> Result<Report, ProofError> {
    run_kind(path, opts, IndexKind::Induction)
}

/// Runs a structural induction index, such as the one for lemma1.
pub fn run_lemma1_structural(path: &Path, opts: &RunOptions) -> Result<Report, ProofError> {
    run_kind(path, opts, IndexKind::Structural)
}

fn run_kind(path: &Path, opts: &RunOptions, kind: IndexKind) -> Result<Report, ProofError> {
    let r = run_index(path, opts)?;
    if r.kind != kind {
        return Err(index_error(path, format!("expected a {kind:?} index, found {:?}", r.kind).to_lowercase()));
    }
    Ok(r)
}

/// Runs the proof described by the index file at `path`, including the
/// lemmas it requires.
pub fn run_index(path: &Path, opts: &RunOptions) -> Result<Report, ProofError> {
    run_nested(path, opts, &mut Vec::new())
}

fn index_error(path: &Path, message: impl ToString) -> ProofError {
    ProofError::Index { path: path.display().to_string(), message: message.to_string() }
}

fn check_coverage(index: &Index) -> Result<(), ProofError> {
    if index.kind == IndexKind::Passages {
        return Ok(());
    }
    let mut missing = Vec::new();
    for t in &index.transitions {
        for i in &index.invariants {
            let covered = index
                .entries
                .iter()
                .any(|e| e.transition.as_deref() == Some(t.as_str()) && e.invariant.as_deref() == Some(i.as_str()));
            if !covered {
                missing.push(format!("({t}, {i})"));
            }
        }
    }
    if index.transitions.is_empty() || index.invariants.is_empty() {
        missing.push("an empty plan".into());
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(ProofError::IncompletePlan { missing })
    }
}

fn run_nested(path: &Path, opts: &RunOptions, stack: &mut Vec<PathBuf>) -> Result<Report, ProofError> {
    let canon = path.canonicalize().map_err(|e| index_error(path, e))?;
    if stack.contains(&canon) {
        return Err(index_error(path, "lemma requirements form a cycle"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| index_error(path, e))?;
    let index: Index = serde_yaml::from_str(&text).map_err(|e| index_error(path, e))?;
    check_coverage(&index)?;
    let dir = canon.parent().map(Path::to_path_buf).unwrap_or_default();

    stack.push(canon);
    let lemmas = index
        .requires
        .iter()
        .map(|r| run_nested(&dir.join(r), opts, stack))
        .collect::<Result<Vec<_>, _>>();
    stack.pop();
    let lemmas = lemmas?;

    let mut search = vec![dir.clone()];
    search.extend(index.search.iter().map(|d| dir.join(d)));
    let mut reg = Registry::new(search);
    let mut passages: HashMap<String, Passage> = HashMap::new();
    for f in &index.files {
        let script = reg.load_file(&dir.join(f))?;
        for o in script.opens() {
            let p = Passage::from_block(o);
            passages.insert(p.id.clone(), p);
        }
    }

    let mut bases: HashMap<String, Arc<FlatModule>> = HashMap::new();
    let mut tasks = Vec::new();
    let mut assumptions = Vec::new();
    for (ei, e) in index.entries.iter().enumerate() {
        let root = passages.get(&e.passage).ok_or_else(|| ProofError::UnknownPassage(e.passage.clone()))?;
        let goal = root
            .goal(&e.goal)
            .ok_or_else(|| ProofError::UnknownGoal { passage: root.id.clone(), goal: e.goal.clone() })?
            .clone();
        let base = match bases.get(&root.base) {
            Some(b) => b.clone(),
            None => {
                let b = reg.module(&root.base)?;
                bases.insert(root.base.clone(), b.clone());
                b
            }
        };
        let mut root = root.clone();
        root.id = match (&e.transition, &e.invariant) {
            (Some(t), Some(i)) => format!("{t}:{i}"),
            _ => root.id.clone(),
        };
        expand(&base, root, &goal, ei, e.split.as_ref(), 0, opts.internal, &mut tasks, &mut assumptions)?;
    }

    let budget = opts.budget.or(index.budget).unwrap_or(DEFAULT_BUDGET);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .stack_size(1 << 28)
        .build()
        .map_err(|e| index_error(path, e))?;
    let results: Vec<Result<GoalResult, ProofError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| Ok(run_passage(&t.base, &t.passage, Some(&t.goal), budget)?.remove(0)))
            .collect()
    });

    let mut leaves = Vec::new();
    let mut inner = Vec::new();
    for (t, r) in tasks.iter().zip(results) {
        let r = r?;
        let e = &index.entries[t.entry];
        let residual = match &r.verdict {
            Verdict::Stuck(x) | Verdict::Exhausted(x) => Some(x.to_string()),
            _ => None,
        };
        let res = LeafResult {
            id: t.passage.id.clone(),
            transition: e.transition.clone(),
            invariant: e.invariant.clone(),
            goal: t.goal.text.clone(),
            verdict: r.verdict.kind(),
            residual,
            expected: e.expect.unwrap_or(VerdictKind::Proved),
            steps: r.steps,
            depth: t.depth,
            entry: t.entry,
        };
        if t.leaf {
            leaves.push(res);
        } else {
            inner.push(res);
        }
    }

    let mut coverage = Vec::new();
    if index.kind != IndexKind::Passages {
        for tr in &index.transitions {
            for inv in &index.invariants {
                let of = |l: &&LeafResult| {
                    l.transition.as_deref() == Some(tr.as_str()) && l.invariant.as_deref() == Some(inv.as_str())
                };
                coverage.push(Coverage {
                    transition: tr.clone(),
                    invariant: inv.clone(),
                    leaves: leaves.iter().filter(of).count(),
                    proved: leaves.iter().filter(of).filter(|l| l.verdict == VerdictKind::Proved).count(),
                });
            }
        }
    }

    let pass = !leaves.is_empty()
        && leaves.iter().all(|l| l.verdict == VerdictKind::Proved)
        && lemmas.iter().all(|l| l.pass);
    let expectations_met =
        leaves.iter().all(|l| l.verdict == l.expected) && lemmas.iter().all(|l| l.expectations_met);
    Ok(Report {
        name: index.name.clone(),
        kind: index.kind,
        path: path.display().to_string(),
        leaves,
        inner,
        coverage,
        assumptions,
        lemmas,
        pass,
        expectations_met,
    })
}

#[allow(clippy::too_many_arguments)]
fn expand(
    base: &Arc<FlatModule>,
    p: Passage,
    goal: &Goal,
    entry: usize,
    node: Option<&Node>,
    depth: usize,
    internal: bool,
    tasks: &mut Vec<Task>,
    assumptions: &mut Vec<Assumption>,
) -> Result<(), ProofError> {
    let Some(node) = node else {
        tasks.push(Task { entry, base: base.clone(), passage: p, goal: goal.clone(), depth, leaf: true });
        return Ok(());
    };
    let splitter = node.splitter();
    if let Splitter::Eq { cases, justification } = &splitter {
        assumptions.push(Assumption {
            passage: p.id.clone(),
            text: justification.clone(),
            checked: is_excluded_middle(base, &p, cases),
        });
    }
    let children = split_cases(base, &p, &splitter)?;
    if internal {
        tasks.push(Task { entry, base: base.clone(), passage: p, goal: goal.clone(), depth, leaf: false });
    }
    for (i, c) in children.into_iter().enumerate() {
        let sub = node.child(i, &c.key);
        expand(base, c.passage, goal, entry, sub, depth + 1, internal, tasks, assumptions)?;
    }
    Ok(())
}
