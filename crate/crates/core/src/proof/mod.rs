//! Proof scores: passages, case splits and induction reports.
//!
//! A passage opens a module, declares fresh constants and hypotheses and
//! reduces goals. A goal is Proved when it reduces to `true`. Case splits
//! turn one passage into several, each with extra hypotheses; an index file
//! arranges passages into trees whose leaves must all be Proved.

mod index;
mod report;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use index::{Case, Entry, Index, IndexKind, Node};
pub use report::{run_index, run_induction, run_lemma1_structural, Assumption, Coverage, LeafResult, Report, RunOptions};

use crate::engine::{Rewriter, DEFAULT_BUDGET};
use crate::module::{FlatModule, ModuleError};
use crate::syntax::{tokenize, Decl, EquationAst, OpenBlock, OpenItem, Span, Tok, Token};
use crate::term::{Sort, Term};

#[derive(Debug, Clone, Error)]
pub enum ProofError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("passage {passage}: cannot enumerate `{term}`: sort {sort} is not tight or has no constants")]
    NotEnumerable { passage: String, term: String, sort: String },
    #[error("passage {passage}: split term `{term}` has sort {sort}, not Bool")]
    NotBool { passage: String, term: String, sort: String },
    #[error("incomplete plan: no passage covers {}", .missing.join(", "))]
    IncompletePlan { missing: Vec<String> },
    #[error("{path}: {message}")]
    Index { path: String, message: String },
    #[error("passage `{0}` not found")]
    UnknownPassage(String),
    #[error("passage {passage}: no goal `{goal}`")]
    UnknownGoal { passage: String, goal: String },
}

/// Outcome of reducing one goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Refuted,
    Stuck(Term),
    Exhausted(Term),
}

impl Verdict {
    pub fn of(term: &Term, exhausted: bool) -> Verdict {
        match (term, exhausted) {
            (_, true) => Verdict::Exhausted(term.clone()),
            (Term::Bool(true), _) => Verdict::Proved,
            (Term::Bool(false), _) => Verdict::Refuted,
            _ => Verdict::Stuck(term.clone()),
        }
    }

    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Proved => VerdictKind::Proved,
            Verdict::Refuted => VerdictKind::Refuted,
            Verdict::Stuck(_) => VerdictKind::Stuck,
            Verdict::Exhausted(_) => VerdictKind::Exhausted,
        }
    }

    pub fn is_proved(&self) -> bool {
        *self == Verdict::Proved
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Proved => f.write_str("Proved"),
            Verdict::Refuted => f.write_str("Refuted"),
            Verdict::Stuck(t) => write!(f, "Stuck({t})"),
            Verdict::Exhausted(t) => write!(f, "Exhausted({t})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Proved,
    Refuted,
    Stuck,
    Exhausted,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Proved => "Proved",
            VerdictKind::Refuted => "Refuted",
            VerdictKind::Stuck => "Stuck",
            VerdictKind::Exhausted => "Exhausted",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Goal {
    pub text: String,
    pub tokens: Vec<Token>,
    pub span: Span,
}

/// One open/declare/assume/reduce/close block.
#[derive(Clone, Debug)]
pub struct Passage {
    pub id: String,
    pub base: String,
    /// Fresh operators, variables and hypotheses, in order.
    pub decls: Vec<Decl>,
    pub goals: Vec<Goal>,
    pub span: Span,
}

fn tokens_text(toks: &[Token]) -> String {
    let mut s = String::new();
    let mut prev: Option<&Tok> = None;
    for t in toks {
        let glue = match (prev, &t.tok) {
            (None, _) | (Some(Tok::LParen), _) | (_, Tok::RParen | Tok::Comma) => true,
            (Some(Tok::Ident(w)), Tok::LParen) => w.chars().any(char::is_alphanumeric),
            _ => false,
        };
        if !glue {
            s.push(' ');
        }
        s.push_str(&t.tok.to_string());
        prev = Some(&t.tok);
    }
    s
}

impl Passage {
    pub fn from_block(block: &OpenBlock) -> Passage {
        let mut decls = Vec::new();
        let mut goals = Vec::new();
        for item in &block.items {
            match item {
                OpenItem::Decl(d) => decls.push(d.clone()),
                OpenItem::Red(r) => goals.push(Goal { text: tokens_text(&r.tokens), tokens: r.tokens.clone(), span: r.span }),
            }
        }
        Passage {
            id: block.annotation("passage").unwrap_or(&block.module).to_string(),
            base: block.module.clone(),
            decls,
            goals,
            span: block.span,
        }
    }

    /// Goal whose text matches `text` up to whitespace.
    pub fn goal(&self, text: &str) -> Option<&Goal> {
        let want: String = text.split_whitespace().collect();
        self.goals.iter().find(|g| g.text.split_whitespace().collect::<String>() == want)
    }

    /// The base module extended with the passage's declarations.
    pub fn module(&self, base: &FlatModule) -> Result<FlatModule, ModuleError> {
        let mut b = base.open(&self.id);
        for d in &self.decls {
            b.declare(d)?;
        }
        Ok(b.finish())
    }

    /// Adds an equation given as text, with or without `eq` and the period.
    pub fn assume(&mut self, text: &str) -> Result<(), ModuleError> {
        let body = text.trim();
        let body = body.strip_prefix("eq ").unwrap_or(body).trim();
        let body = body.strip_suffix('.').unwrap_or(body).trim();
        let tokens = tokenize(body)
            .map_err(|e| ModuleError::Term { module: self.id.clone(), source: e.into() })?;
        self.decls.push(Decl::Eq(EquationAst { conditional: false, tokens, span: self.span }));
        Ok(())
    }

    fn child(&self, label: &str) -> Passage {
        let mut p = self.clone();
        p.id = format!("{}/{}", self.id, label);
        p
    }
}

#[derive(Clone, Debug)]
pub struct GoalResult {
    pub goal: String,
    pub verdict: Verdict,
    pub steps: u64,
}

/// Reduces every goal of `p` (or only `only`) in a fresh rewriter over the
/// extended module.
pub fn run_passage(base: &FlatModule, p: &Passage, only: Option<&Goal>, budget: u64) -> Result<Vec<GoalResult>, ProofError> {
    let m = p.module(base)?;
    let mut rw = Rewriter::new(&m).with_budget(budget);
    let goals: Vec<&Goal> = match only {
        Some(g) => vec![g],
        None => p.goals.iter().collect(),
    };
    let mut out = Vec::new();
    for g in goals {
        let t = m.parse_tokens(&g.tokens)?;
        let nf = rw.reduce(&t);
        out.push(GoalResult { goal: g.text.clone(), verdict: Verdict::of(&nf.term, nf.exhausted), steps: nf.steps });
    }
    Ok(out)
}

/// Runs a passage with the default budget.
pub fn run_passage_default(base: &FlatModule, p: &Passage) -> Result<Vec<GoalResult>, ProofError> {
    run_passage(base, p, None, DEFAULT_BUDGET)
}

/// How a passage is split into cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitter {
    /// `c = true` and `c = false` for a Bool term.
    Bool(String),
    /// One case `t = k` per constant `k` of the tight sort of `t`.
    Enum(String),
    /// User-supplied cases; completeness is the stated justification.
    Eq { cases: Vec<Vec<String>>, justification: String },
}

/// A case produced by [`split_cases`].
#[derive(Clone, Debug)]
pub struct SplitCase {
    /// `true`/`false`, the enumerated constant, or the case number.
    pub key: String,
    pub label: String,
    pub passage: Passage,
}

/// Does a two-case split read `A = B` / `(A = B) = false`? Such splits are
/// complete by excluded middle.
pub fn is_excluded_middle(base: &FlatModule, p: &Passage, cases: &[Vec<String>]) -> bool {
    let [a, b] = cases else { return false };
    let ([pos], [neg]) = (a.as_slice(), b.as_slice()) else { return false };
    let Ok(m) = p.module(base) else { return false };
    let strip = |s: &str| {
        let s = s.trim();
        let s = s.strip_prefix("eq ").unwrap_or(s).trim();
        s.strip_suffix('.').unwrap_or(s).trim().to_string()
    };
    let (pos, neg) = (strip(pos), strip(neg));
    let Some(neg_lhs) = neg.strip_suffix("= false").map(str::trim) else { return false };
    match (m.parse(&format!("({pos})")), m.parse(neg_lhs)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn parse_in(m: &FlatModule, p: &Passage, text: &str) -> Result<(Term, Sort), ProofError> {
    let t = m.parse(text)?;
    let s = m.sig().least_sort(&t).map_err(|source| ModuleError::Sort { module: p.id.clone(), span: p.span, source })?;
    Ok((t, s))
}

/// Children of `p` under splitter `s`.
pub fn split_cases(base: &FlatModule, p: &Passage, s: &Splitter) -> Result<Vec<SplitCase>, ProofError> {
    let m = p.module(base)?;
    let mut out = Vec::new();
    match s {
        Splitter::Bool(text) => {
            let (_, sort) = parse_in(&m, p, text)?;
            if !m.sig().leq(&sort, &Sort::bool()) {
                return Err(ProofError::NotBool { passage: p.id.clone(), term: text.clone(), sort: sort.to_string() });
            }
            for v in ["true", "false"] {
                let label = format!("{}={v}", compact(text));
                let mut c = p.child(&label);
                c.assume(&format!("({text}) = {v}"))?;
                out.push(SplitCase { key: v.to_string(), label, passage: c });
            }
        }
        Splitter::Enum(text) => {
            let (_, sort) = parse_in(&m, p, text)?;
            let consts = m.enumerate(&sort).ok_or_else(|| ProofError::NotEnumerable {
                passage: p.id.clone(),
                term: text.clone(),
                sort: sort.to_string(),
            })?;
            for k in consts {
                let label = format!("{}={k}", compact(text));
                let mut c = p.child(&label);
                c.assume(&format!("{text} = {k}"))?;
                out.push(SplitCase { key: k.to_string(), label, passage: c });
            }
        }
        Splitter::Eq { cases, .. } => {
            for (i, eqs) in cases.iter().enumerate() {
                let label = eqs.iter().map(|e| compact(e)).collect::<Vec<_>>().join(",");
                let label = if label.is_empty() { format!("case{}", i + 1) } else { label };
                let mut c = p.child(&label);
                for e in eqs {
                    c.assume(e)?;
                }
                out.push(SplitCase { key: (i + 1).to_string(), label, passage: c });
            }
        }
    }
    Ok(out)
}

fn compact(text: &str) -> String {
    let t = text.trim();
    let t = t.strip_prefix("eq ").unwrap_or(t);
    let t = t.strip_suffix('.').unwrap_or(t);
    t.split_whitespace().collect::<Vec<_>>().join(" ")
}
