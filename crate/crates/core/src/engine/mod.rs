//! Leftmost-innermost conditional rewriting.
//!
//! At each node the arguments are normalized first. At the root, built-ins
//! are tried before rules, and rules are tried in priority order with the
//! first applicable match winning. A conditional rule applies only when its
//! instantiated condition reduces to literal `true`; condition reductions
//! share the step budget with the main reduction.

pub mod boolring;
pub mod builtin;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

pub use boolring::bool_normalize;
pub use builtin::eval_builtin;

use crate::module::FlatModule;
use crate::term::{match_term, match_with_extension, Term};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Rule applications plus built-in steps.
    pub steps: u64,
    pub builtin_steps: u64,
    pub memo_hits: u64,
    pub conditions: u64,
    pub condition_failures: u64,
}

/// Result of one reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub term: Term,
    /// The budget ran out before a normal form was reached.
    pub exhausted: bool,
    pub steps: u64,
}

/// Rewriting state for one module: memo table, normal-form cache and
/// step budget.
pub struct Rewriter<'m> {
    module: &'m FlatModule,
    budget: u64,
    use_memo: bool,
    memo: HashMap<Term, Term>,
    normal: HashSet<Term>,
    stats: Stats,
    /// Steps taken by the current `reduce` call.
    used: u64,
    exhausted: bool,
}

impl<'m> Rewriter<'m> {
    pub fn new(module: &'m FlatModule) -> Rewriter<'m> {
        Rewriter {
            module,
            budget: DEFAULT_BUDGET,
            use_memo: true,
            memo: HashMap::new(),
            normal: HashSet::new(),
            stats: Stats::default(),
            used: 0,
            exhausted: false,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Ignore `memo` attributes.
    pub fn without_memo(mut self) -> Self {
        self.use_memo = false;
        self
    }

    pub fn module(&self) -> &FlatModule {
        self.module
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// Reduces `t` to normal form, or until the budget runs out.
    pub fn reduce(&mut self, t: &Term) -> NormalForm {
        self.used = 0;
        self.exhausted = false;
        let term = self.norm(t);
        NormalForm { term, exhausted: self.exhausted, steps: self.used }
    }

    fn tick(&mut self) {
        self.used += 1;
        self.stats.steps += 1;
        if self.used >= self.budget {
            self.exhausted = true;
        }
    }

    fn memo_head(&self, t: &Term) -> bool {
        self.use_memo && t.head().is_some_and(|op| self.module.is_memo(op))
    }

    fn norm(&mut self, t: &Term) -> Term {
        if !matches!(t, Term::App(_)) || self.exhausted || self.normal.contains(t) {
            return t.clone();
        }
        let mut pending = Vec::new();
        if self.memo_head(t) {
            if let Some(r) = self.memo.get(t) {
                self.stats.memo_hits += 1;
                return r.clone();
            }
            pending.push(t.clone());
        }
        let mut cur = self.norm_args(t);
        loop {
            if self.exhausted {
                return cur;
            }
            if !cur.ptr_eq(t) && self.memo_head(&cur) {
                if let Some(r) = self.memo.get(&cur) {
                    self.stats.memo_hits += 1;
                    cur = r.clone();
                    break;
                }
                pending.push(cur.clone());
            }
            match self.step(&cur) {
                None => break,
                Some(next) => {
                    if !matches!(next, Term::App(_)) || self.normal.contains(&next) {
                        cur = next;
                        break;
                    }
                    cur = self.norm_args(&next);
                }
            }
        }
        if !self.exhausted {
            self.normal.insert(cur.clone());
            for k in pending {
                self.memo.insert(k, cur.clone());
            }
        }
        cur
    }

    fn norm_args(&mut self, t: &Term) -> Term {
        let Term::App(a) = t else { return t.clone() };
        if a.args().is_empty() {
            return t.clone();
        }
        let mut changed = false;
        let args: Vec<Term> = a
            .args()
            .iter()
            .map(|x| {
                let y = self.norm(x);
                changed |= !y.ptr_eq(x) && y != *x;
                y
            })
            .collect();
        if changed {
            Term::app(a.op().clone(), args)
        } else {
            t.clone()
        }
    }

    /// One rewrite at the root of a term whose arguments are normal.
    fn step(&mut self, t: &Term) -> Option<Term> {
        let Term::App(a) = t else { return None };
        let op = a.op();
        let sig = self.module.sig();
        if let Some(v) = eval_builtin(sig, op, a.args()) {
            self.stats.builtin_steps += 1;
            self.tick();
            return Some(v);
        }
        if boolring::is_connective(op) {
            let v = bool_normalize(t);
            if v == *t {
                return None;
            }
            self.stats.builtin_steps += 1;
            self.tick();
            if matches!(v, Term::App(_)) {
                self.normal.insert(v.clone());
            }
            return Some(v);
        }
        let module = self.module;
        for &ri in module.rules_for(op) {
            let rule = &module.rules()[ri];
            for s in match_term(sig, &rule.lhs, t) {
                if self.condition_holds(rule.cond.as_ref(), &s) {
                    self.tick();
                    return Some(s.apply(&rule.rhs));
                }
                if self.exhausted {
                    return None;
                }
            }
            if op.attrs().is_ac() {
                for m in match_with_extension(sig, &rule.lhs, t) {
                    if self.condition_holds(rule.cond.as_ref(), &m.subst) {
                        self.tick();
                        let mut args = m.rest;
                        args.push(m.subst.apply(&rule.rhs));
                        return Some(Term::app(op.clone(), args));
                    }
                    if self.exhausted {
                        return None;
                    }
                }
            }
        }
        None
    }

    fn condition_holds(&mut self, cond: Option<&Term>, s: &crate::term::Substitution) -> bool {
        let Some(c) = cond else { return true };
        self.stats.conditions += 1;
        let r = self.norm(&s.apply(c));
        let ok = r == Term::Bool(true);
        if !ok {
            self.stats.condition_failures += 1;
        }
        ok
    }
}

/// Reduces with a fresh rewriter and the default budget.
pub fn reduce(module: &FlatModule, t: &Term) -> NormalForm {
    Rewriter::new(module).reduce(t)
}

/// Runs `f` on a thread with a large stack; deep state terms recurse deeply.
pub fn with_large_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(1 << 29)
            .spawn_scoped(s, f)
            .expect("spawn reduction thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
