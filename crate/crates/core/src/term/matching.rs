//! Matching modulo the structural axioms C, AC, ACI and A.
//!
//! Every function returns all solutions. Solutions are deduplicated and
//! sorted by overlap (how many subject elements an idempotent match covers
//! more than once) and then by bindings, so the first solution is the most
//! natural one.

use std::sync::Arc;

use super::{Op, Signature, Substitution, Term};

#[derive(Clone)]
struct St {
    subst: Substitution,
    overlap: usize,
}

/// A match of an AC(I) pattern against part of a subject with the same head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtMatch {
    pub subst: Substitution,
    /// Subject elements left out of the match; never empty.
    pub rest: Vec<Term>,
}

/// All matches of `pattern` against the canonical term `subject`.
pub fn match_term(sig: &Signature, pattern: &Term, subject: &Term) -> Vec<Substitution> {
    let cx = Cx { sig };
    let mut out = cx.m(pattern, subject, St { subst: Substitution::new(), overlap: 0 });
    finish(&mut out);
    out.into_iter().map(|s| s.subst).collect()
}

/// Matches an AC(I)-headed pattern against a proper sub-multiset of a
/// subject with the same head.
pub fn match_with_extension(sig: &Signature, pattern: &Term, subject: &Term) -> Vec<ExtMatch> {
    let (Term::App(p), Term::App(s)) = (pattern, subject) else {
        return Vec::new();
    };
    let op = p.op();
    if !op.attrs().is_ac() || s.op() != op {
        return Vec::new();
    }
    let cx = Cx { sig };
    let mut sols = cx.m_ac(op, p.args(), s.args(), St { subst: Substitution::new(), overlap: 0 }, true);
    sols.retain(|(_, rest)| !rest.is_empty());
    sols.sort_by(|a, b| {
        (a.0.overlap, &a.0.subst, &a.1).cmp(&(b.0.overlap, &b.0.subst, &b.1))
    });
    sols.dedup_by(|a, b| a.0.subst == b.0.subst && a.1 == b.1);
    sols.into_iter().map(|(st, rest)| ExtMatch { subst: st.subst, rest }).collect()
}

fn finish(out: &mut Vec<St>) {
    out.sort_by(|a, b| (a.overlap, &a.subst).cmp(&(b.overlap, &b.subst)));
    out.dedup_by(|a, b| a.subst == b.subst);
}

struct Cx<'a> {
    sig: &'a Signature,
}

impl Cx<'_> {
    fn bind_var(&self, name: &Arc<str>, sort: &super::Sort, value: Term, mut st: St) -> Option<St> {
        if let Some(old) = st.subst.get(name) {
            return (old == &value).then_some(st);
        }
        let found = self.sig.sort_of(&value)?;
        if !self.sig.leq(&found, sort) {
            return None;
        }
        st.subst.bind(name.clone(), value);
        Some(st)
    }

    fn m(&self, p: &Term, t: &Term, st: St) -> Vec<St> {
        match p {
            Term::Var(v) => self.bind_var(&v.name, &v.sort, t.clone(), st).into_iter().collect(),
            Term::Rat(_) | Term::Bool(_) => {
                if p == t {
                    vec![st]
                } else {
                    Vec::new()
                }
            }
            Term::App(pa) => {
                let op = pa.op();
                let attrs = op.attrs();
                if attrs.assoc {
                    let elems = t.elements_of(op);
                    if attrs.comm {
                        return self.m_ac(op, pa.args(), &elems, st, false).into_iter().map(|x| x.0).collect();
                    }
                    return self.m_seq_assoc(op, pa.args(), &elems, st);
                }
                let Term::App(ta) = t else { return Vec::new() };
                if ta.op() != op || ta.args().len() != pa.args().len() {
                    return Vec::new();
                }
                let (pargs, targs) = (pa.args(), ta.args());
                if attrs.comm && pargs.len() == 2 {
                    let mut out = self.m_args(pargs, targs, st.clone());
                    let swapped = [targs[1].clone(), targs[0].clone()];
                    out.extend(self.m_args(pargs, &swapped, st));
                    return out;
                }
                self.m_args(pargs, targs, st)
            }
        }
    }

    fn m_args(&self, ps: &[Term], ts: &[Term], st: St) -> Vec<St> {
        let mut states = vec![st];
        for (p, t) in ps.iter().zip(ts) {
            let mut next = Vec::new();
            for s in states {
                next.extend(self.m(p, t, s));
            }
            if next.is_empty() {
                return next;
            }
            states = next;
        }
        states
    }

    fn value_of(&self, op: &Op, elems: Vec<Term>) -> Term {
        if elems.len() == 1 {
            elems.into_iter().next().unwrap()
        } else {
            Term::app(op.clone(), elems)
        }
    }

    /// AC and ACI matching. With `ext`, unmatched subject elements are
    /// returned as the rest instead of failing the match.
    fn m_ac(&self, op: &Op, pel: &[Term], sel: &[Term], st: St, ext: bool) -> Vec<(St, Vec<Term>)> {
        if sel.len() > 63 {
            return Vec::new();
        }
        // non-variables first so that they can bind variables for the rest
        let mut order: Vec<&Term> = pel.iter().filter(|p| !matches!(p, Term::Var(_))).collect();
        order.extend(pel.iter().filter(|p| matches!(p, Term::Var(_))));
        let idem = op.attrs().idem;
        if !ext && !idem && order.len() > sel.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let job = AcJob { op, order: &order, sel, ext, idem, full: (1u64 << sel.len()) - 1 };
        self.ac_rec(&job, 0, st, 0, &mut out);
        out
    }

    fn ac_rec(&self, job: &AcJob, i: usize, st: St, used: u64, out: &mut Vec<(St, Vec<Term>)>) {
        let full = job.full;
        if i == job.order.len() {
            if used == full || job.ext {
                let rest = (0..job.sel.len())
                    .filter(|j| used & (1 << j) == 0)
                    .map(|j| job.sel[j].clone())
                    .collect();
                out.push((st, rest));
            }
            return;
        }
        let last = i + 1 == job.order.len();
        match job.order[i] {
            Term::Var(v) if st.subst.get(&v.name).is_some() => {
                let value = st.subst.get(&v.name).unwrap().clone();
                let mut used2 = used;
                let mut overlap = 0;
                for e in value.elements_of(job.op) {
                    let free = (0..job.sel.len()).find(|&j| used2 & (1 << j) == 0 && job.sel[j] == e);
                    match free {
                        Some(j) => used2 |= 1 << j,
                        None if job.idem => match job.sel.iter().position(|x| *x == e) {
                            Some(_) => overlap += 1,
                            None => return,
                        },
                        None => return,
                    }
                }
                let st = St { overlap: st.overlap + overlap, ..st };
                self.ac_rec(job, i + 1, st, used2, out);
            }
            Term::Var(v) => {
                let must = full & !used;
                let candidates: Vec<u64> = if !job.idem && last && !job.ext {
                    // the last variable takes everything that is left
                    vec![must]
                } else {
                    let avail = if job.idem { full } else { must };
                    let mut subs = Vec::new();
                    let mut sub = avail;
                    while sub != 0 {
                        if !(last && !job.ext) || sub & must == must {
                            subs.push(sub);
                        }
                        sub = (sub - 1) & avail;
                    }
                    subs
                };
                for sub in candidates.into_iter().filter(|&s| s != 0) {
                    let elems: Vec<Term> = (0..job.sel.len())
                        .filter(|j| sub & (1 << j) != 0)
                        .map(|j| job.sel[j].clone())
                        .collect();
                    let value = self.value_of(job.op, elems);
                    if let Some(mut st2) = self.bind_var(&v.name, &v.sort, value, st.clone()) {
                        st2.overlap += (sub & used).count_ones() as usize;
                        self.ac_rec(job, i + 1, st2, used | sub, out);
                    }
                }
            }
            p => {
                for j in 0..job.sel.len() {
                    let bit = 1u64 << j;
                    if used & bit != 0 && !job.idem {
                        continue;
                    }
                    let extra = usize::from(used & bit != 0);
                    for mut st2 in self.m(p, &job.sel[j], st.clone()) {
                        st2.overlap += extra;
                        self.ac_rec(job, i + 1, st2, used | bit, out);
                    }
                }
            }
        }
    }

    /// Matching modulo associativity alone: each pattern element takes a
    /// nonempty contiguous segment.
    fn m_seq_assoc(&self, op: &Op, pel: &[Term], sel: &[Term], st: St) -> Vec<St> {
        let mut out = Vec::new();
        self.seq_rec(op, pel, sel, st, &mut out);
        out
    }

    fn seq_rec(&self, op: &Op, pel: &[Term], sel: &[Term], st: St, out: &mut Vec<St>) {
        let Some((p, prest)) = pel.split_first() else {
            if sel.is_empty() {
                out.push(st);
            }
            return;
        };
        if sel.len() < pel.len() {
            return;
        }
        let max = if matches!(p, Term::Var(_)) { sel.len() - prest.len() } else { 1 };
        for k in 1..=max {
            let value = self.value_of(op, sel[..k].to_vec());
            for st2 in self.m(p, &value, st.clone()) {
                self.seq_rec(op, prest, &sel[k..], st2, out);
            }
        }
    }
}

struct AcJob<'a> {
    op: &'a Op,
    order: &'a [&'a Term],
    sel: &'a [Term],
    ext: bool,
    idem: bool,
    full: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Attrs, OpDecl, Poly, Sort, SortInfo};

    fn setup() -> (Signature, Op, Vec<Term>) {
        let mut sig = Signature::new();
        let info = SortInfo { hidden: false, module: Arc::from("T") };
        sig.add_sort(Sort::new("Pid"), info.clone());
        sig.add_sort(Sort::new("PSet"), info);
        sig.add_subsort(&Sort::new("Pid"), &Sort::new("PSet")).unwrap();
        let d = |a: &[&str], c: &str| OpDecl {
            arity: a.iter().map(|x| Sort::new(x)).collect(),
            coarity: Sort::new(c),
            behavioral: false,
            module: Arc::from("T"),
        };
        let j = sig.add_op("_ _", d(&["PSet", "PSet"], "PSet"), Attrs::ACI, Poly::None).unwrap();
        let ps = ["p1", "p2", "p3"]
            .iter()
            .map(|n| Term::constant(&sig.add_op(n, d(&[], "Pid"), Attrs::NONE, Poly::None).unwrap()))
            .collect();
        (sig, j, ps)
    }

    #[test]
    fn aci_membership_pattern() {
        let (sig, j, p) = setup();
        let pat = Term::app(j.clone(), vec![Term::var("P", Sort::new("Pid")), Term::var("PS", Sort::new("PSet"))]);
        let subj = Term::app(j, p.clone());
        let sols = match_term(&sig, &pat, &subj);
        // without overlap: 3 choices of P; with overlap: PS may also contain P
        assert_eq!(sols.len(), 6);
        assert_eq!(sols[0].get("P"), Some(&p[0]));
        assert_eq!(sols[0].get("PS").unwrap().to_string(), "p2 p3");
    }

    #[test]
    fn aci_overlap_on_singleton_subject() {
        let (sig, j, p) = setup();
        let pat = Term::app(j, vec![Term::var("X", Sort::new("PSet")), Term::var("Y", Sort::new("PSet"))]);
        let sols = match_term(&sig, &pat, &p[1]);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].get("X"), Some(&p[1]));
    }

    #[test]
    fn variable_sort_is_respected() {
        let (sig, j, p) = setup();
        let subj = Term::app(j, vec![p[0].clone(), p[1].clone()]);
        assert!(match_term(&sig, &Term::var("P", Sort::new("Pid")), &subj).is_empty());
        assert_eq!(match_term(&sig, &Term::var("S", Sort::new("PSet")), &subj).len(), 1);
    }

    #[test]
    fn extension_leaves_rest() {
        let (sig, j, p) = setup();
        let pat = Term::app(j.clone(), vec![p[0].clone(), p[1].clone()]);
        let subj = Term::app(j, p.clone());
        let ext = match_with_extension(&sig, &pat, &subj);
        assert_eq!(ext.len(), 1);
        assert_eq!(ext[0].rest, vec![p[2].clone()]);
    }

    #[test]
    fn comm_tries_both_orders() {
        let (mut sig, _, p) = setup();
        let eq = sig
            .add_op(
                "_=_",
                OpDecl {
                    arity: vec![Sort::universal(), Sort::universal()],
                    coarity: Sort::new("Pid"),
                    behavioral: false,
                    module: Arc::from("T"),
                },
                Attrs::COMM,
                Poly::Equality,
            )
            .unwrap();
        let pat = Term::app(eq.clone(), vec![p[2].clone(), Term::var("X", Sort::new("Pid"))]);
        let subj = Term::app(eq, vec![p[2].clone(), p[0].clone()]);
        let sols = match_term(&sig, &pat, &subj);
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].get("X"), Some(&p[0]));
    }
}
