//! Boolean-ring normal forms.
//!
//! A propositional term is rewritten to a polynomial over GF(2): an
//! exclusive-or of conjunctions of atoms. Atoms are the maximal subterms
//! whose head is not a connective. Two formulas are equivalent over their
//! atoms exactly when their polynomials coincide, so the normal form
//! decides tautologies.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::term::{Attrs, Op, OpSym, Term};

struct Ops {
    and: Op,
    xor: Op,
}

fn ops() -> &'static Ops {
    static OPS: OnceLock<Ops> = OnceLock::new();
    OPS.get_or_init(|| Ops { and: OpSym::new("_and_", 2, Attrs::ACI), xor: OpSym::new("_xor_", 2, Attrs::AC) })
}

/// Is `op` one of the propositional connectives?
pub fn is_connective(op: &OpSym) -> bool {
    op.arity() <= 2 && matches!(op.name(), "_and_" | "_or_" | "_xor_" | "_implies_" | "not_")
}

/// Monomial: sorted atom ids. The empty monomial is `true`.
type Mono = Vec<u32>;

/// Sorted list of distinct monomials; empty is `false`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<Mono>);

impl Poly {
    fn zero() -> Poly {
        Poly(Vec::new())
    }

    fn one() -> Poly {
        Poly(vec![Vec::new()])
    }

    fn atom(id: u32) -> Poly {
        Poly(vec![vec![id]])
    }

    fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly(out)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut prods: Vec<Mono> = Vec::with_capacity(self.0.len() * other.0.len());
        for x in &self.0 {
            for y in &other.0 {
                prods.push(union(x, y));
            }
        }
        prods.sort_unstable();
        let mut out: Vec<Mono> = Vec::with_capacity(prods.len());
        let mut k = 0;
        while k < prods.len() {
            let mut n = 1;
            while k + n < prods.len() && prods[k + n] == prods[k] {
                n += 1;
            }
            if n % 2 == 1 {
                out.push(std::mem::take(&mut prods[k]));
            }
            k += n;
        }
        Poly(out)
    }
}

fn union(x: &[u32], y: &[u32]) -> Mono {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(x[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

#[derive(Default)]
struct Atoms {
    terms: Vec<Term>,
    ids: HashMap<Term, u32>,
}

impl Atoms {
    fn id(&mut self, t: &Term) -> u32 {
        if let Some(&i) = self.ids.get(t) {
            return i;
        }
        let i = self.terms.len() as u32;
        self.terms.push(t.clone());
        self.ids.insert(t.clone(), i);
        i
    }
}

fn poly(t: &Term, atoms: &mut Atoms) -> Poly {
    match t {
        Term::Bool(true) => return Poly::one(),
        Term::Bool(false) => return Poly::zero(),
        _ => {}
    }
    let Some(op) = t.head().filter(|op| is_connective(op)) else {
        return Poly::atom(atoms.id(t));
    };
    let args = t.args();
    match op.name() {
        "not_" => poly(&args[0], atoms).add(&Poly::one()),
        "_and_" => args.iter().fold(Poly::one(), |acc, a| acc.mul(&poly(a, atoms))),
        "_xor_" => args.iter().fold(Poly::zero(), |acc, a| acc.add(&poly(a, atoms))),
        "_or_" => args.iter().fold(Poly::zero(), |acc, a| {
            let b = poly(a, atoms);
            acc.mul(&b).add(&acc).add(&b)
        }),
        "_implies_" => {
            let a = poly(&args[0], atoms);
            let b = poly(&args[1], atoms);
            a.mul(&b).add(&a).add(&Poly::one())
        }
        _ => unreachable!(),
    }
}

fn term_of(p: &Poly, atoms: &Atoms) -> Term {
    let o = ops();
    let mut monos: Vec<Term> = p
        .0
        .iter()
        .map(|m| match m.as_slice() {
            [] => Term::Bool(true),
            [one] => atoms.terms[*one as usize].clone(),
            many => Term::app(o.and.clone(), many.iter().map(|i| atoms.terms[*i as usize].clone()).collect()),
        })
        .collect();
    match monos.len() {
        0 => Term::Bool(false),
        1 => monos.pop().unwrap(),
        _ => Term::app(o.xor.clone(), monos),
    }
}

/// Normal form of a Bool-sorted term whose atoms are already normal.
pub fn bool_normalize(t: &Term) -> Term {
    let mut atoms = Atoms::default();
    let p = poly(t, &mut atoms);
    term_of(&p, &atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Sort;

    fn atom(n: &str) -> Term {
        Term::constant(&OpSym::new(n, 0, Attrs::NONE))
    }

    fn op(n: &str, args: Vec<Term>) -> Term {
        let attrs = match n {
            "_and_" | "_or_" => Attrs::ACI,
            "_xor_" => Attrs::AC,
            _ => Attrs::NONE,
        };
        let arity = if n == "not_" { 1 } else { 2 };
        Term::app(OpSym::new(n, arity, attrs), args)
    }

    #[test]
    fn tautology_and_contradiction() {
        let a = atom("a");
        assert_eq!(bool_normalize(&op("_implies_", vec![a.clone(), a.clone()])), Term::Bool(true));
        let na = op("not_", vec![a.clone()]);
        assert_eq!(bool_normalize(&op("_and_", vec![a.clone(), na])), Term::Bool(false));
    }

    #[test]
    fn de_morgan() {
        let (a, b) = (atom("a"), atom("b"));
        let lhs = op("not_", vec![op("_and_", vec![a.clone(), b.clone()])]);
        let rhs = op("_or_", vec![op("not_", vec![a]), op("not_", vec![b])]);
        assert_eq!(bool_normalize(&lhs), bool_normalize(&rhs));
    }

    #[test]
    fn normal_form_is_fixpoint() {
        let (a, b, c) = (atom("a"), atom("b"), Term::var("C", Sort::bool()));
        let t = op("_or_", vec![a, op("_implies_", vec![b, c])]);
        let n = bool_normalize(&t);
        assert_eq!(bool_normalize(&n), n);
    }
}
