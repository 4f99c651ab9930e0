//! Evaluation of the BOOL and RAT built-ins on canonical arguments.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::boolring;
use crate::term::{Attrs, Op, OpSym, Signature, Sort, Term};

fn rat(t: &Term) -> Option<&BigRational> {
    t.as_rat()
}

fn is_bool(sig: &Signature, t: &Term) -> bool {
    sig.sort_of(t).is_some_and(|s| sig.leq(&s, &Sort::bool()))
}

/// Folds the literal elements of a flattened `+` or `*` node.
fn fold(op: &Op, args: &[Term], unit: BigRational, combine: fn(&BigRational, &BigRational) -> BigRational) -> Option<Term> {
    let lits: Vec<&BigRational> = args.iter().filter_map(rat).collect();
    let absorbing = op.name() == "_*_" && lits.iter().any(|r| r.is_zero());
    if absorbing {
        return Some(Term::rat(BigRational::zero()));
    }
    if lits.len() < 2 && !(lits.len() == 1 && *lits[0] == unit) {
        return None;
    }
    let value = lits.into_iter().fold(unit.clone(), |acc, r| combine(&acc, r));
    let mut rest: Vec<Term> = args.iter().filter(|a| a.as_rat().is_none()).cloned().collect();
    if rest.is_empty() {
        return Some(Term::rat(value));
    }
    if value != unit {
        rest.push(Term::rat(value));
    }
    Some(if rest.len() == 1 { rest.pop().unwrap() } else { Term::app(op.clone(), rest) })
}

/// Result of one built-in step at the root, or `None` when the arguments
/// are symbolic.
pub fn eval_builtin(sig: &Signature, op: &Op, args: &[Term]) -> Option<Term> {
    match (op.name(), args) {
        ("_+_", _) => fold(op, args, BigRational::zero(), |a, b| a + b),
        ("_*_", _) => fold(op, args, BigRational::one(), |a, b| a * b),
        ("-_", [x]) => {
            if let Some(r) = rat(x) {
                return Some(Term::rat(-r));
            }
            match x {
                Term::App(a) if a.op().name() == "-_" && a.args().len() == 1 => Some(a.args()[0].clone()),
                _ => None,
            }
        }
        ("_<=_", [x, y]) => Some(Term::Bool(rat(x)? <= rat(y)?)),
        ("_<_", [x, y]) => Some(Term::Bool(rat(x)? < rat(y)?)),
        ("_>=_", [x, y]) => Some(Term::Bool(rat(x)? >= rat(y)?)),
        ("_>_", [x, y]) => Some(Term::Bool(rat(x)? > rat(y)?)),
        ("_=_", [x, y]) => {
            if x == y {
                Some(Term::Bool(true))
            } else if x.is_literal() && y.is_literal() {
                Some(Term::Bool(false))
            } else if is_bool(sig, x) && is_bool(sig, y) {
                let eq = Term::app(OpSym::new("_xor_", 2, Attrs::AC), vec![x.clone(), y.clone(), Term::Bool(true)]);
                Some(boolring::bool_normalize(&eq))
            } else {
                None
            }
        }
        ("if_then_else_fi", [c, a, b]) => match c.as_bool() {
            Some(true) => Some(a.clone()),
            Some(false) => Some(b.clone()),
            None if a == b => Some(a.clone()),
            None => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::builtins;

    fn r(n: i64, d: i64) -> Term {
        Term::rat(BigRational::new(n.into(), d.into()))
    }

    fn plus() -> Op {
        builtins::signature().unwrap().family("_+_", 2).unwrap().sym.clone()
    }

    #[test]
    fn rational_sum() {
        let sig = builtins::signature().unwrap();
        assert_eq!(eval_builtin(&sig, &plus(), &[r(1, 2), r(3, 4)]), Some(r(5, 4)));
        assert_eq!(eval_builtin(&sig, &plus(), &[r(10, 1), r(-5, 1)]), Some(r(5, 1)));
    }

    #[test]
    fn comparisons_need_literals() {
        let sig = builtins::signature().unwrap();
        let le = sig.family("_<=_", 2).unwrap().sym.clone();
        assert_eq!(eval_builtin(&sig, &le, &[r(5, 1), r(5, 1)]), Some(Term::Bool(true)));
        let x = Term::var("X", Sort::rat());
        assert_eq!(eval_builtin(&sig, &le, &[x, r(5, 1)]), None);
    }
}
