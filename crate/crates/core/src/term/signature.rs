use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::Signed;
use thiserror::Error;

use super::{Attrs, Op, OpSym, Sort, Term};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown operator `{name}` with {arity} argument(s)")]
    UnknownOperator { name: String, arity: usize },
    #[error("argument {position} of `{op}` has sort {found}, which is not below {expected}")]
    SortMismatch { op: String, position: usize, expected: String, found: String },
    #[error("subsort declaration {lower} < {upper} creates a cycle")]
    SubsortCycle { lower: String, upper: String },
    #[error("operator `{name}`/{arity} redeclared with coarity {new} (was {existing})")]
    DuplicateOperator { name: String, arity: usize, existing: String, new: String },
    #[error("operator `{name}`: {reason}")]
    BadAttributes { name: String, reason: String },
    #[error("sorts {0} and {1} have no least common supersort")]
    NoJoin(String, String),
    #[error("variable `{name}` has sort {sort} but is bound to a term of sort {found}")]
    BindingSort { name: String, sort: String, found: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortInfo {
    /// Declared with `*[ ]*`; annotation only.
    pub hidden: bool,
    /// Name of the declaring module.
    pub module: Arc<str>,
}

/// Reflexive-transitive closure of the declared subsort pairs.
#[derive(Clone, Debug, Default)]
pub struct SubsortOrder {
    pairs: BTreeSet<(Sort, Sort)>,
    uppers: HashMap<Sort, BTreeSet<Sort>>,
    component: HashMap<Sort, usize>,
}

impl SubsortOrder {
    pub fn pairs(&self) -> impl Iterator<Item = &(Sort, Sort)> {
        self.pairs.iter()
    }

    fn add_sort(&mut self, s: &Sort) {
        self.uppers.entry(s.clone()).or_insert_with(|| BTreeSet::from([s.clone()]));
        if !self.component.contains_key(s) {
            let id = self.component.len();
            self.component.insert(s.clone(), id);
        }
    }

    fn add(&mut self, lower: &Sort, upper: &Sort) -> Result<(), SortError> {
        if lower == upper {
            return Ok(());
        }
        self.add_sort(lower);
        self.add_sort(upper);
        if self.leq(upper, lower) {
            return Err(SortError::SubsortCycle {
                lower: lower.to_string(),
                upper: upper.to_string(),
            });
        }
        self.pairs.insert((lower.clone(), upper.clone()));
        let above: BTreeSet<Sort> = self.uppers[upper].clone();
        let below: Vec<Sort> = self
            .uppers
            .iter()
            .filter(|(_, ups)| ups.contains(lower))
            .map(|(s, _)| s.clone())
            .collect();
        for s in below {
            self.uppers.get_mut(&s).unwrap().extend(above.iter().cloned());
        }
        let (a, b) = (self.component[lower], self.component[upper]);
        if a != b {
            for id in self.component.values_mut() {
                if *id == b {
                    *id = a;
                }
            }
        }
        Ok(())
    }

    pub fn leq(&self, lower: &Sort, upper: &Sort) -> bool {
        if lower == upper || upper.is_universal() {
            return true;
        }
        self.uppers.get(lower).is_some_and(|u| u.contains(upper))
    }

    pub fn same_component(&self, a: &Sort, b: &Sort) -> bool {
        a == b
            || a.is_universal()
            || b.is_universal()
            || matches!((self.component.get(a), self.component.get(b)), (Some(x), Some(y)) if x == y)
    }

    /// Least common supersort, when unique.
    pub fn join(&self, a: &Sort, b: &Sort) -> Option<Sort> {
        if self.leq(a, b) {
            return Some(b.clone());
        }
        if self.leq(b, a) {
            return Some(a.clone());
        }
        let ua = self.uppers.get(a)?;
        let ub = self.uppers.get(b)?;
        let common: Vec<&Sort> = ua.intersection(ub).collect();
        let minimal: Vec<&Sort> = common
            .iter()
            .filter(|s| !common.iter().any(|t| t != *s && self.leq(t, s)))
            .copied()
            .collect();
        match minimal.as_slice() {
            [one] => Some((*one).clone()),
            _ => None,
        }
    }
}

/// How a polymorphic builtin is sort-checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Poly {
    None,
    /// `_=_`: both arguments in one connected component.
    Equality,
    /// `if_then_else_fi`: Bool condition, result is the join of the branches.
    IfThenElse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub arity: Vec<Sort>,
    pub coarity: Sort,
    /// Declared with `bop`.
    pub behavioral: bool,
    pub module: Arc<str>,
}

#[derive(Clone, Debug)]
pub struct OpFamily {
    pub sym: Op,
    pub decls: Vec<OpDecl>,
    pub poly: Poly,
}

impl OpFamily {
    pub fn coarity(&self) -> &Sort {
        &self.decls[0].coarity
    }
}

/// A flattened order-sorted signature.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    sorts: BTreeMap<Sort, SortInfo>,
    order: SubsortOrder,
    /// Families by name, one per arity.
    ops: HashMap<Arc<str>, Vec<OpFamily>>,
    op_order: Vec<(Arc<str>, usize)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, sort: Sort, info: SortInfo) {
        self.order.add_sort(&sort);
        self.sorts.entry(sort).or_insert(info);
    }

    pub fn has_sort(&self, sort: &Sort) -> bool {
        self.sorts.contains_key(sort) || sort.is_universal()
    }

    pub fn sort_info(&self, sort: &Sort) -> Option<&SortInfo> {
        self.sorts.get(sort)
    }

    pub fn sorts(&self) -> impl Iterator<Item = (&Sort, &SortInfo)> {
        self.sorts.iter()
    }

    pub fn order(&self) -> &SubsortOrder {
        &self.order
    }

    pub fn add_subsort(&mut self, lower: &Sort, upper: &Sort) -> Result<(), SortError> {
        for s in [lower, upper] {
            if !self.has_sort(s) {
                return Err(SortError::UnknownSort(s.to_string()));
            }
        }
        self.order.add(lower, upper)
    }

    pub fn leq(&self, lower: &Sort, upper: &Sort) -> bool {
        self.order.leq(lower, upper)
    }

    /// Adds one declaration to the operator family `name`/`arity`.
    pub fn add_op(&mut self, name: &str, decl: OpDecl, attrs: Attrs, poly: Poly) -> Result<Op, SortError> {
        for s in decl.arity.iter().chain(std::iter::once(&decl.coarity)) {
            if !self.has_sort(s) {
                return Err(SortError::UnknownSort(s.to_string()));
            }
        }
        let arity = decl.arity.len();
        self.check_attrs(name, &decl, attrs)?;
        if let Some(fam) = self.ops.get_mut(name).and_then(|v| v.iter_mut().find(|f| f.sym.arity() == arity)) {
            if fam.coarity() != &decl.coarity {
                return Err(SortError::DuplicateOperator {
                    name: name.to_string(),
                    arity,
                    existing: fam.coarity().to_string(),
                    new: decl.coarity.to_string(),
                });
            }
            let old = fam.sym.attrs();
            if old.structural() != attrs.structural() {
                return Err(SortError::BadAttributes {
                    name: name.to_string(),
                    reason: format!(
                        "redeclared with attributes {{{}}} (was {{{}}})",
                        attrs.structural().names().join(" "),
                        old.structural().names().join(" ")
                    ),
                });
            }
            if attrs.memo && !old.memo {
                fam.sym = OpSym::new(name, arity, Attrs { memo: true, ..old });
            }
            if !fam.decls.iter().any(|d| d.arity == decl.arity) {
                fam.decls.push(decl);
            }
            return Ok(fam.sym.clone());
        }
        let sym = OpSym::new(name, arity, attrs);
        let name: Arc<str> = Arc::from(name);
        self.ops.entry(name.clone()).or_default().push(OpFamily { sym: sym.clone(), decls: vec![decl], poly });
        self.op_order.push((name, arity));
        Ok(sym)
    }

    fn check_attrs(&self, name: &str, decl: &OpDecl, attrs: Attrs) -> Result<(), SortError> {
        let bad = |reason: &str| {
            Err(SortError::BadAttributes { name: name.to_string(), reason: reason.to_string() })
        };
        if (attrs.assoc || attrs.comm || attrs.idem) && decl.arity.len() != 2 {
            return bad("assoc/comm/idem need a binary operator");
        }
        if attrs.idem && !(attrs.assoc && attrs.comm) {
            return bad("idem is only supported together with assoc and comm");
        }
        if attrs.assoc {
            let (a, b, c) = (&decl.arity[0], &decl.arity[1], &decl.coarity);
            let share = self.order.join(a, b).and_then(|j| self.order.join(&j, c)).is_some();
            if !share {
                return bad("assoc needs argument sorts and coarity with a common supersort");
            }
        }
        Ok(())
    }

    pub fn family(&self, name: &str, arity: usize) -> Option<&OpFamily> {
        self.ops.get(name)?.iter().find(|f| f.sym.arity() == arity)
    }

    /// Every family, in declaration order.
    pub fn families(&self) -> impl Iterator<Item = &OpFamily> {
        self.op_order.iter().map(move |(n, a)| self.family(n, *a).unwrap())
    }

    pub fn arities(&self, name: &str) -> Vec<usize> {
        self.ops.get(name).map(|v| v.iter().map(|f| f.sym.arity()).collect()).unwrap_or_default()
    }

    pub fn has_name(&self, name: &str) -> bool {
        self.ops.contains_key(name)
    }

    /// Sort of a literal: the smallest of Nat < Int < Rat that contains it.
    pub fn literal_sort(t: &Term) -> Option<Sort> {
        match t {
            Term::Bool(_) => Some(Sort::bool()),
            Term::Rat(r) => Some(if !r.is_integer() {
                Sort::rat()
            } else if r.is_negative() {
                Sort::int()
            } else {
                Sort::nat()
            }),
            _ => None,
        }
    }

    /// Least sort without re-validating arguments; for terms already known
    /// to be well-sorted.
    pub fn sort_of(&self, t: &Term) -> Option<Sort> {
        match t {
            Term::Var(v) => Some(v.sort.clone()),
            Term::Bool(_) | Term::Rat(_) => Signature::literal_sort(t),
            Term::App(a) => {
                let fam = self.family(a.op().name(), a.op().arity())?;
                match fam.poly {
                    Poly::IfThenElse => {
                        let x = self.sort_of(&a.args()[1])?;
                        let y = self.sort_of(&a.args()[2])?;
                        self.order.join(&x, &y)
                    }
                    _ => Some(fam.coarity().clone()),
                }
            }
        }
    }

    /// Least sort, checking every argument against the declarations.
    pub fn least_sort(&self, t: &Term) -> Result<Sort, SortError> {
        match t {
            Term::Var(v) => Ok(v.sort.clone()),
            Term::Bool(_) | Term::Rat(_) => Ok(Signature::literal_sort(t).unwrap()),
            Term::App(a) => {
                let op = a.op();
                let fam = self.family(op.name(), op.arity()).ok_or_else(|| SortError::UnknownOperator {
                    name: op.name().to_string(),
                    arity: op.arity(),
                })?;
                let arg_sorts = a
                    .args()
                    .iter()
                    .map(|x| self.least_sort(x))
                    .collect::<Result<Vec<_>, _>>()?;
                self.resolve(fam, &arg_sorts)
            }
        }
    }

    /// Result sort of applying `fam` to arguments of the given least sorts.
    pub fn resolve(&self, fam: &OpFamily, arg_sorts: &[Sort]) -> Result<Sort, SortError> {
        let name = fam.sym.name();
        let mismatch = |position: usize, expected: &Sort, found: &Sort| SortError::SortMismatch {
            op: name.to_string(),
            position: position + 1,
            expected: expected.to_string(),
            found: found.to_string(),
        };
        match fam.poly {
            Poly::Equality => {
                if !self.order.same_component(&arg_sorts[0], &arg_sorts[1]) {
                    return Err(mismatch(1, &arg_sorts[0], &arg_sorts[1]));
                }
                Ok(Sort::bool())
            }
            Poly::IfThenElse => {
                if !self.leq(&arg_sorts[0], &Sort::bool()) {
                    return Err(mismatch(0, &Sort::bool(), &arg_sorts[0]));
                }
                self.order
                    .join(&arg_sorts[1], &arg_sorts[2])
                    .ok_or_else(|| SortError::NoJoin(arg_sorts[1].to_string(), arg_sorts[2].to_string()))
            }
            Poly::None => {
                // flattened assoc nodes carry more arguments than declared
                let flat = fam.sym.attrs().assoc && arg_sorts.len() > 2;
                let mut first_err = None;
                for decl in &fam.decls {
                    let ok = if flat {
                        arg_sorts.iter().enumerate().try_for_each(|(i, s)| {
                            if self.leq(s, &decl.arity[0]) || self.leq(s, &decl.arity[1]) {
                                Ok(())
                            } else {
                                Err(mismatch(i, &decl.arity[0], s))
                            }
                        })
                    } else if arg_sorts.len() != decl.arity.len() {
                        Err(SortError::UnknownOperator { name: name.to_string(), arity: arg_sorts.len() })
                    } else {
                        arg_sorts.iter().zip(&decl.arity).enumerate().try_for_each(|(i, (s, d))| {
                            if self.leq(s, d) {
                                Ok(())
                            } else {
                                Err(mismatch(i, d, s))
                            }
                        })
                    };
                    match ok {
                        Ok(()) => return Ok(decl.coarity.clone()),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                Err(first_err.unwrap())
            }
        }
    }

    /// Merges every sort, subsort and operator of `other` into `self`.
    pub fn merge(&mut self, other: &Signature) -> Result<(), SortError> {
        for (s, info) in &other.sorts {
            self.add_sort(s.clone(), info.clone());
        }
        for (lo, up) in other.order.pairs() {
            self.add_subsort(lo, up)?;
        }
        for fam in other.families() {
            for decl in &fam.decls {
                self.add_op(fam.sym.name(), decl.clone(), fam.sym.attrs(), fam.poly)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info() -> SortInfo {
        SortInfo { hidden: false, module: Arc::from("T") }
    }

    fn sig() -> Signature {
        let mut s = Signature::new();
        for n in ["Pid", "PSet", "Bool", "Label"] {
            s.add_sort(Sort::new(n), info());
        }
        s.add_subsort(&Sort::new("Pid"), &Sort::new("PSet")).unwrap();
        s
    }

    fn decl(args: &[&str], co: &str) -> OpDecl {
        OpDecl {
            arity: args.iter().map(|a| Sort::new(a)).collect(),
            coarity: Sort::new(co),
            behavioral: false,
            module: Arc::from("T"),
        }
    }

    #[test]
    fn subsort_cycle_rejected() {
        let mut s = sig();
        let err = s.add_subsort(&Sort::new("PSet"), &Sort::new("Pid")).unwrap_err();
        assert!(matches!(err, SortError::SubsortCycle { .. }));
    }

    #[test]
    fn juxtaposition_least_sort() {
        let mut s = sig();
        let j = s.add_op("_ _", decl(&["PSet", "PSet"], "PSet"), Attrs::ACI, Poly::None).unwrap();
        let p1 = s.add_op("p1", decl(&[], "Pid"), Attrs::NONE, Poly::None).unwrap();
        let p2 = s.add_op("p2", decl(&[], "Pid"), Attrs::NONE, Poly::None).unwrap();
        let t = Term::app(j, vec![Term::constant(&p1), Term::constant(&p2)]);
        assert_eq!(s.least_sort(&Term::constant(&p1)).unwrap(), Sort::new("Pid"));
        assert_eq!(s.least_sort(&t).unwrap(), Sort::new("PSet"));
    }

    #[test]
    fn argument_mismatch_reported() {
        let mut s = sig();
        let next = s.add_op("next", decl(&["Label"], "Label"), Attrs::NONE, Poly::None).unwrap();
        let p1 = s.add_op("p1", decl(&[], "Pid"), Attrs::NONE, Poly::None).unwrap();
        let bad = Term::app(next, vec![Term::constant(&p1)]);
        assert!(matches!(s.least_sort(&bad), Err(SortError::SortMismatch { .. })));
    }

    #[test]
    fn coarity_clash_is_duplicate() {
        let mut s = sig();
        s.add_op("f", decl(&["Pid"], "Pid"), Attrs::NONE, Poly::None).unwrap();
        let err = s.add_op("f", decl(&["PSet"], "Bool"), Attrs::NONE, Poly::None).unwrap_err();
        assert!(matches!(err, SortError::DuplicateOperator { .. }));
    }

    #[test]
    fn idem_requires_ac() {
        let mut s = sig();
        let err = s.add_op("_;_", decl(&["PSet", "PSet"], "PSet"), Attrs { idem: true, ..Attrs::NONE }, Poly::None);
        assert!(matches!(err, Err(SortError::BadAttributes { .. })));
    }

    #[test]
    fn unknown_operator() {
        let s = sig();
        let ghost = OpSym::new("ghost", 0, Attrs::NONE);
        assert!(matches!(s.least_sort(&Term::constant(&ghost)), Err(SortError::UnknownOperator { .. })));
    }
}
