//! Order-sorted terms.
//!
//! Terms are immutable and cheap to clone. Applications cache their hash so
//! that memo tables and normal-form caches stay fast on deep state terms.

mod matching;
mod signature;
mod subst;

pub use matching::{match_term, match_with_extension, ExtMatch};
pub use signature::{OpDecl, OpFamily, Poly, Signature, SortError, SortInfo, SubsortOrder};
pub use subst::Substitution;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::BigRational;
use crate::rat;

/// A sort name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Sort {
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Pseudo-sort accepted by the polymorphic builtins `_=_` and
    /// `if_then_else_fi`; every sort is below it.
    pub fn universal() -> Sort {
        Sort::new("*Universal*")
    }

    pub fn is_universal(&self) -> bool {
        &*self.0 == "*Universal*"
    }

    pub fn bool() -> Sort {
        Sort::new("Bool")
    }
    pub fn nat() -> Sort {
        Sort::new("Nat")
    }
    pub fn int() -> Sort {
        Sort::new("Int")
    }
    pub fn rat() -> Sort {
        Sort::new("Rat")
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Equational and operational operator attributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Attrs {
    pub assoc: bool,
    pub comm: bool,
    pub idem: bool,
    pub memo: bool,
}

impl Attrs {
    pub const NONE: Attrs = Attrs { assoc: false, comm: false, idem: false, memo: false };
    pub const COMM: Attrs = Attrs { assoc: false, comm: true, idem: false, memo: false };
    pub const AC: Attrs = Attrs { assoc: true, comm: true, idem: false, memo: false };
    pub const ACI: Attrs = Attrs { assoc: true, comm: true, idem: true, memo: false };

    pub fn is_ac(&self) -> bool {
        self.assoc && self.comm
    }

    /// Attributes that change the equality of terms (everything but memo).
    pub fn structural(&self) -> Attrs {
        Attrs { memo: false, ..*self }
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.assoc {
            out.push("assoc");
        }
        if self.comm {
            out.push("comm");
        }
        if self.idem {
            out.push("idem");
        }
        if self.memo {
            out.push("memo");
        }
        out
    }
}

/// An operator symbol. Identity is the mixfix name together with the
/// declared arity; attributes travel with the symbol so that terms can be
/// canonicalized without consulting a signature.
#[derive(Clone)]
pub struct OpSym {
    name: Arc<str>,
    arity: usize,
    attrs: Attrs,
}

pub type Op = Arc<OpSym>;

impl OpSym {
    pub fn new(name: &str, arity: usize, attrs: Attrs) -> Op {
        Arc::new(OpSym { name: Arc::from(name), arity, attrs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn attrs(&self) -> Attrs {
        self.attrs
    }

    /// True when the name carries `_` argument placeholders.
    pub fn is_mixfix(&self) -> bool {
        self.name.contains('_')
    }

    pub fn key(&self) -> (&str, usize) {
        (&self.name, self.arity)
    }
}

impl PartialEq for OpSym {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.name == other.name
    }
}
impl Eq for OpSym {}

impl Hash for OpSym {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.arity.hash(state);
    }
}

impl PartialOrd for OpSym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpSym {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name).then(self.arity.cmp(&other.arity))
    }
}

impl fmt::Debug for OpSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: Arc<str>,
    pub sort: Sort,
}

pub struct App {
    op: Op,
    args: Box<[Term]>,
    hash: u64,
}

impl App {
    pub fn op(&self) -> &Op {
        &self.op
    }
    pub fn args(&self) -> &[Term] {
        &self.args
    }
}

/// A term over an order-sorted signature.
#[derive(Clone)]
pub enum Term {
    Var(Arc<Variable>),
    App(Arc<App>),
    /// Exact rational literal; `BigRational` keeps it in lowest terms.
    Rat(Arc<BigRational>),
    Bool(bool),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Arc::new(Variable { name: Arc::from(name), sort }))
    }

    pub fn rat(value: BigRational) -> Term {
        Term::Rat(Arc::new(value))
    }

    pub fn int(value: i64) -> Term {
        Term::rat(BigRational::from_integer(value.into()))
    }

    pub fn constant(op: &Op) -> Term {
        Term::raw_app(op.clone(), Vec::new())
    }

    /// Builds an application without canonicalizing it.
    pub fn raw_app(op: Op, args: Vec<Term>) -> Term {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        op.hash(&mut hasher);
        args.len().hash(&mut hasher);
        for a in &args {
            a.hash(&mut hasher);
        }
        let hash = hasher.finish();
        Term::App(Arc::new(App { op, args: args.into_boxed_slice(), hash }))
    }

    /// Builds an application whose arguments are already canonical, putting
    /// the root in canonical form for the operator's attributes.
    pub fn app(op: Op, args: Vec<Term>) -> Term {
        let attrs = op.attrs();
        if !(attrs.assoc || attrs.comm) || args.len() < 2 {
            return Term::raw_app(op, args);
        }
        let mut flat: Vec<Term>;
        if attrs.assoc {
            flat = Vec::with_capacity(args.len());
            for a in args {
                match &a {
                    Term::App(inner) if *inner.op == *op => flat.extend(inner.args.iter().cloned()),
                    _ => flat.push(a),
                }
            }
        } else {
            flat = args;
        }
        if attrs.comm {
            flat.sort();
        }
        if attrs.idem {
            flat.dedup();
            if flat.len() == 1 {
                return flat.pop().unwrap();
            }
        }
        Term::raw_app(op, flat)
    }

    pub fn as_app(&self) -> Option<&App> {
        match self {
            Term::App(a) => Some(a),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&Op> {
        self.as_app().map(|a| &a.op)
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(a) => &a.args,
            _ => &[],
        }
    }

    pub fn is_head(&self, name: &str) -> bool {
        matches!(self, Term::App(a) if &*a.op.name == name)
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Term::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Term::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Rat(_) | Term::Bool(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(a) => a.args.iter().all(Term::is_ground),
            _ => true,
        }
    }

    pub fn vars(&self) -> Vec<Arc<Variable>> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Arc<Variable>>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|w| w.name == v.name) {
                    out.push(v.clone());
                }
            }
            Term::App(a) => a.args.iter().for_each(|t| t.collect_vars(out)),
            _ => {}
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::App(a) => 1 + a.args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }

    /// Does `op` occur anywhere in this term?
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::App(a) => &*a.op.name == name || a.args.iter().any(|t| t.mentions(name)),
            _ => false,
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::App(a), Term::App(b)) => Arc::ptr_eq(a, b),
            (Term::Var(a), Term::Var(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Term::Bool(_) => 0,
            Term::Rat(_) => 1,
            Term::Var(_) => 2,
            Term::App(_) => 3,
        }
    }

    /// Elements of `self` seen as an argument list of the flattened `op`.
    pub fn elements_of(&self, op: &OpSym) -> Vec<Term> {
        match self {
            Term::App(a) if *a.op == *op => a.args.to_vec(),
            _ => vec![self.clone()],
        }
    }
}

/// Canonical form for assoc/comm/idem operators, applied bottom-up.
///
/// Nested applications of an associative operator become one variadic node,
/// commutative arguments are sorted by the canonical term order and
/// idempotent duplicates collapse.
pub fn ac_flatten(t: &Term) -> Term {
    match t {
        Term::App(a) => {
            let args: Vec<Term> = a.args.iter().map(ac_flatten).collect();
            Term::app(a.op.clone(), args)
        }
        _ => t.clone(),
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::App(a), Term::App(b)) => {
                Arc::ptr_eq(a, b) || (a.hash == b.hash && a.op == b.op && a.args == b.args)
            }
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Rat(a), Term::Rat(b)) => a == b,
            (Term::Bool(a), Term::Bool(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::App(a) => state.write_u64(a.hash),
            Term::Var(v) => {
                2u8.hash(state);
                v.hash(state)
            }
            Term::Rat(r) => {
                1u8.hash(state);
                r.hash(state)
            }
            Term::Bool(b) => {
                0u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Literals before variables before applications; applications compare by
/// operator name, declared arity, argument count and then arguments.
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Bool(a), Term::Bool(b)) => a.cmp(b),
            (Term::Rat(a), Term::Rat(b)) => a.cmp(b),
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::App(a), Term::App(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                a.op
                    .cmp(&b.op)
                    .then(a.args.len().cmp(&b.args.len()))
                    .then_with(|| a.args.iter().cmp(b.args.iter()))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, false)
    }
}

fn needs_parens(t: &Term) -> bool {
    match t {
        Term::App(a) => {
            let name = a.op.name();
            a.op.is_mixfix() && !(name.starts_with("if_") && name.ends_with("_fi"))
        }
        _ => false,
    }
}

fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
    match t {
        Term::Bool(b) => write!(f, "{b}"),
        Term::Rat(r) => f.write_str(&rat::format(r)),
        Term::Var(v) => f.write_str(&v.name),
        Term::App(a) => {
            let op = &a.op;
            if !op.is_mixfix() {
                f.write_str(op.name())?;
                if !a.args.is_empty() {
                    f.write_str("(")?;
                    for (i, arg) in a.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write_term(arg, f, false)?;
                    }
                    f.write_str(")")?;
                }
                return Ok(());
            }
            let wrap = nested && needs_parens(t);
            if wrap {
                f.write_str("(")?;
            }
            if a.args.len() > op.arity() && op.arity() == 2 {
                // flattened associative node
                let sep = op.name().trim_matches('_').trim();
                for (i, arg) in a.args.iter().enumerate() {
                    if i > 0 {
                        if sep.is_empty() {
                            f.write_str(" ")?;
                        } else {
                            write!(f, " {sep} ")?;
                        }
                    }
                    write_term(arg, f, true)?;
                }
            } else {
                write_mixfix(op.name(), &a.args, f)?;
            }
            if wrap {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

fn write_mixfix(name: &str, args: &[Term], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let pieces: Vec<&str> = name.split('_').collect();
    let mut out_parts: Vec<String> = Vec::new();
    let mut arg_iter = args.iter();
    for (i, piece) in pieces.iter().enumerate() {
        let piece = piece.trim();
        if !piece.is_empty() {
            out_parts.push(piece.to_string());
        }
        if i + 1 < pieces.len() {
            if let Some(arg) = arg_iter.next() {
                out_parts.push(format!("{}", Nested(arg)));
            }
        }
    }
    f.write_str(&out_parts.join(" "))
}

struct Nested<'a>(&'a Term);

impl fmt::Display for Nested<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self.0, f, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(name: &str) -> Term {
        Term::constant(&OpSym::new(name, 0, Attrs::NONE))
    }

    fn juxt() -> Op {
        OpSym::new("_ _", 2, Attrs::ACI)
    }

    #[test]
    fn flatten_assoc_nest() {
        let j = juxt();
        let inner = Term::raw_app(j.clone(), vec![pid("p1"), pid("p2")]);
        let t = Term::raw_app(j.clone(), vec![inner, pid("p3")]);
        let flat = ac_flatten(&t);
        assert_eq!(flat.args().len(), 3);
        assert_eq!(flat.to_string(), "p1 p2 p3");
    }

    #[test]
    fn flatten_idem_and_comm() {
        let j = juxt();
        let t = Term::raw_app(
            j.clone(),
            vec![pid("p2"), Term::raw_app(j.clone(), vec![pid("p1"), pid("p2")])],
        );
        assert_eq!(ac_flatten(&t).to_string(), "p1 p2");
    }

    #[test]
    fn flatten_leaves_plain_terms() {
        let next = OpSym::new("next", 1, Attrs::NONE);
        let t = Term::raw_app(next, vec![pid("green")]);
        assert_eq!(ac_flatten(&t), t);
    }

    #[test]
    fn idem_collapse_to_single_element() {
        let j = juxt();
        let t = Term::raw_app(j, vec![pid("p1"), pid("p1")]);
        assert_eq!(ac_flatten(&t), pid("p1"));
    }

    #[test]
    fn literal_order_before_apps() {
        assert!(Term::Bool(true) < Term::int(0));
        assert!(Term::int(5) < pid("a"));
        assert!(Term::var("X", Sort::rat()) < pid("a"));
    }
}
