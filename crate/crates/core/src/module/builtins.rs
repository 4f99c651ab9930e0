//! Signatures of the built-in BOOL and RAT modules. Their semantics lives
//! in the engine; these declarations only make the operators parse and
//! sort-check.

use std::sync::Arc;

use crate::term::{Attrs, OpDecl, Poly, Signature, Sort, SortError, SortInfo};

pub const BOOL: &str = "BOOL";
pub const RAT: &str = "RAT";

pub fn is_builtin(name: &str) -> bool {
    matches!(name, BOOL | RAT)
}

fn decl(arity: &[Sort], coarity: Sort, module: &str) -> OpDecl {
    OpDecl { arity: arity.to_vec(), coarity, behavioral: false, module: Arc::from(module) }
}

/// Signature containing both built-in modules.
pub fn signature() -> Result<Signature, SortError> {
    let mut sig = Signature::new();
    let b = Sort::bool();
    let u = Sort::universal();
    sig.add_sort(b.clone(), SortInfo { hidden: false, module: Arc::from(BOOL) });
    let bin = [b.clone(), b.clone()];
    sig.add_op("_and_", decl(&bin, b.clone(), BOOL), Attrs::ACI, Poly::None)?;
    sig.add_op("_or_", decl(&bin, b.clone(), BOOL), Attrs::ACI, Poly::None)?;
    sig.add_op("_xor_", decl(&bin, b.clone(), BOOL), Attrs::AC, Poly::None)?;
    sig.add_op("_implies_", decl(&bin, b.clone(), BOOL), Attrs::NONE, Poly::None)?;
    sig.add_op("not_", decl(std::slice::from_ref(&b), b.clone(), BOOL), Attrs::NONE, Poly::None)?;
    sig.add_op("_=_", decl(&[u.clone(), u.clone()], b.clone(), BOOL), Attrs::COMM, Poly::Equality)?;
    sig.add_op(
        "if_then_else_fi",
        decl(&[b.clone(), u.clone(), u.clone()], u.clone(), BOOL),
        Attrs::NONE,
        Poly::IfThenElse,
    )?;

    let (nat, int, rat) = (Sort::nat(), Sort::int(), Sort::rat());
    for s in [&nat, &int, &rat] {
        sig.add_sort(s.clone(), SortInfo { hidden: false, module: Arc::from(RAT) });
    }
    sig.add_subsort(&nat, &int)?;
    sig.add_subsort(&int, &rat)?;
    let rr = [rat.clone(), rat.clone()];
    sig.add_op("_+_", decl(&rr, rat.clone(), RAT), Attrs::AC, Poly::None)?;
    sig.add_op("_*_", decl(&rr, rat.clone(), RAT), Attrs::AC, Poly::None)?;
    sig.add_op("_-_", decl(&rr, rat.clone(), RAT), Attrs::NONE, Poly::None)?;
    sig.add_op("-_", decl(std::slice::from_ref(&rat), rat.clone(), RAT), Attrs::NONE, Poly::None)?;
    for cmp in ["_<=_", "_<_", "_>=_", "_>_"] {
        sig.add_op(cmp, decl(&rr, b.clone(), RAT), Attrs::NONE, Poly::None)?;
    }
    Ok(sig)
}
