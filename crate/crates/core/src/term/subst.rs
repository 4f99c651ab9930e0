use std::fmt;
use std::sync::Arc;

use super::{Signature, SortError, Term};

/// Variable bindings, kept sorted by variable name.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: Vec<(Arc<str>, Term)>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings
            .binary_search_by(|(n, _)| (**n).cmp(name))
            .ok()
            .map(|i| &self.bindings[i].1)
    }

    /// Binds `name`, replacing an earlier binding.
    pub fn bind(&mut self, name: Arc<str>, value: Term) {
        match self.bindings.binary_search_by(|(n, _)| n.cmp(&name)) {
            Ok(i) => self.bindings[i].1 = value,
            Err(i) => self.bindings.insert(i, (name, value)),
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(n, t)| (&**n, t))
    }

    /// Instantiates `t`, re-canonicalizing every rebuilt node.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.get(&v.name).cloned().unwrap_or_else(|| t.clone()),
            Term::App(a) => {
                if a.args().is_empty() {
                    return t.clone();
                }
                let mut changed = false;
                let args: Vec<Term> = a
                    .args()
                    .iter()
                    .map(|x| {
                        let y = self.apply(x);
                        changed |= !x.is_literal() && !y.ptr_eq(x);
                        y
                    })
                    .collect();
                if changed {
                    Term::app(a.op().clone(), args)
                } else {
                    t.clone()
                }
            }
            _ => t.clone(),
        }
    }

    /// Like [`Substitution::apply`], but first checks that every binding
    /// respects the sort of its variable in `t`.
    pub fn apply_checked(&self, sig: &Signature, t: &Term) -> Result<Term, SortError> {
        for v in t.vars() {
            if let Some(value) = self.get(&v.name) {
                let found = sig.least_sort(value)?;
                if !sig.leq(&found, &v.sort) {
                    return Err(SortError::BindingSort {
                        name: v.name.to_string(),
                        sort: v.sort.to_string(),
                        found: found.to_string(),
                    });
                }
            }
        }
        Ok(self.apply(t))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} |-> {t}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Attrs, OpSym, Sort};

    #[test]
    fn apply_recanonicalizes() {
        let j = OpSym::new("_ _", 2, Attrs::ACI);
        let p1 = Term::constant(&OpSym::new("p1", 0, Attrs::NONE));
        let p2 = Term::constant(&OpSym::new("p2", 0, Attrs::NONE));
        let pat = Term::app(j.clone(), vec![p1.clone(), Term::var("PS", Sort::new("PSet"))]);
        let mut s = Substitution::new();
        s.bind(Arc::from("PS"), Term::app(j, vec![p1, p2]));
        assert_eq!(s.apply(&pat).to_string(), "p1 p2");
    }

    #[test]
    fn bindings_stay_sorted() {
        let mut s = Substitution::new();
        s.bind(Arc::from("Y"), Term::int(2));
        s.bind(Arc::from("X"), Term::int(1));
        assert_eq!(s.to_string(), "{X |-> 1, Y |-> 2}");
        assert_eq!(s.get("Y"), Some(&Term::int(2)));
    }
}
