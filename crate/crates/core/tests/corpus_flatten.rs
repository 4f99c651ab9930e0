use std::path::PathBuf;

use cafelite::module::Registry;

fn corpus(dir: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(dir)
}

#[test]
fn every_corpus_module_flattens() {
    for (dir, names) in [
        ("intro", &["PID", "LABEL", "SIGNAL"][..]),
        ("single", &["LABEL", "SIGNAL"][..]),
        ("multi", &["PID", "PSET", "LABEL", "MS", "INV", "ISTEP"][..]),
    ] {
        let mut reg = Registry::new(vec![corpus(dir)]);
        for n in names {
            let m = reg.module(n).unwrap_or_else(|e| panic!("{dir}/{n}: {e}"));
            assert!(m.included().any(|x| x == *n));
        }
    }
}

#[test]
fn ms_contains_pset_operators() {
    let mut reg = Registry::new(vec![corpus("multi")]);
    let ms = reg.module("MS").unwrap();
    for (name, arity) in [("_in_", 2), ("_ _", 2), ("nil", 0), ("next", 1)] {
        assert!(ms.sig().family(name, arity).is_some(), "{name}");
    }
    assert_eq!(ms.rules().iter().filter(|r| &*r.module == "PSET").count(), 4);
}
