//! Boolean-ring normal forms: equivalent formulas get the same term.
//!
//!     cargo run --example normalize -- "a implies (b and a)" "not a or b"

use cafelite::engine::bool_normalize;
use cafelite::module::Registry;

fn main() {
    let mut reg = Registry::new(Vec::new());
    reg.load_str("mod! ATOMS { ops a b c d : -> Bool }", None).unwrap();
    let m = reg.module("ATOMS").unwrap();
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        args = vec!["a implies (b and a)".into(), "not a or b".into(), "(a xor b) xor (b xor a)".into()];
    }
    for f in &args {
        match m.parse(f) {
            Ok(t) => println!("{f}  -->  {}", bool_normalize(&t)),
            Err(e) => eprintln!("{f}: {e}"),
        }
    }
}
