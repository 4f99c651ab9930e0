//! All matches of a pattern against a set modulo assoc, comm and idem.
//!
//!     cargo run --example matching -- "P S" "e1 e2 e3"

use cafelite::module::Registry;
use cafelite::term::match_term;

const SETS: &str = "mod! SETS {
  [Elt < Set]
  op _ _ : Set Set -> Set {assoc comm idem}
  ops e1 e2 e3 e4 e5 : -> Elt
  vars P Q : Elt
  vars S T : Set
}";

fn main() {
    let mut args = std::env::args().skip(1);
    let pattern = args.next().unwrap_or_else(|| "P S".into());
    let subject = args.next().unwrap_or_else(|| "e1 e2 e3".into());
    let mut reg = Registry::new(Vec::new());
    reg.load_str(SETS, None).unwrap();
    let m = reg.module("SETS").unwrap();
    let (p, s) = (m.parse(&pattern).expect("pattern"), m.parse(&subject).expect("subject"));
    let sols = match_term(m.sig(), &p, &s);
    for sub in &sols {
        println!("{sub}");
    }
    println!("{} matches of {p} against {s}", sols.len());
}
