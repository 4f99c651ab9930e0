//! Loads a script and runs its `red` commands, like `check --run`.
//!
//!     cargo run --example reduce -- corpus/multi/pset_golden.cafe

use std::path::PathBuf;

use cafelite::engine::{with_large_stack, DEFAULT_BUDGET};
use cafelite::module::Registry;
use cafelite::script::run_script;

fn main() {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "corpus/multi/pset_golden.cafe".into()));
    let dir = path.parent().map(PathBuf::from).unwrap_or_default();
    let mut reg = Registry::new(vec![dir]);
    let script = reg.load_file(&path).expect("load script");
    let results = with_large_stack(|| run_script(&mut reg, &script, DEFAULT_BUDGET)).expect("run script");
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| r.passed == Some(false)).count();
    println!("{} reductions, {failed} failed", results.len());
}
