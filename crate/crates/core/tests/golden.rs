use std::path::PathBuf;
use std::time::Instant;

use cafelite::engine::DEFAULT_BUDGET;
use cafelite::module::Registry;
use cafelite::script::run_script;

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn run(rel: &str) {
    let path = corpus(rel);
    let mut reg = Registry::new(vec![path.parent().unwrap().to_path_buf()]);
    let script = reg.load_file(&path).unwrap();
    let start = Instant::now();
    let out = cafelite::engine::with_large_stack(|| run_script(&mut reg, &script, DEFAULT_BUDGET)).unwrap();
    for r in &out {
        println!("{r}");
    }
    assert!(out.iter().all(|r| r.passed != Some(false)), "{rel}");
    println!("{rel}: {:?}", start.elapsed());
}

#[test]
fn intro_scripts() {
    for f in ["intro/label.cafe", "intro/signal.cafe", "intro/rat.cafe", "intro/passages.cafe"] {
        run(f);
    }
}

#[test]
fn pset_membership() {
    run("multi/pset_golden.cafe");
}

#[test]
fn simulation_prelude() {
    run("multi/simulation.cafe");
}
