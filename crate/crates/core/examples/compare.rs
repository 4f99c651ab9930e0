//! Random traces through both the simulator and the rewriting engine.
//!
//!     cargo run --release --example compare -- 7 1000

use std::path::PathBuf;

use cafelite::engine::with_large_stack;
use cafelite::module::Registry;
use cafelite::oracle::{compare_with_engine, parse_rat, random_traces, Params};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(7, |s| s.parse().expect("seed"));
    let count = args.next().map_or(1000, |s| s.parse().expect("count"));
    let ticks: Vec<_> = ["1/2", "1", "2", "3"].iter().filter_map(|t| parse_rat(t)).collect();
    let traces = random_traces(seed, count, 8, 3, &ticks);
    let report = with_large_stack(move || {
        let mut reg = Registry::new(vec![PathBuf::from("corpus/multi")]);
        let ms = reg.module("MS").expect("MS loads");
        compare_with_engine(&ms, &Params::example(), &traces).expect("engine runs")
    });
    println!("seed {seed}");
    print!("{}", report.text());
}
