//! Runs a trace file through the simulator and prints every state.
//!
//!     cargo run --example simulate -- corpus/traces/two_cars.trace

use cafelite::oracle::{format_table, parse_trace, run_trace, Params};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "corpus/traces/two_cars.trace".into());
    let text = std::fs::read_to_string(&path).expect("read trace");
    let trace = parse_trace(&text, None).expect("parse trace");
    let params = Params::example();
    let states = run_trace(&params, trace.cars.len(), &trace.actions);
    println!("{params}");
    print!("{}", format_table(&trace.cars, &trace.actions, &states));
}
