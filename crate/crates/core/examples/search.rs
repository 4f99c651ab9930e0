//! Bounded reachability from the initial state, checking inv1 .. inv7.
//!
//!     cargo run --release --example search -- 5,10,5 12
//!     cargo run --release --example search -- 5,10,2 12

use cafelite::oracle::{bounded_search, int, Params};

fn main() {
    let mut args = std::env::args().skip(1);
    let params: Params = args.next().unwrap_or_else(|| "5,10,5".into()).parse().expect("params cs0,cs1,t0");
    let depth = args.next().map_or(12, |d| d.parse().expect("depth"));
    let cars = vec!["p1".to_string(), "p2".to_string()];
    let ticks = [1, 2, 3, 5].map(int);
    print!("{}", bounded_search(&params, &cars, &ticks, depth).text());
}
