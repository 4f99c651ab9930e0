//! Runs a proof index and prints its report.
//!
//!     cargo run --example prove -- corpus/proof/invariants.yaml

use std::path::PathBuf;
use std::process::ExitCode;

use cafelite::engine::with_large_stack;
use cafelite::proof::{run_index, RunOptions};

fn main() -> ExitCode {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "corpus/proof/invariants.yaml".into()));
    let report = with_large_stack(|| run_index(&path, &RunOptions::default()));
    match report {
        Ok(r) => {
            print!("{}", r.text());
            if r.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
