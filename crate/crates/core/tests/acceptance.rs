//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::path::Path;
use std::time::Duration;

use cafelite::engine::with_large_stack;
use cafelite::module::Registry;
use cafelite::oracle::{
    bounded_search, compare_with_engine, int, invariants, parse_rat, parse_trace, random_traces, run_trace, OracleState,
    Params,
};
use cafelite::proof::{run_index, RunOptions, VerdictKind};
use common::*;

type Outcome = Result<String, String>;

fn within(limit: Duration, took: Duration, detail: String) -> Outcome {
    if took <= limit {
        Ok(format!("{detail}, {took:.2?}"))
    } else {
        Err(format!("{detail}, took {took:.2?} > {limit:?}"))
    }
}

fn golden_reductions() -> Outcome {
    let (n, slowest) = golden()?;
    Ok(format!("{n} reductions, slowest {slowest:.2?}"))
}

fn trace(name: &str) -> (Vec<String>, Vec<OracleState>) {
    let text = std::fs::read_to_string(corpus("traces").join(name)).unwrap();
    let t = parse_trace(&text, None).unwrap();
    let states = run_trace(&Params::example(), t.cars.len(), &t.actions);
    (t.cars, states)
}

fn simulation_values() -> Outcome {
    let (res, took) = timed(|| -> Result<usize, String> {
        let mut checked = 0;
        for r in corpus_reductions().into_iter().filter(|r| r.file.ends_with("simulation.cafe")) {
            let e = r.expect.as_ref().ok_or("simulation red without expectation")?;
            let nf = cafelite::engine::reduce(&r.module, &r.input);
            if !cafelite::script::matches_expectation(&r.module, &nf.term, e) {
                return Err(format!("engine: {} gave {}, expected {e}", r.input, nf.term));
            }
            checked += 1;
        }
        let (_, s) = trace("two_cars.trace");
        for (step, p1, p2) in [(4, 5, 2), (6, 8, 5), (8, 10, 7), (10, 13, 10)] {
            let got = (&s[step].cars[0].pos, &s[step].cars[1].pos);
            if got != (&int(p1), &int(p2)) {
                return Err(format!("oracle: step {step} positions {got:?}, expected ({p1}, {p2})"));
            }
            checked += 1;
        }
        for (file, now) in [("two_cars_yellow.trace", 5), ("two_cars_stop.trace", 8)] {
            let (_, s) = trace(file);
            let last = &s.last().unwrap().now;
            if *last != int(now) {
                return Err(format!("oracle: {file} ends at now {last}, expected {now}"));
            }
            checked += 1;
        }
        Ok(checked)
    });
    within(Duration::from_secs(10), took, format!("{} values", res?))
}

fn proof_passages() -> Outcome {
    let opts = RunOptions::default();
    let intro = run_index(&corpus("proof/passages.yaml"), &opts).map_err(|e| e.to_string())?;
    let verdict = |id: &str, goal_has: &str| {
        intro.leaves.iter().find(|l| l.id == id && l.goal.contains(goal_has)).map(|l| l.verdict)
    };
    let want = [
        ("inv1-basis", "inv1", VerdictKind::Proved),
        ("tick-unsplit", "istep1", VerdictKind::Stuck),
        ("tick-cs-below", "inv3", VerdictKind::Proved),
    ];
    for (id, goal, v) in want {
        if verdict(id, goal) != Some(v) {
            return Err(format!("{id}: {:?}, expected {v:?}", verdict(id, goal)));
        }
    }
    if !intro.expectations_met {
        return Err("passage expectations not met".into());
    }
    let full = run_index(&corpus("proof/invariants.yaml"), &opts).map_err(|e| e.to_string())?;
    if !full.pass {
        return Err(format!(
            "inv1-inv7: {} of {} leaves Proved",
            full.count(VerdictKind::Proved),
            full.leaves.len()
        ));
    }
    let lemma: usize = full.lemmas.iter().map(|l| l.leaves.len()).sum();
    let mut out = Vec::new();
    let code = cafelite::cli::run(
        ["cafelite", "prove", corpus("proof/invariants.yaml").to_str().unwrap()],
        &mut out,
        &mut Vec::new(),
    );
    if code != 0 {
        return Err(format!("prove exited {code}"));
    }
    Ok(format!(
        "basis Proved, un-split tick Stuck, guarded Proved; inv1-inv7 {} leaves + lemma1 {lemma} leaves all Proved, exit 0",
        full.leaves.len()
    ))
}

fn bool_normalize_tables() -> Outcome {
    let (res, took) = timed(|| bool_truth_tables(2024, 10_000));
    within(Duration::from_secs(30), took, format!("10000 formulas, {} truth tables", res?))
}

fn aci_matching() -> Outcome {
    let n = aci_brute_force(17, 500)?;
    Ok(format!("500 cases, {n} matches"))
}

fn seeded_traces() -> Outcome {
    let (res, took) = timed(|| -> Result<String, String> {
        let mut reg = Registry::new(vec![corpus("multi")]);
        let ms = reg.module("MS").map_err(|e| e.to_string())?;
        let ticks: Vec<_> = ["1/2", "1", "2", "3"].iter().map(|t| parse_rat(t).unwrap()).collect();
        let traces = random_traces(7, 1000, 8, 3, &ticks);
        let c = compare_with_engine(&ms, &Params::example(), &traces).map_err(|e| e.to_string())?;
        if let Some(m) = c.mismatches.first() {
            return Err(format!("{} mismatches, first: trace {} {}", c.mismatches.len(), m.trace, m.observation));
        }
        Ok(format!("1000 traces, {} observations, 0 mismatches", c.observations))
    });
    within(Duration::from_secs(60), took, res?)
}

fn bounded_search_inv1() -> Outcome {
    let (res, took) = timed(|| -> Result<String, String> {
        let cars = vec!["p1".to_string(), "p2".to_string()];
        let ticks = [1, 2, 3, 5].map(int);
        let ok = bounded_search(&Params::example(), &cars, &ticks, 12);
        if ok.violation_counts[0] != 0 {
            return Err(format!("{} inv1 violations at (5,10,5)", ok.violation_counts[0]));
        }
        let bad_params: Params = "5,10,2".parse().unwrap();
        let bad = bounded_search(&bad_params, &cars, &ticks, 12);
        let w = bad.violations.iter().find(|v| v.invariant == 1).ok_or("no inv1 witness with t0=2")?;
        let replay = parse_trace(&w.witness.join("\n"), Some(&cars)).map_err(|e| e.to_string())?;
        let states = run_trace(&bad_params, cars.len(), &replay.actions);
        let car = cars.iter().position(|c| *c == w.car).unwrap();
        if invariants(states.last().unwrap(), car, &bad_params)[0] {
            return Err(format!("witness `{}` does not violate inv1 on replay", w.witness.join("; ")));
        }
        Ok(format!(
            "{} states, 0 inv1 violations; t0=2 witness `{}`",
            ok.states,
            w.witness.join("; ")
        ))
    });
    within(Duration::from_secs(120), took, res?)
}

fn engine_properties() -> Outcome {
    let (n, skipped) = engine_invariants(20_000_000)?;
    if skipped > 0 {
        return Err(format!("{skipped} of {n} reductions exhausted the budget without memo"));
    }
    Ok(format!("{n} reductions"))
}

fn main() {
    std::env::set_current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")).unwrap();
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("golden reductions under 1s each", golden_reductions),
        ("simulation values", simulation_values),
        ("proof passages", proof_passages),
        ("bool_normalize vs truth tables", bool_normalize_tables),
        ("ACI matching vs brute force", aci_matching),
        ("seeded traces vs engine", seeded_traces),
        ("bounded search for inv1", bounded_search_inv1),
        ("reduce idempotence, memo transparency, sort preservation", engine_properties),
    ];
    let failed = with_large_stack(|| {
        let mut failed = 0;
        for (i, (name, f)) in criteria.iter().enumerate() {
            match f() {
                Ok(detail) => println!("acceptance {} {name}: PASS ({detail})", i + 1),
                Err(detail) => {
                    failed += 1;
                    println!("acceptance {} {name}: FAIL ({detail})", i + 1);
                }
            }
        }
        failed
    });
    println!("acceptance: {} of 8 passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
