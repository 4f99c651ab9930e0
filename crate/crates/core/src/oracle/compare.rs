//! Cross-checking the simulator against reductions of the system module.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{run_trace, Action, OracleState, Params};
use crate::engine::Rewriter;
use crate::module::{FlatModule, ModuleError};
use crate::rat;
use crate::syntax::{parse_script, OpenItem};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSpec {
    pub cars: Vec<String>,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub trace: usize,
    /// Number of actions applied.
    pub step: usize,
    pub observation: String,
    pub engine: String,
    pub oracle: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub params: String,
    pub traces: usize,
    pub observations: usize,
    pub mismatches: Vec<Mismatch>,
}

impl Comparison {
    pub fn text(&self) -> String {
        let mut s = format!("compare {}: {} traces, {} observations\n", self.params, self.traces, self.observations);
        for m in &self.mismatches {
            s.push_str(&format!(
                "  trace {} step {}: {} engine {} oracle {}\n",
                m.trace, m.step, m.observation, m.engine, m.oracle
            ));
        }
        s.push_str(&format!("{} mismatches\n", self.mismatches.len()));
        s
    }
}

/// `count` traces of at most `max_actions` actions over 1 to `max_cars`
/// cars named p1, p2, ...; tick amounts come from `ticks`.
pub fn random_traces(seed: u64, count: usize, max_actions: usize, max_cars: usize, ticks: &[BigRational]) -> Vec<TraceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_cars.max(1));
            let len = rng.gen_range(0..=max_actions);
            let actions = (0..len)
                .map(|_| {
                    let car = rng.gen_range(0..n);
                    match rng.gen_range(0..6) {
                        0 => Action::Change,
                        1 => Action::Go(car),
                        2 => Action::Stop(car),
                        3 => Action::In(car),
                        4 => Action::Out(car),
                        _ => Action::Tick(ticks[rng.gen_range(0..ticks.len())].clone()),
                    }
                })
                .collect();
            TraceSpec { cars: (1..=n).map(|i| format!("p{i}")).collect(), actions }
        })
        .collect()
}

/// The system module with the given cars, pairwise distinct, and the
/// constants fixed to `params`.
pub fn instantiate(ms: &FlatModule, params: &Params, cars: &[String]) -> Result<FlatModule, ModuleError> {
    let mut text = String::from("open MS .\n");
    if !cars.is_empty() {
        text.push_str(&format!("ops {} : -> Pid .\n", cars.join(" ")));
    }
    for (i, a) in cars.iter().enumerate() {
        for b in &cars[i + 1..] {
            text.push_str(&format!("eq ({a} = {b}) = false .\n"));
        }
    }
    for (name, v) in [("cs0", &params.cs0), ("cs1", &params.cs1), ("t0", &params.t0)] {
        text.push_str(&format!("eq {name} = {} .\n", rat::format(v)));
    }
    text.push_str("close\n");
    let script = parse_script(&text).map_err(|source| ModuleError::Parse { file: "<instantiate>".into(), source })?;
    let block = script.opens().next().expect("one open block");
    let mut b = ms.open("MS instance");
    for item in &block.items {
        if let OpenItem::Decl(d) = item {
            b.declare(d)?;
        }
    }
    Ok(b.finish())
}

fn rat_matches(t: &Term, v: &BigRational) -> bool {
    t.as_rat() == Some(v)
}

/// Names in a reduced `ps(...)` term, or `None` if it is not a set of
/// constants.
fn set_names(t: &Term) -> Option<Vec<String>> {
    let elems = match t.head() {
        Some(op) if op.arity() == 2 && op.attrs().is_ac() => t.elements_of(op),
        Some(op) if op.arity() == 0 => vec![t.clone()],
        _ => return None,
    };
    let mut names = Vec::new();
    for e in elems {
        let op = e.head().filter(|o| o.arity() == 0)?;
        if op.name() != "nil" {
            names.push(op.name().to_string());
        }
    }
    names.sort();
    Some(names)
}

fn compare_state(
    rw: &mut Rewriter,
    m: &FlatModule,
    cars: &[String],
    term: &str,
    st: &OracleState,
    out: &mut Vec<(String, String, String)>,
) -> Result<usize, ModuleError> {
    let mut red = |obs: String| -> Result<(Term, String), ModuleError> {
        let t = m.parse(&obs)?;
        Ok((rw.reduce(&t).term, obs))
    };
    let mut n = 0;
    let mut check = |ok: bool, engine: &Term, obs: String, oracle: String, out: &mut Vec<_>| {
        n += 1;
        if !ok {
            out.push((obs, engine.to_string(), oracle));
        }
    };
    let (t, o) = red(format!("now({term})"))?;
    check(rat_matches(&t, &st.now), &t, o, rat::format(&st.now), out);
    let (t, o) = red(format!("l({term})"))?;
    check(rat_matches(&t, &st.l), &t, o, rat::format(&st.l), out);
    let (t, o) = red(format!("color({term})"))?;
    check(t.to_string() == st.color.name(), &t, o, st.color.name().into(), out);
    let (t, o) = red(format!("ps({term})"))?;
    let mut want: Vec<String> = st.ps().into_iter().map(|i| cars[i].clone()).collect();
    want.sort();
    check(set_names(&t).as_ref() == Some(&want), &t, o, format!("{{{}}}", want.join(" ")), out);
    for (i, c) in st.cars.iter().enumerate() {
        let p = &cars[i];
        let (t, o) = red(format!("pos({p}, {term})"))?;
        check(rat_matches(&t, &c.pos), &t, o, rat::format(&c.pos), out);
        let (t, o) = red(format!("going({p}, {term})"))?;
        check(t.as_bool() == Some(c.going), &t, o, c.going.to_string(), out);
        let (t, o) = red(format!("cs({p}, {term})"))?;
        check(t.as_bool() == Some(c.cs), &t, o, c.cs.to_string(), out);
    }
    Ok(n)
}

/// Reduces every observation of every prefix of every trace and compares
/// it with the simulator. `ms` is the flattened system module.
pub fn compare_with_engine(ms: &FlatModule, params: &Params, traces: &[TraceSpec]) -> Result<Comparison, ModuleError> {
    let max_cars = traces.iter().map(|t| t.cars.len()).max().unwrap_or(0);
    let mut modules: Vec<Option<FlatModule>> = vec![None; max_cars + 1];
    for t in traces {
        if modules[t.cars.len()].is_none() {
            modules[t.cars.len()] = Some(instantiate(ms, params, &t.cars)?);
        }
    }
    let per_trace: Vec<Result<(usize, Vec<Mismatch>), ModuleError>> = traces
        .par_iter()
        .enumerate()
        .map(|(ti, tr)| {
            let m = modules[tr.cars.len()].as_ref().expect("built above");
            let mut rw = Rewriter::new(m);
            let states = run_trace(params, tr.cars.len(), &tr.actions);
            let mut term = "init".to_string();
            let mut count = 0;
            let mut mismatches = Vec::new();
            for (k, st) in states.iter().enumerate() {
                if k > 0 {
                    term = tr.actions[k - 1].wrap_term(&tr.cars, &term);
                }
                let mut diffs = Vec::new();
                count += compare_state(&mut rw, m, &tr.cars, &term, st, &mut diffs)?;
                mismatches.extend(diffs.into_iter().map(|(observation, engine, oracle)| Mismatch {
                    trace: ti,
                    step: k,
                    observation,
                    engine,
                    oracle,
                }));
            }
            Ok((count, mismatches))
        })
        .collect();
    let mut observations = 0;
    let mut mismatches = Vec::new();
    for r in per_trace {
        let (n, m) = r?;
        observations += n;
        mismatches.extend(m);
    }
    Ok(Comparison { params: params.to_string(), traces: traces.len(), observations, mismatches })
}
