//! Breadth-first reachability with invariant checks.

use std::collections::HashMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{enabled, init_state, invariants, step, Action, OracleState, Params};
use crate::rat;

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    /// 1 for inv1, and so on.
    pub invariant: usize,
    pub car: String,
    pub depth: usize,
    /// Actions from the initial state, in trace-file spelling.
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub params: String,
    pub cars: Vec<String>,
    pub ticks: Vec<String>,
    pub depth: usize,
    pub states: usize,
    pub transitions: usize,
    /// Effective actions that left the state unchanged, plus ineffective ones.
    pub stutters: usize,
    /// Violating (state, car) pairs per invariant.
    pub violation_counts: [usize; 7],
    /// The first violation found for each violated invariant; BFS order
    /// makes its witness a shortest one.
    pub violations: Vec<Violation>,
}

impl SearchReport {
    pub fn total_violations(&self) -> usize {
        self.violation_counts.iter().sum()
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "search {} cars [{}] ticks {{{}}} depth {}: {} states, {} transitions, {} stutters\n",
            self.params,
            self.cars.join(" "),
            self.ticks.join(","),
            self.depth,
            self.states,
            self.transitions,
            self.stutters
        );
        for (k, n) in self.violation_counts.iter().enumerate() {
            s.push_str(&format!("  inv{}: {n} violations\n", k + 1));
        }
        for v in &self.violations {
            s.push_str(&format!("  witness for inv{} ({}), depth {}: {}\n", v.invariant, v.car, v.depth, v.witness.join("; ")));
        }
        s.push_str(&format!("{} violations\n", self.total_violations()));
        s
    }
}

fn alphabet(cars: usize, ticks: &[BigRational]) -> Vec<Action> {
    let mut v = vec![Action::Change];
    for i in 0..cars {
        v.extend([Action::Go(i), Action::Stop(i), Action::In(i), Action::Out(i)]);
    }
    v.extend(ticks.iter().cloned().map(Action::Tick));
    v
}

/// Explores every state reachable from the initial one in at most `depth`
/// effective steps.
pub fn bounded_search(params: &Params, cars: &[String], ticks: &[BigRational], depth: usize) -> SearchReport {
    let actions = alphabet(cars.len(), ticks);
    let mut states: Vec<OracleState> = vec![init_state(params, cars.len())];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut depth_of = vec![0usize];
    let mut seen: HashMap<OracleState, usize> = HashMap::from([(states[0].clone(), 0)]);
    let mut counts = [0usize; 7];
    let mut violations: Vec<Violation> = Vec::new();
    let (mut transitions, mut stutters) = (0usize, 0usize);

    let witness = |idx: usize, parent: &[Option<(usize, usize)>]| {
        let mut out = Vec::new();
        let mut cur = idx;
        while let Some((p, a)) = parent[cur] {
            out.push(actions[a].show(cars));
            cur = p;
        }
        out.reverse();
        out
    };
    let mut check = |idx: usize, st: &OracleState, parent: &[Option<(usize, usize)>], depth: usize| {
        for (car, id) in cars.iter().enumerate() {
            for (k, ok) in invariants(st, car, params).into_iter().enumerate() {
                if !ok {
                    counts[k] += 1;
                    if !violations.iter().any(|v| v.invariant == k + 1) {
                        violations.push(Violation {
                            invariant: k + 1,
                            car: id.clone(),
                            depth,
                            witness: witness(idx, parent),
                        });
                    }
                }
            }
        }
    };
    check(0, &states[0], &parent, 0);

    let mut frontier = vec![0usize];
    for d in 1..=depth {
        if frontier.is_empty() {
            break;
        }
        let succs: Vec<Vec<(usize, Option<OracleState>)>> = frontier
            .par_iter()
            .map(|&i| {
                let s = &states[i];
                actions
                    .iter()
                    .enumerate()
                    .map(|(ai, a)| {
                        let t = enabled(s, a, params).then(|| step(s, a, params)).filter(|t| t != s);
                        (ai, t)
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (&i, list) in frontier.iter().zip(succs) {
            for (ai, t) in list {
                transitions += 1;
                let Some(t) = t else {
                    stutters += 1;
                    continue;
                };
                if seen.contains_key(&t) {
                    continue;
                }
                let idx = states.len();
                seen.insert(t.clone(), idx);
                parent.push(Some((i, ai)));
                depth_of.push(d);
                check(idx, &t, &parent, d);
                states.push(t);
                next.push(idx);
            }
        }
        frontier = next;
    }
    violations.sort_by_key(|v| v.invariant);
    SearchReport {
        params: params.to_string(),
        cars: cars.to_vec(),
        ticks: ticks.iter().map(rat::format).collect(),
        depth,
        states: states.len(),
        transitions,
        stutters,
        violation_counts: counts,
        violations,
    }
}
