//! A direct simulator of the multi-car signal system.
//!
//! States are plain values: time, signal, the next allowed change time and
//! per-car position and flags. `step` applies the same updates as the
//! system's transition equations and stutters when an action's effective
//! condition fails. The simulator shares no code with the rewriting engine,
//! so the two can check each other.

mod compare;
mod search;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

pub use compare::{compare_with_engine, random_traces, Comparison, Mismatch, TraceSpec};
pub use search::{bounded_search, SearchReport, Violation};

use crate::rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("line {line}: {message}")]
    Trace { line: usize, message: String },
}

/// Section bounds and the minimum signal interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub cs0: BigRational,
    pub cs1: BigRational,
    pub t0: BigRational,
}

impl Params {
    /// Requires `0 < cs0 < cs1` and `0 < t0`. The verification assumption
    /// `cs1 - cs0 <= t0` is not enforced, so that models violating it can be
    /// explored; see [`Params::assumption_holds`].
    pub fn new(cs0: BigRational, cs1: BigRational, t0: BigRational) -> Result<Params, OracleError> {
        if !(cs0.is_positive() && cs0 < cs1) {
            return Err(OracleError::BadParams(format!(
                "need 0 < cs0 < cs1, got cs0 = {}, cs1 = {}",
                rat::format(&cs0),
                rat::format(&cs1)
            )));
        }
        if !t0.is_positive() {
            return Err(OracleError::BadParams(format!("need 0 < t0, got {}", rat::format(&t0))));
        }
        Ok(Params { cs0, cs1, t0 })
    }

    pub fn assumption_holds(&self) -> bool {
        &self.cs1 - &self.cs0 <= self.t0
    }

    /// The constants of the two-car example (5, 10, 5).
    pub fn example() -> Params {
        Params::new(int(5), int(10), int(5)).expect("valid")
    }
}

impl FromStr for Params {
    type Err = OracleError;

    /// `cs0,cs1,t0`, each a rational literal.
    fn from_str(s: &str) -> Result<Params, OracleError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(OracleError::BadParams(format!("expected cs0,cs1,t0, got `{s}`")));
        };
        let r = |x: &str| parse_rat(x).ok_or_else(|| OracleError::BadParams(format!("not a rational: `{x}`")));
        Params::new(r(a)?, r(b)?, r(c)?)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cs0={} cs1={} t0={}", rat::format(&self.cs0), rat::format(&self.cs1), rat::format(&self.t0))
    }
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn parse_rat(s: &str) -> Option<BigRational> {
    rat::parse(s.trim())?.ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Yellow,
    Red,
}

impl Color {
    pub fn next(self) -> Color {
        match self {
            Color::Green => Color::Yellow,
            Color::Yellow => Color::Red,
            Color::Red => Color::Green,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Yellow => "yellow",
            Color::Red => "red",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Car {
    pub pos: BigRational,
    pub going: bool,
    pub cs: bool,
    /// Member of the set of cars that have ever gone.
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleState {
    pub now: BigRational,
    pub l: BigRational,
    pub color: Color,
    /// Indexed like the car ids given to [`init_state`].
    pub cars: Vec<Car>,
}

impl OracleState {
    /// Indices of the active cars.
    pub fn ps(&self) -> Vec<usize> {
        self.cars.iter().enumerate().filter(|(_, c)| c.active).map(|(i, _)| i).collect()
    }
}

/// Car actions name the car by its index in the id list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Change,
    Go(usize),
    Stop(usize),
    In(usize),
    Out(usize),
    Tick(BigRational),
}

impl Action {
    /// Trace-file spelling, e.g. `go p1` or `tick 3/2`.
    pub fn show(&self, ids: &[String]) -> String {
        match self {
            Action::Change => "change".into(),
            Action::Go(p) => format!("go {}", ids[*p]),
            Action::Stop(p) => format!("stop {}", ids[*p]),
            Action::In(p) => format!("in {}", ids[*p]),
            Action::Out(p) => format!("out {}", ids[*p]),
            Action::Tick(r) => format!("tick {}", rat::format(r)),
        }
    }

    /// Wraps the state term `inner` the way the system module writes it.
    pub fn wrap_term(&self, ids: &[String], inner: &str) -> String {
        match self {
            Action::Change => format!("change({inner})"),
            Action::Go(p) => format!("go({}, {inner})", ids[*p]),
            Action::Stop(p) => format!("stop({}, {inner})", ids[*p]),
            Action::In(p) => format!("in({}, {inner})", ids[*p]),
            Action::Out(p) => format!("out({}, {inner})", ids[*p]),
            Action::Tick(r) => format!("tick({}, {inner})", rat::format(r)),
        }
    }
}

/// Everything zero, the light green, no car active. `Params` values are
/// validated on construction, so this cannot fail.
pub fn init_state(_params: &Params, cars: usize) -> OracleState {
    OracleState {
        now: BigRational::zero(),
        l: BigRational::zero(),
        color: Color::Green,
        cars: vec![Car { pos: BigRational::zero(), going: false, cs: false, active: false }; cars],
    }
}

/// The per-car conjunct of the tick condition for a car at `c` after
/// advancing `x`.
fn car_allows_tick(c: &Car, color: Color, x: &BigRational, p: &Params) -> bool {
    let next = &c.pos + x;
    let implies = |a: bool, b: bool| !a || b;
    implies(c.cs && c.going, p.cs0 <= next && next <= p.cs1)
        && implies(!c.cs && c.going, next <= p.cs0 || p.cs1 <= next)
        && implies(color != Color::Green && c.cs, c.going)
        && implies(c.going && p.cs0 < next && next <= p.cs1, c.cs)
        && implies(c.going && p.cs1 < next, !c.cs)
}

pub fn tick_enabled(s: &OracleState, x: &BigRational, p: &Params) -> bool {
    !x.is_negative()
        && *x <= &p.cs1 - &p.cs0
        && s.cars.iter().filter(|c| c.active).all(|c| car_allows_tick(c, s.color, x, p))
}

/// Is the action's effective condition true in `s`?
pub fn enabled(s: &OracleState, a: &Action, p: &Params) -> bool {
    match a {
        Action::Change => s.l <= s.now,
        Action::Go(_) | Action::Stop(_) => true,
        Action::In(i) => s.cars[*i].pos == p.cs0 && s.color == Color::Green,
        Action::Out(i) => s.cars[*i].pos == p.cs1,
        Action::Tick(x) => tick_enabled(s, x, p),
    }
}

/// Successor of `s` under `a`; `s` itself when `a` is not effective.
pub fn step(s: &OracleState, a: &Action, p: &Params) -> OracleState {
    let mut t = s.clone();
    if !enabled(s, a, p) {
        return t;
    }
    match a {
        Action::Change => {
            t.color = s.color.next();
            t.l = &s.now + &p.t0;
        }
        Action::Go(i) => {
            t.cars[*i].going = true;
            t.cars[*i].active = true;
        }
        Action::Stop(i) => t.cars[*i].going = false,
        Action::In(i) => t.cars[*i].cs = true,
        Action::Out(i) => t.cars[*i].cs = false,
        Action::Tick(x) => {
            t.now = &s.now + x;
            for c in t.cars.iter_mut().filter(|c| c.going) {
                c.pos = &c.pos + x;
            }
        }
    }
    t
}

/// All states along the trace, starting with the initial one.
pub fn run_trace(params: &Params, cars: usize, actions: &[Action]) -> Vec<OracleState> {
    let mut states = vec![init_state(params, cars)];
    for a in actions {
        let next = step(states.last().expect("nonempty"), a, params);
        states.push(next);
    }
    states
}

/// A parsed trace file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub cars: Vec<String>,
    pub actions: Vec<Action>,
}

/// Parses one action per line: `change`, `go p1`, `stop p1`, `in p1`,
/// `out p1`, `tick 3/2`. `#` and `--` start comments. Cars are numbered
/// in order of first mention unless `cars` fixes them.
pub fn parse_trace(text: &str, cars: Option<&[String]>) -> Result<Trace, OracleError> {
    let mut ids: Vec<String> = cars.map(<[String]>::to_vec).unwrap_or_default();
    let fixed = cars.is_some();
    let mut actions = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let line = line.split("--").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| OracleError::Trace { line: n + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        let mut car = |name: &str| -> Result<usize, OracleError> {
            if let Some(i) = ids.iter().position(|c| c == name) {
                return Ok(i);
            }
            if fixed {
                return Err(err(format!("unknown car `{name}`")));
            }
            ids.push(name.to_string());
            Ok(ids.len() - 1)
        };
        let a = match words.as_slice() {
            ["change"] => Action::Change,
            ["go", p] => Action::Go(car(p)?),
            ["stop", p] => Action::Stop(car(p)?),
            ["in", p] => Action::In(car(p)?),
            ["out", p] => Action::Out(car(p)?),
            ["tick", r] => {
                let r = parse_rat(r).ok_or_else(|| err(format!("not a rational: `{r}`")))?;
                if r.is_negative() {
                    return Err(err("negative tick".into()));
                }
                Action::Tick(r)
            }
            _ => return Err(err(format!("cannot read action `{line}`"))),
        };
        actions.push(a);
    }
    Ok(Trace { cars: ids, actions })
}

/// inv1 .. inv7 for car `i` in `s`, in order.
pub fn invariants(s: &OracleState, i: usize, p: &Params) -> [bool; 7] {
    let c = &s.cars[i];
    let inside = p.cs0 < c.pos && c.pos < p.cs1;
    let implies = |a: bool, b: bool| !a || b;
    [
        !(s.color == Color::Red && inside),
        !(c.cs && c.pos < p.cs1 && s.color == Color::Red),
        implies(c.cs, p.cs0 <= c.pos && c.pos <= p.cs1),
        implies(c.cs && s.color != Color::Green && s.l <= s.now, p.cs1 <= c.pos),
        implies(c.cs && s.color != Color::Green, &p.cs1 - &c.pos <= &s.l - &s.now),
        implies(c.cs || c.pos == p.cs0 || c.going, c.active),
        implies(inside, c.cs),
    ]
}

/// One row per state: index, action, time, signal and per-car columns.
pub fn format_table(ids: &[String], actions: &[Action], states: &[OracleState]) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = write!(s, "{:>4}  {:<12} {:>6} {:>6} {:<7}", "step", "action", "now", "l", "color");
    for id in ids {
        let _ = write!(s, "  {:>6} {:>5} {:>5}", format!("pos:{id}"), "going", "cs");
    }
    s.push_str("  ps\n");
    for (k, st) in states.iter().enumerate() {
        let action = if k == 0 { "init".to_string() } else { actions[k - 1].show(ids) };
        let stutter = k > 0 && states[k - 1] == *st;
        let label = if stutter { format!("{action}*") } else { action };
        let _ = write!(s, "{k:>4}  {label:<12} {:>6} {:>6} {:<7}", rat::format(&st.now), rat::format(&st.l), st.color.name());
        for c in &st.cars {
            let _ = write!(s, "  {:>6} {:>5} {:>5}", rat::format(&c.pos), c.going, c.cs);
        }
        let ps: Vec<&str> = st.ps().into_iter().map(|i| ids[i].as_str()).collect();
        let _ = writeln!(s, "  {{{}}}", ps.join(" "));
    }
    s
}
