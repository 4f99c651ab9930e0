mod common;

use cafelite::oracle::{
    enabled, int, invariants, parse_rat, parse_trace, random_traces, run_trace, step, Action, OracleError, Params,
};
use common::corpus;

fn ticks() -> Vec<num_rational::BigRational> {
    ["1/2", "1", "2", "3", "5"].iter().map(|t| parse_rat(t).unwrap()).collect()
}

#[test]
fn params_are_validated() {
    assert!(matches!("0,10,5".parse::<Params>(), Err(OracleError::BadParams(_))));
    assert!(matches!("10,5,5".parse::<Params>(), Err(OracleError::BadParams(_))));
    assert!(matches!("5,10,0".parse::<Params>(), Err(OracleError::BadParams(_))));
    assert!(matches!("5,10".parse::<Params>(), Err(OracleError::BadParams(_))));
    let p: Params = "5,10,2".parse().unwrap();
    assert!(!p.assumption_holds());
    assert!(Params::example().assumption_holds());
    assert_eq!(Params::example().to_string(), "cs0=5 cs1=10 t0=5");
}

#[test]
fn trace_files_parse_and_reject_garbage() {
    let t = parse_trace("go a # first\n-- a comment\ntick 3/2\nin b\n", None).unwrap();
    assert_eq!(t.cars, ["a", "b"]);
    assert_eq!(t.actions, [Action::Go(0), Action::Tick(parse_rat("3/2").unwrap()), Action::In(1)]);
    for bad in ["jump p1", "tick x", "tick -1", "go"] {
        assert!(matches!(parse_trace(bad, None), Err(OracleError::Trace { line: 1, .. })), "{bad}");
    }
    let fixed = ["p1".to_string()];
    assert!(parse_trace("go p2", Some(&fixed)).is_err());
}

#[test]
fn ineffective_in_stutters() {
    let text = std::fs::read_to_string(corpus("traces/ineffective_in.trace")).unwrap();
    let t = parse_trace(&text, None).unwrap();
    let s = run_trace(&Params::example(), t.cars.len(), &t.actions);
    let k = t.actions.iter().position(|a| matches!(a, Action::In(_))).unwrap();
    assert_eq!(s[k], s[k + 1]);
}

#[test]
fn random_traces_respect_basic_laws() {
    let p = Params::example();
    for tr in random_traces(99, 500, 12, 3, &ticks()) {
        let mut s = run_trace(&p, tr.cars.len(), &[])[0].clone();
        for a in &tr.actions {
            let t = step(&s, a, &p);
            if !enabled(&s, a, &p) {
                assert_eq!(t, s, "{a:?} is not effective but changed the state");
            }
            assert!(t.now >= s.now);
            for (c, d) in s.cars.iter().zip(&t.cars) {
                assert!(d.pos >= c.pos);
                assert!(!c.active || d.active, "active cars stay active");
                assert!(!d.going || d.active);
            }
            for i in 0..t.cars.len() {
                assert_eq!(invariants(&t, i, &p), [true; 7], "{:?} after {a:?}", t);
            }
            s = t;
        }
    }
}

#[test]
fn random_traces_are_seeded() {
    assert_eq!(random_traces(1, 20, 8, 3, &ticks()), random_traces(1, 20, 8, 3, &ticks()));
    assert_ne!(random_traces(1, 20, 8, 3, &ticks()), random_traces(2, 20, 8, 3, &ticks()));
}

#[test]
fn yellow_light_holds_time() {
    let text = std::fs::read_to_string(corpus("traces/two_cars_yellow.trace")).unwrap();
    let t = parse_trace(&text, None).unwrap();
    let s = run_trace(&Params::example(), t.cars.len(), &t.actions);
    let last = s.last().unwrap();
    assert_eq!(last.now, int(5));
    assert!(!last.cars[0].cs);
    assert_eq!(s[s.len() - 2], *last, "the final tick stutters");
}
