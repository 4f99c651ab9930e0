//! Oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cafelite::engine::{bool_normalize, Rewriter, DEFAULT_BUDGET};
use cafelite::module::{FlatModule, Registry};
use cafelite::script::matches_expectation;
use cafelite::syntax::{Item, OpenItem};
use cafelite::term::match_term;
use cafelite::term::{Substitution, Term};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

pub fn module_from(text: &str, name: &str) -> Arc<FlatModule> {
    let mut reg = Registry::new(Vec::new());
    reg.load_str(text, None).unwrap();
    reg.module(name).unwrap()
}

/// One `red` of a corpus file, with the module it runs in.
pub struct CorpusRed {
    pub file: String,
    pub module: FlatModule,
    pub input: Term,
    pub expect: Option<String>,
}

/// (file, search path) of every corpus script.
pub fn corpus_files() -> Vec<(PathBuf, Vec<PathBuf>)> {
    let mut out = Vec::new();
    for dir in ["intro", "single", "multi", "proof"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(corpus(dir))
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "cafe"))
            .collect();
        files.sort();
        let mut search = vec![corpus(dir)];
        if dir == "proof" {
            search.push(corpus("multi"));
        }
        out.extend(files.into_iter().map(|f| (f, search.clone())));
    }
    out
}

/// Every `red` command in the corpus, with open-block declarations applied
/// in order.
pub fn corpus_reductions() -> Vec<CorpusRed> {
    let mut out = Vec::new();
    for (file, search) in corpus_files() {
        let mut reg = Registry::new(search);
        let script = reg.load_file(&file).unwrap();
        let name = file.strip_prefix(corpus("")).unwrap_or(&file).display().to_string();
        let mut current: Option<String> = None;
        for item in &script.items {
            match item {
                Item::Module(m) => current = Some(m.name.clone()),
                Item::Red(r) => {
                    let mname = r.module.clone().or_else(|| current.clone()).unwrap();
                    let m = reg.module(&mname).unwrap();
                    let input = m.parse_tokens(&r.tokens).unwrap();
                    out.push(CorpusRed { file: name.clone(), module: (*m).clone(), input, expect: r.expect.clone() });
                }
                Item::Open(o) => {
                    let base = reg.module(&o.module).unwrap();
                    let mut b = base.open(&o.module);
                    for it in &o.items {
                        match it {
                            OpenItem::Decl(d) => b.declare(d).unwrap(),
                            OpenItem::Red(r) => {
                                let m = b.snapshot();
                                let input = m.parse_tokens(&r.tokens).unwrap();
                                out.push(CorpusRed { file: name.clone(), module: m, input, expect: r.expect.clone() });
                            }
                        }
                    }
                    current = Some(o.module.clone());
                }
            }
        }
    }
    out
}

/// Golden reductions: every corpus `red` with an expectation. Returns the
/// count and the slowest time, or the first failure.
pub fn golden() -> Result<(usize, Duration), String> {
    let mut n = 0;
    let mut slowest = Duration::ZERO;
    for r in corpus_reductions() {
        let Some(e) = &r.expect else { continue };
        let start = Instant::now();
        let nf = Rewriter::new(&r.module).reduce(&r.input);
        let took = start.elapsed();
        slowest = slowest.max(took);
        if nf.exhausted || !matches_expectation(&r.module, &nf.term, e) {
            return Err(format!("{}: {} gave {}, expected {e}", r.file, r.input, nf.term));
        }
        if took > Duration::from_secs(1) {
            return Err(format!("{}: {} took {took:?}", r.file, r.input));
        }
        n += 1;
    }
    Ok((n, slowest))
}

/// Idempotence, memo transparency and sort preservation on every corpus
/// reduction. Without memo the observers of long traces unfold
/// exponentially, so that run gets `plain_budget` steps; returns the number
/// of reductions and how many of them ran out of it.
pub fn engine_invariants(plain_budget: u64) -> Result<(usize, usize), String> {
    let reds = corpus_reductions();
    let mut skipped = 0;
    for r in &reds {
        let m = &r.module;
        let nf = Rewriter::new(m).with_budget(DEFAULT_BUDGET).reduce(&r.input);
        if nf.exhausted {
            return Err(format!("{}: {} exhausted", r.file, r.input));
        }
        let again = Rewriter::new(m).reduce(&nf.term);
        if again.term != nf.term {
            return Err(format!("{}: {} not idempotent: {} then {}", r.file, r.input, nf.term, again.term));
        }
        let plain = Rewriter::new(m).without_memo().with_budget(plain_budget).reduce(&r.input);
        if plain.exhausted {
            skipped += 1;
        } else if plain.term != nf.term {
            return Err(format!("{}: {} memo changes result: {} vs {}", r.file, r.input, nf.term, plain.term));
        }
        let sig = m.sig();
        let (si, so) = (sig.least_sort(&r.input), sig.least_sort(&nf.term));
        match (si, so) {
            (Ok(si), Ok(so)) if sig.leq(&so, &si) => {}
            (si, so) => return Err(format!("{}: {} sort {si:?} became {so:?}", r.file, r.input)),
        }
    }
    Ok((reds.len(), skipped))
}

#[derive(Clone, Debug)]
pub enum Formula {
    Atom(usize),
    Lit(bool),
    Not(Box<Formula>),
    Bin(&'static str, Box<Formula>, Box<Formula>),
}

pub const ATOMS: [&str; 4] = ["a", "b", "c", "d"];

impl Formula {
    pub fn random(rng: &mut impl Rng, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return if rng.gen_bool(0.1) { Formula::Lit(rng.gen()) } else { Formula::Atom(rng.gen_range(0..4)) };
        }
        if rng.gen_bool(0.2) {
            return Formula::Not(Box::new(Formula::random(rng, depth - 1)));
        }
        let op = ["and", "or", "xor", "implies"][rng.gen_range(0..4)];
        Formula::Bin(op, Box::new(Formula::random(rng, depth - 1)), Box::new(Formula::random(rng, depth - 1)))
    }

    pub fn text(&self) -> String {
        match self {
            Formula::Atom(i) => ATOMS[*i].to_string(),
            Formula::Lit(b) => b.to_string(),
            Formula::Not(f) => format!("(not {})", f.text()),
            Formula::Bin(op, a, b) => format!("({} {op} {})", a.text(), b.text()),
        }
    }

    pub fn eval(&self, v: u32) -> bool {
        match self {
            Formula::Atom(i) => v >> i & 1 == 1,
            Formula::Lit(b) => *b,
            Formula::Not(f) => !f.eval(v),
            Formula::Bin(op, a, b) => {
                let (x, y) = (a.eval(v), b.eval(v));
                match *op {
                    "and" => x && y,
                    "or" => x || y,
                    "xor" => x != y,
                    _ => !x || y,
                }
            }
        }
    }

    pub fn table(&self) -> u16 {
        (0..16).fold(0, |t, v| t | (self.eval(v) as u16) << v)
    }
}

/// Evaluates a normal form built from `and`, `xor`, atoms and literals.
fn eval_normal(t: &Term, v: u32) -> Result<bool, String> {
    if let Some(b) = t.as_bool() {
        return Ok(b);
    }
    let op = t.head().ok_or_else(|| format!("variable in {t}"))?;
    let args = t.args();
    match op.name() {
        "_and_" => args.iter().try_fold(true, |acc, a| Ok(acc & eval_normal(a, v)?)),
        "_xor_" => args.iter().try_fold(false, |acc, a| Ok(acc ^ eval_normal(a, v)?)),
        n => match ATOMS.iter().position(|a| *a == n) {
            Some(i) if args.is_empty() => Ok(v >> i & 1 == 1),
            _ => Err(format!("`{n}` in normal form {t}")),
        },
    }
}

/// `count` random formulas over four atoms: each normal form must have the
/// formula's truth table, and formulas with one truth table must share one
/// normal form. Returns the number of distinct tables seen.
pub fn bool_truth_tables(seed: u64, count: usize) -> Result<usize, String> {
    let m = module_from("mod! ATOMS { ops a b c d : -> Bool }", "ATOMS");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_table: BTreeMap<u16, Term> = BTreeMap::new();
    for _ in 0..count {
        let f = Formula::random(&mut rng, 4);
        let t = m.parse(&f.text()).map_err(|e| format!("{}: {e}", f.text()))?;
        let nf = bool_normalize(&t);
        let table = f.table();
        for v in 0..16 {
            if eval_normal(&nf, v)? != f.eval(v) {
                return Err(format!("{} normalized to {nf}, wrong at assignment {v:04b}", f.text()));
            }
        }
        match by_table.get(&table) {
            Some(prev) if *prev != nf => return Err(format!("{} gave {nf}, an equivalent formula gave {prev}", f.text())),
            Some(_) => {}
            None => {
                by_table.insert(table, nf);
            }
        }
    }
    Ok(by_table.len())
}

const ACI_MODULE: &str = "mod! SETS {
  [Elt < Set]
  op _ _ : Set Set -> Set {assoc comm idem}
  ops e1 e2 e3 e4 e5 : -> Elt
  vars X Y : Elt
  vars S T : Set
}";

fn subsets(elts: &[Term], m: &FlatModule) -> Vec<Term> {
    let join = m.sig().family("_ _", 2).unwrap().sym.clone();
    (1u32..1 << elts.len())
        .map(|mask| {
            let mut part: Vec<Term> = (0..elts.len()).filter(|i| mask >> i & 1 == 1).map(|i| elts[i].clone()).collect();
            if part.len() == 1 {
                part.pop().unwrap()
            } else {
                Term::app(join.clone(), part)
            }
        })
        .collect()
}

/// Compares ACI matching with enumeration of every substitution into the
/// five constants, on random patterns and subjects of at most five leaves.
pub fn aci_brute_force(seed: u64, cases: usize) -> Result<usize, String> {
    let m = module_from(ACI_MODULE, "SETS");
    let elts: Vec<Term> = (1..=5).map(|i| m.parse(&format!("e{i}")).unwrap()).collect();
    let sets = subsets(&elts, &m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut solutions = 0;
    for _ in 0..cases {
        let plen = rng.gen_range(1..=3);
        let pieces: Vec<String> = (0..plen)
            .map(|_| match rng.gen_range(0..6) {
                0 => "X".into(),
                1 => "Y".into(),
                2 => "S".into(),
                3 => "T".into(),
                _ => format!("e{}", rng.gen_range(1..=5)),
            })
            .collect();
        let slen = rng.gen_range(1..=5);
        let mut picked: Vec<usize> = (0..5).collect();
        for i in 0..5 {
            let j = rng.gen_range(i..5);
            picked.swap(i, j);
        }
        let subject_text: Vec<String> = picked[..slen].iter().map(|i| format!("e{}", i + 1)).collect();
        let pattern = m.parse(&pieces.join(" ")).map_err(|e| e.to_string())?;
        let subject = m.parse(&subject_text.join(" ")).map_err(|e| e.to_string())?;

        let got: BTreeSet<Substitution> = match_term(m.sig(), &pattern, &subject).into_iter().collect();

        let vars: Vec<_> = pattern.vars();
        let domains: Vec<&[Term]> = vars
            .iter()
            .map(|v| if v.sort.name() == "Elt" { &elts[..] } else { &sets[..] })
            .collect();
        let mut want = BTreeSet::new();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let mut s = Substitution::new();
            for (k, v) in vars.iter().enumerate() {
                s.bind(v.name.clone(), domains[k][idx[k]].clone());
            }
            if s.apply(&pattern) == subject {
                want.insert(s);
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        if got != want {
            let show = |s: &BTreeSet<Substitution>| s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
            return Err(format!("{pattern} against {subject}: matcher {{{}}} brute force {{{}}}", show(&got), show(&want)));
        }
        solutions += want.len();
    }
    Ok(solutions)
}

/// Exact fractions with their own gcd normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac(pub i128, pub i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        let g = gcd(n, d).max(1) * d.signum();
        Frac(n / g, d / g)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
    pub fn neg(self) -> Frac {
        Frac(-self.0, self.1)
    }
    pub fn le(self, o: Frac) -> bool {
        self.0 * o.1 <= o.0 * self.1
    }
}

fn rat_expr(rng: &mut impl Rng, depth: usize) -> (String, Frac) {
    if depth == 0 || rng.gen_bool(0.3) {
        let n = rng.gen_range(0..=12);
        let d = rng.gen_range(1..=6);
        let text = if d == 1 { n.to_string() } else { format!("{n}/{d}") };
        return (text, Frac::new(n, d));
    }
    let (a, x) = rat_expr(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => (format!("(- {a})"), x.neg()),
        k => {
            let (b, y) = rat_expr(rng, depth - 1);
            match k {
                1 => (format!("({a} + {b})"), x.add(y)),
                2 => (format!("({a} * {b})"), x.mul(y)),
                _ => (format!("({a} - {b})"), x.add(y.neg())),
            }
        }
    }
}

/// Random ground arithmetic and comparisons reduced in RAT against [`Frac`].
pub fn rat_oracle(seed: u64, count: usize) -> Result<(), String> {
    let m = module_from("mod! R { pr(RAT) }", "R");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let (a, x) = rat_expr(&mut rng, 3);
        let (text, want) = if rng.gen_bool(0.3) {
            let (b, y) = rat_expr(&mut rng, 3);
            (format!("{a} <= {b}"), Term::Bool(x.le(y)))
        } else {
            (a, Term::rat(BigRational::new(x.0.into(), x.1.into())))
        };
        let t = m.parse(&text).map_err(|e| format!("{text}: {e}"))?;
        let nf = Rewriter::new(&m).reduce(&t);
        if nf.term != want {
            return Err(format!("{text} gave {}, expected {want}", nf.term));
        }
    }
    Ok(())
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

pub fn write_temp(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}
