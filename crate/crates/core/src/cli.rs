//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::engine::{with_large_stack, Rewriter, DEFAULT_BUDGET};
use crate::module::{FlatModule, ModuleError, Registry};
use crate::oracle::{
    bounded_search, compare_with_engine, format_table, parse_rat, parse_trace, random_traces, run_trace, Params,
};
use crate::proof::{run_index, RunOptions};
use crate::script::{matches_expectation, run_script};
use crate::syntax::OpenItem;

#[derive(Parser, Debug)]
#[command(name = "cafelite", version, about = "Algebraic specifications: rewriting, proof scores, simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and flatten every module in the files.
    Check {
        files: Vec<PathBuf>,
        /// Directories searched for imported modules.
        #[arg(long = "path")]
        path: Vec<PathBuf>,
        /// Also run the files' `red` commands and check `-- expect:` notes.
        #[arg(long)]
        run: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Reduce a term in a module.
    Reduce {
        module: String,
        term: String,
        /// Files to load first; their open blocks on MODULE act as a prelude.
        #[arg(long = "file")]
        files: Vec<PathBuf>,
        #[arg(long = "path")]
        path: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Fail unless the normal form equals this term.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Run proof indexes; exit 0 iff every one passes.
    Prove {
        indexes: Vec<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a trace file through the simulator.
    Simulate {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "5,10,5")]
        params: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Breadth-first search for invariant violations.
    Search {
        #[arg(long, default_value = "5,10,5")]
        params: String,
        /// A number of cars, or comma-separated names.
        #[arg(long, default_value = "2")]
        cars: String,
        #[arg(long, default_value = "1,2,3,5")]
        ticks: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare simulator and rewriting engine on random traces.
    Compare {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value = "5,10,5")]
        params: String,
        #[arg(long, default_value = "1/2,1,2,3")]
        ticks: String,
        #[arg(long, default_value_t = 8)]
        max_actions: usize,
        #[arg(long, default_value_t = 3)]
        max_cars: usize,
        /// Directories holding the system module; defaults to corpus/multi.
        #[arg(long = "path")]
        path: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// Exit codes: 0 success, 1 a check failed, 2 the input could not be used.
pub const FAILED: i32 = 1;
pub const ERROR: i32 = 2;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return ERROR;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let (code, stdout, stderr) = with_large_stack(move || {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = match execute(cli.command, &mut o) {
            Ok(c) => c,
            Err(msg) => {
                let _ = writeln!(e, "error: {msg}");
                ERROR
            }
        };
        (code, o, e)
    });
    let _ = out.write_all(&stdout);
    let _ = err.write_all(&stderr);
    code
}

fn registry(path: &[PathBuf]) -> Registry {
    Registry::new(path.to_vec())
}

fn parse_params(s: &str) -> Result<Params, String> {
    s.parse().map_err(|e: crate::oracle::OracleError| e.to_string())
}

fn parse_ticks(s: &str) -> Result<Vec<num_rational::BigRational>, String> {
    s.split(',').map(|t| parse_rat(t).ok_or_else(|| format!("not a rational tick: `{t}`"))).collect()
}

fn json(out: &mut dyn Write, v: &impl serde::Serialize) -> Result<(), String> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| e.to_string())?;
    let _ = writeln!(out);
    Ok(())
}

fn load_all(reg: &mut Registry, files: &[PathBuf]) -> Result<Vec<crate::syntax::Script>, ModuleError> {
    files.iter().map(|f| reg.load_file(f)).collect()
}

/// `module` extended with the declarations of every open block on it.
fn with_prelude(base: &FlatModule, scripts: &[crate::syntax::Script], module: &str) -> Result<FlatModule, ModuleError> {
    let mut b = base.open(module);
    for s in scripts {
        for o in s.opens().filter(|o| o.module == module) {
            for item in &o.items {
                if let OpenItem::Decl(d) = item {
                    b.declare(d)?;
                }
            }
        }
    }
    Ok(b.finish())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    let e = |x: ModuleError| x.to_string();
    match cmd {
        Command::Check { files, path, run, budget } => {
            let mut reg = registry(&path);
            let scripts = load_all(&mut reg, &files).map_err(e)?;
            let mut modules = 0;
            for s in &scripts {
                for m in s.modules() {
                    reg.module(&m.name).map_err(e)?;
                    modules += 1;
                }
            }
            let _ = writeln!(out, "ok: {} files, {modules} modules", files.len());
            if !run {
                return Ok(0);
            }
            let mut failed = 0;
            let mut total = 0;
            for s in &scripts {
                for r in run_script(&mut reg, s, budget).map_err(e)? {
                    total += 1;
                    let _ = writeln!(out, "{r}");
                    if r.passed == Some(false) || r.result.exhausted {
                        failed += 1;
                    }
                }
            }
            let _ = writeln!(out, "{total} reductions, {failed} failed");
            Ok(if failed == 0 { 0 } else { FAILED })
        }
        Command::Reduce { module, term, files, path, budget, expect } => {
            let mut search = path.clone();
            search.extend(files.iter().filter_map(|f| f.parent().map(Path::to_path_buf)));
            let mut reg = registry(&search);
            let scripts = load_all(&mut reg, &files).map_err(e)?;
            let base = reg.module(&module).map_err(e)?;
            let m = with_prelude(&base, &scripts, &module).map_err(e)?;
            let t = m.parse(&term).map_err(e)?;
            let mut rw = Rewriter::new(&m).with_budget(budget);
            let nf = rw.reduce(&t);
            let _ = writeln!(out, "{}", nf.term);
            let _ = writeln!(out, "({} steps)", nf.steps);
            if nf.exhausted {
                let _ = writeln!(out, "budget of {budget} steps exhausted; partial result above");
                return Ok(FAILED);
            }
            if let Some(x) = expect {
                if !matches_expectation(&m, &nf.term, &x) {
                    let _ = writeln!(out, "expected {x}");
                    return Ok(FAILED);
                }
            }
            Ok(0)
        }
        Command::Prove { indexes, budget, threads, format } => {
            let opts = RunOptions { budget, threads, internal: false };
            let mut all = true;
            let mut reports = Vec::new();
            for ix in &indexes {
                let r = run_index(ix, &opts).map_err(|x| x.to_string())?;
                all &= r.pass;
                reports.push(r);
            }
            match format {
                Format::Text => {
                    for r in &reports {
                        let _ = write!(out, "{}", r.text());
                        json(out, &r.summary())?;
                    }
                }
                Format::Json => json(out, &reports)?,
            }
            Ok(if all && !reports.is_empty() { 0 } else { FAILED })
        }
        Command::Simulate { trace, params, format } => {
            let params = parse_params(&params)?;
            let text = std::fs::read_to_string(&trace).map_err(|x| format!("{}: {x}", trace.display()))?;
            let tr = parse_trace(&text, None).map_err(|x| format!("{}: {x}", trace.display()))?;
            let states = run_trace(&params, tr.cars.len(), &tr.actions);
            match format {
                Format::Text => {
                    let _ = writeln!(out, "{params}");
                    let _ = write!(out, "{}", format_table(&tr.cars, &tr.actions, &states));
                }
                Format::Json => {
                    let rows: Vec<_> = states
                        .iter()
                        .enumerate()
                        .map(|(k, s)| {
                            serde_json::json!({
                                "step": k,
                                "action": if k == 0 { "init".into() } else { tr.actions[k - 1].show(&tr.cars) },
                                "now": crate::rat::format(&s.now),
                                "l": crate::rat::format(&s.l),
                                "color": s.color,
                                "cars": s.cars.iter().zip(&tr.cars).map(|(c, id)| serde_json::json!({
                                    "id": id, "pos": crate::rat::format(&c.pos), "going": c.going, "cs": c.cs, "active": c.active,
                                })).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    json(out, &rows)?;
                }
            }
            Ok(0)
        }
        Command::Search { params, cars, ticks, depth, format } => {
            let params = parse_params(&params)?;
            let cars: Vec<String> = match cars.parse::<usize>() {
                Ok(n) => (1..=n).map(|i| format!("p{i}")).collect(),
                Err(_) => cars.split(',').map(|c| c.trim().to_string()).collect(),
            };
            let ticks = parse_ticks(&ticks)?;
            let report = bounded_search(&params, &cars, &ticks, depth);
            match format {
                Format::Text => {
                    if !params.assumption_holds() {
                        let _ = writeln!(out, "note: cs1 - cs0 <= t0 does not hold for these parameters");
                    }
                    let _ = write!(out, "{}", report.text());
                }
                Format::Json => json(out, &report)?,
            }
            Ok(if report.total_violations() == 0 { 0 } else { FAILED })
        }
        Command::Compare { seed, count, params, ticks, max_actions, max_cars, path, format } => {
            let params = parse_params(&params)?;
            let ticks = parse_ticks(&ticks)?;
            let path = if path.is_empty() { vec![PathBuf::from("corpus/multi")] } else { path };
            let mut reg = registry(&path);
            let ms = reg.module("MS").map_err(e)?;
            let traces = random_traces(seed, count, max_actions, max_cars, &ticks);
            let report = compare_with_engine(&ms, &params, &traces).map_err(e)?;
            match format {
                Format::Text => {
                    let _ = writeln!(out, "seed {seed}");
                    let _ = write!(out, "{}", report.text());
                }
                Format::Json => json(out, &serde_json::json!({ "seed": seed, "report": report }))?,
            }
            Ok(if report.mismatches.is_empty() { 0 } else { FAILED })
        }
    }
}
