//! Execution of `red` commands and `open ... close` blocks.

use std::fmt;

use crate::engine::{NormalForm, Rewriter};
use crate::module::{FlatModule, ModuleError, Registry};
use crate::syntax::{tokenize, Item, OpenBlock, OpenItem, RedCommand, Script, Span, Token};
use crate::term::Term;

/// Outcome of one `red` command.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub module: String,
    pub input: Term,
    pub result: NormalForm,
    pub expect: Option<String>,
    /// `None` without an expectation.
    pub passed: Option<bool>,
    pub span: Span,
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}: {} --> {}", self.span, self.module, self.input, self.result.term)?;
        if self.result.exhausted {
            write!(f, " (budget exhausted)")?;
        }
        match (self.passed, &self.expect) {
            (Some(false), Some(e)) => write!(f, " [expected {e}]"),
            _ => Ok(()),
        }
    }
}

/// Does `actual` match the expectation text in `module`'s syntax?
pub fn matches_expectation(module: &FlatModule, actual: &Term, expect: &str) -> bool {
    match tokenize(expect).ok().and_then(|t| module.parse_tokens(&t).ok()) {
        Some(e) => e == *actual,
        None => actual.to_string() == expect.trim(),
    }
}

fn run_red(module: &FlatModule, tokens: &[Token], red: &RedCommand, budget: u64) -> Result<Reduction, ModuleError> {
    let input = module.parse_tokens(tokens)?;
    let result = Rewriter::new(module).with_budget(budget).reduce(&input);
    let passed = red.expect.as_deref().map(|e| !result.exhausted && matches_expectation(module, &result.term, e));
    Ok(Reduction {
        module: module.name().to_string(),
        input,
        result,
        expect: red.expect.clone(),
        passed,
        span: red.span,
    })
}

/// Runs an open block over `base`. Declarations take effect in order, so
/// each `red` sees the declarations before it.
pub fn run_open(base: &FlatModule, block: &OpenBlock, budget: u64) -> Result<Vec<Reduction>, ModuleError> {
    let label = block.annotation("passage").map(str::to_string).unwrap_or_else(|| format!("open {}", block.module));
    let mut b = base.open(&label);
    let mut out = Vec::new();
    for item in &block.items {
        match item {
            OpenItem::Decl(d) => b.declare(d)?,
            OpenItem::Red(r) => {
                let m = b.snapshot();
                out.push(run_red(&m, &r.tokens, r, budget)?);
            }
        }
    }
    Ok(out)
}

/// Runs every `red` command of a script whose modules are registered in
/// `reg`. A `red` without `in M` uses the module defined or opened last.
pub fn run_script(reg: &mut Registry, script: &Script, budget: u64) -> Result<Vec<Reduction>, ModuleError> {
    let mut current: Option<String> = None;
    let mut out = Vec::new();
    for item in &script.items {
        match item {
            Item::Module(m) => current = Some(m.name.clone()),
            Item::Red(r) => {
                let name = r.module.clone().or_else(|| current.clone()).ok_or_else(|| ModuleError::Invalid {
                    module: "<script>".into(),
                    span: r.span,
                    message: "`red` without a module".into(),
                })?;
                let m = reg.module(&name)?;
                out.push(run_red(&m, &r.tokens, r, budget)?);
            }
            Item::Open(o) => {
                let m = reg.module(&o.module)?;
                out.extend(run_open(&m, o, budget)?);
                current = Some(o.module.clone());
            }
        }
    }
    Ok(out)
}
