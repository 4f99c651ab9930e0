//! Mixfix term syntax.
//!
//! Terms are parsed in two steps: a precedence-climbing pass over the
//! operator table derived from the signature produces an untyped [`Expr`],
//! and elaboration resolves names to variables or operators and sort-checks
//! the result.

use std::collections::HashMap;

use num_rational::BigRational;

use super::lexer::{Span, Tok, Token};
use super::parser::ParseError;
use crate::term::{Signature, Sort, Term};

const MAX_PREC: u32 = 127;
const JUXTAPOSITION: &str = "_ _";
const JUXTAPOSITION_PREC: u32 = 20;

/// Precedence of the built-in operators; smaller binds tighter.
fn builtin_prec(name: &str) -> Option<u32> {
    Some(match name {
        "-_" => 15,
        "_ _" => JUXTAPOSITION_PREC,
        "_*_" => 31,
        "_+_" | "_-_" => 33,
        "_<=_" | "_<_" | "_>=_" | "_>_" | "_in_" => 45,
        "_=_" => 51,
        "not_" => 53,
        "_and_" => 55,
        "_xor_" => 57,
        "_or_" => 59,
        "_implies_" => 61,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Word(String),
    Hole,
}

fn pieces(name: &str) -> Vec<Piece> {
    let mut out = Vec::new();
    for (i, chunk) in name.split('_').enumerate() {
        if i > 0 {
            out.push(Piece::Hole);
        }
        for w in chunk.split_whitespace() {
            out.push(Piece::Word(w.to_string()));
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Infix {
    name: String,
    prec: u32,
    right: bool,
}

#[derive(Clone, Debug)]
struct Prefix {
    name: String,
    pieces: Vec<Piece>,
    prec: u32,
}

/// Operator table derived from a signature.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    infix: HashMap<String, Infix>,
    prefix: HashMap<String, Prefix>,
    /// Words that continue a mixfix operator (`then`, `else`, `fi`).
    reserved: std::collections::HashSet<String>,
    juxtaposition: bool,
}

impl Grammar {
    pub fn new(sig: &Signature) -> Grammar {
        let mut g = Grammar::default();
        for fam in sig.families() {
            let name = fam.sym.name();
            if !name.contains('_') {
                continue;
            }
            if name == JUXTAPOSITION {
                g.juxtaposition = true;
                continue;
            }
            let ps = pieces(name);
            let prec = builtin_prec(name);
            match ps.as_slice() {
                [Piece::Hole, Piece::Word(w), Piece::Hole] => {
                    g.infix.insert(
                        w.clone(),
                        Infix { name: name.to_string(), prec: prec.unwrap_or(41), right: name == "_implies_" },
                    );
                }
                [Piece::Word(w), rest @ ..] => {
                    for p in rest {
                        if let Piece::Word(k) = p {
                            g.reserved.insert(k.clone());
                        }
                    }
                    let default = if matches!(ps.last(), Some(Piece::Hole)) { 15 } else { 0 };
                    g.prefix.insert(
                        w.clone(),
                        Prefix { name: name.to_string(), pieces: ps[1..].to_vec(), prec: prec.unwrap_or(default) },
                    );
                }
                _ => {}
            }
        }
        g
    }
}

/// Untyped parse tree.
#[derive(Clone, Debug)]
pub enum Expr {
    Name(String, Span),
    InlineVar(String, String, Span),
    Num(BigRational, Span),
    /// `f(a, b)`
    Call(String, Vec<Expr>, Span),
    /// Mixfix application by canonical operator name.
    Op(String, Vec<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Name(_, s) | Expr::InlineVar(_, _, s) | Expr::Num(_, s) | Expr::Call(_, _, s) | Expr::Op(_, _, s) => *s,
        }
    }
}

struct Pratt<'a> {
    toks: &'a [Token],
    i: usize,
    g: &'a Grammar,
}

fn split_inline_var(w: &str) -> Option<(&str, &str)> {
    let (name, sort) = w.rsplit_once(':')?;
    (!name.is_empty() && !sort.is_empty()).then_some((name, sort))
}

impl<'a> Pratt<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.i)
    }

    fn end_span(&self) -> Span {
        self.toks.last().map(|t| t.span).unwrap_or_default()
    }

    fn err(&self, span: Span, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(span, msg)
    }

    fn expect_word(&mut self, w: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.is(w) => {
                self.i += 1;
                Ok(())
            }
            Some(t) => Err(self.err(t.span, format!("expected `{w}`, found `{}`", t.tok))),
            None => Err(self.err(self.end_span(), format!("expected `{w}` before end of term"))),
        }
    }

    fn starts_primary(&self, t: &Token) -> bool {
        match &t.tok {
            Tok::Num(_) | Tok::LParen => true,
            Tok::Ident(w) => {
                !self.g.infix.contains_key(w.as_str())
                    && !self.g.reserved.contains(w.as_str())
                    && !self.g.prefix.contains_key(w.as_str())
                    && w != ":"
            }
            _ => false,
        }
    }

    fn expr(&mut self, max: u32) -> Result<Expr, ParseError> {
        let mut lhs = self.primary()?;
        while let Some(t) = self.peek() {
            if let Some(inf) = t.ident().and_then(|w| self.g.infix.get(w)) {
                if inf.prec > max {
                    break;
                }
                self.i += 1;
                let rhs = self.expr(if inf.right { inf.prec } else { inf.prec - 1 })?;
                lhs = Expr::Op(inf.name.clone(), vec![lhs, rhs], t.span);
            } else if self.g.juxtaposition && self.starts_primary(t) {
                if JUXTAPOSITION_PREC > max {
                    break;
                }
                let rhs = self.expr(JUXTAPOSITION_PREC - 1)?;
                lhs = Expr::Op(JUXTAPOSITION.to_string(), vec![lhs, rhs], t.span);
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(t) = self.peek() else {
            return Err(self.err(self.end_span(), "unexpected end of term"));
        };
        self.i += 1;
        match &t.tok {
            Tok::Num(r) => Ok(Expr::Num(r.clone(), t.span)),
            Tok::LParen => {
                let e = self.expr(MAX_PREC)?;
                match self.peek() {
                    Some(c) if c.tok == Tok::RParen => {
                        self.i += 1;
                        Ok(e)
                    }
                    Some(c) => Err(self.err(c.span, format!("expected `)`, found `{}`", c.tok))),
                    None => Err(self.err(t.span, "unclosed `(`")),
                }
            }
            Tok::Ident(w) => {
                if let Some(pre) = self.g.prefix.get(w.as_str()) {
                    let mut args = Vec::new();
                    let n = pre.pieces.len();
                    for (k, p) in pre.pieces.iter().enumerate() {
                        match p {
                            Piece::Word(word) => self.expect_word(word)?,
                            Piece::Hole if k + 1 == n => args.push(self.expr(pre.prec)?),
                            Piece::Hole => args.push(self.expr(MAX_PREC)?),
                        }
                    }
                    return Ok(Expr::Op(pre.name.clone(), args, t.span));
                }
                if self.peek().is_some_and(|n| n.tok == Tok::LParen) {
                    self.i += 1;
                    let mut args = Vec::new();
                    loop {
                        args.push(self.expr(MAX_PREC)?);
                        match self.peek() {
                            Some(c) if c.tok == Tok::Comma => self.i += 1,
                            Some(c) if c.tok == Tok::RParen => {
                                self.i += 1;
                                break;
                            }
                            Some(c) => return Err(self.err(c.span, format!("expected `,` or `)`, found `{}`", c.tok))),
                            None => return Err(self.err(t.span, format!("unclosed argument list of `{w}`"))),
                        }
                    }
                    return Ok(Expr::Call(w.clone(), args, t.span));
                }
                if let Some((name, sort)) = split_inline_var(w) {
                    return Ok(Expr::InlineVar(name.to_string(), sort.to_string(), t.span));
                }
                if self.g.infix.contains_key(w.as_str()) || self.g.reserved.contains(w.as_str()) {
                    return Err(self.err(t.span, format!("unexpected `{w}`")));
                }
                Ok(Expr::Name(w.clone(), t.span))
            }
            other => Err(self.err(t.span, format!("unexpected `{other}` in term"))),
        }
    }
}

/// Parses a complete token sequence as one expression.
pub fn parse_expr(toks: &[Token], g: &Grammar) -> Result<Expr, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::syntax(Span::default(), "empty term"));
    }
    let mut p = Pratt { toks, i: 0, g };
    let e = p.expr(MAX_PREC)?;
    if let Some(t) = p.peek() {
        return Err(ParseError::syntax(t.span, format!("unexpected `{}` after term", t.tok)));
    }
    Ok(e)
}

/// Variables in scope: module variables plus inline `X:Sort` declarations.
pub type VarScope = HashMap<String, Sort>;

/// Adds every inline `X:Sort` variable in `toks` to `scope`.
pub fn collect_inline_vars(toks: &[Token], sig: &Signature, scope: &mut VarScope) -> Result<(), ParseError> {
    for t in toks {
        if let Some((name, sort)) = t.ident().and_then(split_inline_var) {
            let sort = Sort::new(sort);
            if !sig.has_sort(&sort) {
                return Err(ParseError::syntax(t.span, format!("unknown sort `{sort}`")));
            }
            scope.insert(name.to_string(), sort);
        }
    }
    Ok(())
}

/// Resolves names and builds a canonical term.
pub fn elaborate(e: &Expr, sig: &Signature, scope: &VarScope) -> Result<Term, ParseError> {
    let sort_err = |span: Span, err: crate::term::SortError| ParseError::syntax(span, err.to_string());
    match e {
        Expr::Num(r, _) => Ok(Term::rat(r.clone())),
        Expr::InlineVar(name, sort, span) => {
            let sort = Sort::new(sort);
            if !sig.has_sort(&sort) {
                return Err(ParseError::syntax(*span, format!("unknown sort `{sort}`")));
            }
            Ok(Term::var(name, sort))
        }
        Expr::Name(name, span) => {
            if let Some(sort) = scope.get(name) {
                return Ok(Term::var(name, sort.clone()));
            }
            match name.as_str() {
                "true" => return Ok(Term::Bool(true)),
                "false" => return Ok(Term::Bool(false)),
                _ => {}
            }
            match sig.family(name, 0) {
                Some(f) => Ok(Term::constant(&f.sym)),
                None => Err(sort_err(*span, crate::term::SortError::UnknownOperator { name: name.clone(), arity: 0 })),
            }
        }
        Expr::Call(name, args, span) | Expr::Op(name, args, span) => {
            if name == "_-_" {
                // binary minus is sugar for adding the negation
                let neg = Expr::Op("-_".into(), vec![args[1].clone()], *span);
                return elaborate(&Expr::Op("_+_".into(), vec![args[0].clone(), neg], *span), sig, scope);
            }
            let fam = sig.family(name, args.len()).ok_or_else(|| {
                sort_err(*span, crate::term::SortError::UnknownOperator { name: name.clone(), arity: args.len() })
            })?;
            let mut terms = Vec::with_capacity(args.len());
            let mut sorts = Vec::with_capacity(args.len());
            for a in args {
                let t = elaborate(a, sig, scope)?;
                sorts.push(sig.least_sort(&t).map_err(|err| sort_err(a.span(), err))?);
                terms.push(t);
            }
            sig.resolve(fam, &sorts).map_err(|err| sort_err(*span, err))?;
            Ok(Term::app(fam.sym.clone(), terms))
        }
    }
}

/// Parses and elaborates a term.
pub fn parse_term(toks: &[Token], g: &Grammar, sig: &Signature, scope: &VarScope) -> Result<Term, ParseError> {
    let mut scope = scope.clone();
    collect_inline_vars(toks, sig, &mut scope)?;
    let e = parse_expr(toks, g)?;
    elaborate(&e, sig, &scope)
}

/// A parsed equation before it becomes a rewrite rule.
#[derive(Clone, Debug)]
pub struct ParsedEquation {
    pub lhs: Term,
    pub rhs: Term,
    pub cond: Option<Term>,
}

fn split_points(toks: &[Token], word: &str) -> Vec<usize> {
    let mut depth = 0i32;
    let mut ifs = 0i32;
    let mut out = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        match &t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::Ident(w) if w == "if" => ifs += 1,
            Tok::Ident(w) if w == "fi" => ifs -= 1,
            Tok::Ident(w) if w == word && depth == 0 && ifs == 0 => out.push(i),
            _ => {}
        }
    }
    out
}

/// Index of the `if` that starts the condition of a conditional equation:
/// the last `if` not closed by a later `fi`.
fn condition_if(toks: &[Token]) -> Option<usize> {
    let mut open_fi = 0usize;
    for i in (0..toks.len()).rev() {
        if toks[i].is("fi") {
            open_fi += 1;
        } else if toks[i].is("if") {
            if open_fi == 0 {
                return Some(i);
            }
            open_fi -= 1;
        }
    }
    None
}

/// Parses `lhs = rhs [if cond]`, choosing the `=` split that sort-checks.
pub fn parse_equation(
    toks: &[Token],
    conditional: bool,
    span: Span,
    g: &Grammar,
    sig: &Signature,
    scope: &VarScope,
) -> Result<ParsedEquation, ParseError> {
    let mut scope = scope.clone();
    collect_inline_vars(toks, sig, &mut scope)?;
    let (body, cond_toks) = if conditional {
        let k = condition_if(toks).ok_or_else(|| ParseError::syntax(span, "conditional equation without `if`"))?;
        (&toks[..k], Some(&toks[k + 1..]))
    } else {
        (toks, None)
    };
    let cond = match cond_toks {
        Some(c) => {
            let e = parse_expr(c, g)?;
            let t = elaborate(&e, sig, &scope)?;
            let s = sig.least_sort(&t).map_err(|err| ParseError::syntax(e.span(), err.to_string()))?;
            if !sig.leq(&s, &Sort::bool()) {
                return Err(ParseError::syntax(e.span(), format!("condition has sort {s}, not Bool")));
            }
            Some(t)
        }
        None => None,
    };
    let points = split_points(body, "=");
    if points.is_empty() {
        return Err(ParseError::syntax(span, "equation without top-level `=`"));
    }
    let mut found: Vec<(Term, Term)> = Vec::new();
    let mut first_err = None;
    for &k in &points {
        let attempt = (|| {
            let l = elaborate(&parse_expr(&body[..k], g)?, sig, &scope)?;
            let r = elaborate(&parse_expr(&body[k + 1..], g)?, sig, &scope)?;
            let ls = sig.least_sort(&l).map_err(|e| ParseError::syntax(span, e.to_string()))?;
            let rs = sig.least_sort(&r).map_err(|e| ParseError::syntax(span, e.to_string()))?;
            if !sig.order().same_component(&ls, &rs) {
                return Err(ParseError::syntax(
                    body[k].span,
                    format!("sides have unrelated sorts {ls} and {rs}"),
                ));
            }
            Ok((l, r))
        })();
        match attempt {
            Ok(pair) => found.push(pair),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match found.len() {
        0 => Err(first_err.unwrap()),
        1 => {
            let (lhs, rhs) = found.pop().unwrap();
            Ok(ParsedEquation { lhs, rhs, cond })
        }
        n => Err(ParseError::Ambiguity {
            span,
            message: format!("{n} ways to split the equation at `=` sort-check"),
        }),
    }
}
