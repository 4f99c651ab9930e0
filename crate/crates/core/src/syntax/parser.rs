use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, LexError, Span, Tok, Token};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{span}: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: ambiguous: {message}")]
    Ambiguity { span: Span, message: String },
}

impl ParseError {
    pub fn syntax(span: Span, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { span, message: message.into() }
    }

    pub fn span(&self) -> Span {
        match self {
            ParseError::Lex(e) => e.span,
            ParseError::Syntax { span, .. } | ParseError::Ambiguity { span, .. } => *span,
        }
    }
}

const IMPORT_WORDS: &[&str] = &["pr", "protecting", "ex", "extending", "us", "using", "inc", "including"];
const DECL_WORDS: &[&str] = &[
    "op", "ops", "bop", "bops", "pred", "preds", "bpred", "var", "vars", "eq", "ceq", "cq", "beq", "bceq", "red",
    "reduce", "close", "open",
];

fn is_keyword(word: &str) -> bool {
    IMPORT_WORDS.contains(&word) || DECL_WORDS.contains(&word)
}

/// Canonical spelling of a mixfix operator name written as one or more
/// tokens: placeholders are `_`, adjacent placeholders or words are
/// separated by one space (`_ _`, `_in_`, `if_then_else_fi`).
pub fn canonical_op_name<S: AsRef<str>>(parts: &[S]) -> String {
    #[derive(PartialEq)]
    enum Last {
        None,
        Hole,
        Word,
    }
    let mut out = String::new();
    let mut last = Last::None;
    for part in parts {
        let part = part.as_ref();
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String, last: &mut Last| {
            if !word.is_empty() {
                if *last == Last::Word {
                    out.push(' ');
                }
                out.push_str(word);
                word.clear();
                *last = Last::Word;
            }
        };
        for c in part.chars() {
            if c == '_' {
                flush(&mut word, &mut out, &mut last);
                if last == Last::Hole {
                    out.push(' ');
                }
                out.push('_');
                last = Last::Hole;
            } else {
                word.push(c);
            }
        }
        flush(&mut word, &mut out, &mut last);
    }
    out
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, i: 0 };
    p.script()
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.toks.get(self.i + k)
    }

    fn here(&self) -> Span {
        self.peek().or(self.toks.last()).map(|t| t.span).unwrap_or_default()
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        let t = self.toks.get(self.i).cloned().ok_or_else(|| ParseError::syntax(self.here(), "unexpected end of input"))?;
        self.i += 1;
        Ok(t)
    }

    fn at(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is(word))
    }

    fn at_tok(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }

    fn expect_tok(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.next()?;
        if t.tok != tok {
            return Err(ParseError::syntax(t.span, format!("expected `{tok}`, found `{}`", t.tok)));
        }
        Ok(t)
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(ParseError::syntax(t.span, format!("expected {what}, found `{other}`"))),
        }
    }

    fn skip_period(&mut self) {
        if self.at_tok(&Tok::Period) {
            self.i += 1;
        }
    }

    fn script(&mut self) -> Result<Script, ParseError> {
        let mut items = Vec::new();
        let mut annotations = Vec::new();
        while let Some(t) = self.peek().cloned() {
            match &t.tok {
                Tok::Annotation(k, v) => {
                    annotations.push((k.clone(), v.clone()));
                    self.i += 1;
                }
                Tok::Expect(_) | Tok::Period => self.i += 1,
                Tok::Ident(w) if w.starts_with("mod") => items.push(Item::Module(self.module()?)),
                Tok::Ident(w) if w == "open" => {
                    let mut block = self.open()?;
                    block.annotations = std::mem::take(&mut annotations);
                    items.push(Item::Open(block));
                }
                Tok::Ident(w) if w == "red" || w == "reduce" => items.push(Item::Red(self.red()?)),
                other => return Err(ParseError::syntax(t.span, format!("unexpected `{other}` at top level"))),
            }
        }
        Ok(Script { items })
    }

    fn module(&mut self) -> Result<SpecModule, ParseError> {
        let (kw, span) = self.ident("module keyword")?;
        let denotation = match kw.as_str() {
            "mod!" | "module!" => Denotation::Tight,
            "mod*" | "module*" => Denotation::Loose,
            "mod" | "module" => Denotation::Unspecified,
            _ => return Err(ParseError::syntax(span, format!("unknown module keyword `{kw}`"))),
        };
        let (name, _) = self.ident("module name")?;
        self.expect_tok(Tok::LBrace)?;
        let mut decls = Vec::new();
        loop {
            match self.peek() {
                None => return Err(ParseError::syntax(self.here(), format!("module {name} is not closed"))),
                Some(t) if t.tok == Tok::RBrace => {
                    self.i += 1;
                    break;
                }
                Some(t) if matches!(t.tok, Tok::Period | Tok::Expect(_) | Tok::Annotation(..)) => self.i += 1,
                Some(_) => decls.push(self.decl()?),
            }
        }
        Ok(SpecModule { name, denotation, decls, span })
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let t = self.peek().cloned().unwrap();
        match &t.tok {
            Tok::LBracket => self.sorts(false),
            Tok::HiddenOpen => self.sorts(true),
            Tok::Ident(w) => match w.as_str() {
                w if IMPORT_WORDS.contains(&w) => self.import(),
                "op" | "bop" | "pred" | "bpred" => self.op(false),
                "ops" | "bops" | "preds" => self.op(true),
                "var" | "vars" => self.vars(),
                "eq" | "beq" | "ceq" | "cq" | "bceq" => self.equation(),
                _ => Err(ParseError::syntax(t.span, format!("unexpected `{w}` in declarations"))),
            },
            other => Err(ParseError::syntax(t.span, format!("unexpected `{other}` in declarations"))),
        }
    }

    fn import(&mut self) -> Result<Decl, ParseError> {
        let (mode, span) = self.ident("import mode")?;
        self.expect_tok(Tok::LParen)?;
        let mut modules = Vec::new();
        loop {
            let t = self.next()?;
            match &t.tok {
                Tok::RParen => break,
                Tok::Ident(w) if w == "+" => {}
                Tok::Ident(w) => {
                    // `A+B` written without spaces
                    modules.extend(w.split('+').filter(|s| !s.is_empty()).map(str::to_string))
                }
                other => return Err(ParseError::syntax(t.span, format!("unexpected `{other}` in import list"))),
            }
        }
        if modules.is_empty() {
            return Err(ParseError::syntax(span, "empty import list"));
        }
        self.skip_period();
        Ok(Decl::Import(Import { mode, modules, span }))
    }

    fn sorts(&mut self, hidden: bool) -> Result<Decl, ParseError> {
        let open = self.next()?;
        let close = if hidden { Tok::HiddenClose } else { Tok::RBracket };
        let mut groups = vec![Vec::new()];
        loop {
            let t = self.next()?;
            match &t.tok {
                x if *x == close => break,
                Tok::Comma => {}
                Tok::Ident(w) if w == "<" => groups.push(Vec::new()),
                Tok::Ident(w) => groups.last_mut().unwrap().push(w.clone()),
                other => return Err(ParseError::syntax(t.span, format!("unexpected `{other}` in sort declaration"))),
            }
        }
        if groups.iter().any(|g| g.is_empty()) {
            return Err(ParseError::syntax(open.span, "empty sort group"));
        }
        self.skip_period();
        Ok(Decl::Sorts { hidden, groups, span: open.span })
    }

    fn op(&mut self, plural: bool) -> Result<Decl, ParseError> {
        let (kw, span) = self.ident("operator keyword")?;
        let behavioral = kw.starts_with('b');
        let pred = kw.contains("pred");
        let mut names = Vec::new();
        let mut single = Vec::new();
        loop {
            let t = self.next()?;
            match &t.tok {
                Tok::Ident(w) if w == ":" => break,
                Tok::LParen if plural => {
                    let mut parts = Vec::new();
                    loop {
                        let u = self.next()?;
                        match u.tok {
                            Tok::RParen => break,
                            Tok::Ident(w) => parts.push(w),
                            other => return Err(ParseError::syntax(u.span, format!("unexpected `{other}` in operator name"))),
                        }
                    }
                    names.push(canonical_op_name(&parts));
                }
                Tok::Ident(w) if plural => names.push(canonical_op_name(&[w])),
                Tok::Ident(w) => single.push(w.clone()),
                Tok::LParen | Tok::RParen => {}
                other => return Err(ParseError::syntax(t.span, format!("unexpected `{other}` in operator name"))),
            }
        }
        if !plural {
            names.push(canonical_op_name(&single));
        }
        if names.is_empty() || names.iter().any(|n| n.is_empty()) {
            return Err(ParseError::syntax(span, "missing operator name"));
        }
        let mut arity = Vec::new();
        let coarity = if pred {
            while let Some(t) = self.peek() {
                match &t.tok {
                    Tok::Ident(w) if !is_keyword(w) && !w.starts_with("mod") => {
                        arity.push(w.clone());
                        self.i += 1;
                    }
                    _ => break,
                }
            }
            "Bool".to_string()
        } else {
            loop {
                let (w, wspan) = self.ident("sort")?;
                if w == "->" {
                    break;
                }
                if is_keyword(&w) {
                    return Err(ParseError::syntax(wspan, format!("expected `->` before `{w}`")));
                }
                arity.push(w);
            }
            self.ident("coarity")?.0
        };
        let mut attrs = Vec::new();
        if self.at_tok(&Tok::LBrace) {
            self.i += 1;
            loop {
                let t = self.next()?;
                match t.tok {
                    Tok::RBrace => break,
                    Tok::Ident(w) => attrs.push(w),
                    other => return Err(ParseError::syntax(t.span, format!("unexpected `{other}` in attributes"))),
                }
            }
        }
        self.skip_period();
        Ok(Decl::Op(OpDeclAst { names, arity, coarity, attrs, behavioral, pred, span }))
    }

    fn vars(&mut self) -> Result<Decl, ParseError> {
        let (_, span) = self.ident("var")?;
        let mut names = Vec::new();
        loop {
            let (w, _) = self.ident("variable name")?;
            if w == ":" {
                break;
            }
            names.push(w);
        }
        if names.is_empty() {
            return Err(ParseError::syntax(span, "missing variable name"));
        }
        let (sort, _) = self.ident("sort")?;
        self.skip_period();
        Ok(Decl::Vars { names, sort, span })
    }

    fn until_period(&mut self, what: &str, span: Span) -> Result<Vec<Token>, ParseError> {
        let mut tokens = Vec::new();
        loop {
            let Some(t) = self.peek().cloned() else {
                return Err(ParseError::syntax(span, format!("{what} is missing its closing `.`")));
            };
            self.i += 1;
            match t.tok {
                Tok::Period => break,
                Tok::Expect(_) | Tok::Annotation(..) => {}
                _ => tokens.push(t),
            }
        }
        if tokens.is_empty() {
            return Err(ParseError::syntax(span, format!("empty {what}")));
        }
        Ok(tokens)
    }

    fn equation(&mut self) -> Result<Decl, ParseError> {
        let (kw, span) = self.ident("equation")?;
        let conditional = matches!(kw.as_str(), "ceq" | "cq" | "bceq");
        let tokens = self.until_period("equation", span)?;
        Ok(Decl::Eq(EquationAst { conditional, tokens, span }))
    }

    fn red(&mut self) -> Result<RedCommand, ParseError> {
        let (_, span) = self.ident("red")?;
        let mut module = None;
        if self.at("in") {
            if let Some(Tok::Ident(name)) = self.peek_at(1).map(|t| t.tok.clone()) {
                if let Some(stripped) = name.strip_suffix(':') {
                    module = Some(stripped.to_string());
                    self.i += 2;
                } else if self.peek_at(2).is_some_and(|t| t.is(":")) {
                    module = Some(name);
                    self.i += 3;
                }
            }
        }
        let tokens = self.until_period("red command", span)?;
        let mut expect = None;
        if let Some(Tok::Expect(e)) = self.peek().map(|t| t.tok.clone()) {
            expect = Some(e);
            self.i += 1;
        }
        Ok(RedCommand { module, tokens, expect, span })
    }

    fn open(&mut self) -> Result<OpenBlock, ParseError> {
        let (_, span) = self.ident("open")?;
        let (module, _) = self.ident("module name")?;
        self.skip_period();
        let mut items = Vec::new();
        loop {
            let Some(t) = self.peek().cloned() else {
                return Err(ParseError::syntax(span, format!("open {module} is not closed")));
            };
            match &t.tok {
                Tok::Ident(w) if w == "close" => {
                    self.i += 1;
                    self.skip_period();
                    break;
                }
                Tok::Ident(w) if w == "red" || w == "reduce" => items.push(OpenItem::Red(self.red()?)),
                Tok::Period | Tok::Expect(_) | Tok::Annotation(..) => self.i += 1,
                _ => items.push(OpenItem::Decl(self.decl()?)),
            }
        }
        Ok(OpenBlock { module, annotations: Vec::new(), items, span })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LABEL: &str = "mod! LABEL{
  [Label]
  ops green red yellow : -> Label
  pred _=_ : Label Label {comm}
  op next : Label -> Label
  var L : Label
  eq (L = L) = true .
  eq (green = red) = false .
  eq (green = yellow) = false .
  eq (red = yellow) = false .

  eq next(red) = green .
  eq next(green) = yellow .
  eq next(yellow) = red .
}
red in LABEL : next(next(green)) .
";

    #[test]
    fn canonical_names() {
        assert_eq!(canonical_op_name(&["_", "_"]), "_ _");
        assert_eq!(canonical_op_name(&["__"]), "_ _");
        assert_eq!(canonical_op_name(&["_", "+", "_"]), "_+_");
        assert_eq!(canonical_op_name(&["_in_"]), "_in_");
        assert_eq!(canonical_op_name(&["if_then_else_fi"]), "if_then_else_fi");
    }

    #[test]
    fn label_module() {
        let s = parse_script(LABEL).unwrap();
        let m = s.modules().next().unwrap();
        assert_eq!(m.denotation, Denotation::Tight);
        let ops: Vec<&OpDeclAst> = m
            .decls
            .iter()
            .filter_map(|d| match d {
                Decl::Op(o) => Some(o),
                _ => None,
            })
            .collect();
        assert_eq!(ops[0].names, ["green", "red", "yellow"]);
        assert_eq!(ops[1].coarity, "Bool");
        assert_eq!(ops[1].attrs, ["comm"]);
        let eqs = m.decls.iter().filter(|d| matches!(d, Decl::Eq(_))).count();
        assert_eq!(eqs, 7);
        let Item::Red(r) = &s.items[1] else { panic!() };
        assert_eq!(r.module.as_deref(), Some("LABEL"));
        assert_eq!(r.tokens.len(), 7);
    }

    #[test]
    fn conditional_equation() {
        let s = parse_script("mod* X { ceq change(S) = S if not c-change(S) . }").unwrap();
        let m = s.modules().next().unwrap();
        assert!(matches!(&m.decls[0], Decl::Eq(e) if e.conditional && e.tokens.len() == 12));
    }

    #[test]
    fn open_block_with_expect() {
        let s = parse_script(
            "-- @passage basis\nopen INV . op p : -> Pid . red inv1(p, init) . -- expect: true\nclose",
        )
        .unwrap();
        let o = s.opens().next().unwrap();
        assert_eq!(o.annotation("passage"), Some("basis"));
        let r = o.reds().next().unwrap();
        assert_eq!(r.expect.as_deref(), Some("true"));
    }

    #[test]
    fn unclosed_module_is_an_error() {
        let e = parse_script("mod! A { [S]").unwrap_err();
        assert!(e.to_string().contains("not closed"));
    }

    #[test]
    fn sorts_and_imports() {
        let s = parse_script("mod* PSET{ pr(RAT + LABEL) [Pid < PSet] *[Sys]* }").unwrap();
        let m = s.modules().next().unwrap();
        assert!(matches!(&m.decls[0], Decl::Import(i) if i.modules == ["RAT", "LABEL"]));
        assert!(matches!(&m.decls[1], Decl::Sorts { hidden: false, groups, .. } if groups.len() == 2));
        assert!(matches!(&m.decls[2], Decl::Sorts { hidden: true, .. }));
    }
}
