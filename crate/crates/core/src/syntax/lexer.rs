use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::rat;

/// Source position, 1-based. Positions never take part in AST equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}
impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(BigRational),
    LParen,
    RParen,
    Comma,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    /// `*[`
    HiddenOpen,
    /// `]*`
    HiddenClose,
    Period,
    /// `-- expect: T`
    Expect(String),
    /// `-- @key value`
    Annotation(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

impl Token {
    pub fn is(&self, word: &str) -> bool {
        matches!(&self.tok, Tok::Ident(s) if s == word)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => f.write_str(s),
            Tok::Num(r) => f.write_str(&rat::format(r)),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
            Tok::LBracket => f.write_str("["),
            Tok::RBracket => f.write_str("]"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::HiddenOpen => f.write_str("*["),
            Tok::HiddenClose => f.write_str("]*"),
            Tok::Period => f.write_str("."),
            Tok::Expect(t) => write!(f, "-- expect: {t}"),
            Tok::Annotation(k, v) if v.is_empty() => write!(f, "-- @{k}"),
            Tok::Annotation(k, v) => write!(f, "-- @{k} {v}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

fn is_delim(c: char) -> bool {
    matches!(c, '(' | ')' | ',' | '[' | ']' | '{' | '}')
}

/// Splits source text into tokens. Line comments start with `--` or `**`.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        lex_line(line, lno + 1, &mut out)?;
    }
    Ok(out)
}

fn lex_line(line: &str, lno: usize, out: &mut Vec<Token>) -> Result<(), LexError> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line: lno, col: i + 1 };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '*' && chars.get(i + 1) == Some(&'[') {
            out.push(Token { tok: Tok::HiddenOpen, span });
            i += 2;
            continue;
        }
        if c == ']' && chars.get(i + 1) == Some(&'*') {
            out.push(Token { tok: Tok::HiddenClose, span });
            i += 2;
            continue;
        }
        if is_delim(c) {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '{' => Tok::LBrace,
                _ => Tok::RBrace,
            };
            out.push(Token { tok, span });
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && !is_delim(chars[i]) {
            if chars[i] == ']' || (chars[i] == '*' && chars.get(i + 1) == Some(&'[')) {
                break;
            }
            i += 1;
        }
        let chunk: String = chars[start..i].iter().collect();
        if chunk.starts_with("--") || chunk.starts_with("**") {
            let rest: String = chars[start + 2..].iter().collect();
            if let Some(tok) = comment_token(rest.trim()) {
                out.push(Token { tok, span });
            }
            return Ok(());
        }
        lex_chunk(&chunk, span, out)?;
    }
    Ok(())
}

fn comment_token(body: &str) -> Option<Tok> {
    let body = body.trim_start_matches(['-', '>', '*']).trim();
    if let Some(rest) = body.strip_prefix("expect:") {
        return Some(Tok::Expect(rest.trim().to_string()));
    }
    let rest = body.strip_prefix('@')?;
    let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    Some(Tok::Annotation(key.to_string(), value.trim().to_string()))
}

fn lex_chunk(chunk: &str, span: Span, out: &mut Vec<Token>) -> Result<(), LexError> {
    if chunk == "." {
        out.push(Token { tok: Tok::Period, span });
        return Ok(());
    }
    if let Some(body) = chunk.strip_suffix('.') {
        if !body.ends_with('.') {
            lex_chunk(body, span, out)?;
            let col = span.col + body.chars().count();
            out.push(Token { tok: Tok::Period, span: Span { line: span.line, col } });
            return Ok(());
        }
    }
    match rat::parse(chunk) {
        Some(Ok(r)) => {
            out.push(Token { tok: Tok::Num(r), span });
            return Ok(());
        }
        Some(Err(())) => {
            return Err(LexError { span, message: format!("zero denominator in `{chunk}`") });
        }
        None => {}
    }
    // `1/2+3/4`: literals glued together by `+`
    if chunk.contains('+') && chunk.len() > 1 {
        let pieces: Vec<&str> = chunk.split('+').collect();
        if pieces.iter().all(|p| matches!(rat::parse(p), Some(Ok(_)))) {
            let mut col = span.col;
            for (k, p) in pieces.iter().enumerate() {
                if k > 0 {
                    out.push(Token { tok: Tok::Ident("+".into()), span: Span { line: span.line, col } });
                    col += 1;
                }
                let here = Span { line: span.line, col };
                out.push(Token { tok: Tok::Num(rat::parse(p).unwrap().unwrap()), span: here });
                col += p.len();
            }
            return Ok(());
        }
    }
    out.push(Token { tok: Tok::Ident(chunk.to_string()), span });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok.to_string()).collect()
    }

    #[test]
    fn equation_tokens() {
        assert_eq!(toks("eq next(red) = green ."), ["eq", "next", "(", "red", ")", "=", "green", "."]);
    }

    #[test]
    fn comments_vanish() {
        assert!(toks("-- (*)").is_empty());
        assert_eq!(toks("eq going(go(S)) = true . -- (*)").len(), 11);
    }

    #[test]
    fn rationals() {
        assert_eq!(toks("1/2 + 3/4"), ["1/2", "+", "3/4"]);
        assert_eq!(toks("1/2+3/4"), ["1/2", "+", "3/4"]);
        assert_eq!(toks("-3 10/4"), ["-3", "5/2"]);
        assert!(tokenize("red 1/0 .").is_err());
    }

    #[test]
    fn hidden_brackets_and_period() {
        assert_eq!(toks("*[Sys]*"), ["*[", "Sys", "]*"]);
        assert_eq!(toks("eq s' = init."), ["eq", "s'", "=", "init", "."]);
        assert_eq!(toks("mod! LABEL{"), ["mod!", "LABEL", "{"]);
    }

    #[test]
    fn expect_and_annotation() {
        let t = tokenize("red x . -- expect: true\n-- @passage tick-1").unwrap();
        assert_eq!(t[3].tok, Tok::Expect("true".into()));
        assert_eq!(t[4].tok, Tok::Annotation("passage".into(), "tick-1".into()));
        assert_eq!(t[4].span.line, 2);
    }
}
