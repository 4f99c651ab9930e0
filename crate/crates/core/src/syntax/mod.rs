//! Concrete syntax: lexer, script parser, mixfix terms and printer.

pub mod ast;
pub mod expr;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use expr::{parse_equation, parse_term, Grammar, ParsedEquation, VarScope};
pub use lexer::{tokenize, LexError, Span, Tok, Token};
pub use parser::{canonical_op_name, parse_script, ParseError};
pub use printer::print_script;
