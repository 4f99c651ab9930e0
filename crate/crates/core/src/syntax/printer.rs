use std::fmt::Write;

use super::ast::*;
use super::lexer::{Tok, Token};

/// Pretty-prints a script so that parsing the output gives the same AST.
pub fn print_script(script: &Script) -> String {
    let mut out = String::new();
    for item in &script.items {
        match item {
            Item::Module(m) => print_module(m, &mut out),
            Item::Open(o) => print_open(o, &mut out),
            Item::Red(r) => {
                print_red(r, &mut out);
                out.push('\n');
            }
        }
    }
    out
}

fn tokens(toks: &[Token]) -> String {
    toks.iter().map(|t| t.tok.to_string()).collect::<Vec<_>>().join(" ")
}

fn op_name(name: &str, plural: bool) -> String {
    if plural && (name.contains(' ') || name.contains('_')) {
        format!("({name})")
    } else {
        name.to_string()
    }
}

fn print_decl(d: &Decl, indent: &str, out: &mut String) {
    out.push_str(indent);
    match d {
        Decl::Import(i) => {
            let _ = write!(out, "{}({})", i.mode, i.modules.join(" + "));
        }
        Decl::Sorts { hidden, groups, .. } => {
            let body = groups.iter().map(|g| g.join(" ")).collect::<Vec<_>>().join(" < ");
            if *hidden {
                let _ = write!(out, "*[ {body} ]*");
            } else {
                let _ = write!(out, "[ {body} ]");
            }
        }
        Decl::Op(o) => {
            let plural = o.names.len() > 1;
            let kw = match (o.pred, o.behavioral, plural) {
                (true, true, _) => "bpred",
                (true, false, false) => "pred",
                (true, false, true) => "preds",
                (false, true, false) => "bop",
                (false, true, true) => "bops",
                (false, false, false) => "op",
                (false, false, true) => "ops",
            };
            let names: Vec<String> = o.names.iter().map(|n| op_name(n, plural)).collect();
            let _ = write!(out, "{kw} {} :", names.join(" "));
            for s in &o.arity {
                let _ = write!(out, " {s}");
            }
            if !o.pred {
                let _ = write!(out, " -> {}", o.coarity);
            }
            if !o.attrs.is_empty() {
                let _ = write!(out, " {{{}}}", o.attrs.join(" "));
            }
            out.push_str(" .");
        }
        Decl::Vars { names, sort, .. } => {
            let kw = if names.len() > 1 { "vars" } else { "var" };
            let _ = write!(out, "{kw} {} : {sort} .", names.join(" "));
        }
        Decl::Eq(e) => {
            let kw = if e.conditional { "ceq" } else { "eq" };
            let _ = write!(out, "{kw} {} .", tokens(&e.tokens));
        }
    }
    out.push('\n');
}

fn print_module(m: &SpecModule, out: &mut String) {
    let _ = writeln!(out, "{} {} {{", m.denotation.keyword(), m.name);
    for d in &m.decls {
        print_decl(d, "  ", out);
    }
    out.push_str("}\n");
}

fn print_red(r: &RedCommand, out: &mut String) {
    out.push_str("red ");
    if let Some(m) = &r.module {
        let _ = write!(out, "in {m} : ");
    }
    let _ = write!(out, "{} .", tokens(&r.tokens));
    if let Some(e) = &r.expect {
        let _ = write!(out, " {}", Tok::Expect(e.clone()));
    }
}

fn print_open(o: &OpenBlock, out: &mut String) {
    for (k, v) in &o.annotations {
        let _ = writeln!(out, "{}", Tok::Annotation(k.clone(), v.clone()));
    }
    let _ = writeln!(out, "open {} .", o.module);
    for item in &o.items {
        match item {
            OpenItem::Decl(d) => print_decl(d, "  ", out),
            OpenItem::Red(r) => {
                out.push_str("  ");
                print_red(r, out);
                out.push('\n');
            }
        }
    }
    out.push_str("close\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_script;

    #[test]
    fn round_trip_small() {
        let src = "mod* PSET{ [Pid < PSet] op _ _ : PSet PSet -> PSet {assoc comm idem} op nil : -> PSet
  pred _in_ : Pid PSet vars P Q : Pid var PS : PSet eq (P in (P PS)) = true . }
-- @passage p
open PSET . ops p1 p2 : -> Pid . red p1 in p1 p2 . -- expect: true
close";
        let a = parse_script(src).unwrap();
        let b = parse_script(&print_script(&a)).unwrap();
        assert_eq!(a, b);
    }
}
