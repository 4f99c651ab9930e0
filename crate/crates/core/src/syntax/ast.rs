use super::lexer::{Span, Token};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Denotation {
    /// `mod!`
    Tight,
    /// `mod*`
    Loose,
    /// plain `mod`; treated as loose
    Unspecified,
}

impl Denotation {
    pub fn keyword(self) -> &'static str {
        match self {
            Denotation::Tight => "mod!",
            Denotation::Loose => "mod*",
            Denotation::Unspecified => "mod",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    /// `pr`, `ex`, `us` or `inc`, as written.
    pub mode: String,
    pub modules: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDeclAst {
    /// Mixfix name in canonical spelling (`_ _`, `_in_`, `next`).
    pub names: Vec<String>,
    pub arity: Vec<String>,
    pub coarity: String,
    pub attrs: Vec<String>,
    pub behavioral: bool,
    /// Declared with `pred`.
    pub pred: bool,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationAst {
    pub conditional: bool,
    /// Everything between the keyword and the closing period.
    pub tokens: Vec<Token>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Import(Import),
    /// `[A B < C]`, one group per `<`-separated segment.
    Sorts { hidden: bool, groups: Vec<Vec<String>>, span: Span },
    Op(OpDeclAst),
    Vars { names: Vec<String>, sort: String, span: Span },
    Eq(EquationAst),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecModule {
    pub name: String,
    pub denotation: Denotation,
    pub decls: Vec<Decl>,
    pub span: Span,
}

impl SpecModule {
    pub fn imports(&self) -> impl Iterator<Item = &Import> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Import(i) => Some(i),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedCommand {
    pub module: Option<String>,
    pub tokens: Vec<Token>,
    /// Text of a trailing `-- expect:` comment.
    pub expect: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpenItem {
    Decl(Decl),
    Red(RedCommand),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenBlock {
    pub module: String,
    /// `-- @key value` comments directly before `open`.
    pub annotations: Vec<(String, String)>,
    pub items: Vec<OpenItem>,
    pub span: Span,
}

impl OpenBlock {
    pub fn annotation(&self, key: &str) -> Option<&str> {
        self.annotations.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn reds(&self) -> impl Iterator<Item = &RedCommand> {
        self.items.iter().filter_map(|i| match i {
            OpenItem::Red(r) => Some(r),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Module(SpecModule),
    Open(OpenBlock),
    Red(RedCommand),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub items: Vec<Item>,
}

impl Script {
    pub fn modules(&self) -> impl Iterator<Item = &SpecModule> {
        self.items.iter().filter_map(|i| match i {
            Item::Module(m) => Some(m),
            _ => None,
        })
    }

    pub fn opens(&self) -> impl Iterator<Item = &OpenBlock> {
        self.items.iter().filter_map(|i| match i {
            Item::Open(o) => Some(o),
            _ => None,
        })
    }
}
