//! An executable subset of an OBJ-family algebraic specification language.

pub mod cli;
pub mod engine;
pub mod module;
pub mod oracle;
pub mod proof;
pub mod rat;
pub mod script;
pub mod syntax;
pub mod term;
