//! The YAML index that arranges passages into split trees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Splitter, VerdictKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    /// Every (transition, invariant) pair must be covered.
    Induction,
    /// Every case of a structural induction must be covered.
    Structural,
    /// A plain list of passages; no coverage requirement.
    #[default]
    Passages,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Index {
    pub name: String,
    #[serde(default)]
    pub kind: IndexKind,
    /// `.cafe` files holding the modules and the root passages, relative to
    /// the index file.
    pub files: Vec<String>,
    /// Extra directories to search for imported modules.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub search: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invariants: Vec<String>,
    /// Transitions for induction, constructor cases for structural induction.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<String>,
    /// Index files of lemmas this proof relies on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub requires: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    /// `@passage` name of an open block.
    pub passage: String,
    /// One of the block's `red` goals, compared up to whitespace.
    pub goal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    /// Expected verdict of every leaf; Proved when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<VerdictKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Node>,
}

/// A split; absent children are leaves.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Bool {
        bool: String,
        #[serde(default, rename = "then", skip_serializing_if = "Option::is_none")]
        then_: Option<Box<Node>>,
        #[serde(default, rename = "else", skip_serializing_if = "Option::is_none")]
        else_: Option<Box<Node>>,
    },
    Enum {
        #[serde(rename = "enum")]
        term: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        cases: BTreeMap<String, Node>,
    },
    Eq {
        /// Why the cases are exhaustive.
        assume: String,
        cases: Vec<Case>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub eqs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Node>,
}

impl Node {
    pub fn splitter(&self) -> Splitter {
        match self {
            Node::Bool { bool, .. } => Splitter::Bool(bool.clone()),
            Node::Enum { term, .. } => Splitter::Enum(term.clone()),
            Node::Eq { assume, cases } => Splitter::Eq {
                cases: cases.iter().map(|c| c.eqs.clone()).collect(),
                justification: assume.clone(),
            },
        }
    }

    /// Subtree for the `i`-th case produced by [`super::split_cases`], whose
    /// key is `key`.
    pub fn child(&self, i: usize, key: &str) -> Option<&Node> {
        match self {
            Node::Bool { then_, else_, .. } => if i == 0 { then_ } else { else_ }.as_deref(),
            Node::Enum { cases, .. } => cases.get(key),
            Node::Eq { cases, .. } => cases.get(i).and_then(|c| c.split.as_ref()),
        }
    }
}
