//! Treebank files: one entry per line, `id<TAB>tree[<TAB>tokens]`, where
//! the optional third column declares the expected yield. Blank lines and
//! `#` comments are skipped.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::label::term_of_labeled_tree;
use super::sexpr::{parse_sexpr, tree_yield, RawTree};
use crate::formal::{Signature, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct TreebankEntry {
    pub id: String,
    pub tokens: Vec<String>,
    pub gold_tree: RawTree,
    pub gold_term: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum TreebankError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{} malformed line(s), first at line {}: {}", .0.len(), .0[0].line, .0[0].message)]
    Parse(Vec<LineError>),
    #[error("entry `{id}` is invalid: {reason}")]
    Validation { id: String, reason: String },
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

impl TreebankEntry {
    /// Builds an entry from a tree, deriving the gold term when the tree
    /// reads back as one under `sig`.
    pub fn from_tree(id: impl Into<String>, tree: RawTree, sig: &Signature) -> Self {
        let tokens = tree_yield(&tree);
        let gold_term = term_of_labeled_tree(&tree, sig)
            .ok()
            .filter(|t| t.leaf_tokens() == tokens);
        TreebankEntry {
            id: id.into(),
            tokens,
            gold_tree: tree,
            gold_term,
        }
    }
}

pub fn parse_treebank(text: &str, sig: &Signature) -> Result<Vec<TreebankEntry>, TreebankError> {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut declared = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = raw.split('\t');
        let id = cols.next().unwrap_or_default().trim();
        let Some(tree_text) = cols.next() else {
            errors.push(LineError {
                line,
                message: "expected `id<TAB>tree`".into(),
            });
            continue;
        };
        if !valid_id(id) {
            errors.push(LineError {
                line,
                message: format!("invalid id `{id}`"),
            });
            continue;
        }
        let yield_decl = cols.next().map(|s| {
            s.split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>()
        });
        match parse_sexpr(tree_text) {
            Ok(tree) => {
                declared.push(yield_decl);
                entries.push(TreebankEntry::from_tree(id, tree, sig));
            }
            Err(e) => errors.push(LineError {
                line,
                message: e.to_string(),
            }),
        }
    }
    if !errors.is_empty() {
        return Err(TreebankError::Parse(errors));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (entry, decl) in entries.iter().zip(&declared) {
        if !seen.insert(entry.id.as_str()) {
            return Err(TreebankError::Validation {
                id: entry.id.clone(),
                reason: "duplicate id".into(),
            });
        }
        if let Some(decl) = decl {
            if *decl != entry.tokens {
                return Err(TreebankError::Validation {
                    id: entry.id.clone(),
                    reason: format!(
                        "declared tokens `{}` differ from tree yield `{}`",
                        decl.join(" "),
                        entry.tokens.join(" ")
                    ),
                });
            }
        }
    }
    Ok(entries)
}

pub fn load_treebank(path: &Path, sig: &Signature) -> Result<Vec<TreebankEntry>, TreebankError> {
    let text = std::fs::read_to_string(path).map_err(|source| TreebankError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_treebank(&text, sig)
}

/// Serializes entries as `id<TAB>tree<TAB>tokens` lines.
pub fn render_treebank<'a>(entries: impl IntoIterator<Item = (&'a str, &'a RawTree)>) -> String {
    let mut out = String::new();
    for (id, tree) in entries {
        let _ = writeln!(out, "{id}\t{tree}\t{}", tree_yield(tree).join(" "));
    }
    out
}
