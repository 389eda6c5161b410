use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formal::{Signature, Term};
use crate::treebank::{label_type_part, tree_yield, RawTree, TreebankEntry, LEX_SEP};

/// Which casts to erase and which constants to merge under one surface token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AmbiguationSpec {
    pub cast_set: BTreeSet<String>,
    /// Constant name to surface token, many-to-one.
    pub merge_map: BTreeMap<String, String>,
}

impl AmbiguationSpec {
    pub fn new<C, S>(casts: C, merges: impl IntoIterator<Item = (S, S)>) -> Self
    where
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AmbiguationSpec {
            cast_set: casts.into_iter().map(Into::into).collect(),
            merge_map: merges
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    /// Checks the spec against `sig` and returns the signature in which
    /// merged surface tokens resolve to their constants.
    pub fn merged_signature(&self, sig: &Signature) -> Result<Signature, AmbiguateError> {
        for c in &self.cast_set {
            if !sig.is_coercion(c) {
                return Err(AmbiguateError::NotACoercion(c.clone()));
            }
        }
        sig.with_overloads(&self.merge_map)
            .map_err(|e| AmbiguateError::Merge(e.to_string()))
    }

    fn rename<'a>(&'a self, token: &'a str) -> &'a str {
        self.merge_map.get(token).map(String::as_str).unwrap_or(token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmbiguateError {
    #[error("entry `{0}` has no gold term")]
    MissingGoldTerm(String),
    #[error("`{0}` is not a declared coercion")]
    NotACoercion(String),
    #[error("invalid merge map: {0}")]
    Merge(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguatedEntry {
    pub id: String,
    pub tokens: Vec<String>,
    /// Gold tree with casts spliced out and merged tokens renamed.
    pub tree: RawTree,
    pub gold_term: Term,
}

/// Erases casts from the gold tree and merges surface tokens.
///
/// A cast node `(T (fun[a,T] c) child)` becomes `child` relabeled with `T`;
/// a lexical head on the promoted child survives under the new type.
pub fn ambiguate(
    entry: &TreebankEntry,
    spec: &AmbiguationSpec,
) -> Result<AmbiguatedEntry, AmbiguateError> {
    let gold_term = entry
        .gold_term
        .clone()
        .ok_or_else(|| AmbiguateError::MissingGoldTerm(entry.id.clone()))?;
    let tree = splice(&entry.gold_tree, spec);
    Ok(AmbiguatedEntry {
        id: entry.id.clone(),
        tokens: tree_yield(&tree),
        tree,
        gold_term,
    })
}

fn is_cast_node(t: &RawTree, spec: &AmbiguationSpec) -> bool {
    t.children.len() == 2
        && t.children[0].is_preterminal()
        && spec.cast_set.contains(&t.children[0].children[0].label)
}

fn splice(t: &RawTree, spec: &AmbiguationSpec) -> RawTree {
    if t.is_leaf() {
        return RawTree::leaf(spec.rename(&t.label));
    }
    if is_cast_node(t, spec) {
        let inner = splice(&t.children[1], spec);
        let ty = label_type_part(&t.label);
        let label = match inner.label.split_once(LEX_SEP) {
            Some((_, head)) => format!("{ty}{LEX_SEP}{head}"),
            None => ty.to_string(),
        };
        return RawTree::node(label, inner.children);
    }
    let label = match t.label.split_once(LEX_SEP) {
        Some((ty, head)) => format!("{ty}{LEX_SEP}{}", spec.rename(head)),
        None => t.label.clone(),
    };
    RawTree::node(label, t.children.iter().map(|c| splice(c, spec)).collect())
}
