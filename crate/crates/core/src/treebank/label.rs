//! Conversion between typed terms and type-labeled parse trees.
//!
//! Internal nodes carry the canonical type label of their subterm
//! (`fun[real,real]`), optionally decorated with the head symbol of the
//! function spine (`real@sin`). Every constant or variable becomes a
//! preterminal over its surface token. A binder `\v. body` is a node whose
//! first child is the preterminal `(BIND v)`.

use thiserror::Error;

use super::sexpr::RawTree;
use crate::formal::{infer_annotated, unify, InferError, Signature, Term, TypeExpr};

/// Preterminal label of binder variables.
pub const BIND: &str = "BIND";
/// Separator between a type label and its lexical head.
pub const LEX_SEP: char = '@';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeTermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed node `{0}`: expected a preterminal, a binary application or a binder")]
    ArityError(String),
    #[error("label `{0}` is not a type")]
    BadLabel(String),
    #[error("`{0}` matches several overloaded constants at its label type")]
    AmbiguousSymbol(String),
}

/// Type part of a label, without lexical decoration.
pub fn label_type_part(label: &str) -> &str {
    label.split(LEX_SEP).next().unwrap_or(label)
}

pub fn label_type(label: &str) -> Result<TypeExpr, TreeTermError> {
    TypeExpr::parse_label(label_type_part(label))
        .map_err(|_| TreeTermError::BadLabel(label.to_string()))
}

/// Builds the labeled tree of a well-typed term.
pub fn label_with_types(
    term: &Term,
    sig: &Signature,
    lexicalized: bool,
) -> Result<RawTree, InferError> {
    let types = infer_annotated(term, sig)?;
    let mut idx = 0;
    Ok(build(term, &types, &mut idx, lexicalized))
}

fn build(term: &Term, types: &[TypeExpr], idx: &mut usize, lex: bool) -> RawTree {
    let ty = types[*idx].label();
    *idx += 1;
    match term {
        Term::Const(n) | Term::Var(n) => RawTree::node(ty, vec![RawTree::leaf(n.as_str())]),
        Term::App(f, a) => {
            let label = match (lex, term.head_symbol()) {
                (true, Some(h)) => format!("{ty}{LEX_SEP}{h}"),
                _ => ty,
            };
            let f = build(f, types, idx, lex);
            let a = build(a, types, idx, lex);
            RawTree::node(label, vec![f, a])
        }
        Term::Abs(v, b) => {
            let binder = RawTree::node(BIND, vec![RawTree::leaf(v.as_str())]);
            RawTree::node(ty, vec![binder, build(b, types, idx, lex)])
        }
    }
}

/// Reads a term back from a labeled tree. Merged surface tokens are
/// resolved through the signature's overloads at the preterminal's type;
/// unary nodes over internal nodes are transparent.
pub fn term_of_labeled_tree(tree: &RawTree, sig: &Signature) -> Result<Term, TreeTermError> {
    read(tree, sig, &mut Vec::new())
}

fn read(tree: &RawTree, sig: &Signature, bound: &mut Vec<String>) -> Result<Term, TreeTermError> {
    match tree.children.as_slice() {
        [] => Err(TreeTermError::ArityError(tree.to_string())),
        [leaf] if leaf.is_leaf() => {
            if tree.label == BIND {
                return Err(TreeTermError::ArityError(tree.to_string()));
            }
            resolve(&leaf.label, &tree.label, sig, bound)
        }
        [inner] => read(inner, sig, bound),
        [binder, body] if binder.label == BIND => {
            let v = match binder.children.as_slice() {
                [leaf] if leaf.is_leaf() => leaf.label.clone(),
                _ => return Err(TreeTermError::ArityError(binder.to_string())),
            };
            bound.push(v.clone());
            let body = read(body, sig, bound);
            bound.pop();
            Ok(Term::abs(v, body?))
        }
        [f, a] => Ok(Term::app(read(f, sig, bound)?, read(a, sig, bound)?)),
        _ => Err(TreeTermError::ArityError(tree.label.clone())),
    }
}

fn resolve(
    token: &str,
    label: &str,
    sig: &Signature,
    bound: &[String],
) -> Result<Term, TreeTermError> {
    if bound.iter().any(|b| b == token) || sig.is_var(token) {
        return Ok(Term::var(token));
    }
    if sig.is_const(token) {
        return Ok(Term::constant(token));
    }
    let Some(candidates) = sig.overloads(token) else {
        return Err(TreeTermError::UnknownSymbol(token.to_string()));
    };
    let want = label_type(label)?;
    let fitting: Vec<&String> = candidates
        .iter()
        .filter(|c| {
            let body = &sig.const_scheme(c).expect("overloads are declared").body;
            // keep scheme variables apart from label variables
            let body = body.rename(
                &body
                    .vars()
                    .into_iter()
                    .map(|v| (v.clone(), format!("!{v}")))
                    .collect(),
            );
            unify(&body, &want).is_ok()
        })
        .collect();
    match fitting.as_slice() {
        [one] => Ok(Term::constant(one.as_str())),
        [] => Err(TreeTermError::UnknownSymbol(token.to_string())),
        _ => Err(TreeTermError::AmbiguousSymbol(token.to_string())),
    }
}
