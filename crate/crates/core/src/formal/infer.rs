//! Algorithm W over the monomorphic-binder term language.
//!
//! Constant schemes are instantiated at each occurrence. Binders and
//! declared free variables are monomorphic; there is no let.

use thiserror::Error;

use super::signature::Signature;
use super::term::Term;
use super::types::{Substitution, TypeExpr, UnifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("type error in `{term}`: {cause}")]
    TypeError { term: String, cause: UnifyError },
}

struct Inference<'a> {
    sig: &'a Signature,
    subst: Substitution,
    next: usize,
    /// Types of visited nodes in preorder, before the final substitution.
    trace: Option<Vec<TypeExpr>>,
}

impl<'a> Inference<'a> {
    fn new(sig: &'a Signature, trace: bool) -> Self {
        Inference {
            sig,
            subst: Substitution::new(),
            next: 0,
            trace: trace.then(Vec::new),
        }
    }

    fn fresh(&mut self) -> TypeExpr {
        self.next += 1;
        TypeExpr::Var(format!("%{}", self.next))
    }

    fn run(&mut self, term: &Term, env: &mut Vec<(String, TypeExpr)>) -> Result<TypeExpr, InferError> {
        let slot = self.trace.as_mut().map(|t| {
            t.push(TypeExpr::Var(String::new()));
            t.len() - 1
        });
        let ty = match term {
            Term::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
                Some((_, t)) => t.clone(),
                None => self
                    .sig
                    .var_type(v)
                    .cloned()
                    .ok_or_else(|| InferError::UnknownSymbol(v.clone()))?,
            },
            Term::Const(c) => {
                let scheme = self
                    .sig
                    .const_scheme(c)
                    .ok_or_else(|| InferError::UnknownSymbol(c.clone()))?
                    .clone();
                let mut next = self.next;
                let t = scheme.instantiate(&mut || {
                    next += 1;
                    format!("%{next}")
                });
                self.next = next;
                t
            }
            Term::App(f, a) => {
                let tf = self.run(f, env)?;
                let ta = self.run(a, env)?;
                let r = self.fresh();
                self.subst
                    .unify_with(&tf, &TypeExpr::fun(ta, r.clone()))
                    .map_err(|cause| InferError::TypeError {
                        term: term.to_string(),
                        cause,
                    })?;
                r
            }
            Term::Abs(v, b) => {
                let tv = self.fresh();
                env.push((v.clone(), tv.clone()));
                let tb = self.run(b, env);
                env.pop();
                TypeExpr::fun(tv, tb?)
            }
        };
        if let (Some(t), Some(i)) = (self.trace.as_mut(), slot) {
            t[i] = ty.clone();
        }
        Ok(ty)
    }
}

/// Principal type of `term`, with variables canonically renamed.
pub fn infer(term: &Term, sig: &Signature) -> Result<TypeExpr, InferError> {
    let mut inf = Inference::new(sig, false);
    let t = inf.run(term, &mut Vec::new())?;
    Ok(inf.subst.apply(&t).canonicalize())
}

/// Whether `term` has a type that unifies with `expected`.
pub fn check(term: &Term, sig: &Signature, expected: Option<&TypeExpr>) -> bool {
    let mut inf = Inference::new(sig, false);
    let Ok(t) = inf.run(term, &mut Vec::new()) else {
        return false;
    };
    match expected {
        None => true,
        Some(e) => {
            // keep expected variables apart from inference variables
            let e = e.rename(
                &e.vars()
                    .into_iter()
                    .map(|v| (v.clone(), format!("!{v}")))
                    .collect(),
            );
            inf.subst.unify_with(&t, &e).is_ok()
        }
    }
}

/// Types of every subterm in preorder (node, then function/binder body,
/// then argument), each under the final substitution of the whole term.
pub fn infer_annotated(term: &Term, sig: &Signature) -> Result<Vec<TypeExpr>, InferError> {
    let mut inf = Inference::new(sig, true);
    inf.run(term, &mut Vec::new())?;
    let subst = inf.subst;
    Ok(inf
        .trace
        .unwrap_or_default()
        .iter()
        .map(|t| subst.apply(t).canonicalize())
        .collect())
}
