//! Typed term language: simple types, terms, unification, principal-type
//! inference, cast erasure and coercion repair.

mod coerce;
mod infer;
mod signature;
mod term;
mod types;

pub use coerce::{insert_coercions, insert_coercions_expecting, CoercionError};
pub use infer::{check, infer, infer_annotated, InferError};
pub use signature::{valid_symbol, Signature, SignatureError, RESERVED_CHARS};
pub use term::{alpha_equal, erase_casts, Term, TermSyntaxError};
pub use types::{unify, Substitution, TypeExpr, TypeScheme, TypeSyntaxError, UnifyError, FUN};
