//! Grammar induction: binarization, relative-frequency estimation and
//! unary closure.

mod binarize;
mod closure;
mod grammar;

pub use binarize::{binarize_tree, debinarize_tree, is_intermediate, BinarizeError, INTERMEDIATE_SEP};
pub use closure::{unary_closure, Chain, ClosureEntry, ClosureTable};
pub(crate) use grammar::RuleShape;
pub use grammar::{
    induce, induce_with, Grammar, GrammarError, Rule, RuleId, SymbolId, DEFAULT_MAX_UNARY_CHAIN,
};
