//! Probabilistic parsing of formal mathematics.
//!
//! A PCFG is induced from a treebank of type-labeled formal expressions,
//! disambiguating casts are erased from the corpus, and a CYK chart parser
//! with Hindley-Milner pruning recovers the original terms. Two informal
//! baselines (most-frequent-sense disambiguation and proof-sentence pattern
//! counts) live in [`baselines`].

pub mod baselines;
pub mod chart;
pub mod experiment;
pub mod formal;
pub mod json;
pub mod pcfg;
pub mod treebank;

pub use chart::{
    cyk_kbest, cyk_viterbi, ParseConfig, ParseResult, ParseStatus, PruningHook, TypedPruningHook,
};
pub use formal::{Signature, Term, TypeExpr};
pub use pcfg::Grammar;
pub use treebank::{RawTree, TreebankEntry};
