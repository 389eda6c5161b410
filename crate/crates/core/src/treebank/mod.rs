//! Bracketed trees, type labeling of terms, and treebank files.

mod corpus;
mod label;
mod sexpr;

pub use corpus::{
    load_treebank, parse_treebank, render_treebank, valid_id, LineError, TreebankEntry,
    TreebankError,
};
pub use label::{
    label_type, label_type_part, label_with_types, term_of_labeled_tree, TreeTermError, BIND,
    LEX_SEP,
};
pub use sexpr::{parse_sexpr, render_sexpr, tree_yield, RawTree, SexprError};
