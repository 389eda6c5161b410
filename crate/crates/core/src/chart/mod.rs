//! Chart parsing over an induced grammar.

mod hook;
mod parser;

pub use hook::{PruningHook, TypedPruningHook};
pub use parser::{
    cyk_kbest, cyk_viterbi, parse, ChartStats, OovPolicy, ParseConfig, ParseError, ParseResult,
    ParseStatus, DEFAULT_HOOK_CELL_WIDTH, OPEN_CLASS_MASS, TIE_EPSILON,
};
