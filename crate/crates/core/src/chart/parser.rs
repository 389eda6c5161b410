//! Probabilistic CYK with exact per-cell k-best lists.
//!
//! Each cell keeps, per label, its best derivations: first the base layer
//! (lexical emissions and binary combinations), then the full layer which
//! adds every unary chain of length 1..=max over base items. Binary rules
//! combine full-layer items of the two child cells. Global k-best is exact
//! because every sub-derivation of a top-k parse ranks within the top k of
//! its own cell and label.
//!
//! Ties within 1e-12 are broken by the preorder sequence of
//! (split point, rule id) pairs, smaller first; rule ids follow the
//! lexicographic (lhs, rhs) order of the grammar.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::hook::PruningHook;
use crate::pcfg::{debinarize_tree, is_intermediate, Grammar, RuleId, RuleShape, SymbolId};
use crate::treebank::RawTree;

/// Log-probability differences at or below this are ties.
pub const TIE_EPSILON: f64 = 1e-12;
/// Probability mass reserved for unknown tokens under the open-class policy.
pub const OPEN_CLASS_MASS: f64 = 1e-6;
/// Per-cell list width used when a hook is active and no width is given.
pub const DEFAULT_HOOK_CELL_WIDTH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovPolicy {
    Fail,
    OpenClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseConfig {
    pub k: usize,
    pub oov_policy: OovPolicy,
    /// Only complete parses with this root label count.
    pub root: Option<String>,
    /// Keep only this many labels per cell; approximate, off by default.
    pub beam: Option<usize>,
    /// Derivations kept per cell and label; defaults to `k` without a hook.
    pub cell_width: Option<usize>,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            k: 1,
            oov_policy: OovPolicy::Fail,
            root: None,
            beam: None,
            cell_width: None,
        }
    }
}

impl ParseConfig {
    pub fn with_k(k: usize) -> Self {
        ParseConfig {
            k,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseStatus {
    Parsed,
    NoParse,
    OovFailure,
}

impl ParseStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParseStatus::Parsed => "parsed",
            ParseStatus::NoParse => "no_parse",
            ParseStatus::OovFailure => "oov_failure",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChartStats {
    /// Derivations held by the finished chart.
    pub items_created: usize,
    pub items_pruned: usize,
    pub hook_invocations: usize,
    pub hook_cache_hits: usize,
}

impl ChartStats {
    pub fn merge(&mut self, other: &ChartStats) {
        self.items_created += other.items_created;
        self.items_pruned += other.items_pruned;
        self.hook_invocations += other.hook_invocations;
        self.hook_cache_hits += other.hook_cache_hits;
    }
}

#[derive(Debug, Clone)]
pub struct ParseResult {
    pub status: ParseStatus,
    /// Debinarized trees, best first.
    pub trees: Vec<(RawTree, f64)>,
    pub stats: ChartStats,
    pub elapsed: Duration,
    /// Tokens unknown to the grammar.
    pub unknown_tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("cannot parse an empty token sequence")]
    EmptyInput,
    #[error("k must be at least 1, got {0}")]
    InvalidK(usize),
}

/// Best parse, or no_parse / oov_failure.
pub fn cyk_viterbi(
    grammar: &Grammar,
    tokens: &[String],
    hook: Option<&dyn PruningHook>,
) -> Result<ParseResult, ParseError> {
    parse(grammar, tokens, &ParseConfig::with_k(1), hook)
}

/// The `k` best distinct parses.
pub fn cyk_kbest(
    grammar: &Grammar,
    tokens: &[String],
    k: usize,
    hook: Option<&dyn PruningHook>,
) -> Result<ParseResult, ParseError> {
    parse(grammar, tokens, &ParseConfig::with_k(k), hook)
}

#[derive(Clone, Copy, Debug)]
enum Child {
    Item { label: SymbolId, rank: u32 },
    Token,
}

#[derive(Clone, Debug)]
enum Back {
    Lexical(RuleId),
    /// Open-class emission of an unknown token.
    Unknown,
    Binary {
        rule: RuleId,
        split: u32,
        left: Child,
        right: Child,
    },
    /// Chain `chain` of `grammar.chains_from(child)` over `base[child][rank]`.
    Unary { child: SymbolId, chain: u32, rank: u32 },
}

#[derive(Clone, Debug)]
struct Deriv {
    logprob: f64,
    label: SymbolId,
    back: Back,
}

#[derive(Default)]
struct Cell {
    base: BTreeMap<SymbolId, Vec<Deriv>>,
    full: BTreeMap<SymbolId, Vec<Deriv>>,
}

struct Chart<'a> {
    g: &'a Grammar,
    tokens: &'a [String],
    token_ids: Vec<Option<SymbolId>>,
    n: usize,
    cells: Vec<Cell>,
    width: usize,
    /// Per-position lexical log-probability adjustments (open class).
    seen_scale: f64,
}

impl<'a> Chart<'a> {
    fn idx(&self, start: usize, end: usize) -> usize {
        start * (self.n + 1) + end
    }

    fn cell(&self, start: usize, end: usize) -> &Cell {
        &self.cells[self.idx(start, end)]
    }

    fn full(&self, start: usize, end: usize, label: SymbolId) -> &[Deriv] {
        self.cell(start, end)
            .full
            .get(&label)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn base(&self, start: usize, end: usize, label: SymbolId) -> &[Deriv] {
        self.cell(start, end)
            .base
            .get(&label)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Preorder (split, rule) sequence of a derivation.
    fn key(&self, start: usize, end: usize, d: &Deriv, out: &mut Vec<(u32, u32)>) {
        match &d.back {
            Back::Lexical(r) => out.push((0, *r)),
            Back::Unknown => out.push((0, u32::MAX)),
            Back::Binary {
                rule,
                split,
                left,
                right,
            } => {
                out.push((*split, *rule));
                let s = *split as usize;
                if let Child::Item { label, rank } = left {
                    self.key(start, s, &self.full(start, s, *label)[*rank as usize], out);
                }
                if let Child::Item { label, rank } = right {
                    self.key(s, end, &self.full(s, end, *label)[*rank as usize], out);
                }
            }
            Back::Unary { child, chain, rank } => {
                let ch = &self.g.chains_from(*child)[*chain as usize];
                out.extend(ch.rules.iter().map(|&r| (0, r)));
                self.key(start, end, &self.base(start, end, *child)[*rank as usize], out);
            }
        }
    }

    /// `Less` means `a` ranks before `b`.
    fn cmp(&self, a: (usize, usize, &Deriv), b: (usize, usize, &Deriv)) -> Ordering {
        let diff = a.2.logprob - b.2.logprob;
        if diff.abs() > TIE_EPSILON {
            return if diff > 0.0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        let (mut ka, mut kb) = (Vec::new(), Vec::new());
        self.key(a.0, a.1, a.2, &mut ka);
        self.key(b.0, b.1, b.2, &mut kb);
        ka.cmp(&kb)
    }

    /// Position at which `d` would enter `list`, or `None` if it falls
    /// outside the width.
    fn slot(&self, start: usize, end: usize, list: &[Deriv], d: &Deriv) -> Option<usize> {
        let pos = list
            .iter()
            .position(|o| self.cmp((start, end, d), (start, end, o)) == Ordering::Less)
            .unwrap_or(list.len());
        (pos < self.width).then_some(pos)
    }

    /// Binarized tree of a derivation over `[start, end)`.
    fn tree(&self, start: usize, end: usize, d: &Deriv) -> RawTree {
        let label = self.g.symbol(d.label);
        match &d.back {
            Back::Lexical(_) | Back::Unknown => {
                RawTree::node(label, vec![RawTree::leaf(self.tokens[start].as_str())])
            }
            Back::Binary {
                split, left, right, ..
            } => {
                let s = *split as usize;
                let l = self.child_tree(start, s, left);
                let r = self.child_tree(s, end, right);
                RawTree::node(label, vec![l, r])
            }
            Back::Unary { child, chain, rank } => {
                let ch = &self.g.chains_from(*child)[*chain as usize];
                let mut t = self.tree(start, end, &self.base(start, end, *child)[*rank as usize]);
                for &r in ch.rules.iter().rev() {
                    t = RawTree::node(self.g.rules()[r as usize].lhs.as_str(), vec![t]);
                }
                t
            }
        }
    }

    fn child_tree(&self, start: usize, end: usize, c: &Child) -> RawTree {
        match c {
            Child::Token => RawTree::leaf(self.tokens[start].as_str()),
            Child::Item { label, rank } => {
                self.tree(start, end, &self.full(start, end, *label)[*rank as usize])
            }
        }
    }
}

struct HookState<'h> {
    hook: &'h dyn PruningHook,
    memo: HashMap<(usize, usize, String), bool>,
}

impl HookState<'_> {
    fn judge(&mut self, chart: &Chart<'_>, start: usize, end: usize, d: &Deriv, stats: &mut ChartStats) -> bool {
        let tree = match debinarize_tree(&chart.tree(start, end, d)) {
            Ok(t) => t,
            Err(_) => return false,
        };
        // a chain introduces one constituent per rule; the base is judged already
        let levels = match &d.back {
            Back::Unary { child, chain, .. } => chart.g.chains_from(*child)[*chain as usize].rules.len(),
            _ => 1,
        };
        let mut node = &tree;
        for level in 0..levels {
            if level > 0 {
                node = &node.children[0];
            }
            if is_intermediate(&node.label) {
                continue;
            }
            if !self.judge_one(node, (start, end), stats) {
                stats.items_pruned += 1;
                return false;
            }
        }
        true
    }

    fn judge_one(&mut self, tree: &RawTree, span: (usize, usize), stats: &mut ChartStats) -> bool {
        let key = (span.0, span.1, tree.to_string());
        if let Some(&ok) = self.memo.get(&key) {
            stats.hook_cache_hits += 1;
            return ok;
        }
        stats.hook_invocations += 1;
        let ok = self.hook.accept(tree, span);
        self.memo.insert(key, ok);
        ok
    }
}

/// Offers `d` to `layer[label]` of cell `(start, end)`, consulting the hook
/// only if the derivation would make the cut.
fn offer(
    chart: &Chart<'_>,
    layer: &mut BTreeMap<SymbolId, Vec<Deriv>>,
    start: usize,
    end: usize,
    d: Deriv,
    hook: &mut Option<HookState<'_>>,
    stats: &mut ChartStats,
) {
    let list = layer.entry(d.label).or_default();
    let Some(pos) = chart.slot(start, end, list, &d) else {
        return;
    };
    if let Some(h) = hook.as_mut() {
        if !h.judge(chart, start, end, &d, stats) {
            return;
        }
    }
    list.insert(pos, d);
    list.truncate(chart.width);
}

/// Parses `tokens` under `config`.
pub fn parse(
    grammar: &Grammar,
    tokens: &[String],
    config: &ParseConfig,
    hook: Option<&dyn PruningHook>,
) -> Result<ParseResult, ParseError> {
    let started = Instant::now();
    if tokens.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    if config.k < 1 {
        return Err(ParseError::InvalidK(config.k));
    }
    let n = tokens.len();
    let token_ids: Vec<Option<SymbolId>> = tokens
        .iter()
        .map(|t| grammar.symbol_id(t).filter(|&id| grammar.is_terminal(id)))
        .collect();
    let unknown_tokens: Vec<String> = tokens
        .iter()
        .zip(&token_ids)
        .filter(|(_, id)| id.is_none())
        .map(|(t, _)| t.clone())
        .collect();
    let fail = |status, stats| ParseResult {
        status,
        trees: Vec::new(),
        stats,
        elapsed: started.elapsed(),
        unknown_tokens: unknown_tokens.clone(),
    };
    if !unknown_tokens.is_empty()
        && (config.oov_policy == OovPolicy::Fail || grammar.open_class().is_empty())
    {
        return Ok(fail(ParseStatus::OovFailure, ChartStats::default()));
    }
    let width = config.cell_width.unwrap_or(if hook.is_some() {
        config.k.max(DEFAULT_HOOK_CELL_WIDTH)
    } else {
        config.k
    });
    let mut chart = Chart {
        g: grammar,
        tokens,
        token_ids,
        n,
        cells: (0..(n + 1) * (n + 1)).map(|_| Cell::default()).collect(),
        width: width.max(config.k),
        seen_scale: match config.oov_policy {
            OovPolicy::OpenClass => (1.0 - OPEN_CLASS_MASS).ln(),
            OovPolicy::Fail => 0.0,
        },
    };
    let mut stats = ChartStats::default();
    let mut hook_state = hook.map(|hook| HookState {
        hook,
        memo: HashMap::new(),
    });

    for len in 1..=n {
        for start in 0..=n - len {
            let end = start + len;
            let mut base = BTreeMap::new();
            if len == 1 {
                fill_lexical(&chart, start, config, &mut base, &mut hook_state, &mut stats);
            } else {
                fill_binary(&chart, start, end, &mut base, &mut hook_state, &mut stats);
            }
            base.retain(|_, v: &mut Vec<Deriv>| !v.is_empty());
            let i = chart.idx(start, end);
            chart.cells[i].base = base;
            let mut full = chart.cells[i].base.clone();
            fill_unary(&chart, start, end, &mut full, &mut hook_state, &mut stats);
            full.retain(|_, v| !v.is_empty());
            if let Some(b) = config.beam {
                let mut best: Vec<(SymbolId, f64)> =
                    full.iter().map(|(l, v)| (*l, v[0].logprob)).collect();
                best.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let keep: Vec<SymbolId> = best.iter().take(b).map(|x| x.0).collect();
                full.retain(|l, _| keep.contains(l));
            }
            chart.cells[i].full = full;
        }
    }

    stats.items_created = chart
        .cells
        .iter()
        .flat_map(|c| c.full.values())
        .map(Vec::len)
        .sum();

    // complete parses
    let mut roots: Vec<&Deriv> = Vec::new();
    for (label, list) in &chart.cell(0, n).full {
        if !grammar.is_original_label(*label) {
            continue;
        }
        if let Some(r) = &config.root {
            if grammar.symbol(*label) != r {
                continue;
            }
        }
        for d in list {
            let pos = roots
                .iter()
                .position(|o| chart.cmp((0, n, d), (0, n, o)) == Ordering::Less)
                .unwrap_or(roots.len());
            roots.insert(pos, d);
        }
    }
    roots.truncate(config.k);
    if roots.is_empty() {
        return Ok(fail(ParseStatus::NoParse, stats));
    }
    let trees = roots
        .iter()
        .map(|d| {
            let t = chart.tree(0, n, d);
            (debinarize_tree(&t).unwrap_or(t), d.logprob)
        })
        .collect();
    Ok(ParseResult {
        status: ParseStatus::Parsed,
        trees,
        stats,
        elapsed: started.elapsed(),
        unknown_tokens,
    })
}

fn fill_lexical(
    chart: &Chart<'_>,
    pos: usize,
    config: &ParseConfig,
    base: &mut BTreeMap<SymbolId, Vec<Deriv>>,
    hook: &mut Option<HookState<'_>>,
    stats: &mut ChartStats,
) {
    let g = chart.g;
    match chart.token_ids[pos] {
        Some(t) => {
            for &r in g.lexical_rules(t) {
                let label = g.lhs_id(r);
                let mut lp = g.logprob(r);
                if config.oov_policy == OovPolicy::OpenClass && g.open_class().contains(&label) {
                    lp += chart.seen_scale;
                }
                let d = Deriv {
                    logprob: lp,
                    label,
                    back: Back::Lexical(r),
                };
                offer(chart, base, pos, pos + 1, d, hook, stats);
            }
        }
        None => {
            for &label in g.open_class() {
                let d = Deriv {
                    logprob: OPEN_CLASS_MASS.ln(),
                    label,
                    back: Back::Unknown,
                };
                offer(chart, base, pos, pos + 1, d, hook, stats);
            }
        }
    }
}

/// Items usable as a binary child over `[start, end)`: full-layer items and,
/// for single tokens, the token itself.
fn children(chart: &Chart<'_>, start: usize, end: usize) -> Vec<(SymbolId, Vec<(Child, f64)>)> {
    let mut out: Vec<(SymbolId, Vec<(Child, f64)>)> = chart
        .cell(start, end)
        .full
        .iter()
        .map(|(&label, list)| {
            let items = list
                .iter()
                .enumerate()
                .map(|(rank, d)| {
                    (
                        Child::Item {
                            label,
                            rank: rank as u32,
                        },
                        d.logprob,
                    )
                })
                .collect();
            (label, items)
        })
        .collect();
    if end == start + 1 {
        if let Some(t) = chart.token_ids[start] {
            out.push((t, vec![(Child::Token, 0.0)]));
        }
    }
    out
}

fn fill_binary(
    chart: &Chart<'_>,
    start: usize,
    end: usize,
    base: &mut BTreeMap<SymbolId, Vec<Deriv>>,
    hook: &mut Option<HookState<'_>>,
    stats: &mut ChartStats,
) {
    let g = chart.g;
    for split in start + 1..end {
        let lefts = children(chart, start, split);
        if lefts.is_empty() {
            continue;
        }
        let rights: HashMap<SymbolId, Vec<(Child, f64)>> =
            children(chart, split, end).into_iter().collect();
        if rights.is_empty() {
            continue;
        }
        for (left_label, left_items) in &lefts {
            for &r in g.binary_rules_with_left(*left_label) {
                let RuleShape::Binary { right, .. } = g.shape(r) else {
                    continue;
                };
                let Some(right_items) = rights.get(&right) else {
                    continue;
                };
                let rule_lp = g.logprob(r);
                let label = g.lhs_id(r);
                for (lc, llp) in left_items {
                    for (rc, rlp) in right_items {
                        let d = Deriv {
                            logprob: rule_lp + llp + rlp,
                            label,
                            back: Back::Binary {
                                rule: r,
                                split: split as u32,
                                left: *lc,
                                right: *rc,
                            },
                        };
                        offer(chart, base, start, end, d, hook, stats);
                    }
                }
            }
        }
    }
}

fn fill_unary(
    chart: &Chart<'_>,
    start: usize,
    end: usize,
    full: &mut BTreeMap<SymbolId, Vec<Deriv>>,
    hook: &mut Option<HookState<'_>>,
    stats: &mut ChartStats,
) {
    let g = chart.g;
    let cell = chart.cell(start, end);
    for (&child, list) in &cell.base {
        for (ci, chain) in g.chains_from(child).iter().enumerate() {
            for (rank, d) in list.iter().enumerate() {
                let d = Deriv {
                    logprob: chain.logprob + d.logprob,
                    label: chain.top,
                    back: Back::Unary {
                        child,
                        chain: ci as u32,
                        rank: rank as u32,
                    },
                };
                offer(chart, full, start, end, d, hook, stats);
            }
        }
    }
}
