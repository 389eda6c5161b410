use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::binarize::is_intermediate;
use super::closure::{enumerate_chains, unary_closure, Chain, ClosureTable};
use crate::treebank::{RawTree, LEX_SEP};

/// Longest unary chain applied in one chart cell unless configured otherwise.
pub const DEFAULT_MAX_UNARY_CHAIN: usize = 3;

pub type SymbolId = u32;
pub type RuleId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub count: u64,
    pub logprob: f64,
}

impl Rule {
    pub fn prob(&self) -> f64 {
        self.logprob.exp()
    }
}

fn rule_order(a: &Rule, b: &Rule) -> Ordering {
    a.lhs.cmp(&b.lhs).then_with(|| a.rhs.cmp(&b.rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("cannot induce a grammar from an empty treebank")]
    EmptyTreebank,
    #[error("symbol `{0}` is used both as a token and as a nonterminal")]
    LabelClash(String),
    #[error("rule for `{0}` has an empty right-hand side")]
    EmptyRhs(String),
    #[error("rule `{0}` has more than two right-hand symbols")]
    NotBinarized(String),
    #[error("grammar dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RuleShape {
    /// `X -> token`
    Lexical { terminal: SymbolId },
    /// `X -> Y` over a nonterminal
    Unary { child: SymbolId },
    Binary { left: SymbolId, right: SymbolId },
}

/// Binarized PCFG with relative-frequency estimates, bottom-up indices and
/// a precomputed unary closure.
#[derive(Clone, Debug)]
pub struct Grammar {
    rules: Vec<Rule>,
    shapes: Vec<RuleShape>,
    lhs_ids: Vec<SymbolId>,
    symbols: Vec<String>,
    ids: HashMap<String, SymbolId>,
    terminal: Vec<bool>,
    nonterminals: BTreeSet<String>,
    terminals: BTreeSet<String>,
    lexicalized: bool,
    max_unary_chain: usize,
    closure: ClosureTable,
    chains_by_child: HashMap<SymbolId, Vec<Chain>>,
    lexical_by_terminal: HashMap<SymbolId, Vec<RuleId>>,
    binary_by_left: HashMap<SymbolId, Vec<RuleId>>,
    open_class: BTreeSet<SymbolId>,
}

/// Relative-frequency PCFG from binarized trees.
pub fn induce(trees: &[RawTree]) -> Result<Grammar, GrammarError> {
    induce_with(trees, DEFAULT_MAX_UNARY_CHAIN)
}

pub fn induce_with(trees: &[RawTree], max_unary_chain: usize) -> Result<Grammar, GrammarError> {
    if trees.is_empty() {
        return Err(GrammarError::EmptyTreebank);
    }
    let mut counts: BTreeMap<(String, Vec<String>), u64> = BTreeMap::new();
    let mut leaves = BTreeSet::new();
    let mut internal = BTreeSet::new();
    fn walk(
        t: &RawTree,
        counts: &mut BTreeMap<(String, Vec<String>), u64>,
        leaves: &mut BTreeSet<String>,
        internal: &mut BTreeSet<String>,
    ) {
        if t.is_leaf() {
            leaves.insert(t.label.clone());
            return;
        }
        internal.insert(t.label.clone());
        let rhs = t.children.iter().map(|c| c.label.clone()).collect();
        *counts.entry((t.label.clone(), rhs)).or_default() += 1;
        for c in &t.children {
            walk(c, counts, leaves, internal);
        }
    }
    for t in trees {
        if t.is_leaf() {
            // a bare token is not a derivation
            leaves.insert(t.label.clone());
            continue;
        }
        walk(t, &mut counts, &mut leaves, &mut internal);
    }
    if let Some(clash) = leaves.intersection(&internal).next() {
        return Err(GrammarError::LabelClash(clash.clone()));
    }
    if counts.is_empty() {
        return Err(GrammarError::EmptyTreebank);
    }
    Grammar::from_counts(counts, max_unary_chain)
}

impl Grammar {
    /// Relative-frequency estimates from `(lhs, rhs) -> count`.
    pub fn from_counts(
        counts: BTreeMap<(String, Vec<String>), u64>,
        max_unary_chain: usize,
    ) -> Result<Grammar, GrammarError> {
        let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
        for ((lhs, _), c) in &counts {
            *totals.entry(lhs.as_str()).or_default() += c;
        }
        let rules = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|((lhs, rhs), &count)| Rule {
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                count,
                logprob: (count as f64 / totals[lhs.as_str()] as f64).ln(),
            })
            .collect();
        Grammar::from_rules(rules, max_unary_chain)
    }

    /// Builds a grammar from explicit rules, keeping their log-probabilities.
    pub fn from_rules(mut rules: Vec<Rule>, max_unary_chain: usize) -> Result<Grammar, GrammarError> {
        rules.sort_by(rule_order);
        rules.dedup_by(|a, b| rule_order(a, b) == Ordering::Equal);
        let nonterminals: BTreeSet<String> = rules.iter().map(|r| r.lhs.clone()).collect();
        let mut terminals = BTreeSet::new();
        for r in &rules {
            match r.rhs.len() {
                0 => return Err(GrammarError::EmptyRhs(r.lhs.clone())),
                1 | 2 => {}
                _ => return Err(GrammarError::NotBinarized(format!("{} -> {}", r.lhs, r.rhs.join(" ")))),
            }
            for s in &r.rhs {
                if !nonterminals.contains(s) {
                    terminals.insert(s.clone());
                }
            }
        }
        let mut symbols: Vec<String> = Vec::new();
        let mut ids = HashMap::new();
        let mut terminal = Vec::new();
        for s in nonterminals.iter().chain(terminals.iter()) {
            ids.insert(s.clone(), symbols.len() as SymbolId);
            terminal.push(terminals.contains(s));
            symbols.push(s.clone());
        }
        let mut shapes = Vec::with_capacity(rules.len());
        let mut lhs_ids = Vec::with_capacity(rules.len());
        let mut lexical_by_terminal: HashMap<SymbolId, Vec<RuleId>> = HashMap::new();
        let mut binary_by_left: HashMap<SymbolId, Vec<RuleId>> = HashMap::new();
        let mut emissions: HashMap<SymbolId, u64> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            let i = i as RuleId;
            lhs_ids.push(ids[&r.lhs]);
            let shape = match r.rhs.as_slice() {
                [a] if terminals.contains(a) => {
                    let t = ids[a];
                    lexical_by_terminal.entry(t).or_default().push(i);
                    *emissions.entry(t).or_default() += r.count;
                    RuleShape::Lexical { terminal: t }
                }
                [a] => RuleShape::Unary { child: ids[a] },
                [a, b] => {
                    binary_by_left.entry(ids[a]).or_default().push(i);
                    RuleShape::Binary {
                        left: ids[a],
                        right: ids[b],
                    }
                }
                _ => unreachable!(),
            };
            shapes.push(shape);
        }
        let open_class = rules
            .iter()
            .zip(&shapes)
            .filter_map(|(r, s)| match s {
                RuleShape::Lexical { terminal } if emissions[terminal] == 1 => Some(ids[&r.lhs]),
                _ => None,
            })
            .collect();
        let lexicalized = nonterminals.iter().any(|n| n.contains(LEX_SEP));
        let mut g = Grammar {
            rules,
            shapes,
            lhs_ids,
            symbols,
            ids,
            terminal,
            nonterminals,
            terminals,
            lexicalized,
            max_unary_chain,
            closure: ClosureTable::default(),
            chains_by_child: HashMap::new(),
            lexical_by_terminal,
            binary_by_left,
            open_class,
        };
        g.closure = unary_closure(&g, max_unary_chain);
        g.chains_by_child = enumerate_chains(&g, max_unary_chain);
        Ok(g)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn is_lexicalized(&self) -> bool {
        self.lexicalized
    }

    pub fn max_unary_chain(&self) -> usize {
        self.max_unary_chain
    }

    pub fn closure(&self) -> &ClosureTable {
        &self.closure
    }

    /// Rules grouped by left-hand side.
    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    pub fn symbol(&self, id: SymbolId) -> &str {
        &self.symbols[id as usize]
    }

    pub fn symbol_id(&self, s: &str) -> Option<SymbolId> {
        self.ids.get(s).copied()
    }

    pub fn is_terminal(&self, id: SymbolId) -> bool {
        self.terminal[id as usize]
    }

    pub fn knows_token(&self, token: &str) -> bool {
        self.terminals.contains(token)
    }

    /// Labels a hook may judge: anything that is not a binarization artifact.
    pub fn is_original_label(&self, id: SymbolId) -> bool {
        !is_intermediate(&self.symbols[id as usize])
    }

    pub(crate) fn shape(&self, rule: RuleId) -> RuleShape {
        self.shapes[rule as usize]
    }

    pub(crate) fn lhs_id(&self, rule: RuleId) -> SymbolId {
        self.lhs_ids[rule as usize]
    }

    pub(crate) fn logprob(&self, rule: RuleId) -> f64 {
        self.rules[rule as usize].logprob
    }

    pub(crate) fn lexical_rules(&self, terminal: SymbolId) -> &[RuleId] {
        self.lexical_by_terminal
            .get(&terminal)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub(crate) fn binary_rules_with_left(&self, left: SymbolId) -> &[RuleId] {
        self.binary_by_left
            .get(&left)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub(crate) fn chains_from(&self, child: SymbolId) -> &[Chain] {
        self.chains_by_child
            .get(&child)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Preterminals that emitted a token seen exactly once in training.
    pub(crate) fn open_class(&self) -> &BTreeSet<SymbolId> {
        &self.open_class
    }

    /// Line-oriented dump, `lhs -> rhs1 [rhs2]<TAB>count<TAB>logprob`,
    /// sorted by (lhs, rhs).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let _ = writeln!(out, "{} -> {}\t{}\t{}", r.lhs, r.rhs.join(" "), r.count, r.logprob);
        }
        out
    }

    pub fn load_dump(text: &str, max_unary_chain: usize) -> Result<Grammar, GrammarError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: &str| GrammarError::Dump {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut cols = line.split('\t');
            let (Some(rule), Some(count), Some(lp), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(err("expected three tab-separated columns"));
            };
            let (lhs, rhs) = rule.split_once(" -> ").ok_or_else(|| err("missing `->`"))?;
            let rhs: Vec<String> = rhs.split(' ').map(str::to_string).collect();
            if lhs.is_empty() || rhs.iter().any(String::is_empty) {
                return Err(err("empty symbol"));
            }
            let count = count.parse().map_err(|_| err("bad count"))?;
            let logprob: f64 = lp.parse().map_err(|_| err("bad log-probability"))?;
            if logprob > 0.0 || logprob.is_nan() {
                return Err(err("log-probability must be <= 0"));
            }
            rules.push(Rule {
                lhs: lhs.to_string(),
                rhs,
                count,
                logprob,
            });
        }
        Grammar::from_rules(rules, max_unary_chain)
    }

    /// Sum of rule log-probabilities of a binarized tree, or `None` if it
    /// uses a rule the grammar lacks.
    pub fn tree_logprob(&self, tree: &RawTree) -> Option<f64> {
        if tree.is_leaf() {
            return Some(0.0);
        }
        let rhs: Vec<String> = tree.children.iter().map(|c| c.label.clone()).collect();
        let idx = self
            .rules
            .binary_search_by(|r| r.lhs.as_str().cmp(&tree.label).then_with(|| r.rhs.cmp(&rhs)))
            .ok()?;
        let mut lp = self.rules[idx].logprob;
        for c in &tree.children {
            lp += self.tree_logprob(c)?;
        }
        Some(lp)
    }
}
