//! Unary closure: best chains of unary nonterminal rules, bounded in length.

use std::collections::{BTreeMap, HashMap};

use super::grammar::{Grammar, RuleId, RuleShape, SymbolId};

/// A chain of unary rules from `top` down to some child label.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub top: SymbolId,
    pub logprob: f64,
    /// Rules from the top down.
    pub rules: Vec<RuleId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureEntry {
    pub logprob: f64,
    /// Rules from `from` down to `to`; empty for the trivial chain.
    pub witness: Vec<RuleId>,
}

/// Best chain for each `(from, to)` pair reachable through unary rules.
#[derive(Clone, Debug, Default)]
pub struct ClosureTable {
    best: BTreeMap<(String, String), ClosureEntry>,
}

impl ClosureTable {
    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }

    pub fn len(&self) -> usize {
        self.best.len()
    }

    /// Best chain from `from` down to `to`. The trivial chain (logprob 0)
    /// is the best self-chain.
    pub fn best(&self, from: &str, to: &str) -> Option<&ClosureEntry> {
        self.best.get(&(from.to_string(), to.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &ClosureEntry)> {
        self.best.iter()
    }
}

fn unary_parents(g: &Grammar) -> HashMap<SymbolId, Vec<RuleId>> {
    let mut by_child: HashMap<SymbolId, Vec<RuleId>> = HashMap::new();
    for i in 0..g.rules().len() as RuleId {
        if let RuleShape::Unary { child } = g.shape(i) {
            by_child.entry(child).or_default().push(i);
        }
    }
    by_child
}

/// Every unary chain of length 1..=max over each child label, ordered by
/// descending log-probability, then length, then rule ids.
pub(crate) fn enumerate_chains(g: &Grammar, max: usize) -> HashMap<SymbolId, Vec<Chain>> {
    let parents = unary_parents(g);
    let mut out = HashMap::new();
    for &child in parents.keys() {
        let mut chains = Vec::new();
        // frontier holds chains as bottom-up rule lists ending at `top`
        let mut frontier: Vec<(SymbolId, f64, Vec<RuleId>)> = vec![(child, 0.0, Vec::new())];
        for _ in 0..max {
            let mut next = Vec::new();
            for (top, lp, rules) in &frontier {
                for &r in parents.get(top).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut rs = rules.clone();
                    rs.push(r);
                    let item = (g.lhs_id(r), lp + g.logprob(r), rs);
                    chains.push(Chain {
                        top: item.0,
                        logprob: item.1,
                        rules: item.2.iter().rev().copied().collect(),
                    });
                    next.push(item);
                }
            }
            frontier = next;
        }
        chains.sort_by(|a, b| {
            b.logprob
                .total_cmp(&a.logprob)
                .then(a.rules.len().cmp(&b.rules.len()))
                .then_with(|| a.rules.cmp(&b.rules))
        });
        out.insert(child, chains);
    }
    out
}

/// Best chain per reachable `(from, to)` pair using 1..=max unary rules.
/// Self pairs reachable through a cycle record the trivial chain.
pub fn unary_closure(g: &Grammar, max_unary_chain: usize) -> ClosureTable {
    let mut best: BTreeMap<(String, String), ClosureEntry> = BTreeMap::new();
    for (child, chains) in enumerate_chains(g, max_unary_chain) {
        for ch in chains {
            let key = (g.symbol(ch.top).to_string(), g.symbol(child).to_string());
            let entry = if ch.top == child {
                ClosureEntry {
                    logprob: 0.0,
                    witness: Vec::new(),
                }
            } else {
                ClosureEntry {
                    logprob: ch.logprob,
                    witness: ch.rules.clone(),
                }
            };
            // chains arrive best-first, so the first one per pair wins
            best.entry(key).or_insert(entry);
        }
    }
    ClosureTable { best }
}
