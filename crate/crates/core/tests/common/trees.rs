//! Random n-ary trees over disjoint label and token alphabets.

use proptest::prelude::*;
use typecyk_core::pcfg::{binarize_tree, debinarize_tree, induce};
use typecyk_core::RawTree;

const LABELS: [&str; 5] = ["S", "NP", "VP", "fun[real,real]", "real@sin"];
const TOKENS: [&str; 4] = ["a", "b", "sin", "+"];

/// Trees up to depth 5 with one to five children per node.
pub fn arb_tree() -> impl Strategy<Value = RawTree> {
    let leaf = prop::sample::select(TOKENS.to_vec()).prop_map(RawTree::leaf);
    let pre = (prop::sample::select(LABELS.to_vec()), leaf.clone())
        .prop_map(|(l, t)| RawTree::node(l, vec![t]));
    pre.prop_recursive(4, 48, 5, |inner| {
        (
            prop::sample::select(LABELS.to_vec()),
            prop::collection::vec(inner, 1..=5),
        )
            .prop_map(|(l, cs)| RawTree::node(l, cs))
    })
}

pub fn check_round_trip(t: &RawTree) -> Result<(), TestCaseError> {
    let b = binarize_tree(t);
    fn binary(t: &RawTree) -> bool {
        t.children.len() <= 2 && t.children.iter().all(binary)
    }
    prop_assert!(binary(&b));
    prop_assert_eq!(b.leaves(), t.leaves());
    prop_assert_eq!(&debinarize_tree(&b).unwrap(), t);
    Ok(())
}

/// Rule probabilities of each left-hand side sum to one.
pub fn check_normalized(trees: &[RawTree]) -> Result<(), TestCaseError> {
    let bin: Vec<RawTree> = trees.iter().map(binarize_tree).collect();
    let g = induce(&bin).unwrap();
    for lhs in g.nonterminals() {
        let rules: Vec<_> = g.rules_for(lhs).collect();
        if rules.is_empty() {
            continue;
        }
        let sum: f64 = rules.iter().map(|r| r.prob()).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9, "{} sums to {}", lhs, sum);
    }
    Ok(())
}
