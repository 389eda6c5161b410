//! Random small PCFGs with sentences, checked against enumeration.

use std::collections::BTreeMap;

use proptest::prelude::*;
use typecyk_core::pcfg::Rule;
use typecyk_core::treebank::tree_yield;
use typecyk_core::{cyk_kbest, cyk_viterbi, Grammar, ParseStatus, RawTree};

use super::{matches_oracle, Enumerator};

pub const MAX_UNARY: usize = 3;
pub const ORACLE_LIMIT: usize = 1_000;

#[derive(Debug, Clone)]
pub struct Case {
    pub rules: Vec<Rule>,
    pub tokens: Vec<String>,
}

pub fn arb_case() -> impl Strategy<Value = Case> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(nts, terms)| {
        let rule = (0..nts, 0u8..3, 0..nts + terms, 0..nts + terms, 1u32..10);
        (
            prop::collection::vec(rule, 1..=20),
            prop::collection::vec(0..terms, 1..=8),
        )
            .prop_map(move |(raw, sent)| {
                let sym = |i: usize| {
                    if i < nts {
                        format!("N{i}")
                    } else {
                        format!("t{}", i - nts)
                    }
                };
                let mut weights: BTreeMap<(String, Vec<String>), u32> = BTreeMap::new();
                for (lhs, kind, a, b, w) in raw {
                    let rhs = match kind {
                        0 => vec![format!("t{}", a % terms)],
                        1 => vec![sym(a % nts)],
                        _ => vec![sym(a), sym(b)],
                    };
                    *weights.entry((sym(lhs), rhs)).or_default() += w;
                }
                let mut totals: BTreeMap<String, u32> = BTreeMap::new();
                for ((lhs, _), w) in &weights {
                    *totals.entry(lhs.clone()).or_default() += w;
                }
                let rules = weights
                    .into_iter()
                    .map(|((lhs, rhs), w)| Rule {
                        logprob: (w as f64 / totals[&lhs] as f64).ln(),
                        lhs,
                        rhs,
                        count: w as u64,
                    })
                    .collect();
                Case {
                    rules,
                    tokens: sent.into_iter().map(|i| format!("t{i}")).collect(),
                }
            })
    })
}

pub fn oracle(case: &Case, g: &Grammar) -> Option<Vec<(RawTree, f64)>> {
    // the grammar may reclassify symbols; enumerate over its own rule list
    let mut e = Enumerator::new(g.rules(), &case.tokens, MAX_UNARY, ORACLE_LIMIT);
    let all = e.all(None);
    (!e.overflow).then_some(all)
}

/// Viterbi and 5-best results agree with the enumerated parses. Cases whose
/// enumeration overflows are rejected.
pub fn check_case(case: &Case) -> Result<(), TestCaseError> {
    let g = Grammar::from_rules(case.rules.clone(), MAX_UNARY).unwrap();
    let Some(all) = oracle(case, &g) else {
        return Err(TestCaseError::reject("oracle overflow"));
    };
    if case.tokens.iter().any(|t| !g.knows_token(t)) {
        let r = cyk_viterbi(&g, &case.tokens, None).unwrap();
        prop_assert_eq!(r.status, ParseStatus::OovFailure);
        return Ok(());
    }
    let v = cyk_viterbi(&g, &case.tokens, None).unwrap();
    if all.is_empty() {
        prop_assert_eq!(v.status, ParseStatus::NoParse);
        return Ok(());
    }
    prop_assert_eq!(v.status, ParseStatus::Parsed);
    prop_assert!((v.trees[0].1 - all[0].1).abs() <= 1e-9);
    let k5 = cyk_kbest(&g, &case.tokens, 5, None).unwrap();
    if let Err(msg) = matches_oracle(&k5.trees, &all, 5, 1e-9) {
        return Err(TestCaseError::fail(msg));
    }
    prop_assert_eq!(&k5.trees[0].0, &v.trees[0].0);
    for (t, lp) in &k5.trees {
        prop_assert_eq!(tree_yield(t), case.tokens.clone());
        prop_assert!(*lp <= 0.0);
        let recomputed = g.tree_logprob(t).unwrap();
        prop_assert!((recomputed - lp).abs() <= 1e-9);
    }
    for w in k5.trees.windows(2) {
        prop_assert!(w[0].1 >= w[1].1 - 1e-12);
    }
    Ok(())
}
