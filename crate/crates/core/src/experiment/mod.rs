//! Cast-recovery experiment: erase casts and merge symbols in a gold
//! treebank, induce a grammar from the ambiguated trees, re-parse held-out
//! sentences and check whether the repaired terms equal the gold terms.

mod ambiguate;
mod report;
mod split;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use ambiguate::{ambiguate, AmbiguateError, AmbiguatedEntry, AmbiguationSpec};
pub use report::{ChartSummary, EntryResult, Outcome, OutcomeCounts, PhaseTimings, Report};
pub use split::{split_corpus, split_indices, test_size, Lcg, SplitError};

use crate::chart::{parse, OovPolicy, ParseConfig, ParseStatus, TypedPruningHook};
use crate::formal::{alpha_equal, check, insert_coercions_expecting, CoercionError, Signature, Term};
use crate::pcfg::{binarize_tree, induce_with, Grammar, GrammarError, DEFAULT_MAX_UNARY_CHAIN};
use crate::treebank::{label_type, term_of_labeled_tree, RawTree, TreebankEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookMode {
    None,
    Typed,
}

impl HookMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HookMode::None => "none",
            HookMode::Typed => "typed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: usize,
    pub seed: u64,
    /// 0 evaluates on the training data itself.
    pub test_ratio: f64,
    pub hook: HookMode,
    pub require_gold_root: bool,
    pub max_unary_chain: usize,
    pub oov_policy: OovPolicy,
    pub beam: Option<usize>,
    /// Worker threads; `None` uses every available processor.
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k: 1,
            seed: 0,
            test_ratio: 0.2,
            hook: HookMode::Typed,
            require_gold_root: true,
            max_unary_chain: DEFAULT_MAX_UNARY_CHAIN,
            oov_policy: OovPolicy::Fail,
            beam: None,
            jobs: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("k must be at least 1, got {0}")]
    InvalidK(usize),
    #[error("test ratio must lie in [0, 1), got {0}")]
    BadRatio(f64),
    #[error(transparent)]
    Spec(AmbiguateError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("{} of {total} entries failed validation", invalid.len())]
    TooManyInvalid {
        total: usize,
        invalid: Vec<(String, String)>,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// How one predicted tree fares against the gold term.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidateVerdict {
    Correct(Term),
    Wrong(Term),
    RepairAmbiguous,
    RepairFailed(String),
}

/// Reconstructs the term of a predicted tree, repairs it against its root
/// label type and compares it with `gold` up to alpha-equivalence.
pub fn judge_candidate(tree: &RawTree, merged: &Signature, gold: &Term) -> CandidateVerdict {
    let term = match term_of_labeled_tree(tree, merged) {
        Ok(t) => t,
        Err(e) => return CandidateVerdict::RepairFailed(e.to_string()),
    };
    let expected = label_type(&tree.label).ok();
    match insert_coercions_expecting(&term, merged, expected.as_ref()) {
        Ok(t) if alpha_equal(&t, gold) => CandidateVerdict::Correct(t),
        Ok(t) => CandidateVerdict::Wrong(t),
        Err(CoercionError::AmbiguousRepair { .. }) => CandidateVerdict::RepairAmbiguous,
        Err(e) => CandidateVerdict::RepairFailed(e.to_string()),
    }
}

fn validate(entry: &TreebankEntry, sig: &Signature, spec: &AmbiguationSpec) -> Result<AmbiguatedEntry, String> {
    let gold = entry
        .gold_term
        .as_ref()
        .ok_or_else(|| "tree does not read back as a term".to_string())?;
    if !check(gold, sig, None) {
        return Err("gold term is ill-typed".into());
    }
    let a = ambiguate(entry, spec).map_err(|e| e.to_string())?;
    if a.tokens.is_empty() {
        return Err("empty yield".into());
    }
    Ok(a)
}

/// Ambiguates every entry; fails if more than half are invalid.
pub fn ambiguate_corpus(
    corpus: &[TreebankEntry],
    sig: &Signature,
    spec: &AmbiguationSpec,
) -> Result<(Vec<AmbiguatedEntry>, Vec<(String, String)>), ExperimentError> {
    let mut ok = Vec::new();
    let mut invalid = Vec::new();
    for e in corpus {
        match validate(e, sig, spec) {
            Ok(a) => ok.push(a),
            Err(reason) => invalid.push((e.id.clone(), reason)),
        }
    }
    if corpus.is_empty() || invalid.len() * 2 > corpus.len() {
        return Err(ExperimentError::TooManyInvalid {
            total: corpus.len(),
            invalid,
        });
    }
    Ok((ok, invalid))
}

fn evaluate_entry(
    entry: &AmbiguatedEntry,
    grammar: &Grammar,
    merged: &Signature,
    config: &ExperimentConfig,
    hook: Option<&TypedPruningHook>,
) -> EntryResult {
    let pc = ParseConfig {
        k: config.k,
        oov_policy: config.oov_policy,
        root: config.require_gold_root.then(|| entry.tree.label.clone()),
        beam: config.beam,
        cell_width: None,
    };
    let hook_dyn = hook.map(|h| h as &dyn crate::chart::PruningHook);
    let result = parse(grammar, &entry.tokens, &pc, hook_dyn).expect("tokens are non-empty and k >= 1");
    let mut rank = None;
    let mut top = None;
    for (i, (tree, _)) in result.trees.iter().enumerate() {
        let v = judge_candidate(tree, merged, &entry.gold_term);
        if i == 0 {
            top = Some(v.clone());
        }
        if matches!(v, CandidateVerdict::Correct(_)) {
            rank = Some(i + 1);
            break;
        }
    }
    let outcome = match (result.status, rank, &top) {
        (ParseStatus::OovFailure, ..) => Outcome::OovFailure,
        (ParseStatus::NoParse, ..) => Outcome::NoParse,
        (_, Some(1), _) => Outcome::Hit,
        (_, _, Some(CandidateVerdict::RepairAmbiguous)) => Outcome::RepairAmbiguous,
        (_, _, Some(CandidateVerdict::RepairFailed(_))) => Outcome::RepairFailed,
        _ => Outcome::Miss,
    };
    let predicted = match &top {
        Some(CandidateVerdict::Correct(t)) | Some(CandidateVerdict::Wrong(t)) => Some(t.to_string()),
        _ => None,
    };
    EntryResult {
        id: entry.id.clone(),
        outcome,
        rank,
        candidates: result.trees.len(),
        predicted,
        gold: entry.gold_term.to_string(),
        top_tree: result.trees.first().map(|(t, _)| t.to_string()),
        stats: result.stats,
    }
}

/// Runs the full pipeline: ambiguate, split, induce, parse, score.
pub fn run_experiment(
    corpus: &[TreebankEntry],
    spec: &AmbiguationSpec,
    sig: &Signature,
    config: &ExperimentConfig,
) -> Result<Report, ExperimentError> {
    if config.k < 1 {
        return Err(ExperimentError::InvalidK(config.k));
    }
    if !(0.0..1.0).contains(&config.test_ratio) {
        return Err(ExperimentError::BadRatio(config.test_ratio));
    }
    let merged = spec.merged_signature(sig).map_err(ExperimentError::Spec)?;

    let t0 = Instant::now();
    let (entries, invalid) = ambiguate_corpus(corpus, sig, spec)?;
    let (train, test) = if config.test_ratio == 0.0 {
        (entries.clone(), entries)
    } else {
        split_corpus(&entries, config.test_ratio, config.seed)?
    };
    let ambiguate_time = t0.elapsed();

    let t1 = Instant::now();
    let trees: Vec<RawTree> = train.iter().map(|e| binarize_tree(&e.tree)).collect();
    let grammar = induce_with(&trees, config.max_unary_chain)?;
    let induce_time = t1.elapsed();

    let t2 = Instant::now();
    let hook = (config.hook == HookMode::Typed).then(|| TypedPruningHook::new(merged.clone()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let mut results: Vec<EntryResult> = pool.install(|| {
        test.par_iter()
            .map(|e| evaluate_entry(e, &grammar, &merged, config, hook.as_ref()))
            .collect()
    });
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let parse_time = t2.elapsed();

    Ok(Report::build(
        config.clone(),
        corpus.len(),
        invalid,
        train.len(),
        &grammar,
        results,
        PhaseTimings {
            ambiguate: ambiguate_time,
            induce: induce_time,
            parse: parse_time,
        },
    ))
}

/// Top-k hit fractions for k = 1..=max from first-correct ranks.
pub fn topk_fractions(ranks: &[Option<usize>], max: usize) -> BTreeMap<usize, f64> {
    let n = ranks.len().max(1) as f64;
    (1..=max)
        .map(|k| {
            let hits = ranks.iter().filter(|r| r.is_some_and(|r| r <= k)).count();
            (k, if ranks.is_empty() { 0.0 } else { hits as f64 / n })
        })
        .collect()
}
