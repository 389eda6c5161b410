use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Map, Value};

use super::{topk_fractions, ExperimentConfig};
use crate::chart::{ChartStats, OovPolicy};
use crate::json::to_canonical_string;
use crate::pcfg::Grammar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Hit,
    Miss,
    RepairAmbiguous,
    RepairFailed,
    NoParse,
    OovFailure,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Hit => "hit",
            Outcome::Miss => "miss",
            Outcome::RepairAmbiguous => "repair_ambiguous",
            Outcome::RepairFailed => "repair_failed",
            Outcome::NoParse => "no_parse",
            Outcome::OovFailure => "oov_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryResult {
    pub id: String,
    pub outcome: Outcome,
    /// 1-based rank of the first correct candidate.
    pub rank: Option<usize>,
    pub candidates: usize,
    /// Repaired term of the best candidate.
    pub predicted: Option<String>,
    pub gold: String,
    pub top_tree: Option<String>,
    pub stats: ChartStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub hit: usize,
    pub miss: usize,
    pub repair_ambiguous: usize,
    pub repair_failed: usize,
    pub no_parse: usize,
    pub oov_failure: usize,
}

impl OutcomeCounts {
    pub fn total(&self) -> usize {
        self.hit + self.miss + self.repair_ambiguous + self.repair_failed + self.no_parse + self.oov_failure
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChartSummary {
    pub mean_items: f64,
    pub mean_hook_invocations: f64,
    pub mean_hook_rejections: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub ambiguate: Duration,
    pub induce: Duration,
    pub parse: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: ExperimentConfig,
    pub corpus_size: usize,
    /// (entry id, reason) for entries skipped by validation.
    pub invalid: Vec<(String, String)>,
    pub train_size: usize,
    pub test_size: usize,
    pub grammar_rules: usize,
    pub grammar_nonterminals: usize,
    pub top1: f64,
    pub topk: BTreeMap<usize, f64>,
    pub counts: OutcomeCounts,
    pub chart: ChartSummary,
    /// Sorted by entry id.
    pub entries: Vec<EntryResult>,
    /// Wall time; excluded from the serialized form.
    pub timings: PhaseTimings,
}

impl Report {
    pub(crate) fn build(
        config: ExperimentConfig,
        corpus_size: usize,
        invalid: Vec<(String, String)>,
        train_size: usize,
        grammar: &Grammar,
        entries: Vec<EntryResult>,
        timings: PhaseTimings,
    ) -> Report {
        let ranks: Vec<Option<usize>> = entries.iter().map(|e| e.rank).collect();
        let topk = topk_fractions(&ranks, config.k);
        let mut counts = OutcomeCounts::default();
        for e in &entries {
            *match e.outcome {
                Outcome::Hit => &mut counts.hit,
                Outcome::Miss => &mut counts.miss,
                Outcome::RepairAmbiguous => &mut counts.repair_ambiguous,
                Outcome::RepairFailed => &mut counts.repair_failed,
                Outcome::NoParse => &mut counts.no_parse,
                Outcome::OovFailure => &mut counts.oov_failure,
            } += 1;
        }
        let n = entries.len().max(1) as f64;
        let sum = |f: fn(&ChartStats) -> usize| entries.iter().map(|e| f(&e.stats)).sum::<usize>() as f64 / n;
        let chart = ChartSummary {
            mean_items: sum(|s| s.items_created),
            mean_hook_invocations: sum(|s| s.hook_invocations),
            mean_hook_rejections: sum(|s| s.items_pruned),
        };
        Report {
            top1: topk[&1],
            topk,
            counts,
            chart,
            corpus_size,
            invalid,
            train_size,
            test_size: entries.len(),
            grammar_rules: grammar.rules().len(),
            grammar_nonterminals: grammar.nonterminals().len(),
            entries,
            config,
            timings,
        }
    }

    /// Fraction of parse attempts that ended in no_parse or oov_failure.
    pub fn failure_rate(&self) -> f64 {
        if self.test_size == 0 {
            return 0.0;
        }
        (self.counts.no_parse + self.counts.oov_failure) as f64 / self.test_size as f64
    }

    pub fn to_json(&self) -> Value {
        let c = &self.config;
        let topk: Map<String, Value> = self.topk.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "outcome": e.outcome.as_str(),
                    "rank": e.rank,
                    "candidates": e.candidates,
                    "predicted": e.predicted,
                    "gold": e.gold,
                    "top_tree": e.top_tree,
                    "items": e.stats.items_created,
                    "hook_invocations": e.stats.hook_invocations,
                    "hook_rejections": e.stats.items_pruned,
                })
            })
            .collect();
        let invalid: Vec<Value> = self
            .invalid
            .iter()
            .map(|(id, reason)| json!({"id": id, "reason": reason}))
            .collect();
        json!({
            "config": {
                "k": c.k,
                "seed": c.seed,
                "test_ratio": c.test_ratio,
                "hook": c.hook.as_str(),
                "require_gold_root": c.require_gold_root,
                "max_unary_chain": c.max_unary_chain,
                "oov_policy": match c.oov_policy { OovPolicy::Fail => "fail", OovPolicy::OpenClass => "open_class" },
                "beam": c.beam,
            },
            "corpus": {
                "entries": self.corpus_size,
                "invalid": invalid,
                "train": self.train_size,
                "test": self.test_size,
            },
            "grammar": {
                "rules": self.grammar_rules,
                "nonterminals": self.grammar_nonterminals,
            },
            "top1": self.top1,
            "topk": Value::Object(topk),
            "counts": {
                "hit": self.counts.hit,
                "miss": self.counts.miss,
                "repair_ambiguous": self.counts.repair_ambiguous,
                "repair_failed": self.counts.repair_failed,
                "no_parse": self.counts.no_parse,
                "oov_failure": self.counts.oov_failure,
            },
            "chart": {
                "mean_items": self.chart.mean_items,
                "mean_hook_invocations": self.chart.mean_hook_invocations,
                "mean_hook_rejections": self.chart.mean_hook_rejections,
            },
            "entries": entries,
        })
    }

    /// Canonical serialization; identical inputs give identical bytes.
    pub fn to_canonical_json(&self) -> String {
        to_canonical_string(&self.to_json())
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "hook={} k={} seed={} test_ratio={} require_gold_root={}",
            c.hook.as_str(),
            c.k,
            c.seed,
            c.test_ratio,
            c.require_gold_root
        );
        let _ = writeln!(
            out,
            "corpus {} (invalid {}), train {}, test {}; grammar {} rules, {} nonterminals",
            self.corpus_size,
            self.invalid.len(),
            self.train_size,
            self.test_size,
            self.grammar_rules,
            self.grammar_nonterminals
        );
        let _ = writeln!(out, "{:<18}{:>10}", "metric", "value");
        let _ = writeln!(out, "{:<18}{:>10.6}", "top1", self.top1);
        for (k, v) in self.topk.iter().filter(|(k, _)| **k > 1) {
            let _ = writeln!(out, "{:<18}{:>10.6}", format!("top{k}"), v);
        }
        let n = &self.counts;
        for (name, v) in [
            ("hit", n.hit),
            ("miss", n.miss),
            ("repair_ambiguous", n.repair_ambiguous),
            ("repair_failed", n.repair_failed),
            ("no_parse", n.no_parse),
            ("oov_failure", n.oov_failure),
        ] {
            let _ = writeln!(out, "{name:<18}{v:>10}");
        }
        let _ = writeln!(out, "{:<18}{:>10.2}", "mean_items", self.chart.mean_items);
        let _ = writeln!(out, "{:<18}{:>10.2}", "mean_hook_calls", self.chart.mean_hook_invocations);
        let _ = writeln!(out, "{:<18}{:>10.2}", "mean_rejections", self.chart.mean_hook_rejections);
        let t = &self.timings;
        let _ = writeln!(
            out,
            "time: ambiguate {:.3}s, induce {:.3}s, parse {:.3}s",
            t.ambiguate.as_secs_f64(),
            t.induce.as_secs_f64(),
            t.parse.as_secs_f64()
        );
        out
    }
}
