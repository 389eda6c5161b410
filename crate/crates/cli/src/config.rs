//! Run configuration: a flat JSON object whose keys mirror the long
//! command-line flags. Relative paths resolve against the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub signature: Option<PathBuf>,
    pub treebank: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub cast_set: Option<Vec<String>>,
    pub merge_map: Option<BTreeMap<String, String>>,
    pub k: Option<usize>,
    pub hook: Option<String>,
    pub require_gold_root: Option<bool>,
    pub max_unary_chain: Option<usize>,
    pub oov_policy: Option<String>,
    pub beam: Option<usize>,
    pub test_ratio: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub fallback: Option<String>,
    pub math_delims: Option<Vec<(String, String)>>,
    pub ref_keywords: Option<Vec<String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.signature,
            &mut cfg.treebank,
            &mut cfg.grammar,
            &mut cfg.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            signature, treebank, grammar, output_dir, cast_set, merge_map, k, hook, require_gold_root,
            max_unary_chain, oov_policy, beam, test_ratio, seed, jobs, fallback, math_delims, ref_keywords
        )
    }
}

/// Path that must exist, or a message naming it.
pub fn existing(p: &Option<PathBuf>, key: &str) -> Result<PathBuf, String> {
    let p = p.as_ref().ok_or_else(|| format!("missing required setting `{key}`"))?;
    if !p.exists() {
        return Err(format!("{key} not found: {}", p.display()));
    }
    Ok(p.clone())
}
