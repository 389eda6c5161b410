//! Proof-sentence patterns: math spans and references collapse to generic
//! tokens, and identical patterns are counted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use regex::Regex;
use serde_json::{json, Value};

use crate::json::to_canonical_string;

pub const MATH_TOKEN: &str = "<M>";
pub const REF_TOKEN: &str = "<R>";

const MATH_MARK: char = '\u{E000}';
const REF_MARK: char = '\u{E001}';
/// Split off as standalone tokens.
const PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', '(', ')', '[', ']', '{', '}', '"'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeConfig {
    /// (open, close) pairs, tried in order at each position.
    pub math_delims: Vec<(String, String)>,
    pub ref_keywords: Vec<String>,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            math_delims: [("$$", "$$"), ("$", "$"), ("\\(", "\\)"), ("\\[", "\\]")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            ref_keywords: ["Theorem", "Lemma", "Definition", "Corollary", "Axiom"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// A compiled normalizer.
#[derive(Debug, Clone)]
pub struct Normalizer {
    config: NormalizeConfig,
    reference: Option<Regex>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub pattern: String,
    /// A math span ran to the end of the sentence.
    pub unterminated_math: bool,
}

impl Normalizer {
    pub fn new(config: NormalizeConfig) -> Result<Self, regex::Error> {
        let reference = if config.ref_keywords.is_empty() {
            None
        } else {
            let alts: Vec<String> = config.ref_keywords.iter().map(|k| regex::escape(k)).collect();
            let label = format!("[^\\s.,;:!?(){MATH_MARK}{REF_MARK}]");
            let body = format!("[^\\s,;:!?(){MATH_MARK}{REF_MARK}]");
            Some(Regex::new(&format!(
                "(?i)\\b(?:{})\\s+{body}*{label}",
                alts.join("|")
            ))?)
        };
        Ok(Normalizer { config, reference })
    }

    pub fn normalize(&self, sentence: &str) -> Normalized {
        let protected = sentence
            .replace(MATH_TOKEN, &format!(" {MATH_MARK} "))
            .replace(REF_TOKEN, &format!(" {REF_MARK} "));
        let (text, unterminated_math) = self.mask_math(&protected);
        let text = match &self.reference {
            Some(re) => re.replace_all(&text, format!(" {REF_MARK} ").as_str()).into_owned(),
            None => text,
        };
        let lower = text.to_lowercase();
        let mut tokens: Vec<String> = Vec::new();
        for word in lower.split_whitespace() {
            let mut cur = String::new();
            for c in word.chars() {
                if PUNCT.contains(&c) {
                    if !cur.is_empty() {
                        tokens.push(std::mem::take(&mut cur));
                    }
                    tokens.push(c.to_string());
                } else {
                    cur.push(c);
                }
            }
            if !cur.is_empty() {
                tokens.push(cur);
            }
        }
        let pattern = tokens
            .iter()
            .map(|t| match t.as_str() {
                m if m == MATH_MARK.to_string() => MATH_TOKEN.to_string(),
                r if r == REF_MARK.to_string() => REF_TOKEN.to_string(),
                other => other.replace(MATH_MARK, MATH_TOKEN).replace(REF_MARK, REF_TOKEN),
            })
            .collect::<Vec<_>>()
            .join(" ");
        Normalized {
            pattern,
            unterminated_math,
        }
    }

    /// Replaces each maximal math span with a marker.
    fn mask_math(&self, s: &str) -> (String, bool) {
        let mut out = String::with_capacity(s.len());
        let mut rest = s;
        let mut unterminated = false;
        'scan: while !rest.is_empty() {
            for (open, close) in &self.config.math_delims {
                if open.is_empty() || !rest.starts_with(open.as_str()) {
                    continue;
                }
                let after = &rest[open.len()..];
                out.push(' ');
                out.push(MATH_MARK);
                out.push(' ');
                match after.find(close.as_str()) {
                    Some(i) => rest = &after[i + close.len()..],
                    None => {
                        unterminated = true;
                        rest = "";
                    }
                }
                continue 'scan;
            }
            let c = rest.chars().next().unwrap();
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
        (out, unterminated)
    }
}

/// Normalizes with the default configuration.
pub fn normalize_sentence(sentence: &str) -> String {
    Normalizer::new(NormalizeConfig::default())
        .expect("default reference pattern compiles")
        .normalize(sentence)
        .pattern
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternStats {
    /// Sorted by (count desc, pattern asc).
    pub patterns: Vec<(String, usize)>,
    pub total_sentences: usize,
    /// Share of sentences covered by the top-i patterns.
    pub coverage: Vec<f64>,
    pub unterminated_math: usize,
}

pub fn pattern_stats<S: AsRef<str> + Sync>(sentences: &[S], normalizer: &Normalizer) -> PatternStats {
    let normalized: Vec<Normalized> = sentences
        .par_iter()
        .map(|s| normalizer.normalize(s.as_ref()))
        .collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in &normalized {
        *counts.entry(n.pattern.as_str()).or_default() += 1;
    }
    let mut patterns: Vec<(String, usize)> = counts.into_iter().map(|(p, c)| (p.to_string(), c)).collect();
    patterns.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let total = sentences.len();
    let mut acc = 0;
    let coverage = patterns
        .iter()
        .map(|(_, c)| {
            acc += c;
            acc as f64 / total as f64
        })
        .collect();
    PatternStats {
        patterns,
        total_sentences: total,
        coverage,
        unterminated_math: normalized.iter().filter(|n| n.unterminated_math).count(),
    }
}

impl PatternStats {
    /// `count<TAB>pattern` per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.patterns {
            let _ = writeln!(out, "{c}\t{p}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "total_sentences": self.total_sentences,
            "distinct_patterns": self.patterns.len(),
            "unterminated_math": self.unterminated_math,
            "coverage": self.coverage,
            "patterns": self.patterns.iter().map(|(p, c)| json!({"pattern": p, "count": c})).collect::<Vec<_>>(),
        })
    }

    pub fn to_canonical_json(&self) -> String {
        to_canonical_string(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize_sentence("Thus $x+1$ is prime by Theorem 2."), "thus <M> is prime by <R> .");
        assert_eq!(normalize_sentence("Hence the result."), "hence the result .");
        assert_eq!(normalize_sentence("By $a$ and $b$ we are done."), "by <M> and <M> we are done .");
        assert_eq!(normalize_sentence("By Lemma 2.3, \\(f\\) is   continuous"), "by <R> , <M> is continuous");
        assert_eq!(normalize_sentence("$$\\sum x$$ holds"), "<M> holds");
        assert_eq!(normalize_sentence("Apply Theorem $3$."), "apply theorem <M> .");
    }

    #[test]
    fn unterminated_math() {
        let n = Normalizer::new(NormalizeConfig::default()).unwrap();
        let r = n.normalize("Then $x + y is large.");
        assert_eq!(r.pattern, "then <M>");
        assert!(r.unterminated_math);
    }

    #[test]
    fn stats() {
        let n = Normalizer::new(NormalizeConfig::default()).unwrap();
        let s = pattern_stats(&["Hence $x$.", "Hence $y$.", "Done."], &n);
        assert_eq!(s.patterns, [("hence <M> .".to_string(), 2), ("done .".to_string(), 1)]);
        assert_eq!(s.coverage, [2.0 / 3.0, 1.0]);
        let s = pattern_stats(&["a", "a"], &n);
        assert_eq!(s.coverage, [1.0]);
        let s = pattern_stats::<&str>(&[], &n);
        assert_eq!((s.total_sentences, s.patterns.len()), (0, 0));
    }

    proptest! {
        #[test]
        fn idempotent(parts in prop::collection::vec(
            prop::sample::select(vec![
                "Theorem", "lemma", " ", "  ", "$", "$$", "\\(", "\\)", "x", "2.3", ".", ",",
                "(", ")", "<M>", "<R>", "By", "Axiom", "-", "'", "\t", "é", "A1", ";",
            ]),
            0..20,
        )) {
            let s: String = parts.concat();
            let once = normalize_sentence(&s);
            prop_assert_eq!(normalize_sentence(&once), once.clone());
        }
    }
}
