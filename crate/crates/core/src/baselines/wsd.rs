//! Most-frequent-sense disambiguation without context.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WsdError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Sense counts per surface token, sorted by (count desc, sense id asc).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseTable {
    senses: BTreeMap<String, Vec<(String, u64)>>,
    global: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Global,
    Abstain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prediction {
    Sense(String),
    Abstained,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsdScore {
    pub total: usize,
    pub attempted: usize,
    pub correct: usize,
    /// `None` when nothing was attempted.
    pub accuracy: Option<f64>,
    pub coverage: f64,
}

fn ranked(counts: BTreeMap<&str, u64>) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = counts.into_iter().map(|(s, c)| (s.to_string(), c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

pub fn wsd_train<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<SenseTable, WsdError> {
    if pairs.is_empty() {
        return Err(WsdError::EmptyCorpus);
    }
    let mut per: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    let mut global: BTreeMap<&str, u64> = BTreeMap::new();
    for (tok, sense) in pairs {
        *per.entry(tok.as_ref()).or_default().entry(sense.as_ref()).or_default() += 1;
        *global.entry(sense.as_ref()).or_default() += 1;
    }
    Ok(SenseTable {
        senses: per.into_iter().map(|(t, c)| (t.to_string(), ranked(c))).collect(),
        global: ranked(global).remove(0).0,
    })
}

impl SenseTable {
    pub fn senses(&self, token: &str) -> Option<&[(String, u64)]> {
        self.senses.get(token).map(Vec::as_slice)
    }

    pub fn global_sense(&self) -> &str {
        &self.global
    }

    pub fn tokens(&self) -> impl Iterator<Item = &String> {
        self.senses.keys()
    }
}

pub fn wsd_predict(table: &SenseTable, token: &str, fallback: Fallback) -> Prediction {
    match (table.senses.get(token), fallback) {
        (Some(s), _) => Prediction::Sense(s[0].0.clone()),
        (None, Fallback::Global) => Prediction::Sense(table.global.clone()),
        (None, Fallback::Abstain) => Prediction::Abstained,
    }
}

pub fn wsd_evaluate<S: AsRef<str>>(
    table: &SenseTable,
    test: &[(S, S)],
    fallback: Fallback,
) -> Result<WsdScore, WsdError> {
    if test.is_empty() {
        return Err(WsdError::EmptyCorpus);
    }
    let (mut attempted, mut correct) = (0, 0);
    for (tok, gold) in test {
        if let Prediction::Sense(s) = wsd_predict(table, tok.as_ref(), fallback) {
            attempted += 1;
            if s == gold.as_ref() {
                correct += 1;
            }
        }
    }
    Ok(WsdScore {
        total: test.len(),
        attempted,
        correct,
        accuracy: (attempted > 0).then(|| correct as f64 / attempted as f64),
        coverage: attempted as f64 / test.len() as f64,
    })
}

/// Reads `token<TAB>senseId` lines; blank lines and `#` comments are skipped.
pub fn parse_wsd_tsv(text: &str) -> Result<Vec<(String, String)>, WsdError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split('\t').collect::<Vec<_>>().as_slice() {
            [t, s] if !t.trim().is_empty() && !s.trim().is_empty() => {
                out.push((t.trim().to_string(), s.trim().to_string()))
            }
            _ => {
                return Err(WsdError::Syntax {
                    line: i + 1,
                    message: "expected `token<TAB>sense`".into(),
                })
            }
        }
    }
    Ok(out)
}
