//! Exhaustive parse enumeration used as an oracle for the chart parser.
#![allow(dead_code)]

pub mod algw;
pub mod cases;
pub mod trees;
pub mod types;

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use typecyk_core::pcfg::{debinarize_tree, Rule};
use typecyk_core::RawTree;

/// Shared derivation node; children are reference-counted to keep
/// enumeration cheap.
pub enum Node {
    Leaf(String),
    Inner(String, Vec<Rc<Node>>),
}

impl Node {
    fn to_tree(&self) -> RawTree {
        match self {
            Node::Leaf(s) => RawTree::leaf(s.as_str()),
            Node::Inner(l, cs) => RawTree::node(l.as_str(), cs.iter().map(|c| c.to_tree()).collect()),
        }
    }
}

type Parses = Rc<Vec<(Rc<Node>, f64)>>;

pub struct Enumerator<'a> {
    rules: &'a [Rule],
    lhs: BTreeSet<&'a str>,
    tokens: &'a [String],
    max_unary: usize,
    limit: usize,
    memo: HashMap<(usize, usize, String, usize), Parses>,
    pub overflow: bool,
}

impl<'a> Enumerator<'a> {
    /// `limit` bounds the number of derivations kept per memo entry; when
    /// exceeded `overflow` is set and results are incomplete.
    pub fn new(rules: &'a [Rule], tokens: &'a [String], max_unary: usize, limit: usize) -> Self {
        Enumerator {
            rules,
            lhs: rules.iter().map(|r| r.lhs.as_str()).collect(),
            tokens,
            max_unary,
            limit,
            memo: HashMap::new(),
            overflow: false,
        }
    }

    fn is_nt(&self, s: &str) -> bool {
        self.lhs.contains(s)
    }

    /// Derivations of `label` over `[i, j)` whose topmost run of unary
    /// rules has at most `budget` steps.
    fn derive(&mut self, i: usize, j: usize, label: &str, budget: usize) -> Parses {
        let key = (i, j, label.to_string(), budget);
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let mut out: Vec<(Rc<Node>, f64)> = Vec::new();
        let rules = self.rules;
        for r in rules.iter().filter(|r| r.lhs == label) {
            if self.overflow {
                break;
            }
            match r.rhs.as_slice() {
                [t] if !self.is_nt(t) => {
                    if j == i + 1 && self.tokens[i] == *t {
                        out.push((
                            Rc::new(Node::Inner(label.into(), vec![Rc::new(Node::Leaf(t.clone()))])),
                            r.logprob,
                        ));
                    }
                }
                [c] => {
                    if budget > 0 {
                        for (t, lp) in self.derive(i, j, c, budget - 1).iter() {
                            out.push((Rc::new(Node::Inner(label.into(), vec![t.clone()])), lp + r.logprob));
                        }
                    }
                }
                [b, c] => {
                    for s in i + 1..j {
                        let left = self.side(i, s, b);
                        if left.is_empty() {
                            continue;
                        }
                        let right = self.side(s, j, c);
                        for (lt, llp) in left.iter() {
                            for (rt, rlp) in right.iter() {
                                if out.len() > self.limit {
                                    self.overflow = true;
                                    break;
                                }
                                out.push((
                                    Rc::new(Node::Inner(label.into(), vec![lt.clone(), rt.clone()])),
                                    r.logprob + llp + rlp,
                                ));
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
            if out.len() > self.limit {
                self.overflow = true;
                out.truncate(self.limit);
            }
        }
        let p = Rc::new(out);
        self.memo.insert(key, p.clone());
        p
    }

    fn side(&mut self, i: usize, j: usize, sym: &str) -> Parses {
        if self.is_nt(sym) {
            self.derive(i, j, sym, self.max_unary)
        } else if j == i + 1 && self.tokens[i] == sym {
            Rc::new(vec![(Rc::new(Node::Leaf(sym.into())), 0.0)])
        } else {
            Rc::new(Vec::new())
        }
    }

    /// Every complete parse rooted at a non-intermediate label, debinarized,
    /// best first.
    pub fn all(&mut self, root: Option<&str>) -> Vec<(RawTree, f64)> {
        let n = self.tokens.len();
        let labels: Vec<&str> = self.lhs.iter().copied().collect();
        let mut out = Vec::new();
        for l in labels {
            if l.contains('|') || root.is_some_and(|r| r != l) {
                continue;
            }
            for (t, lp) in self.derive(0, n, l, self.max_unary).iter() {
                out.push((debinarize_tree(&t.to_tree()).unwrap(), *lp));
            }
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1));
        out
    }
}

/// Checks a ranked list against the oracle: scores agree position by
/// position within `tol`, and every completed score class holds the same
/// trees.
pub fn matches_oracle(
    got: &[(RawTree, f64)],
    oracle: &[(RawTree, f64)],
    k: usize,
    tol: f64,
) -> Result<(), String> {
    let want = oracle.len().min(k);
    if got.len() != want {
        return Err(format!("expected {want} parses, got {}", got.len()));
    }
    for (i, ((_, a), (_, b))) in got.iter().zip(oracle).enumerate() {
        if (a - b).abs() > tol {
            return Err(format!("rank {i}: score {a} vs oracle {b}"));
        }
    }
    let distinct: BTreeSet<String> = got.iter().map(|(t, _)| t.to_string()).collect();
    if distinct.len() != got.len() {
        return Err("duplicate trees".into());
    }
    let mut i = 0;
    while i < got.len() {
        let score = got[i].1;
        let class = |xs: &[(RawTree, f64)]| -> BTreeSet<String> {
            xs.iter()
                .filter(|(_, s)| (s - score).abs() <= tol)
                .map(|(t, _)| t.to_string())
                .collect()
        };
        let g = class(got);
        let o = class(oracle);
        if !g.is_subset(&o) {
            return Err(format!("trees at score {score} are not oracle parses"));
        }
        let complete = got.len() < k || (got.last().unwrap().1 - score).abs() > tol;
        if complete && g != o {
            return Err(format!("score class {score} differs from the oracle"));
        }
        i += g.len().max(1);
    }
    Ok(())
}
