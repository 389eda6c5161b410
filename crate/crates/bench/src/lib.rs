//! Synthetic typed treebanks for scale tests and benchmarks.
//!
//! Terms are generated type-directed over a fixed signature with real,
//! complex and numeral types, two casts and overloaded addition, so the
//! corpora exercise the same ambiguity as the trig fixture at larger size.

use typecyk_core::experiment::{ambiguate_corpus, AmbiguationSpec, Lcg};
use typecyk_core::formal::Term;
use typecyk_core::pcfg::{binarize_tree, induce_with, DEFAULT_MAX_UNARY_CHAIN};
use typecyk_core::treebank::label_with_types;
use typecyk_core::{Grammar, Signature, TreebankEntry, TypeExpr};

pub const UNARY_REAL: usize = 12;
pub const BINARY_REAL: usize = 6;
pub const UNARY_COMPLEX: usize = 6;
pub const BINARY_COMPLEX: usize = 4;
pub const NUMERALS: usize = 8;
pub const REAL_VARS: usize = 6;
pub const COMPLEX_VARS: usize = 3;

/// Signature text: `f0..` real→real, `g0..` binary real (`g0` is `plus_r`),
/// `h0..` complex→complex, `k0..` binary complex (`k0` is `plus_c`),
/// numerals `n0..`, variables `x0..`, `z0..`, casts `&` and `Cx`.
pub fn synthetic_signature() -> Signature {
    let mut s = String::new();
    for i in 0..UNARY_REAL {
        s += &format!("const f{i} : (fun real real)\n");
    }
    s += "const plus_r : (fun real (fun real real))\n";
    for i in 1..BINARY_REAL {
        s += &format!("const g{i} : (fun real (fun real real))\n");
    }
    for i in 0..UNARY_COMPLEX {
        s += &format!("const h{i} : (fun complex complex)\n");
    }
    s += "const plus_c : (fun complex (fun complex complex))\n";
    for i in 1..BINARY_COMPLEX {
        s += &format!("const k{i} : (fun complex (fun complex complex))\n");
    }
    for i in 0..NUMERALS {
        s += &format!("const n{i} : num\n");
    }
    for i in 0..REAL_VARS {
        s += &format!("var x{i} : real\n");
    }
    for i in 0..COMPLEX_VARS {
        s += &format!("var z{i} : complex\n");
    }
    s += "const & : (fun num real)\nconst Cx : (fun real complex)\ncoercion &\ncoercion Cx\n";
    Signature::parse(&s).expect("synthetic signature")
}

/// Casts `&`, `Cx`; `plus_r` and `plus_c` merged into `+`.
pub fn synthetic_spec() -> AmbiguationSpec {
    AmbiguationSpec::new(["&", "Cx"], [("plus_r", "+"), ("plus_c", "+")])
}

struct Gen {
    rng: Lcg,
}

impl Gen {
    fn pick(&mut self, n: usize) -> usize {
        self.rng.next_u32() as usize % n
    }

    fn real_leaf(&mut self) -> Term {
        if self.pick(3) == 0 {
            Term::app(Term::constant("&"), Term::constant(format!("n{}", self.pick(NUMERALS))))
        } else {
            Term::var(format!("x{}", self.pick(REAL_VARS)))
        }
    }

    fn real(&mut self, budget: usize) -> Term {
        if budget <= 1 {
            return self.real_leaf();
        }
        match self.pick(5) {
            0 | 1 => Term::app(Term::constant(format!("f{}", self.pick(UNARY_REAL))), self.real(budget - 1)),
            2 | 3 => {
                let f = match self.pick(BINARY_REAL) {
                    0 => "plus_r".to_string(),
                    i => format!("g{i}"),
                };
                let left = budget / 2;
                Term::apply(Term::constant(f), [self.real(left), self.real(budget - 1 - left)])
            }
            _ => self.real_leaf(),
        }
    }

    fn complex(&mut self, budget: usize) -> Term {
        if budget <= 1 {
            return Term::var(format!("z{}", self.pick(COMPLEX_VARS)));
        }
        match self.pick(5) {
            0 => Term::app(Term::constant(format!("h{}", self.pick(UNARY_COMPLEX))), self.complex(budget - 1)),
            1 | 2 => {
                let f = match self.pick(BINARY_COMPLEX) {
                    0 => "plus_c".to_string(),
                    i => format!("k{i}"),
                };
                let left = budget / 2;
                Term::apply(Term::constant(f), [self.complex(left), self.complex(budget - 1 - left)])
            }
            3 => {
                // Stacked casts have no single-edge repair.
                let r = match self.real(budget - 1) {
                    r if r.head_symbol() == Some("&") => Term::var(format!("x{}", self.pick(REAL_VARS))),
                    r => r,
                };
                Term::app(Term::constant("Cx"), r)
            }
            _ => Term::var(format!("z{}", self.pick(COMPLEX_VARS))),
        }
    }
}

/// A random well-typed term of roughly `budget` applications; complex
/// terms for odd draws, real ones otherwise.
pub fn random_term(seed: u64, budget: usize) -> Term {
    let mut g = Gen { rng: Lcg::new(seed) };
    if g.pick(2) == 0 {
        g.real(budget)
    } else {
        g.complex(budget)
    }
}

/// `n` labeled entries with ids `e0000..`; `lexicalized` adds head symbols
/// to internal labels.
pub fn synthetic_corpus(n: usize, seed: u64, lexicalized: bool) -> (Signature, Vec<TreebankEntry>) {
    let sig = synthetic_signature();
    let mut rng = Lcg::new(seed);
    let entries = (0..n)
        .map(|i| {
            let budget = 2 + rng.next_u32() as usize % 7;
            let term = random_term((rng.next_u32() as u64) ^ ((i as u64) << 32), budget);
            let tree = label_with_types(&term, &sig, lexicalized).expect("generated terms are well-typed");
            TreebankEntry::from_tree(format!("e{i:04}"), tree, &sig)
        })
        .collect();
    (sig, entries)
}

/// A real-typed term whose yield has exactly `tokens` tokens: a left-deep
/// chain of `plus_r` over variables, padded with one unary function when
/// `tokens` is even.
pub fn term_with_yield(tokens: usize) -> Term {
    assert!(tokens >= 1);
    let mut budget = tokens;
    let pad = budget % 2 == 0;
    if pad {
        budget -= 1;
    }
    let mut t = Term::var("x0");
    let mut i = 1;
    while budget > 1 {
        t = Term::apply(Term::constant("plus_r"), [t, Term::var(format!("x{}", i % REAL_VARS))]);
        budget -= 2;
        i += 1;
    }
    if pad {
        t = Term::app(Term::constant("f0"), t);
    }
    t
}

/// Surface tokens of [`term_with_yield`] after merging.
pub fn sentence(tokens: usize) -> Vec<String> {
    let spec = synthetic_spec();
    term_with_yield(tokens)
        .leaf_tokens()
        .into_iter()
        .map(|t| spec.merge_map.get(&t).cloned().unwrap_or(t))
        .collect()
}

/// Merged signature and the grammar induced from the whole ambiguated
/// synthetic corpus.
pub fn synthetic_grammar(n: usize, seed: u64, lexicalized: bool) -> (Signature, Grammar) {
    let (sig, corpus) = synthetic_corpus(n, seed, lexicalized);
    let spec = synthetic_spec();
    let merged = spec.merged_signature(&sig).expect("synthetic spec");
    let (entries, _) = ambiguate_corpus(&corpus, &sig, &spec).expect("synthetic corpus ambiguates");
    let trees: Vec<_> = entries.iter().map(|e| binarize_tree(&e.tree)).collect();
    let grammar = induce_with(&trees, DEFAULT_MAX_UNARY_CHAIN).expect("non-empty treebank");
    (merged, grammar)
}

/// Type of a synthetic root label.
pub fn real() -> TypeExpr {
    TypeExpr::base("real")
}
