use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Application-tree representation of a formal expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Const(String),
    Var(String),
    App(Box<Term>, Box<Term>),
    Abs(String, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermSyntaxError {
    #[error("unbalanced parentheses in term")]
    Unbalanced,
    #[error("empty application in term")]
    Empty,
    #[error("malformed binder: {0}")]
    Binder(String),
    #[error("trailing input after term")]
    Trailing,
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn abs(v: impl Into<String>, body: Term) -> Term {
        Term::Abs(v.into(), Box::new(body))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Surface tokens in prefix (applicative) order; binders contribute their
    /// variable name.
    pub fn leaf_tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    fn push_leaves(&self, out: &mut Vec<String>) {
        match self {
            Term::Const(n) | Term::Var(n) => out.push(n.clone()),
            Term::App(f, a) => {
                f.push_leaves(out);
                a.push_leaves(out);
            }
            Term::Abs(v, b) => {
                out.push(v.clone());
                b.push_leaves(out);
            }
        }
    }

    /// Head symbol of the function spine, if it is a constant or variable.
    pub fn head_symbol(&self) -> Option<&str> {
        match self {
            Term::Const(n) | Term::Var(n) => Some(n),
            Term::App(f, _) => f.head_symbol(),
            Term::Abs(..) => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Abs(_, b) => 1 + b.size(),
        }
    }

    /// Parses the applicative s-expression form used by [`fmt::Display`]:
    /// `(plus_r (sin x) (& zero))`, with binders written `(\ y body)`.
    /// Names not listed in `vars` are read as constants.
    pub fn parse(text: &str, vars: &BTreeSet<String>) -> Result<Term, TermSyntaxError> {
        let tree = crate::treebank::parse_sexpr(text).map_err(|e| match e {
            crate::treebank::SexprError::UnbalancedParens => TermSyntaxError::Unbalanced,
            crate::treebank::SexprError::StrayToken(_) => TermSyntaxError::Trailing,
            _ => TermSyntaxError::Empty,
        })?;
        let mut bound = Vec::new();
        term_of_sexpr(&tree, vars, &mut bound)
    }
}

fn term_of_sexpr(
    tree: &crate::treebank::RawTree,
    vars: &BTreeSet<String>,
    bound: &mut Vec<String>,
) -> Result<Term, TermSyntaxError> {
    let leaf = |name: &str, bound: &Vec<String>| {
        if vars.contains(name) || bound.iter().any(|b| b == name) {
            Term::var(name)
        } else {
            Term::constant(name)
        }
    };
    if tree.is_leaf() {
        return Ok(leaf(&tree.label, bound));
    }
    if tree.label == "\\" {
        let (v, body) = match tree.children.as_slice() {
            [v, body] if v.is_leaf() => (v.label.clone(), body),
            _ => return Err(TermSyntaxError::Binder(tree.to_string())),
        };
        bound.push(v.clone());
        let body = term_of_sexpr(body, vars, bound);
        bound.pop();
        return Ok(Term::abs(v, body?));
    }
    let mut t = leaf(&tree.label, bound);
    for c in &tree.children {
        t = Term::app(t, term_of_sexpr(c, vars, bound)?);
    }
    Ok(t)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(n) | Term::Var(n) => write!(f, "{n}"),
            Term::Abs(v, b) => write!(f, "(\\ {v} {b})"),
            Term::App(..) => {
                let mut args = Vec::new();
                let mut head = self;
                while let Term::App(g, a) = head {
                    args.push(a);
                    head = g;
                }
                match head {
                    Term::Const(n) | Term::Var(n) => write!(f, "({n}")?,
                    other => write!(f, "({other}")?,
                }
                for a in args.iter().rev() {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_equal(t1: &Term, t2: &Term) -> bool {
    fn go<'a>(a: &'a Term, b: &'a Term, env: &mut Vec<(&'a str, &'a str)>) -> bool {
        match (a, b) {
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Var(x), Term::Var(y)) => {
                let bx = env.iter().rev().position(|(l, _)| *l == x);
                let by = env.iter().rev().position(|(_, r)| *r == y);
                match (bx, by) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::App(f1, a1), Term::App(f2, a2)) => go(f1, f2, env) && go(a1, a2, env),
            (Term::Abs(v1, b1), Term::Abs(v2, b2)) => {
                env.push((v1, v2));
                let r = go(b1, b2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(t1, t2, &mut Vec::new())
}

/// Removes every application of a cast constant, keeping its argument.
/// Returns the erased term and the number of bare cast constants left in
/// non-application position.
pub fn erase_casts(term: &Term, casts: &BTreeSet<String>) -> (Term, usize) {
    let mut warnings = 0;
    let t = erase(term, casts, &mut warnings);
    (t, warnings)
}

fn erase(term: &Term, casts: &BTreeSet<String>, warnings: &mut usize) -> Term {
    match term {
        Term::App(f, a) => match f.as_ref() {
            Term::Const(c) if casts.contains(c) => erase(a, casts, warnings),
            _ => Term::app(erase(f, casts, warnings), erase(a, casts, warnings)),
        },
        Term::Abs(v, b) => Term::abs(v.clone(), erase(b, casts, warnings)),
        Term::Const(c) => {
            if casts.contains(c) {
                *warnings += 1;
            }
            term.clone()
        }
        Term::Var(_) => term.clone(),
    }
}
