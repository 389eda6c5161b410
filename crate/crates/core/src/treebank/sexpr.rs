use std::fmt;

use thiserror::Error;

/// A labeled ordered tree; a node without children is a leaf token.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawTree {
    pub label: String,
    pub children: Vec<RawTree>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty expression")]
    EmptyExpression,
    #[error("stray token `{0}` after complete expression")]
    StrayToken(String),
    #[error("internal node `{0}` has no children")]
    EmptyChildren(String),
    #[error("node without a label")]
    MissingLabel,
}

impl RawTree {
    pub fn leaf(label: impl Into<String>) -> Self {
        RawTree {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<RawTree>) -> Self {
        RawTree {
            label: label.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// A node with exactly one child, which is a leaf.
    pub fn is_preterminal(&self) -> bool {
        self.children.len() == 1 && self.children[0].is_leaf()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(RawTree::depth).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(RawTree::node_count).sum::<usize>()
    }

    /// Leaf labels, left to right.
    pub fn leaves(&self) -> Vec<String> {
        tree_yield(self)
    }
}

impl fmt::Display for RawTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str(&self.label);
        }
        write!(f, "({}", self.label)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok::Atom(&text[s..i]));
            }
            match c {
                '(' => out.push(Tok::Open),
                ')' => out.push(Tok::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok::Atom(&text[s..]));
    }
    out
}

/// Reads one bracketed expression: either a bare token or
/// `(label child ...)` with at least one child.
pub fn parse_sexpr(text: &str) -> Result<RawTree, SexprError> {
    let toks = tokenize(text);
    if toks.is_empty() {
        return Err(SexprError::EmptyExpression);
    }
    let mut depth = 0i64;
    for t in &toks {
        match t {
            Tok::Open => depth += 1,
            Tok::Close => depth -= 1,
            Tok::Atom(_) => {}
        }
        if depth < 0 {
            return Err(SexprError::UnbalancedParens);
        }
    }
    if depth != 0 {
        return Err(SexprError::UnbalancedParens);
    }
    let mut pos = 0;
    let tree = read(&toks, &mut pos)?;
    match toks.get(pos) {
        None => Ok(tree),
        Some(Tok::Close) => Err(SexprError::UnbalancedParens),
        Some(Tok::Open) => Err(SexprError::StrayToken("(".into())),
        Some(Tok::Atom(a)) => Err(SexprError::StrayToken(a.to_string())),
    }
}

fn read(toks: &[Tok<'_>], pos: &mut usize) -> Result<RawTree, SexprError> {
    match toks.get(*pos) {
        None => Err(SexprError::UnbalancedParens),
        Some(Tok::Close) => Err(SexprError::UnbalancedParens),
        Some(Tok::Atom(a)) => {
            *pos += 1;
            Ok(RawTree::leaf(*a))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let label = match toks.get(*pos) {
                Some(Tok::Atom(a)) => a.to_string(),
                Some(Tok::Close) => return Err(SexprError::EmptyExpression),
                Some(Tok::Open) => return Err(SexprError::MissingLabel),
                None => return Err(SexprError::UnbalancedParens),
            };
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match toks.get(*pos) {
                    None => return Err(SexprError::UnbalancedParens),
                    Some(Tok::Close) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(read(toks, pos)?),
                }
            }
            if children.is_empty() {
                return Err(SexprError::EmptyChildren(label));
            }
            Ok(RawTree { label, children })
        }
    }
}

/// Normalized rendering: single spaces between siblings, no trailing space.
pub fn render_sexpr(tree: &RawTree) -> String {
    tree.to_string()
}

pub fn tree_yield(tree: &RawTree) -> Vec<String> {
    fn go(t: &RawTree, out: &mut Vec<String>) {
        if t.is_leaf() {
            out.push(t.label.clone());
        } else {
            t.children.iter().for_each(|c| go(c, out));
        }
    }
    let mut out = Vec::new();
    go(tree, &mut out);
    out
}
