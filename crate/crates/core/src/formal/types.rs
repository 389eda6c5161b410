//! Simple types with variables, substitutions and most general unifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Name of the function type constructor.
pub const FUN: &str = "fun";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Var(String),
    Con(String, Vec<TypeExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("type mismatch: {0} vs {1}")]
    Mismatch(String, String),
    #[error("occurs check: ?{0} occurs in {1}")]
    OccursCheck(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeSyntaxError {
    #[error("unexpected end of type")]
    UnexpectedEnd,
    #[error("unexpected token `{0}` in type")]
    Unexpected(String),
    #[error("trailing input after type: `{0}`")]
    Trailing(String),
}

impl TypeExpr {
    pub fn var(name: impl Into<String>) -> Self {
        TypeExpr::Var(name.into())
    }

    pub fn con(name: impl Into<String>, args: Vec<TypeExpr>) -> Self {
        TypeExpr::Con(name.into(), args)
    }

    pub fn base(name: impl Into<String>) -> Self {
        TypeExpr::Con(name.into(), Vec::new())
    }

    pub fn fun(dom: TypeExpr, cod: TypeExpr) -> Self {
        TypeExpr::Con(FUN.to_string(), vec![dom, cod])
    }

    /// Domain and codomain, if this is a function type.
    pub fn as_fun(&self) -> Option<(&TypeExpr, &TypeExpr)> {
        match self {
            TypeExpr::Con(n, args) if n == FUN && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            TypeExpr::Var(_) => false,
            TypeExpr::Con(_, args) => args.iter().all(TypeExpr::is_ground),
        }
    }

    pub fn occurs(&self, v: &str) -> bool {
        match self {
            TypeExpr::Var(w) => w == v,
            TypeExpr::Con(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TypeExpr::Var(_) => 1,
            TypeExpr::Con(_, args) => 1 + args.iter().map(TypeExpr::depth).max().unwrap_or(0),
        }
    }

    /// Type variables in leftmost-outermost first-occurrence order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            TypeExpr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            TypeExpr::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Constructor names with the arities they are used at.
    pub fn constructors(&self, out: &mut Vec<(String, usize)>) {
        if let TypeExpr::Con(n, args) = self {
            out.push((n.clone(), args.len()));
            args.iter().for_each(|a| a.constructors(out));
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> TypeExpr {
        match self {
            TypeExpr::Var(v) => TypeExpr::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            TypeExpr::Con(n, args) => {
                TypeExpr::Con(n.clone(), args.iter().map(|a| a.rename(map)).collect())
            }
        }
    }

    /// Variables renamed `a, b, c, ...` in first-occurrence order.
    pub fn canonicalize(&self) -> TypeExpr {
        let map = self
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, canonical_var_name(i)))
            .collect();
        self.rename(&map)
    }

    /// Fully parenthesized prefix rendering after canonical variable renaming,
    /// e.g. `(fun real (fun ?a ?a))`.
    pub fn canonical(&self) -> String {
        self.canonicalize().to_string()
    }

    pub fn canonically_equal(&self, other: &TypeExpr) -> bool {
        self.canonical() == other.canonical()
    }

    /// Token-safe rendering used as grammar label: `fun[real,fun[?a,?a]]`.
    pub fn label(&self) -> String {
        let mut s = String::new();
        self.canonicalize().write_label(&mut s);
        s
    }

    fn write_label(&self, s: &mut String) {
        match self {
            TypeExpr::Var(v) => {
                s.push('?');
                s.push_str(v);
            }
            TypeExpr::Con(n, args) => {
                s.push_str(n);
                if !args.is_empty() {
                    s.push('[');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            s.push(',');
                        }
                        a.write_label(s);
                    }
                    s.push(']');
                }
            }
        }
    }

    /// Parses the canonical prefix form, `real`, `?a` or `(fun real ?a)`.
    pub fn parse(text: &str) -> Result<TypeExpr, TypeSyntaxError> {
        let tokens = tokenize_type(text);
        let mut pos = 0;
        let t = parse_prefix(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(TypeSyntaxError::Trailing(tokens[pos..].join(" ")));
        }
        Ok(t)
    }

    /// Parses the label form produced by [`TypeExpr::label`].
    pub fn parse_label(text: &str) -> Result<TypeExpr, TypeSyntaxError> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let t = parse_label_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(TypeSyntaxError::Trailing(chars[pos..].iter().collect()));
        }
        Ok(t)
    }
}

fn canonical_var_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Var(v) => write!(f, "?{v}"),
            TypeExpr::Con(n, args) if args.is_empty() => write!(f, "{n}"),
            TypeExpr::Con(n, args) => {
                write!(f, "({n}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn tokenize_type(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_prefix(tokens: &[String], pos: &mut usize) -> Result<TypeExpr, TypeSyntaxError> {
    let tok = tokens.get(*pos).ok_or(TypeSyntaxError::UnexpectedEnd)?;
    *pos += 1;
    match tok.as_str() {
        ")" => Err(TypeSyntaxError::Unexpected(")".into())),
        "(" => {
            let name = tokens.get(*pos).ok_or(TypeSyntaxError::UnexpectedEnd)?;
            if name == "(" || name == ")" || name.starts_with('?') {
                return Err(TypeSyntaxError::Unexpected(name.clone()));
            }
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(TypeSyntaxError::UnexpectedEnd),
                    Some(")") => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_prefix(tokens, pos)?),
                }
            }
            Ok(TypeExpr::Con(name.clone(), args))
        }
        t => match t.strip_prefix('?') {
            Some("") => Err(TypeSyntaxError::Unexpected(t.into())),
            Some(v) => Ok(TypeExpr::Var(v.to_string())),
            None => Ok(TypeExpr::base(t)),
        },
    }
}

fn parse_label_at(chars: &[char], pos: &mut usize) -> Result<TypeExpr, TypeSyntaxError> {
    let is_var = chars.get(*pos) == Some(&'?');
    if is_var {
        *pos += 1;
    }
    let start = *pos;
    while *pos < chars.len() && !matches!(chars[*pos], '[' | ']' | ',') {
        *pos += 1;
    }
    let name: String = chars[start..*pos].iter().collect();
    if name.is_empty() {
        return match chars.get(*pos) {
            Some(c) => Err(TypeSyntaxError::Unexpected(c.to_string())),
            None => Err(TypeSyntaxError::UnexpectedEnd),
        };
    }
    if is_var {
        return Ok(TypeExpr::Var(name));
    }
    let mut args = Vec::new();
    if chars.get(*pos) == Some(&'[') {
        *pos += 1;
        loop {
            args.push(parse_label_at(chars, pos)?);
            match chars.get(*pos) {
                Some(',') => *pos += 1,
                Some(']') => {
                    *pos += 1;
                    break;
                }
                Some(c) => return Err(TypeSyntaxError::Unexpected(c.to_string())),
                None => return Err(TypeSyntaxError::UnexpectedEnd),
            }
        }
    }
    Ok(TypeExpr::Con(name, args))
}

/// A quantified type. Every quantified variable occurs in the body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeScheme {
    pub quantified: BTreeSet<String>,
    pub body: TypeExpr,
}

impl TypeScheme {
    /// Quantifies over every variable of `body`.
    pub fn generalize(body: TypeExpr) -> Self {
        let quantified = body.vars().into_iter().collect();
        TypeScheme { quantified, body }
    }

    pub fn mono(body: TypeExpr) -> Self {
        TypeScheme {
            quantified: BTreeSet::new(),
            body,
        }
    }

    /// Replaces quantified variables by fresh ones drawn from `fresh`.
    pub fn instantiate(&self, fresh: &mut impl FnMut() -> String) -> TypeExpr {
        if self.quantified.is_empty() {
            return self.body.clone();
        }
        let map = self
            .quantified
            .iter()
            .map(|v| (v.clone(), fresh()))
            .collect();
        self.body.rename(&map)
    }
}

/// Mapping from type variables to types, kept idempotent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, TypeExpr>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &str) -> Option<&TypeExpr> {
        self.0.get(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TypeExpr)> {
        self.0.iter()
    }

    pub fn apply(&self, t: &TypeExpr) -> TypeExpr {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            TypeExpr::Var(v) => match self.0.get(v) {
                Some(img) => img.clone(),
                None => t.clone(),
            },
            TypeExpr::Con(n, args) => {
                TypeExpr::Con(n.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// Adds `v ↦ t` where `t` has already been fully applied and does not
    /// contain `v`; existing images are updated so the result stays idempotent.
    fn bind(&mut self, v: String, t: TypeExpr) {
        let single = Substitution(BTreeMap::from([(v.clone(), t.clone())]));
        for img in self.0.values_mut() {
            if img.occurs(&v) {
                *img = single.apply(img);
            }
        }
        self.0.insert(v, t);
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<String, TypeExpr> = other
            .0
            .iter()
            .map(|(v, t)| (v.clone(), self.apply(t)))
            .collect();
        for (v, t) in &self.0 {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| !matches!(t, TypeExpr::Var(w) if w == v));
        Substitution(map)
    }

    /// Unifies `a` and `b` under the current bindings, extending `self`.
    pub fn unify_with(&mut self, a: &TypeExpr, b: &TypeExpr) -> Result<(), UnifyError> {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((a, b)) = stack.pop() {
            let a = self.apply(&a);
            let b = self.apply(&b);
            match (a, b) {
                (TypeExpr::Var(x), TypeExpr::Var(y)) if x == y => {}
                (TypeExpr::Var(x), t) | (t, TypeExpr::Var(x)) => {
                    if t.occurs(&x) {
                        return Err(UnifyError::OccursCheck(x, t.to_string()));
                    }
                    self.bind(x, t);
                }
                (TypeExpr::Con(n1, a1), TypeExpr::Con(n2, a2)) => {
                    if n1 != n2 || a1.len() != a2.len() {
                        return Err(UnifyError::Mismatch(
                            TypeExpr::Con(n1, a1).to_string(),
                            TypeExpr::Con(n2, a2).to_string(),
                        ));
                    }
                    stack.extend(a1.into_iter().zip(a2).rev());
                }
            }
        }
        Ok(())
    }
}

impl FromIterator<(String, TypeExpr)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, TypeExpr)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// Most general unifier of `t1` and `t2`.
pub fn unify(t1: &TypeExpr, t2: &TypeExpr) -> Result<Substitution, UnifyError> {
    let mut s = Substitution::new();
    s.unify_with(t1, t2)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ty(s: &str) -> TypeExpr {
        TypeExpr::parse(s).unwrap()
    }

    #[test]
    fn unify_examples() {
        let s = unify(&ty("?a"), &ty("real")).unwrap();
        assert_eq!(s.get("a"), Some(&ty("real")));
        assert_eq!(s.len(), 1);

        let s = unify(&ty("(fun ?a bool)"), &ty("(fun real ?b)")).unwrap();
        assert_eq!(s.get("a"), Some(&ty("real")));
        assert_eq!(s.get("b"), Some(&ty("bool")));

        assert!(matches!(
            unify(&ty("?a"), &ty("(fun ?a ?b)")),
            Err(UnifyError::OccursCheck(..))
        ));
        assert!(matches!(
            unify(&ty("real"), &ty("bool")),
            Err(UnifyError::Mismatch(..))
        ));
        assert!(matches!(
            unify(&ty("(list real)"), &ty("(list real real)")),
            Err(UnifyError::Mismatch(..))
        ));
    }

    #[test]
    fn unifier_is_idempotent() {
        let s = unify(&ty("(fun ?a (fun ?b ?c))"), &ty("(fun ?b (fun ?c real))")).unwrap();
        for (_, img) in s.iter() {
            assert_eq!(s.apply(img), *img);
        }
        assert_eq!(s.apply(&ty("?a")), ty("real"));
    }

    #[test]
    fn canonical_rendering() {
        let t = ty("(fun ?x (fun ?y ?x))");
        assert_eq!(t.canonical(), "(fun ?a (fun ?b ?a))");
        assert!(t.canonically_equal(&ty("(fun ?q (fun ?r ?q))")));
        assert!(!t.canonically_equal(&ty("(fun ?q (fun ?q ?q))")));
        assert_eq!(ty("(fun real (fun real real))").to_string(), "(fun real (fun real real))");
    }

    #[test]
    fn label_round_trip() {
        let t = ty("(fun ?x (fun real (pair ?y ?x)))");
        assert_eq!(t.label(), "fun[?a,fun[real,pair[?b,?a]]]");
        assert_eq!(TypeExpr::parse_label(&t.label()).unwrap().canonical(), t.canonical());
        assert_eq!(TypeExpr::parse_label("real").unwrap(), ty("real"));
        assert!(TypeExpr::parse_label("fun[real").is_err());
        assert!(TypeExpr::parse_label("fun[real]]").is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(TypeExpr::parse("(fun real").is_err());
        assert!(TypeExpr::parse("real bool").is_err());
        assert!(TypeExpr::parse("").is_err());
        assert!(TypeExpr::parse("(?a real)").is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let s1: Substitution = [("a".to_string(), ty("?b"))].into_iter().collect();
        let s2: Substitution = [("b".to_string(), ty("real"))].into_iter().collect();
        let c = s2.compose(&s1);
        assert_eq!(c.apply(&ty("?a")), ty("real"));
        assert_eq!(c.apply(&ty("?b")), ty("real"));
    }
}
