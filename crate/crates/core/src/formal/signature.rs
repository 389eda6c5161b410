use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use super::types::{TypeExpr, TypeScheme};

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("type constructor `{name}` used with arities {first} and {second}")]
    ArityClash {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("coercion `{0}` is not a declared constant")]
    UnknownCoercion(String),
    #[error("coercion `{0}` must have a ground function type")]
    BadCoercion(String),
    #[error("overload `{surface}` names undeclared constant `{name}`")]
    UnknownOverload { surface: String, name: String },
    #[error("overload surface `{0}` collides with a declared symbol")]
    OverloadClash(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Characters that may not appear inside constant or variable names.
pub const RESERVED_CHARS: &[char] = &['(', ')', '[', ']', ',', '@', '|', '.', '?', '\t'];

pub fn valid_symbol(name: &str) -> bool {
    !name.is_empty()
        && !name.chars().any(|c| c.is_whitespace() || RESERVED_CHARS.contains(&c))
        && name != "BIND"
}

/// Constant schemes, free variable types and the coercion table.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    consts: BTreeMap<String, TypeScheme>,
    vars: BTreeMap<String, TypeExpr>,
    coercions: Vec<String>,
    /// Surface token -> constants it may stand for (after symbol merging).
    overloads: BTreeMap<String, Vec<String>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_const(&mut self, name: &str, ty: TypeExpr) -> Result<(), SignatureError> {
        self.check_new(name)?;
        self.consts
            .insert(name.to_string(), TypeScheme::generalize(ty));
        Ok(())
    }

    pub fn add_var(&mut self, name: &str, ty: TypeExpr) -> Result<(), SignatureError> {
        self.check_new(name)?;
        self.vars.insert(name.to_string(), ty);
        Ok(())
    }

    pub fn add_coercion(&mut self, name: &str) -> Result<(), SignatureError> {
        let scheme = self
            .consts
            .get(name)
            .ok_or_else(|| SignatureError::UnknownCoercion(name.to_string()))?;
        if !scheme.body.is_ground() || scheme.body.as_fun().is_none() {
            return Err(SignatureError::BadCoercion(name.to_string()));
        }
        if !self.coercions.iter().any(|c| c == name) {
            self.coercions.push(name.to_string());
        }
        Ok(())
    }

    fn check_new(&self, name: &str) -> Result<(), SignatureError> {
        if !valid_symbol(name) {
            return Err(SignatureError::InvalidName(name.to_string()));
        }
        if self.consts.contains_key(name) || self.vars.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn const_scheme(&self, name: &str) -> Option<&TypeScheme> {
        self.consts.get(name)
    }

    pub fn var_type(&self, name: &str) -> Option<&TypeExpr> {
        self.vars.get(name)
    }

    pub fn is_const(&self, name: &str) -> bool {
        self.consts.contains_key(name)
    }

    pub fn is_var(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }

    pub fn consts(&self) -> impl Iterator<Item = (&String, &TypeScheme)> {
        self.consts.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = (&String, &TypeExpr)> {
        self.vars.iter()
    }

    /// Coercion constants in declaration order.
    pub fn coercions(&self) -> &[String] {
        &self.coercions
    }

    pub fn is_coercion(&self, name: &str) -> bool {
        self.coercions.iter().any(|c| c == name)
    }

    pub fn overloads(&self, surface: &str) -> Option<&[String]> {
        self.overloads.get(surface).map(Vec::as_slice)
    }

    /// Copy of this signature in which each merged surface token resolves to
    /// the constants mapped onto it (`plus_r ↦ +`, `plus_c ↦ +`).
    pub fn with_overloads(
        &self,
        merge: &BTreeMap<String, String>,
    ) -> Result<Signature, SignatureError> {
        let mut sig = self.clone();
        for (name, surface) in merge {
            if !self.consts.contains_key(name) {
                return Err(SignatureError::UnknownOverload {
                    surface: surface.clone(),
                    name: name.clone(),
                });
            }
            if self.consts.contains_key(surface) || self.vars.contains_key(surface) {
                if !merge.contains_key(surface) {
                    return Err(SignatureError::OverloadClash(surface.clone()));
                }
            }
            if !valid_symbol(surface) {
                return Err(SignatureError::InvalidName(surface.clone()));
            }
            sig.overloads
                .entry(surface.clone())
                .or_default()
                .push(name.clone());
        }
        Ok(sig)
    }

    /// Checks constructor arities are consistent across all declarations.
    pub fn check_arities(&self) -> Result<(), SignatureError> {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut cons = Vec::new();
        for s in self.consts.values() {
            s.body.constructors(&mut cons);
        }
        for t in self.vars.values() {
            t.constructors(&mut cons);
        }
        for (name, arity) in cons {
            match seen.get(&name) {
                Some(&a) if a != arity => {
                    return Err(SignatureError::ArityClash {
                        name,
                        first: a,
                        second: arity,
                    })
                }
                _ => {
                    seen.insert(name, arity);
                }
            }
        }
        Ok(())
    }

    /// Parses the line-oriented signature format:
    ///
    /// ```text
    /// # comment
    /// const sin : (fun real real)
    /// var x : real
    /// coercion &
    /// ```
    pub fn parse(text: &str) -> Result<Signature, SignatureError> {
        let mut sig = Signature::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| SignatureError::Syntax { line: line_no, msg };
            let (kw, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(format!("incomplete declaration `{line}`")))?;
            let rest = rest.trim();
            match kw {
                "const" | "var" => {
                    let (name, ty) = rest
                        .split_once(" : ")
                        .ok_or_else(|| syntax("expected `<name> : <type>`".into()))?;
                    let ty = TypeExpr::parse(ty.trim()).map_err(|e| syntax(e.to_string()))?;
                    let name = name.trim();
                    if kw == "const" {
                        sig.add_const(name, ty)?;
                    } else {
                        sig.add_var(name, ty)?;
                    }
                }
                "coercion" => sig.add_coercion(rest)?,
                other => return Err(syntax(format!("unknown declaration kind `{other}`"))),
            }
        }
        sig.check_arities()?;
        Ok(sig)
    }

    pub fn load(path: &Path) -> Result<Signature, SignatureError> {
        let text = std::fs::read_to_string(path).map_err(|source| SignatureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Signature::parse(&text)
    }

    pub fn var_names(&self) -> BTreeSet<String> {
        self.vars.keys().cloned().collect()
    }
}
