//! Random type pairs for unification properties.
//!
//! Half of the pairs are built as two generalizations of one type, so a
//! known unifier exists; the rest are drawn independently and mostly clash.

use std::collections::BTreeMap;

use proptest::prelude::*;
use typecyk_core::formal::{unify, Substitution};
use typecyk_core::TypeExpr;

use super::algw::same_up_to_renaming;

fn leaf() -> impl Strategy<Value = TypeExpr> {
    prop_oneof![
        prop::sample::select(vec!["real", "nat", "bool"]).prop_map(TypeExpr::base),
        prop::sample::select(vec!["c0", "c1", "c2"]).prop_map(TypeExpr::var),
    ]
}

/// Types of depth at most `depth` over `fun`, `prod` and `list`.
pub fn arb_type(depth: u32) -> impl Strategy<Value = TypeExpr> {
    leaf().prop_recursive(depth.saturating_sub(1), 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::fun(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::con("prod", vec![a, b])),
            inner.prop_map(|a| TypeExpr::con("list", vec![a])),
        ]
    })
}

/// Replaces subterms by fresh `prefix` variables where `mask` says so,
/// recording what each variable stood for.
fn generalize(
    t: &TypeExpr,
    mask: &mut impl Iterator<Item = bool>,
    prefix: &str,
    witness: &mut BTreeMap<String, TypeExpr>,
) -> TypeExpr {
    if mask.next().unwrap_or(false) {
        // reuse a variable already standing for the same subterm
        if let Some((v, _)) = witness.iter().find(|(v, w)| v.starts_with(prefix) && *w == t) {
            return TypeExpr::var(v.clone());
        }
        let v = format!("{prefix}{}", witness.len());
        witness.insert(v.clone(), t.clone());
        return TypeExpr::var(v);
    }
    match t {
        TypeExpr::Var(_) => t.clone(),
        TypeExpr::Con(n, args) => {
            TypeExpr::con(n.clone(), args.iter().map(|a| generalize(a, mask, prefix, witness)).collect())
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnifyCase {
    pub a: TypeExpr,
    pub b: TypeExpr,
    /// A unifier known to exist, for constructed pairs.
    pub witness: Option<Substitution>,
}

pub fn arb_unify_case() -> impl Strategy<Value = UnifyCase> {
    let mask = || prop::collection::vec(prop::bool::weighted(0.25), 64);
    let related = (arb_type(4), mask(), mask()).prop_map(|(t, ma, mb)| {
        let mut w = BTreeMap::new();
        let a = generalize(&t, &mut ma.into_iter(), "a", &mut w);
        let b = generalize(&t, &mut mb.into_iter(), "b", &mut w);
        UnifyCase {
            a,
            b,
            witness: Some(w.into_iter().collect()),
        }
    });
    let independent = (arb_type(4), arb_type(4)).prop_map(|(a, b)| UnifyCase { a, b, witness: None });
    prop_oneof![related, independent]
}

fn vars_of(case: &UnifyCase) -> Vec<String> {
    let mut v = case.a.vars();
    v.extend(case.b.vars());
    v
}

/// Soundness, generality against the witness and symmetry of the MGU.
pub fn check_unify_case(case: &UnifyCase) -> Result<(), TestCaseError> {
    let (a, b) = (&case.a, &case.b);
    prop_assert!(a.depth() <= 4 && b.depth() <= 4);
    let fwd = unify(a, b);
    let back = unify(b, a);
    prop_assert_eq!(fwd.is_ok(), back.is_ok(), "symmetry of success for {} and {}", a, b);
    if let Some(w) = &case.witness {
        prop_assert_eq!(w.apply(a), w.apply(b));
        prop_assert!(fwd.is_ok(), "{} and {} have a unifier", a, b);
    }
    let (Ok(s), Ok(r)) = (fwd, back) else {
        return Ok(());
    };
    prop_assert_eq!(s.apply(a), s.apply(b));
    prop_assert_eq!(r.apply(a), r.apply(b));
    // both directions yield the same most general instance up to renaming
    prop_assert!(same_up_to_renaming(&s.apply(a), &r.apply(a)));
    // idempotent
    for v in vars_of(case) {
        let once = s.apply(&TypeExpr::var(v.clone()));
        prop_assert_eq!(s.apply(&once), once);
    }
    if let Some(w) = &case.witness {
        // the witness factors through the MGU: w(s(x)) = w(x)
        for v in vars_of(case) {
            let x = TypeExpr::var(v);
            prop_assert_eq!(w.apply(&s.apply(&x)), w.apply(&x));
        }
    }
    Ok(())
}
