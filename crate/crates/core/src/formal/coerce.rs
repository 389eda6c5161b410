//! Coercion insertion: repair an ill-typed term by re-inserting casts.
//!
//! Every application node is an edge that may receive at most one coercion,
//! either around its argument or around its function. When an expected
//! type is supplied, the whole term is one more edge. The search runs by
//! increasing insertion count; at the minimal count, repairs must agree on
//! which edges are touched, otherwise the repair is ambiguous. Among repairs
//! touching the same edges, argument-side beats function-side and earlier
//! declared coercions beat later ones.
//!
//! A bottom-up pass over principal types finds the minimal count and the
//! touched edge sets in polynomial time. It is exact when no type variable
//! is shared between branches, that is without binders and with ground free
//! variables; otherwise it only bounds the count from below and the
//! exhaustive search decides.

use std::collections::BTreeMap;

use thiserror::Error;

use super::infer::{check, infer, InferError};
use super::signature::Signature;
use super::term::Term;
use super::types::{Substitution, TypeExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoercionError {
    #[error("no coercion insertion makes the term well-typed")]
    NoRepair,
    #[error("ambiguous repair: {first} vs {second}")]
    AmbiguousRepair { first: Term, second: Term },
    #[error(transparent)]
    Infer(#[from] InferError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Arg,
    Fun,
}

#[derive(Clone, Copy, Debug)]
struct Insertion {
    side: Side,
    coercion: usize,
}

/// Per-edge options in preference order, and the root edge's options.
fn insertion_options(casts: usize) -> (Vec<Insertion>, Vec<Insertion>) {
    let mut options = Vec::new();
    for side in [Side::Arg, Side::Fun] {
        for coercion in 0..casts {
            options.push(Insertion { side, coercion });
        }
    }
    let root = (0..casts)
        .map(|coercion| Insertion {
            side: Side::Arg,
            coercion,
        })
        .collect();
    (options, root)
}

/// Repairs `term` so that it type-checks, inserting as few coercions as
/// possible. Returns `term` unchanged when it already type-checks.
pub fn insert_coercions(term: &Term, sig: &Signature) -> Result<Term, CoercionError> {
    insert_coercions_expecting(term, sig, None)
}

/// As [`insert_coercions`], additionally requiring the repaired type to
/// unify with `expected`; the term's own position counts as an edge.
pub fn insert_coercions_expecting(
    term: &Term,
    sig: &Signature,
    expected: Option<&TypeExpr>,
) -> Result<Term, CoercionError> {
    if check(term, sig, expected) {
        return Ok(term.clone());
    }
    // unknown symbols cannot be repaired by casts
    if let Err(e @ InferError::UnknownSymbol(_)) = infer(term, sig) {
        return Err(e.into());
    }
    let casts = sig.coercions();
    if casts.is_empty() {
        return Err(CoercionError::NoRepair);
    }
    let apps = count_apps(term);
    let (options, root_options) = insertion_options(casts.len());

    let Some((lower, verdict)) = plan_by_types(term, sig, expected, &options) else {
        return Err(CoercionError::NoRepair);
    };
    if let Some(ways) = verdict {
        let build = |w: &Way| {
            let mut plan: Vec<Option<Insertion>> = vec![None; apps];
            let mut root = None;
            for (&e, &o) in w.edges.iter().zip(&w.plan) {
                if e == apps {
                    root = Some(root_options[o as usize].coercion);
                } else {
                    plan[e] = Some(options[o as usize]);
                }
            }
            let mut idx = 0;
            let t = rebuild(term, &plan, casts, &mut idx);
            match root {
                Some(c) => Term::app(Term::constant(&casts[c]), t),
                None => t,
            }
        };
        let first = build(&ways[0]);
        let second = ways.get(1).map(build);
        // the exhaustive search below stays the arbiter should these fail
        if check(&first, sig, expected) {
            match second {
                None => return Ok(first),
                Some(second) if check(&second, sig, expected) => {
                    return Err(CoercionError::AmbiguousRepair { first, second })
                }
                Some(_) => {}
            }
        }
    }

    exhaustive(term, sig, expected, lower.max(1))
}

/// Tries every edge set of each size from `from` upwards.
fn exhaustive(term: &Term, sig: &Signature, expected: Option<&TypeExpr>, from: usize) -> Result<Term, CoercionError> {
    let casts = sig.coercions();
    let apps = count_apps(term);
    let root_edge = expected.is_some();
    let edges = apps + usize::from(root_edge);
    let (options, root_options) = insertion_options(casts.len());
    for m in from..=edges {
        let mut found: Option<(Vec<usize>, Term)> = None;
        let mut combo: Vec<usize> = (0..m).collect();
        loop {
            let per_edge: Vec<&[Insertion]> = combo
                .iter()
                .map(|&e| {
                    if root_edge && e == apps {
                        root_options.as_slice()
                    } else {
                        options.as_slice()
                    }
                })
                .collect();
            if let Some(t) = first_repair(term, sig, expected, casts, apps, &combo, &per_edge) {
                match &found {
                    None => found = Some((combo.clone(), t)),
                    Some((_, first)) => {
                        return Err(CoercionError::AmbiguousRepair {
                            first: first.clone(),
                            second: t,
                        })
                    }
                }
            }
            if !next_combination(&mut combo, edges) {
                break;
            }
        }
        if let Some((_, t)) = found {
            return Ok(t);
        }
    }
    Err(CoercionError::NoRepair)
}

/// First well-typed insertion assignment on the given edge set, in
/// preference order.
fn first_repair(
    term: &Term,
    sig: &Signature,
    expected: Option<&TypeExpr>,
    casts: &[String],
    apps: usize,
    combo: &[usize],
    per_edge: &[&[Insertion]],
) -> Option<Term> {
    let mut choice = vec![0usize; combo.len()];
    loop {
        let mut plan: Vec<Option<Insertion>> = vec![None; apps];
        let mut root = None;
        for (k, &e) in combo.iter().enumerate() {
            let ins = per_edge[k][choice[k]];
            if e == apps {
                root = Some(ins.coercion);
            } else {
                plan[e] = Some(ins);
            }
        }
        let mut idx = 0;
        let mut t = rebuild(term, &plan, casts, &mut idx);
        if let Some(c) = root {
            t = Term::app(Term::constant(&casts[c]), t);
        }
        if check(&t, sig, expected) {
            return Some(t);
        }
        // odometer, last edge varies fastest
        let mut k = combo.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < per_edge[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// One way to reach a principal type: touched edges in increasing order and
/// the option chosen on each.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Way {
    edges: Vec<usize>,
    plan: Vec<u8>,
}

/// Minimal cost of a type and the first two distinct edge sets reaching it,
/// each with its preferred plan.
#[derive(Clone, Debug)]
struct Reach {
    cost: usize,
    ways: Vec<Way>,
}

impl Reach {
    fn offer(&mut self, cost: usize, way: Way) {
        if cost > self.cost {
            return;
        }
        if cost < self.cost {
            self.cost = cost;
            self.ways.clear();
        }
        if let Some(w) = self.ways.iter_mut().find(|w| w.edges == way.edges) {
            if way.plan < w.plan {
                w.plan = way.plan;
            }
            return;
        }
        self.ways.push(way);
        self.ways.sort_by(|a, b| a.edges.cmp(&b.edges));
        self.ways.truncate(2);
    }
}

type Reachable = BTreeMap<TypeExpr, Reach>;

fn offer(map: &mut Reachable, ty: TypeExpr, cost: usize, way: Way) {
    map.entry(ty)
        .or_insert_with(|| Reach {
            cost,
            ways: Vec::new(),
        })
        .offer(cost, way);
}

fn tagged(t: &TypeExpr, tag: &str) -> TypeExpr {
    let map = t.vars().into_iter().map(|v| (v.clone(), format!("{tag}{v}"))).collect();
    t.rename(&map)
}

struct TypePass<'a> {
    sig: &'a Signature,
    /// Coercion types as (domain, codomain); `None` for non-functions.
    casts: Vec<Option<(TypeExpr, TypeExpr)>>,
    options: &'a [Insertion],
    exact: bool,
    next_app: usize,
}

impl TypePass<'_> {
    fn cast(&self, c: usize, t: &TypeExpr, s: &mut Substitution) -> Option<TypeExpr> {
        let (dom, cod) = self.casts[c].as_ref()?;
        s.unify_with(dom, t).ok()?;
        Some(cod.clone())
    }

    fn leaf(&mut self, ty: TypeExpr) -> Reachable {
        let mut m = Reachable::new();
        offer(&mut m, ty.canonicalize(), 0, Way { edges: Vec::new(), plan: Vec::new() });
        m
    }

    fn run(&mut self, term: &Term, bound: &mut Vec<String>) -> Reachable {
        match term {
            Term::Var(v) if bound.contains(v) => {
                // each occurrence gets its own variable: a relaxation
                self.exact = false;
                self.leaf(TypeExpr::var("x"))
            }
            Term::Var(v) => {
                let ty = self.sig.var_type(v).cloned().unwrap_or_else(|| TypeExpr::var("x"));
                if !ty.is_ground() {
                    self.exact = false;
                }
                self.leaf(ty)
            }
            Term::Const(c) => {
                let ty = self.sig.const_scheme(c).map(|s| s.body.clone()).unwrap_or_else(|| TypeExpr::var("x"));
                self.leaf(ty)
            }
            Term::Abs(v, b) => {
                self.exact = false;
                bound.push(v.clone());
                let body = self.run(b, bound);
                bound.pop();
                let mut m = Reachable::new();
                for (tb, r) in body {
                    let ty = TypeExpr::fun(TypeExpr::var("x."), tagged(&tb, "b."));
                    for w in r.ways {
                        offer(&mut m, ty.canonicalize(), r.cost, w);
                    }
                }
                m
            }
            Term::App(f, a) => {
                let edge = self.next_app;
                self.next_app += 1;
                let fs = self.run(f, bound);
                let as_ = self.run(a, bound);
                let mut m = Reachable::new();
                for (tf, rf) in &fs {
                    for (ta, ra) in &as_ {
                        let (tf, ta) = (tagged(tf, "f."), tagged(ta, "a."));
                        for own in std::iter::once(None).chain((0..self.options.len()).map(Some)) {
                            let mut s = Substitution::new();
                            let (mut fx, mut ax) = (tf.clone(), ta.clone());
                            if let Some(o) = own {
                                let ins = self.options[o];
                                let target = match ins.side {
                                    Side::Arg => &mut ax,
                                    Side::Fun => &mut fx,
                                };
                                match self.cast(ins.coercion, target, &mut s) {
                                    Some(t) => *target = t,
                                    None => continue,
                                }
                            }
                            let r = TypeExpr::var("r.");
                            if s.unify_with(&fx, &TypeExpr::fun(ax, r.clone())).is_err() {
                                continue;
                            }
                            let ty = s.apply(&r).canonicalize();
                            let cost = rf.cost + ra.cost + usize::from(own.is_some());
                            for wf in &rf.ways {
                                for wa in &ra.ways {
                                    let mut edges = Vec::with_capacity(wf.edges.len() + wa.edges.len() + 1);
                                    let mut plan = Vec::with_capacity(edges.capacity());
                                    if let Some(o) = own {
                                        edges.push(edge);
                                        plan.push(o as u8);
                                    }
                                    edges.extend(&wf.edges);
                                    edges.extend(&wa.edges);
                                    plan.extend(&wf.plan);
                                    plan.extend(&wa.plan);
                                    offer(&mut m, ty.clone(), cost, Way { edges, plan });
                                }
                            }
                        }
                    }
                }
                m
            }
        }
    }
}

/// Bottom-up search over principal types. Returns `None` when no repair
/// exists, otherwise the minimal insertion count and, when the pass is
/// exact, the first two edge sets achieving it with their preferred plans.
fn plan_by_types(
    term: &Term,
    sig: &Signature,
    expected: Option<&TypeExpr>,
    options: &[Insertion],
) -> Option<(usize, Option<Vec<Way>>)> {
    let casts = sig
        .coercions()
        .iter()
        .map(|c| {
            let ty = tagged(&sig.const_scheme(c)?.body, "c.");
            ty.as_fun().map(|(d, r)| (d.clone(), r.clone()))
        })
        .collect();
    let mut pass = TypePass {
        sig,
        casts,
        options,
        exact: true,
        next_app: 0,
    };
    let reach = pass.run(term, &mut Vec::new());
    let apps = pass.next_app;
    let mut best = Reach {
        cost: usize::MAX,
        ways: Vec::new(),
    };
    let want = expected.map(|e| tagged(e, "!"));
    for (t, r) in reach {
        let t = tagged(&t, "t.");
        let Some(want) = &want else {
            for w in r.ways {
                best.offer(r.cost, w);
            }
            continue;
        };
        if Substitution::new().unify_with(&t, want).is_ok() {
            for w in &r.ways {
                best.offer(r.cost, w.clone());
            }
        }
        for c in 0..pass.casts.len() {
            let mut s = Substitution::new();
            let fits = pass.cast(c, &t, &mut s).is_some_and(|cod| s.unify_with(&cod, want).is_ok());
            if fits {
                for w in &r.ways {
                    let mut w = w.clone();
                    w.edges.push(apps);
                    w.plan.push(c as u8);
                    best.offer(r.cost + 1, w);
                }
            }
        }
    }
    if best.ways.is_empty() {
        return None;
    }
    Some((best.cost, pass.exact.then_some(best.ways)))
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let m = combo.len();
    let mut i = m;
    while i > 0 {
        i -= 1;
        if combo[i] < n - m + i {
            combo[i] += 1;
            for j in i + 1..m {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub(crate) fn count_apps(term: &Term) -> usize {
    match term {
        Term::Const(_) | Term::Var(_) => 0,
        Term::App(f, a) => 1 + count_apps(f) + count_apps(a),
        Term::Abs(_, b) => count_apps(b),
    }
}

/// Rebuilds `term` with the planned insertions; application nodes are
/// numbered in preorder.
fn rebuild(term: &Term, plan: &[Option<Insertion>], casts: &[String], idx: &mut usize) -> Term {
    match term {
        Term::Const(_) | Term::Var(_) => term.clone(),
        Term::Abs(v, b) => Term::abs(v.clone(), rebuild(b, plan, casts, idx)),
        Term::App(f, a) => {
            let here = plan[*idx];
            *idx += 1;
            let mut f = rebuild(f, plan, casts, idx);
            let mut a = rebuild(a, plan, casts, idx);
            if let Some(ins) = here {
                let c = Term::constant(&casts[ins.coercion]);
                match ins.side {
                    Side::Arg => a = Term::app(c, a),
                    Side::Fun => f = Term::app(c, f),
                }
            }
            Term::app(f, a)
        }
    }
}
