//! A second Algorithm W, written against its own type representation with
//! integer variables and a union-find store, plus a random term generator
//! over a polymorphic signature.

use std::collections::HashMap;

use typecyk_core::experiment::Lcg;
use typecyk_core::formal::TypeScheme;
use typecyk_core::{Signature, Term, TypeExpr};

#[derive(Clone, Debug)]
enum Ty {
    V(usize),
    C(String, Vec<Ty>),
}

struct Store {
    links: Vec<Option<Ty>>,
}

impl Store {
    fn fresh(&mut self) -> Ty {
        self.links.push(None);
        Ty::V(self.links.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::V(i) => match &self.links[*i] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            Ty::C(n, args) => Ty::C(n.clone(), args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::V(i) => i == v,
            Ty::C(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::V(i), Ty::V(j)) if i == j => true,
            (Ty::V(i), _) => {
                if self.occurs(*i, &b) {
                    return false;
                }
                self.links[*i] = Some(b);
                true
            }
            (_, Ty::V(_)) => self.unify(&b, &a),
            (Ty::C(n, xs), Ty::C(m, ys)) => {
                n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y))
            }
        }
    }
}

fn arrow(a: Ty, b: Ty) -> Ty {
    Ty::C("fun".into(), vec![a, b])
}

fn import(t: &TypeExpr, vars: &mut HashMap<String, Ty>, store: &mut Store) -> Ty {
    match t {
        TypeExpr::Var(v) => vars.entry(v.clone()).or_insert_with(|| store.fresh()).clone(),
        TypeExpr::Con(n, args) => Ty::C(n.clone(), args.iter().map(|a| import(a, vars, store)).collect()),
    }
}

fn instantiate(s: &TypeScheme, store: &mut Store) -> Ty {
    // free (non-quantified) variables would be shared; schemes here quantify all
    import(&s.body, &mut HashMap::new(), store)
}

fn walk(term: &Term, sig: &Signature, env: &mut Vec<(String, Ty)>, store: &mut Store) -> Option<Ty> {
    match term {
        Term::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
            Some((_, t)) => Some(t.clone()),
            None => Some(import(sig.var_type(v)?, &mut HashMap::new(), store)),
        },
        Term::Const(c) => Some(instantiate(sig.const_scheme(c)?, store)),
        Term::App(f, a) => {
            let tf = walk(f, sig, env, store)?;
            let ta = walk(a, sig, env, store)?;
            let r = store.fresh();
            store.unify(&tf, &arrow(ta, r.clone())).then_some(r)
        }
        Term::Abs(v, b) => {
            let tv = store.fresh();
            env.push((v.clone(), tv.clone()));
            let tb = walk(b, sig, env, store);
            env.pop();
            Some(arrow(tv, tb?))
        }
    }
}

fn export(t: &Ty, names: &mut HashMap<usize, String>) -> TypeExpr {
    match t {
        Ty::V(i) => {
            let n = names.len();
            TypeExpr::Var(names.entry(*i).or_insert_with(|| format!("t{n}")).clone())
        }
        Ty::C(n, args) => TypeExpr::Con(n.clone(), args.iter().map(|a| export(a, names)).collect()),
    }
}

/// Principal type, or `None` when the term is ill-typed or mentions an
/// undeclared symbol.
pub fn principal_type(term: &Term, sig: &Signature) -> Option<TypeExpr> {
    let mut store = Store { links: Vec::new() };
    let t = walk(term, sig, &mut Vec::new(), &mut store)?;
    Some(export(&store.resolve(&t), &mut HashMap::new()))
}

/// Equality up to a bijective renaming of type variables.
pub fn same_up_to_renaming(a: &TypeExpr, b: &TypeExpr) -> bool {
    fn go(a: &TypeExpr, b: &TypeExpr, fw: &mut HashMap<String, String>, bw: &mut HashMap<String, String>) -> bool {
        match (a, b) {
            (TypeExpr::Var(x), TypeExpr::Var(y)) => {
                fw.entry(x.clone()).or_insert_with(|| y.clone()) == y
                    && bw.entry(y.clone()).or_insert_with(|| x.clone()) == x
            }
            (TypeExpr::Con(n, xs), TypeExpr::Con(m, ys)) => {
                n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fw, bw))
            }
            _ => false,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

pub const POLY_SIGNATURE: &str = "\
const id : (fun ?a ?a)
const k : (fun ?a (fun ?b ?a))
const compose : (fun (fun ?b ?c) (fun (fun ?a ?b) (fun ?a ?c)))
const pair : (fun ?a (fun ?b (prod ?a ?b)))
const fst : (fun (prod ?a ?b) ?a)
const snd : (fun (prod ?a ?b) ?b)
const nil : (list ?a)
const cons : (fun ?a (fun (list ?a) (list ?a)))
const map : (fun (fun ?a ?b) (fun (list ?a) (list ?b)))
const ite : (fun bool (fun ?a (fun ?a ?a)))
const zero : nat
const suc : (fun nat nat)
const eq : (fun ?a (fun ?a bool))
const true : bool
var n : nat
var p : bool
";

fn pick(rng: &mut Lcg, n: usize) -> usize {
    rng.next_u32() as usize % n
}

const BINDERS: [&str; 3] = ["u", "v", "w"];

/// Random term over [`POLY_SIGNATURE`] with at most `depth` nested
/// applications or binders; may be ill-typed.
pub fn random_term(rng: &mut Lcg, sig: &Signature, depth: usize, bound: usize) -> Term {
    let leaf = depth == 0 || pick(rng, 4) == 0;
    if leaf {
        let consts: Vec<&String> = sig.consts().map(|(n, _)| n).collect();
        let vars: Vec<&String> = sig.vars().map(|(n, _)| n).collect();
        let choice = pick(rng, consts.len() + vars.len() + 2 * bound);
        return if choice < consts.len() {
            Term::constant(consts[choice].as_str())
        } else if choice < consts.len() + vars.len() {
            Term::var(vars[choice - consts.len()].as_str())
        } else {
            Term::var(BINDERS[(choice - consts.len() - vars.len()) / 2])
        };
    }
    if bound < BINDERS.len() && pick(rng, 5) == 0 {
        return Term::abs(BINDERS[bound], random_term(rng, sig, depth - 1, bound + 1));
    }
    Term::app(random_term(rng, sig, depth - 1, bound), random_term(rng, sig, depth - 1, bound))
}
