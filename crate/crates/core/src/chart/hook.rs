use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::formal::{insert_coercions_expecting, Signature, TypeExpr};
use crate::treebank::{label_type, term_of_labeled_tree, RawTree, TreeTermError, BIND};

/// Veto over chart items. Called once per distinct (span, subtree) per
/// sentence with the debinarized subtree an item would introduce.
pub trait PruningHook: Sync {
    fn accept(&self, candidate: &RawTree, span: (usize, usize)) -> bool;
}

/// Accepts a constituent if its term can be reconstructed and typed at its
/// label, inserting coercions where needed.
pub struct TypedPruningHook {
    sig: Signature,
    invocations: AtomicUsize,
    rejections: AtomicUsize,
}

impl TypedPruningHook {
    pub fn new(sig: Signature) -> Self {
        TypedPruningHook {
            sig,
            invocations: AtomicUsize::new(0),
            rejections: AtomicUsize::new(0),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn invocations(&self) -> usize {
        self.invocations.load(Ordering::Relaxed)
    }

    pub fn rejections(&self) -> usize {
        self.rejections.load(Ordering::Relaxed)
    }

    fn judge(&self, tree: &RawTree) -> bool {
        if tree.label == BIND {
            return true;
        }
        let Ok(expected) = label_type(&tree.label) else {
            return false;
        };
        let term = match term_of_labeled_tree(tree, &self.sig) {
            Ok(t) => t,
            // variables bound outside the span: type them by their preterminals
            Err(TreeTermError::UnknownSymbol(_)) => {
                let Some(sig) = self.with_free_leaves(tree) else {
                    return false;
                };
                match term_of_labeled_tree(tree, &sig) {
                    Ok(t) => return insert_coercions_expecting(&t, &sig, Some(&expected)).is_ok(),
                    Err(_) => return false,
                }
            }
            Err(_) => return false,
        };
        insert_coercions_expecting(&term, &self.sig, Some(&expected)).is_ok()
    }

    fn with_free_leaves(&self, tree: &RawTree) -> Option<Signature> {
        let mut free: BTreeMap<String, TypeExpr> = BTreeMap::new();
        let mut ok = true;
        collect_unknown(tree, &self.sig, &mut free, &mut ok);
        if !ok || free.is_empty() {
            return None;
        }
        let mut sig = self.sig.clone();
        for (name, ty) in free {
            sig.add_var(&name, ty).ok()?;
        }
        Some(sig)
    }
}

fn collect_unknown(
    t: &RawTree,
    sig: &Signature,
    out: &mut BTreeMap<String, TypeExpr>,
    ok: &mut bool,
) {
    if t.is_preterminal() {
        let tok = &t.children[0].label;
        if t.label != BIND && !sig.is_const(tok) && !sig.is_var(tok) && sig.overloads(tok).is_none() {
            match label_type(&t.label) {
                Ok(ty) if ty.is_ground() => {
                    if out.get(tok).is_some_and(|prev| *prev != ty) {
                        *ok = false;
                    }
                    out.entry(tok.clone()).or_insert(ty);
                }
                _ => *ok = false,
            }
        }
        return;
    }
    for c in &t.children {
        collect_unknown(c, sig, out, ok);
    }
}

impl PruningHook for TypedPruningHook {
    fn accept(&self, candidate: &RawTree, _span: (usize, usize)) -> bool {
        self.invocations.fetch_add(1, Ordering::Relaxed);
        let ok = self.judge(candidate);
        if !ok {
            self.rejections.fetch_add(1, Ordering::Relaxed);
        }
        ok
    }
}
