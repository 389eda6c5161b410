use thiserror::Error;

use crate::treebank::RawTree;

/// Marks intermediate labels introduced by binarization: `A|b.c`.
pub const INTERMEDIATE_SEP: char = '|';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinarizeError {
    #[error("intermediate label `{0}` outside a binarization chain")]
    MalformedIntermediate(String),
}

pub fn is_intermediate(label: &str) -> bool {
    label.contains(INTERMEDIATE_SEP)
}

fn base_label(label: &str) -> &str {
    label.split(INTERMEDIATE_SEP).next().unwrap_or(label)
}

/// Right-branching binarization with exact (unmarkovized) intermediate
/// labels: `(A a b c)` becomes `(A a (A|b.c b c))`.
pub fn binarize_tree(tree: &RawTree) -> RawTree {
    if tree.is_leaf() {
        return tree.clone();
    }
    let children: Vec<RawTree> = tree.children.iter().map(binarize_tree).collect();
    RawTree::node(tree.label.clone(), chain(&tree.label, children))
}

fn chain(lhs: &str, mut children: Vec<RawTree>) -> Vec<RawTree> {
    if children.len() <= 2 {
        return children;
    }
    let rest = children.split_off(1);
    let label = format!(
        "{lhs}{INTERMEDIATE_SEP}{}",
        rest.iter()
            .map(|c| c.label.as_str())
            .collect::<Vec<_>>()
            .join(".")
    );
    children.push(RawTree::node(label, chain(lhs, rest)));
    children
}

/// Inverse of [`binarize_tree`]: splices out every intermediate node.
pub fn debinarize_tree(tree: &RawTree) -> Result<RawTree, BinarizeError> {
    if is_intermediate(&tree.label) {
        return Err(BinarizeError::MalformedIntermediate(tree.label.clone()));
    }
    debin(tree)
}

fn debin(tree: &RawTree) -> Result<RawTree, BinarizeError> {
    if tree.is_leaf() {
        return Ok(tree.clone());
    }
    let mut children = Vec::with_capacity(tree.children.len());
    splice_into(tree, &mut children)?;
    Ok(RawTree::node(tree.label.clone(), children))
}

/// Pushes the debinarized children of `node`, following an intermediate
/// last child.
fn splice_into(node: &RawTree, out: &mut Vec<RawTree>) -> Result<(), BinarizeError> {
    let last = node.children.len() - 1;
    for (i, c) in node.children.iter().enumerate() {
        if is_intermediate(&c.label) && !c.is_leaf() {
            if i != last || base_label(&c.label) != base_label(&node.label) {
                return Err(BinarizeError::MalformedIntermediate(c.label.clone()));
            }
            splice_into(c, out)?;
        } else if is_intermediate(&c.label) {
            return Err(BinarizeError::MalformedIntermediate(c.label.clone()));
        } else {
            out.push(debin(c)?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_sexpr;
    use proptest::prelude::*;

    fn t(s: &str) -> RawTree {
        parse_sexpr(s).unwrap()
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize_tree(&t("(A a b c)")), t("(A a (A|b.c b c))"));
        assert_eq!(binarize_tree(&t("(A a b)")), t("(A a b)"));
        assert_eq!(
            binarize_tree(&t("(A a (B x y z) c d)")),
            t("(A a (A|B.c.d (B x (B|y.z y z)) (A|c.d c d)))")
        );
    }

    #[test]
    fn debinarize_examples() {
        assert_eq!(debinarize_tree(&t("(A a (A|b.c b c))")).unwrap(), t("(A a b c)"));
        assert_eq!(debinarize_tree(&t("(S (NP a) b)")).unwrap(), t("(S (NP a) b)"));
        assert!(matches!(
            debinarize_tree(&t("(X (A|b.c a b))")),
            Err(BinarizeError::MalformedIntermediate(_))
        ));
        assert!(matches!(
            debinarize_tree(&t("(A|b.c a b)")),
            Err(BinarizeError::MalformedIntermediate(_))
        ));
        assert!(matches!(
            debinarize_tree(&t("(A (A|b.c b c) a)")),
            Err(BinarizeError::MalformedIntermediate(_))
        ));
    }

    fn arb_tree() -> impl Strategy<Value = RawTree> {
        let leaf = "[a-z]{1,2}".prop_map(RawTree::leaf);
        leaf.prop_recursive(6, 80, 5, |inner| {
            ("[A-Z]{1,2}", prop::collection::vec(inner, 1..6))
                .prop_map(|(l, cs)| RawTree::node(l, cs))
        })
    }

    proptest! {
        #[test]
        fn round_trip(tree in arb_tree()) {
            let b = binarize_tree(&tree);
            fn max_rank(t: &RawTree) -> usize {
                t.children.iter().map(max_rank).max().unwrap_or(0).max(t.children.len())
            }
            prop_assert!(max_rank(&b) <= 2);
            prop_assert_eq!(debinarize_tree(&b).unwrap(), tree);
        }
    }
}
