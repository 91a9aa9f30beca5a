//! Balanced trees, rotation classes, height words and imbalance invariants.

use crate::error::{Error, Result};
use crate::tamari::right_rotation;
use crate::tree::BinaryTree;

/// Every node has imbalance in `{-1, 0, 1}`.
pub fn is_balanced(t: &BinaryTree) -> bool {
    match t.children() {
        Some((l, r)) => t.root_imbalance().abs() <= 1 && is_balanced(l) && is_balanced(r),
        None => true,
    }
}

/// Balanced trees indexed by node count then height.
pub struct BalancedTable {
    by_size: Vec<Vec<Vec<BinaryTree>>>,
}

impl BalancedTable {
    /// Builds all balanced trees with at most `max_n` nodes.
    pub fn new(max_n: usize) -> Self {
        let mut by_size: Vec<Vec<Vec<BinaryTree>>> = vec![vec![vec![BinaryTree::leaf()]]];
        for n in 1..=max_n {
            let mut row: Vec<Vec<BinaryTree>> = Vec::new();
            for k in 0..n {
                let (ls, rs) = (&by_size[k], &by_size[n - 1 - k]);
                for (hl, lt) in ls.iter().enumerate() {
                    for (hr, rt) in rs.iter().enumerate() {
                        if lt.is_empty() || rt.is_empty() || hl.abs_diff(hr) > 1 {
                            continue;
                        }
                        let h = 1 + hl.max(hr);
                        if row.len() <= h {
                            row.resize(h + 1, Vec::new());
                        }
                        for l in lt {
                            for r in rt {
                                row[h].push(BinaryTree::node(l.clone(), r.clone()));
                            }
                        }
                    }
                }
            }
            by_size.push(row);
        }
        BalancedTable { by_size }
    }

    /// Balanced trees with `n` nodes.
    pub fn trees(&self, n: usize) -> Vec<BinaryTree> {
        self.by_size[n].iter().flatten().cloned().collect()
    }

    /// Balanced trees with `n` nodes and height `h`.
    pub fn with_height(&self, n: usize, h: usize) -> &[BinaryTree] {
        self.by_size[n].get(h).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, n: usize) -> usize {
        self.by_size[n].iter().map(Vec::len).sum()
    }
}

/// All balanced trees with `n` nodes.
pub fn balanced_trees(n: usize) -> Vec<BinaryTree> {
    BalancedTable::new(n).trees(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationKind {
    ConservativeBalancing,
    SimplyUnbalancing,
    FullyUnbalancing,
    OutsideTable,
}

/// Outcome of [`classify_rotation`]: the table case (1 to 9) when the pair
/// before rotation lies in `{-1,0,1}²`, and the measured pairs
/// `(i(x), i(y))` before and after the rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationClass {
    pub kind: RotationKind,
    pub case: Option<u8>,
    pub before: (i64, i64),
    pub after: (i64, i64),
}

/// Table entry for a pair `(i(x), i(y))`: case number and image pair.
pub fn rotation_table(pair: (i64, i64)) -> Option<(u8, (i64, i64))> {
    Some(match pair {
        (-1, -1) => (1, (1, 1)),
        (0, -1) => (2, (1, 0)),
        (0, 0) => (3, (2, 1)),
        (1, -1) => (4, (2, 0)),
        (1, 0) => (5, (3, 1)),
        (-1, 0) => (6, (2, 2)),
        (-1, 1) => (7, (3, 3)),
        (0, 1) => (8, (3, 2)),
        (1, 1) => (9, (4, 2)),
        _ => return None,
    })
}

fn kind_of_case(case: u8) -> RotationKind {
    match case {
        1 | 2 => RotationKind::ConservativeBalancing,
        3..=5 => RotationKind::SimplyUnbalancing,
        _ => RotationKind::FullyUnbalancing,
    }
}

/// Classifies the right rotation at `y`, with `x` the left child of `y`.
pub fn classify_rotation(t: &BinaryTree, y: usize) -> Result<RotationClass> {
    let sy = t.subtree(y)?;
    let left = sy.left().expect("node");
    if left.is_leaf() {
        return Err(Error::NoLeftChild { rank: y });
    }
    let x = y - 1 - left.right().expect("node").node_count();
    let before = (t.imbalance(x)?, t.imbalance(y)?);
    let rotated = right_rotation(t, y)?;
    let after = (rotated.imbalance(x)?, rotated.imbalance(y)?);
    let (kind, case) = match rotation_table(before) {
        Some((c, _)) => (kind_of_case(c), Some(c)),
        None => (RotationKind::OutsideTable, None),
    };
    Ok(RotationClass {
        kind,
        case,
        before,
        after,
    })
}

/// Height word of node `x`: heights of the right subtrees of `x` and of the
/// ancestors of `x` that follow it in infix order, bottom to top.
pub fn height_word(t: &BinaryTree, x: usize) -> Result<Vec<usize>> {
    let path = t.path_to(x)?;
    let mut word = Vec::new();
    for &z in path.iter().rev() {
        if z >= x {
            word.push(t.subtree(z)?.right().expect("node").height());
        }
    }
    Ok(word)
}

fn theta_pair(a: usize, b: usize) -> usize {
    if a.abs_diff(b) <= 1 {
        a.max(b) + 1
    } else {
        a.max(b)
    }
}

/// Rewrites the first two letters `a.b` of `u` into one letter.
pub fn theta(u: &[usize]) -> Result<Vec<usize>> {
    if u.len() < 2 {
        return Err(Error::WordTooShort);
    }
    let mut v = Vec::with_capacity(u.len() - 1);
    v.push(theta_pair(u[0], u[1]));
    v.extend_from_slice(&u[2..]);
    Ok(v)
}

/// The letter left after fully reducing `u` with [`theta`].
pub fn omega(u: &[usize]) -> Result<usize> {
    let (&first, rest) = u.split_first().ok_or(Error::WordTooShort)?;
    Ok(rest.iter().fold(first, |a, &b| theta_pair(a, b)))
}

/// Every reduct of length at least two starts with `v1, v2` where `v1 - 1 ≤ v2`.
pub fn is_admissible(u: &[usize]) -> bool {
    let Some((&first, rest)) = u.split_first() else {
        return true;
    };
    let mut acc = first;
    for &b in rest {
        if acc > b + 1 {
            return false;
        }
        acc = theta_pair(acc, b);
    }
    true
}

/// First witness of imbalance `(x, y)` scanning `x` by decreasing rank;
/// `y` is the leftmost node of the subtree of `x`.
pub fn find_witness(t: &BinaryTree) -> Option<(usize, usize)> {
    witnesses(t).next()
}

/// All witnesses of imbalance, by decreasing rank of `x`.
pub fn witnesses(t: &BinaryTree) -> impl Iterator<Item = (usize, usize)> + '_ {
    let nodes = t.nodes();
    let n = nodes.len();
    let leftmost: Vec<usize> = (0..n)
        .map(|i| i + 1 - nodes[i].left().expect("node").node_count())
        .collect();
    let unbalanced: Vec<usize> = (0..n)
        .filter(|&i| nodes[i].root_imbalance().abs() > 1)
        .collect();
    (1..=n).rev().filter_map(move |x| {
        let s = nodes[x - 1];
        if s.root_imbalance() < 2 || !is_balanced(s.left().expect("node")) {
            return None;
        }
        let y = leftmost[x - 1];
        // a subtree lies right of y when its leftmost node does
        let right_ok = unbalanced.iter().all(|&i| leftmost[i] <= y);
        right_ok.then_some((x, y))
    })
}

/// Some witness of imbalance has an admissible height word at its `y`.
pub fn has_imbalance_invariant(t: &BinaryTree) -> bool {
    witnesses(t).any(|(_, y)| is_admissible(&height_word(t, y).expect("valid rank")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tamari::{covers, rotations};
    use crate::tree::all_trees;

    fn t(s: &str) -> BinaryTree {
        s.parse().unwrap()
    }

    #[test]
    fn balanced_counts() {
        let expect = [1, 1, 2, 1, 4, 6, 4, 17, 32, 44, 60, 70, 184];
        let table = BalancedTable::new(12);
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(table.count(n), e, "n = {n}");
        }
        for n in 0..=9 {
            let brute = all_trees(n).into_iter().filter(is_balanced).count();
            assert_eq!(brute, expect[n]);
        }
        assert!(is_balanced(&t(".")));
        assert!(!is_balanced(&BinaryTree::right_comb(3)));
    }

    #[test]
    fn rotation_table_matches_measurement() {
        let mut seen = std::collections::BTreeSet::new();
        for n in 2..=9 {
            for tree in balanced_trees(n) {
                for (y, _) in rotations(&tree) {
                    let c = classify_rotation(&tree, y).unwrap();
                    let (case, image) = rotation_table(c.before).unwrap();
                    assert_eq!(c.after, image);
                    assert_eq!(c.case, Some(case));
                    seen.insert(case);
                }
            }
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn rotation_kinds() {
        // x = A∧B, y = x∧C
        let c = classify_rotation(&t("(((..).)(..))"), 3).unwrap();
        assert_eq!(c.before, (-1, -1));
        assert_eq!(c.kind, RotationKind::ConservativeBalancing);
        let c = classify_rotation(&t("((..)(..))"), 2).unwrap();
        assert_eq!(c.before, (0, 0));
        assert_eq!(c.kind, RotationKind::SimplyUnbalancing);
        assert_eq!(c.after, (2, 1));
        let c = classify_rotation(&t("((..).)"), 2).unwrap();
        assert_eq!((c.before, c.after), ((0, -1), (1, 0)));
        let c = classify_rotation(&t("((.(..))(((..)(..))((..)(..))))"), 3).unwrap();
        assert_eq!((c.before, c.after, c.case), ((1, 1), (4, 2), Some(9)));
        assert_eq!(c.kind, RotationKind::FullyUnbalancing);
        let c = classify_rotation(&t("(((..).).)"), 3).unwrap();
        assert_eq!(c.kind, RotationKind::OutsideTable);
        assert!(matches!(
            classify_rotation(&t("(.(..))"), 1),
            Err(Error::NoLeftChild { rank: 1 })
        ));
    }

    #[test]
    fn fig4_height_words() {
        let tree = t("(((.((..).))(.(..)))(..))");
        assert_eq!(height_word(&tree, 1).unwrap(), vec![2, 2, 1]);
        assert_eq!(height_word(&tree, 2).unwrap(), vec![0, 0, 2, 1]);
        assert_eq!(height_word(&tree, 6).unwrap(), vec![0, 1]);
        assert!(height_word(&tree, 10).is_err());
    }

    #[test]
    fn theta_and_omega() {
        assert_eq!(theta(&[0, 0, 1, 2, 2]).unwrap(), vec![1, 1, 2, 2]);
        assert_eq!(theta(&[3, 4, 4, 4]).unwrap(), vec![5, 4, 4]);
        assert_eq!(theta(&[0, 5]).unwrap(), vec![5]);
        assert_eq!(theta(&[1]), Err(Error::WordTooShort));
        assert_eq!(omega(&[0, 0, 1, 2, 2]).unwrap(), 4);
        assert_eq!(omega(&[3, 4, 4, 4]).unwrap(), 6);
        assert_eq!(omega(&[7]).unwrap(), 7);
        assert_eq!(omega(&[]), Err(Error::WordTooShort));
    }

    #[test]
    fn admissible_examples() {
        assert!(is_admissible(&[0, 0, 1, 2, 2]));
        assert!(!is_admissible(&[3, 4, 4, 4]));
        assert!(is_admissible(&[0, 1, 2, 3, 3, 7, 7, 8]));
        assert!(is_admissible(&[]));
        assert!(is_admissible(&[9]));
        let mut u = vec![0, 1, 2, 3, 3, 7, 7, 8];
        let chain = [
            vec![2, 2, 3, 3, 7, 7, 8],
            vec![3, 3, 3, 7, 7, 8],
            vec![4, 3, 7, 7, 8],
            vec![5, 7, 7, 8],
            vec![7, 7, 8],
            vec![8, 8],
        ];
        for step in chain {
            u = theta(&u).unwrap();
            assert_eq!(u, step);
        }
        assert_eq!(omega(&u).unwrap(), 9);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(find_witness(&BinaryTree::perfect(3)), None);
        assert_eq!(find_witness(&BinaryTree::right_comb(3)), Some((1, 1)));
        let tree = t("(((..)((.(..))(((..)((..).))((..).))))(((..)(.(..)))((..).)))");
        assert_eq!(tree.node_count(), 20);
        assert!(has_imbalance_invariant(&tree));
        let (_, y) = find_witness(&tree).unwrap();
        assert_eq!(height_word(&tree, y).unwrap(), vec![1, 4, 4]);
        let (x, _) = find_witness(&tree).unwrap();
        assert_eq!(tree.subtree(x).unwrap(), &t("((.(..))(((..)((..).))((..).)))"));
        assert!(!has_imbalance_invariant(&BinaryTree::perfect(3)));
    }

    #[test]
    fn equal_heights_across_balanced_covers() {
        for n in 0..=10 {
            for tree in balanced_trees(n) {
                for s in covers(&tree) {
                    if is_balanced(&s) {
                        assert_eq!(s.height(), tree.height());
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_height_words_admissible() {
        for n in 0..=10 {
            for tree in balanced_trees(n) {
                for x in 1..=n {
                    let u = height_word(&tree, x).unwrap();
                    assert!(is_admissible(&u));
                    assert!(omega(&u).unwrap() <= tree.height());
                }
            }
        }
    }

    #[test]
    fn unbalanced_cover_of_balanced_has_invariant() {
        for n in 0..=9 {
            for tree in balanced_trees(n) {
                for s in covers(&tree) {
                    if !is_balanced(&s) {
                        assert!(has_imbalance_invariant(&s), "{s}");
                    }
                }
            }
        }
    }
}
