//! Rotations and the Tamari order.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;

use crate::dot;
use crate::error::{Error, Result};
use crate::tree::{all_trees, catalan, BinaryTree};

/// Default upper bound on `n` for [`TamariPoset::new`].
pub const DEFAULT_POSET_BOUND: usize = 14;

fn replace_at(
    t: &BinaryTree,
    rank: usize,
    f: impl FnOnce(&BinaryTree) -> Result<BinaryTree>,
) -> Result<BinaryTree> {
    let (l, r) = t.children().ok_or(Error::RankOutOfRange {
        rank,
        nodes: t.node_count(),
    })?;
    let k = l.node_count() + 1;
    if rank < k {
        Ok(BinaryTree::node(replace_at(l, rank, f)?, r.clone()))
    } else if rank == k {
        f(t)
    } else {
        Ok(BinaryTree::node(l.clone(), replace_at(r, rank - k, f)?))
    }
}

fn rotate_right_here(t: &BinaryTree) -> Option<BinaryTree> {
    let (l, c) = t.children()?;
    let (a, b) = l.children()?;
    Some(BinaryTree::node(a.clone(), BinaryTree::node(b.clone(), c.clone())))
}

fn rotate_left_here(t: &BinaryTree) -> Option<BinaryTree> {
    let (a, r) = t.children()?;
    let (b, c) = r.children()?;
    Some(BinaryTree::node(BinaryTree::node(a.clone(), b.clone()), c.clone()))
}

/// Right rotation at `y`: `(A ∧ B) ∧ C` becomes `A ∧ (B ∧ C)`.
pub fn right_rotation(t: &BinaryTree, y: usize) -> Result<BinaryTree> {
    t.subtree(y)?;
    replace_at(t, y, |s| {
        rotate_right_here(s).ok_or(Error::RotationUndefined { rank: y })
    })
}

/// Inverse of [`right_rotation`]; `y` is the same rank, now the right child
/// of its parent.
pub fn left_rotation(t: &BinaryTree, y: usize) -> Result<BinaryTree> {
    let path = t.path_to(y)?;
    if path.len() < 2 || path[path.len() - 2] > y {
        return Err(Error::RotationUndefined { rank: y });
    }
    let parent = path[path.len() - 2];
    replace_at(t, parent, |s| {
        rotate_left_here(s).ok_or(Error::RotationUndefined { rank: y })
    })
}

/// Sum over all nodes of the size of their right subtree.
pub fn phi(t: &BinaryTree) -> usize {
    match t.children() {
        Some((l, r)) => r.node_count() + phi(l) + phi(r),
        None => 0,
    }
}

/// Right rotations of `t`, with the rank of each rotation root, by increasing rank.
pub fn rotations(t: &BinaryTree) -> Vec<(usize, BinaryTree)> {
    fn walk(t: &BinaryTree, offset: usize, out: &mut Vec<(usize, BinaryTree)>) {
        let Some((l, r)) = t.children() else { return };
        let k = l.node_count() + 1;
        let start = out.len();
        walk(l, offset, out);
        for item in &mut out[start..] {
            item.1 = BinaryTree::node(item.1.clone(), r.clone());
        }
        if let Some(rot) = rotate_right_here(t) {
            out.push((offset + k, rot));
        }
        let start = out.len();
        walk(r, offset + k, out);
        for item in &mut out[start..] {
            item.1 = BinaryTree::node(l.clone(), item.1.clone());
        }
    }
    let mut out = Vec::new();
    walk(t, 0, &mut out);
    out
}

/// Trees obtained from `t` by one right rotation.
pub fn covers(t: &BinaryTree) -> Vec<BinaryTree> {
    rotations(t).into_iter().map(|(_, s)| s).collect()
}

/// Trees obtained from `t` by one left rotation.
pub fn lower_covers(t: &BinaryTree) -> Vec<BinaryTree> {
    fn walk(t: &BinaryTree, out: &mut Vec<BinaryTree>) {
        let Some((l, r)) = t.children() else { return };
        let start = out.len();
        walk(l, out);
        for s in &mut out[start..] {
            *s = BinaryTree::node(s.clone(), r.clone());
        }
        if let Some(rot) = rotate_left_here(t) {
            out.push(rot);
        }
        let start = out.len();
        walk(r, out);
        for s in &mut out[start..] {
            *s = BinaryTree::node(l.clone(), s.clone());
        }
    }
    let mut out = Vec::new();
    walk(t, &mut out);
    out
}

fn same_size(t0: &BinaryTree, t1: &BinaryTree) -> Result<()> {
    if t0.node_count() != t1.node_count() {
        return Err(Error::SizeMismatch {
            left: t0.node_count(),
            right: t1.node_count(),
        });
    }
    Ok(())
}

/// Whether `t0 ≤ t1` in the Tamari order.
pub fn tamari_leq(t0: &BinaryTree, t1: &BinaryTree) -> Result<bool> {
    same_size(t0, t1)?;
    let target = phi(t1);
    let mut seen = HashSet::from([t0.clone()]);
    let mut queue = VecDeque::from([t0.clone()]);
    while let Some(t) = queue.pop_front() {
        if &t == t1 {
            return Ok(true);
        }
        if phi(&t) >= target {
            continue;
        }
        for s in covers(&t) {
            if phi(&s) <= target && seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    Ok(false)
}

fn bounded_closure(
    start: &BinaryTree,
    step: fn(&BinaryTree) -> Vec<BinaryTree>,
    keep: impl Fn(usize) -> bool,
) -> HashSet<BinaryTree> {
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(t) = queue.pop_front() {
        for s in step(&t) {
            if keep(phi(&s)) && seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    seen
}

/// The interval `[t0, t1]`, sorted by tree-string.
pub fn interval(t0: &BinaryTree, t1: &BinaryTree) -> Result<Vec<BinaryTree>> {
    same_size(t0, t1)?;
    let (lo, hi) = (phi(t0), phi(t1));
    let up = bounded_closure(t0, covers, |p| p <= hi);
    if !up.contains(t1) {
        return Err(Error::Incomparable);
    }
    let down = bounded_closure(t1, lower_covers, |p| p >= lo);
    let mut out: Vec<BinaryTree> = up.intersection(&down).cloned().collect();
    out.sort();
    Ok(out)
}

/// DOT rendering of an interval with its cover edges.
pub fn interval_dot(t0: &BinaryTree, t1: &BinaryTree) -> Result<String> {
    let members = interval(t0, t1)?;
    Ok(dot::hasse("interval", &members, covers))
}

/// The Tamari lattice on `T_n` as an indexed cover graph.
pub struct TamariPoset {
    n: usize,
    elements: Vec<BinaryTree>,
    index: HashMap<BinaryTree, u32>,
    phi: Vec<u32>,
    up_start: Vec<u32>,
    up: Vec<u32>,
    down_start: Vec<u32>,
    down: Vec<u32>,
}

impl TamariPoset {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_bound(n, DEFAULT_POSET_BOUND)
    }

    pub fn with_bound(n: usize, bound: usize) -> Result<Self> {
        if n > bound {
            return Err(Error::BoundExceeded { n, bound });
        }
        let elements = all_trees(n);
        debug_assert_eq!(elements.len() as u64, catalan(n));
        let index: HashMap<BinaryTree, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let lists: Vec<Vec<u32>> = elements
            .par_iter()
            .map(|t| covers(t).iter().map(|s| index[s]).collect())
            .collect();
        let phi = elements.par_iter().map(|t| phi(t) as u32).collect();
        let (up_start, up) = csr(&lists);
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); elements.len()];
        for (i, l) in lists.iter().enumerate() {
            for &j in l {
                rev[j as usize].push(i as u32);
            }
        }
        let (down_start, down) = csr(&rev);
        Ok(TamariPoset {
            n,
            elements,
            index,
            phi,
            up_start,
            up,
            down_start,
            down,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BinaryTree] {
        &self.elements
    }

    pub fn index_of(&self, t: &BinaryTree) -> Option<usize> {
        self.index.get(t).map(|&i| i as usize)
    }

    pub fn phi(&self, i: usize) -> usize {
        self.phi[i] as usize
    }

    /// Indices of the trees covering element `i`.
    pub fn upper_covers(&self, i: usize) -> &[u32] {
        &self.up[self.up_start[i] as usize..self.up_start[i + 1] as usize]
    }

    /// Indices of the trees covered by element `i`.
    pub fn lower_covers(&self, i: usize) -> &[u32] {
        &self.down[self.down_start[i] as usize..self.down_start[i + 1] as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.up.len()
    }

    /// Cover edges as `(smaller, larger)` index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |i| self.upper_covers(i).iter().map(move |&j| (i, j as usize)))
    }

    fn closure(&self, i: usize, upward: bool, keep: impl Fn(u32) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        seen[i] = true;
        let mut stack = vec![i];
        while let Some(k) = stack.pop() {
            let next = if upward {
                self.upper_covers(k)
            } else {
                self.lower_covers(k)
            };
            for &j in next {
                let j = j as usize;
                if !seen[j] && keep(self.phi[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Membership mask of the up-set of element `i`.
    pub fn up_set(&self, i: usize) -> Vec<bool> {
        self.closure(i, true, |_| true)
    }

    /// Membership mask of the down-set of element `i`.
    pub fn down_set(&self, i: usize) -> Vec<bool> {
        self.closure(i, false, |_| true)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        let target = self.phi[j];
        i == j || (self.phi[i] < target && self.closure(i, true, |p| p <= target)[j])
    }

    /// Indices of the interval `[i, j]`, or `None` when `i ≰ j`.
    pub fn interval(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        let (lo, hi) = (self.phi[i], self.phi[j]);
        let up = self.closure(i, true, |p| p <= hi);
        if !up[j] {
            return None;
        }
        let down = self.closure(j, false, |p| p >= lo);
        Some((0..self.len()).filter(|&k| up[k] && down[k]).collect())
    }

    pub fn to_dot(&self) -> String {
        dot::from_edges(
            &format!("tamari_{}", self.n),
            &self.elements,
            self.edges(),
        )
    }
}

fn csr(lists: &[Vec<u32>]) -> (Vec<u32>, Vec<u32>) {
    let mut start = Vec::with_capacity(lists.len() + 1);
    let mut flat = Vec::new();
    start.push(0);
    for l in lists {
        flat.extend_from_slice(l);
        start.push(flat.len() as u32);
    }
    (start, flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> BinaryTree {
        s.parse().unwrap()
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(right_rotation(&t("((..).)"), 2).unwrap(), t("(.(..))"));
        assert_eq!(right_rotation(&t("(((..).).)"), 3).unwrap(), t("((..)(..))"));
        assert_eq!(left_rotation(&t("(.(..))"), 2).unwrap(), t("((..).)"));
        assert!(matches!(
            left_rotation(&t("(..)"), 1),
            Err(Error::RotationUndefined { .. })
        ));
        assert!(matches!(
            right_rotation(&t("(.(..))"), 1),
            Err(Error::RotationUndefined { .. })
        ));
        assert!(right_rotation(&t("(..)"), 2).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&t(".")), 0);
        assert_eq!(phi(&BinaryTree::right_comb(3)), 3);
    }

    #[test]
    fn covers_examples() {
        assert!(covers(&t("(..)")).is_empty());
        assert_eq!(covers(&t("((..).)")), vec![t("(.(..))")]);
        for n in 0..=7 {
            for tree in all_trees(n) {
                let with_left = tree.nodes().iter().filter(|s| !s.left().unwrap().is_leaf()).count();
                let rots = rotations(&tree);
                assert_eq!(rots.len(), with_left);
                for (y, s) in rots {
                    assert_eq!(right_rotation(&tree, y).unwrap(), s);
                }
                let mut down = lower_covers(&tree);
                down.sort();
                let mut expect: Vec<_> = (1..=n).filter_map(|y| left_rotation(&tree, y).ok()).collect();
                expect.sort();
                assert_eq!(down, expect);
            }
        }
    }

    #[test]
    fn leq_examples() {
        let l3 = BinaryTree::left_comb(3);
        let r3 = BinaryTree::right_comb(3);
        assert!(tamari_leq(&l3, &r3).unwrap());
        assert!(!tamari_leq(&r3, &l3).unwrap());
        assert!(tamari_leq(&r3, &r3).unwrap());
        assert!(tamari_leq(&l3, &BinaryTree::right_comb(2)).is_err());
    }

    #[test]
    fn interval_examples() {
        let x = t("((..)(..))");
        assert_eq!(interval(&x, &x).unwrap(), vec![x.clone()]);
        let all = interval(&BinaryTree::left_comb(3), &BinaryTree::right_comb(3)).unwrap();
        assert_eq!(all.len(), 5);
        let all = interval(&BinaryTree::left_comb(4), &BinaryTree::right_comb(4)).unwrap();
        assert_eq!(all.len(), 14);
        assert_eq!(
            interval(&BinaryTree::right_comb(3), &BinaryTree::left_comb(3)),
            Err(Error::Incomparable)
        );
    }

    #[test]
    fn poset_sizes() {
        let p = TamariPoset::new(3).unwrap();
        assert_eq!((p.len(), p.edge_count()), (5, 5));
        assert_eq!(TamariPoset::new(4).unwrap().len(), 14);
        let p = TamariPoset::new(0).unwrap();
        assert_eq!((p.len(), p.edge_count()), (1, 0));
        assert!(matches!(
            TamariPoset::new(15),
            Err(Error::BoundExceeded { n: 15, bound: 14 })
        ));
    }

    #[test]
    fn poset_agrees_with_search() {
        for n in 0..=6 {
            let p = TamariPoset::new(n).unwrap();
            for i in 0..p.len() {
                let up = p.up_set(i);
                for j in 0..p.len() {
                    let a = &p.elements()[i];
                    let b = &p.elements()[j];
                    let leq = tamari_leq(a, b).unwrap();
                    assert_eq!(leq, up[j]);
                    assert_eq!(leq, p.leq(i, j));
                    assert_eq!(leq, p.down_set(j)[i]);
                    if i != j && leq {
                        assert!(!tamari_leq(b, a).unwrap());
                    }
                    assert_eq!(leq, tamari_leq(&b.mirror(), &a.mirror()).unwrap());
                }
            }
        }
    }

    #[test]
    fn combs_are_extremes() {
        for n in 0..=7 {
            let p = TamariPoset::new(n).unwrap();
            let lo = p.index_of(&BinaryTree::left_comb(n)).unwrap();
            let hi = p.index_of(&BinaryTree::right_comb(n)).unwrap();
            assert!(p.up_set(lo).iter().all(|&b| b));
            assert!(p.down_set(hi).iter().all(|&b| b));
            assert_eq!(p.interval(lo, hi).unwrap().len(), p.len());
        }
    }

    #[test]
    fn poset_dot() {
        let d = TamariPoset::new(3).unwrap().to_dot();
        assert_eq!(d.matches(" -> ").count(), 5);
        assert_eq!(d.matches("label=").count(), 5);
    }
}
