//! Balanced Tamari intervals as hypercubes.
//!
//! Between two comparable balanced trees, the interval is spanned by a set
//! of independent conservative rotations: every subset of these rotation
//! roots, applied to the lower end, gives one element of the interval.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::balance::is_balanced;
use crate::dot;
use crate::error::{Error, Result};
use crate::grammar::builtin;
use crate::poly::{Monomial, Polynomial, Var};
use crate::tamari::{covers, lower_covers, right_rotation, rotations, tamari_leq, TamariPoset};
use crate::tree::BinaryTree;

/// Roots of the conservative rotations leading from `base` to the upper end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationRootSet {
    base: BinaryTree,
    roots: Vec<usize>,
}

impl RotationRootSet {
    pub fn base(&self) -> &BinaryTree {
        &self.base
    }

    /// Infix ranks, increasing.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn dimension(&self) -> usize {
        self.roots.len()
    }

    /// Applies right rotations at `ranks`, in the given order.
    pub fn apply(&self, ranks: impl IntoIterator<Item = usize>) -> Result<BinaryTree> {
        ranks
            .into_iter()
            .try_fold(self.base.clone(), |t, y| right_rotation(&t, y))
    }

    /// Applies the roots selected by the bits of `mask`.
    pub fn apply_mask(&self, mask: u64) -> Result<BinaryTree> {
        self.apply(
            self.roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &y)| y),
        )
    }
}

fn check_endpoints(t0: &BinaryTree, t1: &BinaryTree) -> Result<()> {
    if t0.node_count() != t1.node_count() {
        return Err(Error::SizeMismatch {
            left: t0.node_count(),
            right: t1.node_count(),
        });
    }
    if !is_balanced(t0) || !is_balanced(t1) {
        return Err(Error::NotBalanced);
    }
    Ok(())
}

/// Greedy construction; `below` decides `t ≤ t1` for balanced `t`.
fn root_set_by(
    t0: &BinaryTree,
    t1: &BinaryTree,
    below: impl Fn(&BinaryTree) -> bool,
) -> Result<RotationRootSet> {
    let mut current = t0.clone();
    let mut roots = Vec::new();
    while &current != t1 {
        let (y, next) = rotations(&current)
            .into_iter()
            .find(|(_, s)| is_balanced(s) && below(s))
            .ok_or(Error::Incomparable)?;
        roots.push(y);
        current = next;
    }
    roots.sort_unstable();
    let set = RotationRootSet {
        base: t0.clone(),
        roots,
    };
    let forward = set.apply(set.roots.iter().copied());
    let backward = set.apply(set.roots.iter().rev().copied());
    if forward.as_ref() != Ok(t1) || backward.as_ref() != Ok(t1) {
        return Err(Error::OrderDependent);
    }
    Ok(set)
}

/// Rotation roots carrying the balanced tree `t0` to the balanced tree `t1`.
pub fn rotation_root_set(t0: &BinaryTree, t1: &BinaryTree) -> Result<RotationRootSet> {
    check_endpoints(t0, t1)?;
    if !tamari_leq(t0, t1)? {
        return Err(Error::Incomparable);
    }
    root_set_by(t0, t1, |t| tamari_leq(t, t1).unwrap_or(false))
}

/// Checks that subsets of the roots map bijectively onto `members`, with
/// inclusion matching the Tamari order.
fn is_cube(set: &RotationRootSet, members: &[BinaryTree]) -> bool {
    let k = set.dimension();
    if k >= 20 || members.len() != 1 << k {
        return false;
    }
    let mut image = Vec::with_capacity(1 << k);
    for mask in 0..1u64 << k {
        match set.apply_mask(mask) {
            Ok(t) => image.push(t),
            Err(_) => return false,
        }
    }
    let index: HashMap<&BinaryTree, usize> = members.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let position: Vec<usize> = match image.iter().map(|t| index.get(t).copied()).collect() {
        Some(p) => p,
        None => return false,
    };
    if position.iter().collect::<HashSet<_>>().len() != members.len() {
        return false;
    }
    // order inside the interval: reachability along covers between members
    let up: Vec<Vec<usize>> = members
        .iter()
        .map(|t| covers(t).iter().filter_map(|s| index.get(s).copied()).collect())
        .collect();
    let reach: Vec<Vec<bool>> = (0..members.len())
        .map(|i| {
            let mut seen = vec![false; members.len()];
            seen[i] = true;
            let mut stack = vec![i];
            while let Some(a) = stack.pop() {
                for &b in &up[a] {
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen
        })
        .collect();
    (0..1usize << k).all(|a| {
        (0..1usize << k).all(|b| (a & b == a) == reach[position[a]][position[b]])
    })
}

/// Dimension of `[t0, t1]` and whether it is isomorphic to the hypercube.
pub fn verify_hypercube(t0: &BinaryTree, t1: &BinaryTree) -> Result<(usize, bool)> {
    let set = rotation_root_set(t0, t1)?;
    let members = crate::tamari::interval(t0, t1)?;
    Ok((set.dimension(), is_cube(&set, &members)))
}

/// Balanced trees with `n` nodes under the Tamari order.
pub struct BalancedSubposet {
    poset: TamariPoset,
    members: Vec<usize>,
    position: HashMap<usize, usize>,
    leq: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
}

/// Result of checking every balanced interval of one size.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HypercubeReport {
    pub intervals: usize,
    /// Number of intervals per dimension.
    pub histogram: BTreeMap<usize, usize>,
    /// Intervals whose cardinality is not `2^dimension` or fail the cube check.
    pub failures: Vec<(BinaryTree, BinaryTree)>,
}

impl BalancedSubposet {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self::from_poset(TamariPoset::new(n)?))
    }

    pub fn from_poset(poset: TamariPoset) -> Self {
        let members: Vec<usize> = (0..poset.len())
            .filter(|&i| is_balanced(&poset.elements()[i]))
            .collect();
        let position: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let leq: Vec<Vec<bool>> = members
            .par_iter()
            .map(|&i| {
                let up = poset.up_set(i);
                members.iter().map(|&j| up[j]).collect()
            })
            .collect();
        let m = members.len();
        let mut edges = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a != b && leq[a][b] && !(0..m).any(|c| c != a && c != b && leq[a][c] && leq[c][b]) {
                    edges.push((a, b));
                }
            }
        }
        BalancedSubposet {
            poset,
            members,
            position,
            leq,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.poset.n()
    }

    pub fn poset(&self) -> &TamariPoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn tree(&self, i: usize) -> &BinaryTree {
        &self.poset.elements()[self.members[i]]
    }

    pub fn trees(&self) -> Vec<BinaryTree> {
        (0..self.len()).map(|i| self.tree(i).clone()).collect()
    }

    pub fn index_of(&self, t: &BinaryTree) -> Option<usize> {
        self.poset.index_of(t).and_then(|i| self.position.get(&i).copied())
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Cover relations of the subposet as `(smaller, larger)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Comparable pairs `(i, j)` with `i ≤ j`.
    pub fn intervals(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| (0..self.len()).filter(move |&j| self.leq[i][j]).map(move |j| (i, j)))
            .collect()
    }

    /// All trees of `[i, j]` in the full Tamari order.
    pub fn interval_members(&self, i: usize, j: usize) -> Option<Vec<BinaryTree>> {
        self.poset
            .interval(self.members[i], self.members[j])
            .map(|v| v.into_iter().map(|k| self.poset.elements()[k].clone()).collect())
    }

    pub fn rotation_root_set(&self, i: usize, j: usize) -> Result<RotationRootSet> {
        if !self.leq[i][j] {
            return Err(Error::Incomparable);
        }
        root_set_by(self.tree(i), self.tree(j), |t| {
            self.index_of(t).is_some_and(|k| self.leq[k][j])
        })
    }

    /// Components of the cover graph, each sorted, largest first.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let m = self.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..m {
            let r = find(&mut parent, a);
            groups.entry(r).or_default().push(a);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }

    /// `(vertices, edges)` per component, largest first.
    pub fn component_stats(&self) -> Vec<(usize, usize)> {
        let comps = self.components();
        let mut which = vec![0; self.len()];
        for (c, comp) in comps.iter().enumerate() {
            for &a in comp {
                which[a] = c;
            }
        }
        let mut edges = vec![0; comps.len()];
        for &(a, _) in &self.edges {
            edges[which[a]] += 1;
        }
        let mut stats: Vec<(usize, usize)> = comps.iter().map(Vec::len).zip(edges).collect();
        stats.sort_unstable_by(|a, b| b.cmp(a));
        stats
    }

    pub fn to_dot(&self) -> String {
        dot::from_edges(
            &format!("balanced_{}", self.n()),
            &self.trees(),
            self.edges.iter().copied(),
        )
    }

    /// Checks every comparable pair for the hypercube structure.
    pub fn hypercube_report(&self) -> HypercubeReport {
        let results: Vec<(usize, bool, usize, usize)> = self
            .intervals()
            .par_iter()
            .map(|&(i, j)| {
                let members = self.interval_members(i, j).unwrap_or_default();
                match self.rotation_root_set(i, j) {
                    Ok(set) => (set.dimension(), is_cube(&set, &members), i, j),
                    Err(_) => (0, false, i, j),
                }
            })
            .collect();
        let mut report = HypercubeReport {
            intervals: results.len(),
            ..Default::default()
        };
        for (k, ok, i, j) in results {
            *report.histogram.entry(k).or_default() += 1;
            if !ok {
                report.failures.push((self.tree(i).clone(), self.tree(j).clone()));
            }
        }
        report
    }

    /// All trees of a component have the same height.
    pub fn heights_constant_on_components(&self) -> bool {
        self.components().iter().all(|c| {
            c.iter().all(|&a| self.tree(a).height() == self.tree(c[0]).height())
        })
    }
}

pub fn balanced_subposet(n: usize) -> Result<BalancedSubposet> {
    BalancedSubposet::new(n)
}

fn is_maximal_balanced(t: &BinaryTree) -> bool {
    covers(t).iter().all(|s| !is_balanced(s))
}

fn is_minimal_balanced(t: &BinaryTree) -> bool {
    lower_covers(t).iter().all(|s| !is_balanced(s))
}

/// Leaf-degree coefficients `[x^{n+1}]` of a builtin series with every other
/// counting variable set to 0.
pub fn series_counts(grammar: &str, max_n: usize) -> Result<Vec<Polynomial>> {
    let g = builtin(grammar)?;
    let zeros: Vec<(&str, i64)> = g
        .buds()
        .iter()
        .filter(|b| b.as_str() != "x")
        .map(|b| (b.as_str(), 0))
        .collect();
    let p = g.series_with(max_n as u32 + 1, &zeros)?;
    Ok((0..=max_n)
        .map(|n| p.coefficient_of_power(&Var::counting("x"), n as u32 + 1))
        .collect())
}

fn constant_of(p: &Polynomial) -> BigInt {
    p.coefficient(&Monomial::one())
}

/// Balanced intervals with `n` nodes, counted over `B_n × B_n` and checked
/// against the interval grammar.
pub fn count_balanced_intervals(n: usize) -> Result<BigInt> {
    let brute = BigInt::from(BalancedSubposet::new(n)?.intervals().len());
    let grammar = constant_of(&series_counts("bi", n)?[n]);
    if brute != grammar {
        return Err(Error::Mismatch {
            what: "balanced intervals",
            brute: brute.to_string(),
            grammar: grammar.to_string(),
        });
    }
    Ok(brute)
}

/// Maximal balanced intervals of a subposet as a polynomial in `xi`, the
/// exponent being the hypercube dimension.
pub fn maximal_intervals_by_dimension(sub: &BalancedSubposet) -> Result<Polynomial> {
    let xi = Var::marker("xi");
    let mut total = Polynomial::zero();
    for (i, j) in sub.intervals() {
        if is_minimal_balanced(sub.tree(i)) && is_maximal_balanced(sub.tree(j)) {
            let k = sub.rotation_root_set(i, j)?.dimension();
            total = &total + &Polynomial::term(1, Monomial::from_powers([(xi.clone(), k as u32)]));
        }
    }
    Ok(total)
}

/// Maximal balanced intervals with `n` nodes, refined by dimension when
/// `by_dimension` holds, checked against the marked interval grammar.
pub fn count_maximal_balanced_intervals(n: usize, by_dimension: bool) -> Result<Polynomial> {
    let brute = maximal_intervals_by_dimension(&BalancedSubposet::new(n)?)?;
    let grammar = series_counts("mbi_xi", n)?.swap_remove(n);
    if brute != grammar {
        return Err(Error::Mismatch {
            what: "maximal balanced intervals",
            brute: brute.to_string(),
            grammar: grammar.to_string(),
        });
    }
    Ok(if by_dimension {
        brute
    } else {
        brute.specialize(&[("xi", 1)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::BalancedTable;
    use crate::tamari::tamari_leq;

    fn t(s: &str) -> BinaryTree {
        s.parse().unwrap()
    }

    #[test]
    fn root_sets_small() {
        let a = t("((..).)");
        let b = t("(.(..))");
        assert_eq!(rotation_root_set(&a, &a).unwrap().roots(), &[] as &[usize]);
        assert_eq!(rotation_root_set(&a, &b).unwrap().roots(), &[2]);
        assert_eq!(verify_hypercube(&a, &a).unwrap(), (0, true));
        assert_eq!(verify_hypercube(&a, &b).unwrap(), (1, true));
        assert_eq!(rotation_root_set(&b, &a), Err(Error::Incomparable));
        assert_eq!(
            rotation_root_set(&BinaryTree::left_comb(3), &BinaryTree::right_comb(3)),
            Err(Error::NotBalanced)
        );
        assert!(matches!(rotation_root_set(&a, &t("(..)")), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn root_sets_replay_and_are_independent() {
        for n in 0..=10 {
            let sub = BalancedSubposet::new(n).unwrap();
            for (i, j) in sub.intervals() {
                let set = sub.rotation_root_set(i, j).unwrap();
                assert_eq!(&set.apply(set.roots().iter().copied()).unwrap(), sub.tree(j));
                for &y in set.roots() {
                    let x = y - 1 - sub.tree(i).subtree(y).unwrap().left().unwrap().right().unwrap().node_count();
                    assert!(!set.roots().contains(&x));
                }
                if sub.edges().contains(&(i, j)) {
                    assert_eq!(set.dimension(), 1);
                }
            }
        }
    }

    #[test]
    fn subposet_leq_matches_search() {
        for n in 0..=8 {
            let sub = BalancedSubposet::new(n).unwrap();
            for i in 0..sub.len() {
                for j in 0..sub.len() {
                    assert_eq!(sub.leq(i, j), tamari_leq(sub.tree(i), sub.tree(j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn hypercubes_up_to_nine() {
        for n in 0..=9 {
            let report = BalancedSubposet::new(n).unwrap().hypercube_report();
            assert!(report.failures.is_empty(), "n = {n}: {:?}", report.failures);
            assert_eq!(report.histogram.values().sum::<usize>(), report.intervals);
        }
        let sub = BalancedSubposet::new(7).unwrap();
        assert!(sub.hypercube_report().histogram.get(&3).is_some());
    }

    #[test]
    fn unbalancing_roots_stay_unbalancing() {
        for n in 0..=9 {
            let sub = BalancedSubposet::new(n).unwrap();
            for (i, j) in sub.intervals() {
                let (t0, t1) = (sub.tree(i), sub.tree(j));
                for (y, s) in rotations(t0) {
                    if !is_balanced(&s) {
                        if let Ok(s1) = right_rotation(t1, y) {
                            assert!(!is_balanced(&s1), "{t0} {t1} {y}");
                        }
                    }
                }
                // a node without left child keeps none
                for y in 1..=n {
                    if t0.subtree(y).unwrap().left().unwrap().is_leaf() {
                        assert!(t1.subtree(y).unwrap().left().unwrap().is_leaf());
                    }
                }
            }
        }
    }

    #[test]
    fn component_statistics() {
        let expect: [(usize, usize, usize); 8] = [
            (4, 4, 3),
            (5, 6, 5),
            (6, 4, 2),
            (7, 17, 24),
            (8, 32, 50),
            (9, 44, 63),
            (10, 60, 88),
            (11, 70, 101),
        ];
        for (n, v, e) in expect {
            let sub = BalancedSubposet::new(n).unwrap();
            assert_eq!((sub.len(), sub.edges().len()), (v, e), "n = {n}");
            assert!(sub.heights_constant_on_components());
        }
        assert_eq!(BalancedSubposet::new(5).unwrap().component_stats(), vec![(4, 4), (2, 1)]);
        assert_eq!(BalancedSubposet::new(7).unwrap().component_stats(), vec![(16, 24), (1, 0)]);
        let dot = BalancedSubposet::new(5).unwrap().to_dot();
        assert_eq!(dot.matches("->").count(), 5);
    }

    #[test]
    fn b5_components_share_height() {
        let sub = BalancedSubposet::new(5).unwrap();
        assert_eq!(sub.components().len(), 2);
        let h: HashSet<usize> = sub.trees().iter().map(BinaryTree::height).collect();
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn interval_counts_small() {
        let expected = [1, 1, 3, 1, 7, 12, 6, 52, 119];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(count_balanced_intervals(n).unwrap(), BigInt::from(e));
        }
        let maximal = [1, 1, 1, 1, 3, 2, 2, 6, 9];
        for (n, &e) in maximal.iter().enumerate() {
            let p = count_maximal_balanced_intervals(n, false).unwrap();
            assert_eq!(p, Polynomial::constant(e), "n = {n}");
        }
        let p = count_maximal_balanced_intervals(4, true).unwrap();
        assert_eq!(p, Polynomial::parse("3·xi", &["xi"]).unwrap());
        let p = count_maximal_balanced_intervals(5, true).unwrap();
        assert_eq!(p, Polynomial::parse("xi + xi^2", &["xi"]).unwrap());
    }

    #[test]
    fn series_by_dimension() {
        let table = [
            "1", "1", "xi", "1", "3·xi", "xi + xi^2", "2·xi", "1 + 4·xi^2 + xi^3",
            "4·xi + 4·xi^2 + xi^4", "3·xi + 9·xi^2 + 3·xi^3", "9·xi^2 + 6·xi^3",
            "xi + 13·xi^2 + 2·xi^3 + xi^4", "6·xi + 4·xi^2 + 16·xi^3 + 15·xi^4",
            "2·xi + 18·xi^2 + 31·xi^3 + 12·xi^4 + 14·xi^5",
        ];
        let got = series_counts("mbi_xi", 13).unwrap();
        for (n, s) in table.iter().enumerate() {
            assert_eq!(got[n], Polynomial::parse(s, &["xi"]).unwrap(), "n = {n}");
        }
        let plain = series_counts("mbi", 13).unwrap();
        for n in 0..=13 {
            assert_eq!(plain[n], got[n].specialize(&[("xi", 1)]));
        }
        let table = BalancedTable::new(12);
        let bal = series_counts("bal", 12).unwrap();
        for n in 0..=12 {
            assert_eq!(constant_of(&bal[n]), BigInt::from(table.count(n)));
        }
    }
}
