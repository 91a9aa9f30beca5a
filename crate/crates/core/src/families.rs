//! Tree families defined by local constraints, and whether they are closed
//! under Tamari intervals.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tamari::{lower_covers, TamariPoset};
use crate::tree::{all_trees, BinaryTree};

/// Allowed imbalance values: a finite set or an interval, possibly unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImbalanceSet {
    Finite(BTreeSet<i64>),
    Range { lo: Option<i64>, hi: Option<i64> },
}

impl ImbalanceSet {
    pub fn finite(values: impl IntoIterator<Item = i64>) -> Result<Self> {
        let set: BTreeSet<i64> = values.into_iter().collect();
        if !set.contains(&0) {
            return Err(Error::ZeroNotInSet);
        }
        Ok(ImbalanceSet::Finite(set))
    }

    /// `[lo, hi]`, `None` meaning unbounded on that side.
    pub fn range(lo: Option<i64>, hi: Option<i64>) -> Result<Self> {
        if lo.is_some_and(|l| l > 0) || hi.is_some_and(|h| h < 0) {
            return Err(Error::ZeroNotInSet);
        }
        Ok(ImbalanceSet::Range { lo, hi })
    }

    pub fn all() -> Self {
        ImbalanceSet::Range { lo: None, hi: None }
    }

    pub fn contains(&self, v: i64) -> bool {
        match self {
            ImbalanceSet::Finite(s) => s.contains(&v),
            ImbalanceSet::Range { lo, hi } => lo.is_none_or(|l| l <= v) && hi.is_none_or(|h| v <= h),
        }
    }

    /// The set of negated values.
    pub fn mirror(&self) -> Self {
        match self {
            ImbalanceSet::Finite(s) => ImbalanceSet::Finite(s.iter().map(|v| -v).collect()),
            ImbalanceSet::Range { lo, hi } => ImbalanceSet::Range {
                lo: hi.map(|h| -h),
                hi: lo.map(|l| -l),
            },
        }
    }

    /// Bounds when the set is an interval of integers.
    pub fn as_interval(&self) -> Option<(Option<i64>, Option<i64>)> {
        match self {
            ImbalanceSet::Range { lo, hi } => Some((*lo, *hi)),
            ImbalanceSet::Finite(s) => {
                let (lo, hi) = (*s.first()?, *s.last()?);
                (s.len() as i64 == hi - lo + 1).then_some((Some(lo), Some(hi)))
            }
        }
    }
}

impl fmt::Display for ImbalanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImbalanceSet::Finite(s) => {
                let items: Vec<String> = s.iter().map(i64::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            ImbalanceSet::Range { lo: None, hi: None } => f.write_str("Z"),
            ImbalanceSet::Range { lo, hi } => {
                let lo = lo.map_or("-inf".to_string(), |v| v.to_string());
                let hi = hi.map_or("inf".to_string(), |v| v.to_string());
                write!(f, "[{lo},{hi}]")
            }
        }
    }
}

impl FromStr for ImbalanceSet {
    type Err = Error;

    /// Accepts `Z`, `{0,1}`, `[-2,1]` and `-2..1`; `-inf` and `inf`, or an
    /// empty side of `..`, mark open ends.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z" {
            return Ok(Self::all());
        }
        let bad = || Error::parse(0, "expected `Z`, `{a,b,..}` or `[lo,hi]`");
        let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        if let Some(body) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let values = body
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(int)
                .collect::<Result<Vec<_>>>()?;
            return Self::finite(values);
        }
        if let Some(body) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (lo, hi) = body.split_once(',').ok_or_else(bad)?;
            let lo = match lo.trim() {
                "-inf" => None,
                t => Some(int(t)?),
            };
            let hi = match hi.trim() {
                "inf" | "+inf" => None,
                t => Some(int(t)?),
            };
            return Self::range(lo, hi);
        }
        if let Some((lo, hi)) = s.split_once("..") {
            let lo = if lo.trim().is_empty() { None } else { Some(int(lo)?) };
            let hi = if hi.trim().is_empty() { None } else { Some(int(hi)?) };
            return Self::range(lo, hi);
        }
        Err(bad())
    }
}

pub fn is_v_balanced(t: &BinaryTree, v: &ImbalanceSet) -> bool {
    t.nodes().iter().all(|s| v.contains(s.root_imbalance()))
}

/// All `V`-balanced trees with `n` nodes, built from subtrees by height.
pub fn v_balanced_trees(n: usize, v: &ImbalanceSet) -> Vec<BinaryTree> {
    // table[m][h] = V-balanced trees with m nodes and height h
    let mut table: Vec<Vec<Vec<BinaryTree>>> = vec![vec![vec![BinaryTree::leaf()]]];
    for m in 1..=n {
        let mut row: Vec<Vec<BinaryTree>> = vec![Vec::new(); m + 1];
        for l in 0..m {
            let r = m - 1 - l;
            for (hl, ls) in table[l].iter().enumerate() {
                for (hr, rs) in table[r].iter().enumerate() {
                    if ls.is_empty() || rs.is_empty() || !v.contains(hr as i64 - hl as i64) {
                        continue;
                    }
                    for a in ls {
                        for b in rs {
                            row[hl.max(hr) + 1].push(BinaryTree::node(a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        table.push(row);
    }
    table.swap_remove(n).into_iter().flatten().collect()
}

/// A chain of covers `T0 ⋌ ... ⋌ T2` whose ends satisfy `pred` while some
/// inner tree does not, or `None` when the family is closed under intervals
/// among trees with `n` nodes.
pub fn closure_check(
    pred: impl Fn(&BinaryTree) -> bool + Sync,
    n: usize,
) -> Result<Option<Vec<BinaryTree>>> {
    Ok(closure_check_in(&TamariPoset::new(n)?, pred))
}

/// [`closure_check`] over an existing poset.
pub fn closure_check_in(
    poset: &TamariPoset,
    pred: impl Fn(&BinaryTree) -> bool + Sync,
) -> Option<Vec<BinaryTree>> {
    let sat: Vec<bool> = poset.elements().par_iter().map(&pred).collect();
    // reaches[i]: some element of the up-set of i satisfies pred
    let mut order: Vec<usize> = (0..poset.len()).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse(poset.phi(i)));
    let mut reaches = sat.clone();
    for &i in &order {
        if !reaches[i] {
            reaches[i] = poset.upper_covers(i).iter().any(|&j| reaches[j as usize]);
        }
    }
    let path = |from: usize, stop: &dyn Fn(usize) -> bool, allowed: &dyn Fn(usize) -> bool| {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        parent.insert(from, from);
        while let Some(a) = queue.pop_front() {
            if a != from && stop(a) {
                let mut chain = vec![a];
                let mut c = a;
                while c != from {
                    c = parent[&c];
                    chain.push(c);
                }
                chain.reverse();
                return Some(chain);
            }
            for &b in poset.upper_covers(a) {
                let b = b as usize;
                if allowed(b) && !parent.contains_key(&b) {
                    parent.insert(b, a);
                    queue.push_back(b);
                }
            }
        }
        None
    };
    let bad = (0..poset.len())
        .into_par_iter()
        .filter(|&i| sat[i])
        .find_map_first(|i| path(i, &|k| !sat[k] && reaches[k], &|k| reaches[k]))?;
    let last = *bad.last().expect("nonempty path");
    let tail = path(last, &|k| sat[k], &|k| reaches[k]).expect("reaches a satisfying tree");
    let chain = bad.iter().chain(&tail[1..]).map(|&k| poset.elements()[k].clone()).collect();
    Some(chain)
}

/// A pair `T0 < T1` of trees satisfying `pred`, if any.
pub fn comparable_pair(
    pred: impl Fn(&BinaryTree) -> bool + Sync,
    n: usize,
) -> Result<Option<(BinaryTree, BinaryTree)>> {
    let poset = TamariPoset::new(n)?;
    let sat: Vec<bool> = poset.elements().par_iter().map(&pred).collect();
    Ok((0..poset.len())
        .into_par_iter()
        .filter(|&i| sat[i])
        .find_map_first(|i| {
            let up = poset.up_set(i);
            (0..poset.len())
                .find(|&j| j != i && up[j] && sat[j])
                .map(|j| (poset.elements()[i].clone(), poset.elements()[j].clone()))
        }))
}

/// Cases in which the `V`-balanced trees are not closed, by the upper bound
/// of `V = [-α, β]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NonClosureCase {
    /// `V = [-α, 0]` with `α ≥ 2`.
    UpperZero,
    /// `V = [-α, 1]` with `α ≥ 2`.
    UpperOne,
    /// `V = [-α, 2]` with `α ≥ 2`.
    UpperTwo,
    /// `V = [-α, β]` with `α ≥ 2`, `β ≥ 3`.
    UpperWide,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosureVerdict {
    Closed,
    NotClosed {
        case: NonClosureCase,
        /// The case applies to the mirrored set.
        mirrored: bool,
        /// Upper bound of the set the case is applied to, `None` if unbounded.
        beta: Option<i64>,
    },
}

/// Whether the `V`-balanced trees are closed under Tamari intervals, for an
/// interval `V` containing 0.
pub fn classify_v_interval(v: &ImbalanceSet) -> Result<ClosureVerdict> {
    let (lo, hi) = v.as_interval().ok_or(Error::OutOfRange {
        what: "non-interval imbalance set of size",
        value: match v {
            ImbalanceSet::Finite(s) => s.len() as i64,
            _ => 0,
        },
    })?;
    if !v.contains(0) {
        return Err(Error::ZeroNotInSet);
    }
    // alpha = -lo, beta = hi; None is infinite
    let alpha = lo.map(|l| -l);
    let beta = hi;
    let small = |x: Option<i64>| x.is_some_and(|x| x <= 1);
    if (small(alpha) && small(beta)) || (alpha.is_none() && beta.is_none()) {
        return Ok(ClosureVerdict::Closed);
    }
    let case_for = |beta: Option<i64>| match beta {
        Some(0) => NonClosureCase::UpperZero,
        Some(1) => NonClosureCase::UpperOne,
        Some(2) => NonClosureCase::UpperTwo,
        _ => NonClosureCase::UpperWide,
    };
    // the cases need alpha >= 2 (or infinite) and a finite beta
    let direct = !small(alpha) && beta.is_some();
    let (mirrored, b) = if direct { (false, beta) } else { (true, alpha) };
    Ok(ClosureVerdict::NotClosed {
        case: case_for(b),
        mirrored,
        beta: b,
    })
}

fn comb_over(k: usize, bottom: BinaryTree) -> BinaryTree {
    (0..k).fold(bottom, |t, _| BinaryTree::node(BinaryTree::leaf(), t))
}

/// A chain `T0 ⋌ T1 ⋌ T2` for a case, with `T1` outside every set the
/// case covers; `beta` only matters for the generic case (`β ≥ 3`).
pub fn non_closure_chain(case: NonClosureCase, beta: i64) -> Result<[BinaryTree; 3]> {
    let p = |s: &str| s.parse::<BinaryTree>().expect("literal tree");
    Ok(match case {
        NonClosureCase::UpperZero => [
            p("((((..).).)(((..).).))"),
            p("(((..)(..))(((..).).))"),
            p("(((..)(..))((..)(..)))"),
        ],
        NonClosureCase::UpperOne => [
            p("((((..).)(..))(((..).).))"),
            p("(((..).)((..)(((..).).)))"),
            p("(((..).)((..)((..)(..))))"),
        ],
        NonClosureCase::UpperTwo => [
            p("(((..).)(((..).).))"),
            p("((..)(.(((..).).)))"),
            p("((..)(.((..)(..))))"),
        ],
        NonClosureCase::UpperWide => {
            if beta < 3 {
                return Err(Error::OutOfRange {
                    what: "beta",
                    value: beta,
                });
            }
            let k = beta as usize - 3;
            let low = comb_over(k, BinaryTree::left_comb(3));
            let high = comb_over(k, BinaryTree::perfect(2));
            let cherry = BinaryTree::perfect(1);
            [
                BinaryTree::node(cherry, low.clone()),
                comb_over(2, low),
                comb_over(2, high),
            ]
        }
    })
}

/// Size of the right subtree minus size of the left subtree at `rank`.
pub fn weight_imbalance(t: &BinaryTree, rank: usize) -> Result<i64> {
    let s = t.subtree(rank)?;
    let (l, r) = s.children().expect("subtree of a node");
    Ok(r.node_count() as i64 - l.node_count() as i64)
}

pub fn is_weight_balanced(t: &BinaryTree) -> bool {
    t.nodes().iter().all(|s| {
        let (l, r) = s.children().expect("node");
        l.node_count().abs_diff(r.node_count()) <= 1
    })
}

/// All weight-balanced trees with `n` nodes.
pub fn weight_balanced_trees(n: usize) -> Vec<BinaryTree> {
    let mut table: Vec<Vec<BinaryTree>> = vec![vec![BinaryTree::leaf()]];
    for m in 1..=n {
        let mut row = Vec::new();
        for l in 0..m {
            let r = m - 1 - l;
            if l.abs_diff(r) > 1 {
                continue;
            }
            for a in &table[l] {
                for b in &table[r] {
                    row.push(BinaryTree::node(a.clone(), b.clone()));
                }
            }
        }
        table.push(row);
    }
    table.swap_remove(n)
}

/// Number of subtrees equal to `(.(..))`.
pub fn weight_rank(t: &BinaryTree) -> usize {
    let s1 = BinaryTree::node(BinaryTree::leaf(), BinaryTree::perfect(1));
    t.nodes().into_iter().filter(|s| **s == s1).count()
}

/// Trees sharing a canopy, with the least and greatest of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanopyClass {
    pub trees: Vec<BinaryTree>,
    pub min: BinaryTree,
    pub max: BinaryTree,
}

/// All trees with `n` nodes and canopy `u`.
pub fn canopy_class(u: &str, n: usize) -> Result<CanopyClass> {
    if u.chars().any(|c| c != '0' && c != '1') {
        return Err(Error::parse(0, "canopy words use 0 and 1"));
    }
    let expected = n.saturating_sub(1);
    if u.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: u.len(),
        });
    }
    let trees: Vec<BinaryTree> = all_trees(n).into_iter().filter(|t| t.canopy() == u).collect();
    let extreme = |down: bool| -> BinaryTree {
        let found: Vec<&BinaryTree> = trees
            .iter()
            .filter(|t| {
                let next = if down {
                    lower_covers(t)
                } else {
                    crate::tamari::covers(t)
                };
                next.iter().all(|s| s.canopy() != u)
            })
            .collect();
        assert_eq!(found.len(), 1, "canopy class {u} has one extreme element");
        found[0].clone()
    };
    assert!(!trees.is_empty(), "canopy class {u} is nonempty");
    let (min, max) = (extreme(true), extreme(false));
    Ok(CanopyClass { trees, min, max })
}

/// Trees with `n` nodes and `k` nodes having a nonempty right subtree.
pub fn narayana_class(n: usize, k: usize) -> Result<Vec<BinaryTree>> {
    if k > n.saturating_sub(1) {
        return Err(Error::OutOfRange {
            what: "narayana parameter",
            value: k as i64,
        });
    }
    Ok(all_trees(n).into_iter().filter(|t| t.nar() == k).collect())
}
