//! Imbalance tree patterns and the classification of balanced trees by the
//! rotations they admit.
//!
//! A pattern occurs in a tree when some node and a connected set of its
//! descendants carry the pattern's shape and labels, labels being read as
//! imbalance values. Pattern children that are absent impose nothing.
//!
//! Literal syntax: `[l left right]` with `_` for an absent child, and `[l]`
//! for a single node. `[-1 [0] _]` is a node labelled -1 with a left child
//! labelled 0.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::balance::is_balanced;
use crate::error::{Error, Result};
use crate::tree::BinaryTree;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImbalancePattern {
    pub label: i64,
    pub left: Option<Box<ImbalancePattern>>,
    pub right: Option<Box<ImbalancePattern>>,
}

impl ImbalancePattern {
    pub fn single(label: i64) -> Self {
        ImbalancePattern {
            label,
            left: None,
            right: None,
        }
    }

    /// A parent with a left child.
    pub fn left_edge(parent: i64, child: i64) -> Self {
        ImbalancePattern {
            label: parent,
            left: Some(Box::new(Self::single(child))),
            right: None,
        }
    }

    /// A parent with a right child.
    pub fn right_edge(parent: i64, child: i64) -> Self {
        ImbalancePattern {
            label: parent,
            left: None,
            right: Some(Box::new(Self::single(child))),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.left.as_ref().map_or(0, |p| p.node_count())
            + self.right.as_ref().map_or(0, |p| p.node_count())
    }

    /// Left-right mirror image; labels change sign.
    pub fn mirror(&self) -> Self {
        ImbalancePattern {
            label: -self.label,
            left: self.right.as_ref().map(|p| Box::new(p.mirror())),
            right: self.left.as_ref().map(|p| Box::new(p.mirror())),
        }
    }

    fn matches_at(&self, t: &BinaryTree) -> bool {
        let Some((l, r)) = t.children() else {
            return false;
        };
        t.root_imbalance() == self.label
            && self.left.as_ref().is_none_or(|p| p.matches_at(l))
            && self.right.as_ref().is_none_or(|p| p.matches_at(r))
    }
}

impl fmt::Display for ImbalancePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.left.is_none() && self.right.is_none() {
            return write!(f, "[{}]", self.label);
        }
        write!(f, "[{}", self.label)?;
        for c in [&self.left, &self.right] {
            match c {
                Some(p) => write!(f, " {p}")?,
                None => f.write_str(" _")?,
            }
        }
        f.write_str("]")
    }
}

impl FromStr for ImbalancePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let b = s.as_bytes();
        let mut pos = 0;
        let p = parse_node(b, &mut pos)?;
        skip_ws(b, &mut pos);
        if pos < b.len() {
            return Err(Error::parse(pos, "trailing input"));
        }
        Ok(p)
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while b.get(*pos).is_some_and(|c| c.is_ascii_whitespace()) {
        *pos += 1;
    }
}

fn parse_child(b: &[u8], pos: &mut usize) -> Result<Option<Box<ImbalancePattern>>> {
    skip_ws(b, pos);
    if b.get(*pos) == Some(&b'_') {
        *pos += 1;
        Ok(None)
    } else {
        parse_node(b, pos).map(|p| Some(Box::new(p)))
    }
}

fn parse_node(b: &[u8], pos: &mut usize) -> Result<ImbalancePattern> {
    skip_ws(b, pos);
    if b.get(*pos) != Some(&b'[') {
        return Err(Error::parse(*pos, "expected '['"));
    }
    *pos += 1;
    skip_ws(b, pos);
    let start = *pos;
    if b.get(*pos) == Some(&b'-') {
        *pos += 1;
    }
    while b.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    let label = std::str::from_utf8(&b[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(start, "expected an integer label"))?;
    skip_ws(b, pos);
    let (left, right) = if b.get(*pos) == Some(&b']') {
        (None, None)
    } else {
        (parse_child(b, pos)?, parse_child(b, pos)?)
    };
    skip_ws(b, pos);
    if b.get(*pos) != Some(&b']') {
        return Err(Error::parse(*pos, "expected ']'"));
    }
    *pos += 1;
    Ok(ImbalancePattern { label, left, right })
}

/// Whether `p` occurs in `t`.
pub fn occurs(t: &BinaryTree, p: &ImbalancePattern) -> bool {
    t.nodes().into_iter().any(|s| p.matches_at(s))
}

/// Whether some pattern of `set` occurs in `t`.
pub fn occurs_any(t: &BinaryTree, set: &[ImbalancePattern]) -> bool {
    t.nodes()
        .into_iter()
        .any(|s| set.iter().any(|p| p.matches_at(s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternSetId {
    /// Conservative right rotations: avoided exactly by maximal trees.
    Pmax,
    Pmin,
    /// Unbalancing right rotations: avoided exactly by interior trees.
    Print,
    Plint,
}

impl FromStr for PatternSetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pmax" | "max" => Ok(PatternSetId::Pmax),
            "pmin" | "min" => Ok(PatternSetId::Pmin),
            "print" | "rint" => Ok(PatternSetId::Print),
            "plint" | "lint" => Ok(PatternSetId::Plint),
            _ => Err(Error::unknown("pattern set", s)),
        }
    }
}

/// (left child, parent) imbalance pairs.
const MAX_PAIRS: [(i64, i64); 2] = [(-1, -1), (0, -1)];
const RINT_PAIRS: [(i64, i64); 7] = [(-1, 0), (-1, 1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)];

pub fn pattern_set(id: PatternSetId) -> Vec<ImbalancePattern> {
    let right_handed = |pairs: &[(i64, i64)]| -> Vec<ImbalancePattern> {
        pairs
            .iter()
            .map(|&(child, parent)| ImbalancePattern::left_edge(parent, child))
            .collect()
    };
    match id {
        PatternSetId::Pmax => right_handed(&MAX_PAIRS),
        PatternSetId::Print => right_handed(&RINT_PAIRS),
        PatternSetId::Pmin => right_handed(&MAX_PAIRS).iter().map(ImbalancePattern::mirror).collect(),
        PatternSetId::Plint => right_handed(&RINT_PAIRS).iter().map(ImbalancePattern::mirror).collect(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct BalanceClass {
    pub maximal_right: bool,
    pub minimal_left: bool,
    pub right_interior: bool,
    pub left_interior: bool,
    pub right_mixed: bool,
    pub left_mixed: bool,
}

impl BalanceClass {
    pub fn flag_names(&self) -> Vec<&'static str> {
        [
            (self.maximal_right, "MaximalRight"),
            (self.minimal_left, "MinimalLeft"),
            (self.right_interior, "RightInterior"),
            (self.left_interior, "LeftInterior"),
            (self.right_mixed, "RightMixed"),
            (self.left_mixed, "LeftMixed"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }
}

fn right_handed_flags(t: &BinaryTree) -> (bool, bool, bool) {
    let has_max = occurs_any(t, &pattern_set(PatternSetId::Pmax));
    let has_rint = occurs_any(t, &pattern_set(PatternSetId::Print));
    (!has_max, !has_rint, has_max && has_rint)
}

/// Maximal, interior and mixed flags of a balanced tree, on both sides.
pub fn classify_balanced(t: &BinaryTree) -> Result<BalanceClass> {
    if !is_balanced(t) {
        return Err(Error::NotBalanced);
    }
    let (maximal_right, right_interior, right_mixed) = right_handed_flags(t);
    let (minimal_left, left_interior, left_mixed) = right_handed_flags(&t.mirror());
    Ok(BalanceClass {
        maximal_right,
        minimal_left,
        right_interior,
        left_interior,
        right_mixed,
        left_mixed,
    })
}

/// Number of interior balanced trees of height `h`.
pub fn interior_count(h: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::one(), BigInt::from(2));
    match h {
        0 | 1 | 3 => return BigInt::one(),
        2 => return b,
        _ => {}
    }
    // a = a_{k-1}, b = a_k from k = 3
    std::mem::swap(&mut a, &mut b);
    for _ in 4..=h {
        let next = &a * &b;
        a = b;
        b = next;
    }
    b
}

/// Fibonacci numbers with `f_0 = 0`, `f_1 = 1`.
pub fn fibonacci(i: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::one());
    for _ in 0..i {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Largest index accepted by [`fibonacci_tree`].
pub const MAX_FIBONACCI_TREE: usize = 30;

/// `T_0 = T_1 = leaf`, `T_{i+2} = T_{i+1} ∧ T_i`.
pub fn fibonacci_tree(i: usize) -> Result<BinaryTree> {
    if i > MAX_FIBONACCI_TREE {
        return Err(Error::OutOfRange {
            what: "fibonacci tree index",
            value: i as i64,
        });
    }
    let (mut a, mut b) = (BinaryTree::leaf(), BinaryTree::leaf());
    for _ in 0..i {
        let next = BinaryTree::node(b.clone(), a.clone());
        a = b;
        b = next;
    }
    Ok(a)
}
