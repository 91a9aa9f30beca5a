//! Complete rooted planar binary trees.
//!
//! Nodes are addressed by their 1-based infix rank. Trees are immutable and
//! share structure through reference counting, so cloning is cheap.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A binary tree: either the empty tree (a leaf) or a node with two subtrees.
#[derive(Clone, Default)]
pub struct BinaryTree(Option<Arc<Node>>);

struct Node {
    left: BinaryTree,
    right: BinaryTree,
    size: usize,
    height: usize,
}

impl BinaryTree {
    /// The empty tree, written `.`.
    pub fn leaf() -> Self {
        BinaryTree(None)
    }

    /// The tree `left ∧ right`.
    pub fn node(left: BinaryTree, right: BinaryTree) -> Self {
        let size = 1 + left.node_count() + right.node_count();
        let height = 1 + left.height().max(right.height());
        BinaryTree(Some(Arc::new(Node {
            left,
            right,
            size,
            height,
        })))
    }

    pub fn is_leaf(&self) -> bool {
        self.0.is_none()
    }

    /// Left and right subtrees, or `None` for a leaf.
    pub fn children(&self) -> Option<(&BinaryTree, &BinaryTree)> {
        self.0.as_ref().map(|n| (&n.left, &n.right))
    }

    pub fn left(&self) -> Option<&BinaryTree> {
        self.children().map(|c| c.0)
    }

    pub fn right(&self) -> Option<&BinaryTree> {
        self.children().map(|c| c.1)
    }

    pub fn node_count(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.size)
    }

    pub fn leaf_count(&self) -> usize {
        self.node_count() + 1
    }

    pub fn height(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.height)
    }

    /// Imbalance at the root: `h(R) - h(L)`. Zero for a leaf.
    pub fn root_imbalance(&self) -> i64 {
        match self.children() {
            Some((l, r)) => r.height() as i64 - l.height() as i64,
            None => 0,
        }
    }

    /// Infix rank of the root, or `None` for a leaf.
    pub fn root_rank(&self) -> Option<usize> {
        self.left().map(|l| l.node_count() + 1)
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank == 0 || rank > self.node_count() {
            Err(Error::RankOutOfRange {
                rank,
                nodes: self.node_count(),
            })
        } else {
            Ok(())
        }
    }

    /// The subtree rooted at the node of the given infix rank.
    pub fn subtree(&self, rank: usize) -> Result<&BinaryTree> {
        self.check_rank(rank)?;
        let mut t = self;
        let mut r = rank;
        loop {
            let (l, right) = t.children().expect("rank checked");
            let k = l.node_count() + 1;
            match r.cmp(&k) {
                Ordering::Less => t = l,
                Ordering::Equal => return Ok(t),
                Ordering::Greater => {
                    r -= k;
                    t = right;
                }
            }
        }
    }

    /// Imbalance `h(R) - h(L)` of the node of the given rank.
    pub fn imbalance(&self, rank: usize) -> Result<i64> {
        Ok(self.subtree(rank)?.root_imbalance())
    }

    /// Whether `x` lies strictly before `y` in infix order.
    pub fn is_right_of(&self, x: usize, y: usize) -> Result<bool> {
        self.check_rank(x)?;
        self.check_rank(y)?;
        Ok(x < y)
    }

    /// Ranks of the ancestors of `rank`, from the root down to the node itself.
    pub fn path_to(&self, rank: usize) -> Result<Vec<usize>> {
        self.check_rank(rank)?;
        let mut path = Vec::new();
        let mut t = self;
        let mut offset = 0;
        let mut r = rank;
        loop {
            let (l, right) = t.children().expect("rank checked");
            let k = l.node_count() + 1;
            path.push(offset + k);
            match r.cmp(&k) {
                Ordering::Less => t = l,
                Ordering::Equal => return Ok(path),
                Ordering::Greater => {
                    r -= k;
                    offset += k;
                    t = right;
                }
            }
        }
    }

    /// All node subtrees in infix order; index `i` holds the node of rank `i + 1`.
    pub fn nodes(&self) -> Vec<&BinaryTree> {
        fn walk<'a>(t: &'a BinaryTree, out: &mut Vec<&'a BinaryTree>) {
            if let Some((l, r)) = t.children() {
                walk(l, out);
                out.push(t);
                walk(r, out);
            }
        }
        let mut out = Vec::with_capacity(self.node_count());
        walk(self, &mut out);
        out
    }

    /// Imbalance values of all nodes in infix order.
    pub fn imbalances(&self) -> Vec<i64> {
        self.nodes().iter().map(|t| t.root_imbalance()).collect()
    }

    pub fn mirror(&self) -> BinaryTree {
        match self.children() {
            Some((l, r)) => BinaryTree::node(r.mirror(), l.mirror()),
            None => BinaryTree::leaf(),
        }
    }

    /// Canopy word: orientation of the leaves read left to right, first and
    /// last excluded. `0` marks a right child, `1` a left child.
    pub fn canopy(&self) -> String {
        fn walk(t: &BinaryTree, is_left: bool, out: &mut String) {
            match t.children() {
                Some((l, r)) => {
                    walk(l, true, out);
                    walk(r, false, out);
                }
                None => out.push(if is_left { '1' } else { '0' }),
            }
        }
        let mut all = String::new();
        walk(self, true, &mut all);
        if all.len() <= 2 {
            return String::new();
        }
        all[1..all.len() - 1].to_string()
    }

    /// Number of nodes with a nonempty right subtree.
    pub fn nar(&self) -> usize {
        match self.children() {
            Some((l, r)) => usize::from(!r.is_leaf()) + l.nar() + r.nar(),
            None => 0,
        }
    }

    /// Left comb with `n` nodes: every right subtree empty.
    pub fn left_comb(n: usize) -> BinaryTree {
        (0..n).fold(BinaryTree::leaf(), |t, _| BinaryTree::node(t, BinaryTree::leaf()))
    }

    /// Right comb with `n` nodes: every left subtree empty.
    pub fn right_comb(n: usize) -> BinaryTree {
        (0..n).fold(BinaryTree::leaf(), |t, _| BinaryTree::node(BinaryTree::leaf(), t))
    }

    /// Perfect tree of height `h`.
    pub fn perfect(h: usize) -> BinaryTree {
        (0..h).fold(BinaryTree::leaf(), |t, _| BinaryTree::node(t.clone(), t))
    }

    fn write(&self, out: &mut String) {
        match self.children() {
            Some((l, r)) => {
                out.push('(');
                l.write(out);
                r.write(out);
                out.push(')');
            }
            None => out.push('.'),
        }
    }
}

/// All binary trees with `n` nodes, in a fixed order.
pub fn all_trees(n: usize) -> Vec<BinaryTree> {
    let mut table: Vec<Vec<BinaryTree>> = vec![vec![BinaryTree::leaf()]];
    for m in 1..=n {
        let mut row = Vec::new();
        for k in 0..m {
            for l in &table[k] {
                for r in &table[m - 1 - k] {
                    row.push(BinaryTree::node(l.clone(), r.clone()));
                }
            }
        }
        table.push(row);
    }
    table.swap_remove(n)
}

/// Catalan number `C_n`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..n as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

impl PartialEq for BinaryTree {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                Arc::ptr_eq(a, b)
                    || (a.size == b.size
                        && a.height == b.height
                        && a.left == b.left
                        && a.right == b.right)
            }
            _ => false,
        }
    }
}

impl Eq for BinaryTree {}

impl Hash for BinaryTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.children() {
            Some((l, r)) => {
                state.write_u8(1);
                l.hash(state);
                r.hash(state);
            }
            None => state.write_u8(0),
        }
    }
}

/// Orders trees by their serialized form.
impl Ord for BinaryTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for BinaryTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(2 * self.node_count() + 1);
        self.write(&mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTree({self})")
    }
}

impl FromStr for BinaryTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parses a tree-string: `.` is a leaf, `(LR)` a node. Whitespace is ignored.
pub fn parse(text: &str) -> Result<BinaryTree> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let tree = parse_at(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos < bytes.len() {
        return Err(Error::parse(pos, "trailing input"));
    }
    Ok(tree)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_at(bytes: &[u8], pos: &mut usize) -> Result<BinaryTree> {
    // explicit stack keeps deep combs from overflowing
    enum Frame {
        Open,
        Left(BinaryTree),
    }
    let mut stack: Vec<Frame> = Vec::new();
    loop {
        skip_ws(bytes, pos);
        let mut done = match bytes.get(*pos) {
            Some(b'.') => {
                *pos += 1;
                BinaryTree::leaf()
            }
            Some(b'(') => {
                *pos += 1;
                stack.push(Frame::Open);
                continue;
            }
            Some(_) => return Err(Error::parse(*pos, "expected '.' or '('")),
            None => return Err(Error::parse(*pos, "unexpected end of input")),
        };
        loop {
            match stack.pop() {
                None => return Ok(done),
                Some(Frame::Open) => {
                    stack.push(Frame::Left(done));
                    break;
                }
                Some(Frame::Left(l)) => {
                    skip_ws(bytes, pos);
                    match bytes.get(*pos) {
                        Some(b')') => *pos += 1,
                        Some(_) => return Err(Error::parse(*pos, "expected ')'")),
                        None => return Err(Error::parse(*pos, "unexpected end of input")),
                    }
                    done = BinaryTree::node(l, done);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> BinaryTree {
        s.parse().unwrap()
    }

    const FIG1: &str = "((.((..).))(((..).)(..)))";

    #[test]
    fn parse_basics() {
        assert!(t(".").is_leaf());
        assert_eq!(t("(..)").node_count(), 1);
        assert_eq!(t("((..).)").node_count(), 2);
        assert_eq!(t(" ( ( . . ) . ) "), t("((..).)"));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        for (s, off) in [("", 0), ("(..", 3), ("(.x)", 2), ("(...)", 3), (".(", 1)] {
            match parse(s) {
                Err(Error::Parse { offset, .. }) => assert_eq!(offset, off, "{s}"),
                other => panic!("{s}: {other:?}"),
            }
        }
    }

    #[test]
    fn heights() {
        assert_eq!(t(".").height(), 0);
        assert_eq!(t("(..)").height(), 1);
        assert_eq!(t("(.(..))").height(), 2);
    }

    #[test]
    fn fig1_imbalances() {
        let tree = t(FIG1);
        assert_eq!(tree.imbalances(), vec![2, 0, -1, 0, 0, -1, -1, 0]);
        assert_eq!(tree.imbalance(1).unwrap(), 2);
        assert_eq!(tree.imbalance(3).unwrap(), -1);
        assert!(tree.imbalance(9).is_err());
        assert!(tree.imbalance(0).is_err());
        assert_eq!(t("(..)").imbalance(1).unwrap(), 0);
    }

    #[test]
    fn right_of() {
        let tree = t(FIG1);
        assert!(tree.is_right_of(1, 2).unwrap());
        assert!(tree.is_right_of(3, 6).unwrap());
        assert!(!tree.is_right_of(4, 4).unwrap());
        assert!(tree.is_right_of(1, 9).is_err());
    }

    #[test]
    fn mirror_and_canopy() {
        assert_eq!(t(".").mirror(), t("."));
        assert_eq!(t("((..).)").mirror(), t("(.(..))"));
        assert_eq!(t("(((..)((..).))((..)(..)))").canopy(), "0100101");
        assert_eq!(t("(..)").canopy(), "");
        assert_eq!(t(".").canopy(), "");
        assert_eq!(t("((..)(..))").canopy(), "01");
    }

    #[test]
    fn nar_counts() {
        assert_eq!(t(".").nar(), 0);
        assert_eq!(t("(.(.(..)))").nar(), 2);
        let mut row = vec![0u64; 7];
        for tree in all_trees(7) {
            row[tree.nar()] += 1;
        }
        assert_eq!(row, vec![1, 21, 105, 175, 105, 21, 1]);
    }

    #[test]
    fn exhaustive_small_properties() {
        for n in 0..=8 {
            let trees = all_trees(n);
            assert_eq!(trees.len() as u64, catalan(n));
            for tree in &trees {
                assert_eq!(tree.leaf_count(), n + 1);
                assert_eq!(&tree.mirror().mirror(), tree);
                let c: String = tree
                    .canopy()
                    .chars()
                    .rev()
                    .map(|ch| if ch == '0' { '1' } else { '0' })
                    .collect();
                assert_eq!(tree.mirror().canopy(), c);
                assert_eq!(tree.canopy().len(), n.saturating_sub(1));
                assert_eq!(tree.canopy().matches('1').count(), tree.nar());
            }
        }
        for n in 0..=10 {
            for tree in all_trees(n) {
                assert_eq!(parse(&tree.to_string()).unwrap(), tree);
            }
        }
    }

    #[test]
    fn ranks_and_paths() {
        let tree = t(FIG1);
        assert_eq!(tree.root_rank(), Some(4));
        assert_eq!(tree.path_to(3).unwrap(), vec![4, 1, 3]);
        assert_eq!(tree.path_to(2).unwrap(), vec![4, 1, 3, 2]);
        assert_eq!(tree.subtree(7).unwrap().to_string(), "(((..).)(..))");
        for (i, s) in tree.nodes().iter().enumerate() {
            assert_eq!(tree.subtree(i + 1).unwrap(), *s);
        }
    }

    #[test]
    fn deep_comb_parses() {
        let text = format!("{}.{}", "(.".repeat(5000), ")".repeat(5000));
        assert_eq!(parse(&text).unwrap(), BinaryTree::right_comb(5000));
    }

    #[test]
    fn combs_and_perfect() {
        assert_eq!(BinaryTree::left_comb(2).to_string(), "((..).)");
        assert_eq!(BinaryTree::right_comb(3).to_string(), "(.(.(..)))");
        assert_eq!(BinaryTree::perfect(2).to_string(), "((..)(..))");
        assert_eq!(catalan(14), 2_674_440);
    }
}
