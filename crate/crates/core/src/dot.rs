//! Graphviz export of Hasse diagrams. Vertices are labelled by tree-string
//! and numbered in tree-string order; edges point from smaller to larger.

use std::collections::HashMap;
use std::fmt::Write;

use crate::tree::BinaryTree;

/// Renders the cover graph induced on `members` by the `up` relation.
pub fn hasse(
    name: &str,
    members: &[BinaryTree],
    up: impl Fn(&BinaryTree) -> Vec<BinaryTree>,
) -> String {
    let index: HashMap<&BinaryTree, usize> =
        members.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut edges = Vec::new();
    for (i, t) in members.iter().enumerate() {
        for s in up(t) {
            if let Some(&j) = index.get(&s) {
                edges.push((i, j));
            }
        }
    }
    from_edges(name, members, edges)
}

/// Renders `vertices` with the given `(smaller, larger)` index pairs.
pub fn from_edges(
    name: &str,
    vertices: &[BinaryTree],
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> String {
    let labels: Vec<String> = vertices.iter().map(|t| t.to_string()).collect();
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let mut id = vec![0; vertices.len()];
    for (k, &i) in order.iter().enumerate() {
        id[i] = k;
    }
    let mut e: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (id[a], id[b])).collect();
    e.sort_unstable();
    e.dedup();

    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for (k, &i) in order.iter().enumerate() {
        writeln!(out, "  n{k} [label=\"{}\"];", labels[i]).unwrap();
    }
    for (a, b) in e {
        writeln!(out, "  n{a} -> n{b};").unwrap();
    }
    out.push_str("}\n");
    out
}
