//! Synchronous grammars over bud trees.
//!
//! A derivation step replaces every bud of a bud tree at once, each by the
//! right-hand side of one of its rules. The generating series sums the
//! evaluations (products of bud labels) of all derivable bud trees.
//!
//! # File format
//!
//! ```text
//! # comments start with '#'
//! buds: x y
//! axiom: x
//! counting: x y
//! markers: xi
//! x -> [-1 <x> <y>] | [0 <x> <x>] | [1 <y> <x>] @xi
//! y -> <x>
//! ```
//!
//! `<b>` is a bud, `[lbl c1 ... ck]` an internal node with an optional
//! integer label; a `*` right after the label (or alone) marks the node.
//! `@m` after an alternative multiplies the marker variable `m` into that
//! rule. The `counting:` line is optional and must list exactly the buds.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, Var};
use crate::tree::BinaryTree;

/// Default bound on the number of bud trees produced by a generation call.
pub const DEFAULT_GENERATION_LIMIT: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BudTree {
    Bud(Arc<str>),
    Node {
        label: Option<i64>,
        marked: bool,
        children: Vec<BudTree>,
    },
}

impl BudTree {
    pub fn bud(name: &str) -> Self {
        BudTree::Bud(name.into())
    }

    pub fn node(label: Option<i64>, children: Vec<BudTree>) -> Self {
        BudTree::Node {
            label,
            marked: false,
            children,
        }
    }

    pub fn marked(label: Option<i64>, children: Vec<BudTree>) -> Self {
        BudTree::Node {
            label,
            marked: true,
            children,
        }
    }

    /// Bud labels read left to right.
    pub fn frontier(&self) -> Vec<&str> {
        fn walk<'a>(t: &'a BudTree, out: &mut Vec<&'a str>) {
            match t {
                BudTree::Bud(b) => out.push(b),
                BudTree::Node { children, .. } => children.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn bud_count(&self) -> usize {
        match self {
            BudTree::Bud(_) => 1,
            BudTree::Node { children, .. } => children.iter().map(BudTree::bud_count).sum(),
        }
    }

    /// Product of the bud labels, as counting variables.
    pub fn ev(&self) -> Monomial {
        Monomial::from_powers(self.frontier().into_iter().map(|b| (Var::counting(b), 1)))
    }

    pub fn marked_count(&self) -> usize {
        match self {
            BudTree::Bud(_) => 0,
            BudTree::Node {
                marked, children, ..
            } => usize::from(*marked) + children.iter().map(BudTree::marked_count).sum::<usize>(),
        }
    }

    /// The binary tree obtained by turning buds into leaves, when every
    /// internal node is binary.
    pub fn to_binary_tree(&self) -> Option<BinaryTree> {
        match self {
            BudTree::Bud(_) => Some(BinaryTree::leaf()),
            BudTree::Node { children, .. } => match children.as_slice() {
                [l, r] => Some(BinaryTree::node(l.to_binary_tree()?, r.to_binary_tree()?)),
                _ => None,
            },
        }
    }

    /// Node labels in infix order, for binary bud trees.
    pub fn infix_labels(&self) -> Vec<Option<i64>> {
        fn walk(t: &BudTree, out: &mut Vec<Option<i64>>) {
            if let BudTree::Node {
                label, children, ..
            } = t
            {
                if let [l, r] = children.as_slice() {
                    walk(l, out);
                    out.push(*label);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Infix ranks of the marked nodes, for binary bud trees.
    pub fn marked_ranks(&self) -> Vec<usize> {
        fn walk(t: &BudTree, next: &mut usize, out: &mut Vec<usize>) {
            if let BudTree::Node {
                marked, children, ..
            } = t
            {
                if let [l, r] = children.as_slice() {
                    walk(l, next, out);
                    *next += 1;
                    if *marked {
                        out.push(*next);
                    }
                    walk(r, next, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut 0, &mut out);
        out
    }

    fn replace_buds(&self, replacements: &mut impl Iterator<Item = BudTree>) -> BudTree {
        match self {
            BudTree::Bud(_) => replacements.next().expect("one replacement per bud"),
            BudTree::Node {
                label,
                marked,
                children,
            } => BudTree::Node {
                label: *label,
                marked: *marked,
                children: children.iter().map(|c| c.replace_buds(replacements)).collect(),
            },
        }
    }
}

impl fmt::Display for BudTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudTree::Bud(b) => write!(f, "<{b}>"),
            BudTree::Node {
                label,
                marked,
                children,
            } => {
                f.write_str("[")?;
                let mut head = String::new();
                if let Some(l) = label {
                    head.push_str(&l.to_string());
                }
                if *marked {
                    head.push('*');
                }
                f.write_str(&head)?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 || !head.is_empty() {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Debug for BudTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BudTree({self})")
    }
}

impl FromStr for BudTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Cursor { s, pos: 0 };
        let t = p.bud_tree()?;
        p.ws();
        if p.pos < s.len() {
            return Err(Error::parse(p.pos, "trailing input"));
        }
        Ok(t)
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.as_bytes().get(self.pos).copied()
    }

    fn name(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn bud_tree(&mut self) -> Result<BudTree> {
        self.ws();
        match self.peek() {
            Some(b'<') => {
                self.pos += 1;
                let name = self.name().to_string();
                if name.is_empty() {
                    return Err(Error::parse(self.pos, "expected bud name"));
                }
                if self.peek() != Some(b'>') {
                    return Err(Error::parse(self.pos, "expected '>'"));
                }
                self.pos += 1;
                Ok(BudTree::bud(&name))
            }
            Some(b'[') => {
                self.pos += 1;
                self.ws();
                let start = self.pos;
                if self.peek() == Some(b'-') {
                    self.pos += 1;
                }
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let label = if self.pos > start {
                    Some(
                        self.s[start..self.pos]
                            .parse()
                            .map_err(|_| Error::parse(start, "bad label"))?,
                    )
                } else {
                    None
                };
                let marked = self.peek() == Some(b'*');
                if marked {
                    self.pos += 1;
                }
                let mut children = Vec::new();
                loop {
                    self.ws();
                    match self.peek() {
                        Some(b']') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(Error::parse(self.pos, "unexpected end of input")),
                        _ => children.push(self.bud_tree()?),
                    }
                }
                if children.is_empty() {
                    return Err(Error::parse(self.pos - 1, "node without children"));
                }
                Ok(BudTree::Node {
                    label,
                    marked,
                    children,
                })
            }
            Some(_) => Err(Error::parse(self.pos, "expected '<' or '['")),
            None => Err(Error::parse(self.pos, "unexpected end of input")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub bud: String,
    pub body: BudTree,
    pub marker: Option<String>,
}

/// Bud alphabet, axiom and substitution rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynchronousGrammar {
    buds: Vec<String>,
    axiom: String,
    markers: Vec<String>,
    rules: Vec<Rule>,
}

/// Vertices are bud trees derivable within `ℓ` steps; each derivation step
/// out of a tree derived in fewer than `ℓ` steps contributes one edge.
#[derive(Clone, Debug)]
pub struct GeneratingGraph {
    pub vertices: Vec<BudTree>,
    pub edges: Vec<(usize, usize)>,
}

impl GeneratingGraph {
    pub fn sources(&self) -> Vec<usize> {
        let mut has_parent = vec![false; self.vertices.len()];
        for &(_, b) in &self.edges {
            has_parent[b] = true;
        }
        (0..self.vertices.len()).filter(|&i| !has_parent[i]).collect()
    }

    /// One source and every other vertex reached by exactly one edge.
    pub fn is_tree(&self) -> bool {
        let mut indeg = vec![0usize; self.vertices.len()];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        indeg.iter().filter(|&&d| d == 0).count() == 1 && indeg.iter().all(|&d| d <= 1)
    }
}

impl SynchronousGrammar {
    pub fn new(
        buds: Vec<String>,
        axiom: String,
        markers: Vec<String>,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let known: HashSet<&str> = buds.iter().map(String::as_str).collect();
        let check = |name: &str| {
            if known.contains(name) {
                Ok(())
            } else {
                Err(Error::unknown("bud", name))
            }
        };
        check(&axiom)?;
        for r in &rules {
            check(&r.bud)?;
            for b in r.body.frontier() {
                check(b)?;
            }
            if let Some(m) = &r.marker {
                if !markers.contains(m) {
                    return Err(Error::unknown("marker", m.as_str()));
                }
            }
        }
        for b in &buds {
            if !rules.iter().any(|r| &r.bud == b) {
                return Err(Error::MissingRule(b.clone()));
            }
        }
        Ok(SynchronousGrammar {
            buds,
            axiom,
            markers,
            rules,
        })
    }

    pub fn buds(&self) -> &[String] {
        &self.buds
    }

    pub fn axiom(&self) -> &str {
        &self.axiom
    }

    pub fn markers(&self) -> &[String] {
        &self.markers
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rules_for<'a>(&'a self, bud: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.bud == bud)
    }

    fn rule_value(r: &Rule) -> Polynomial {
        let mut m = r.body.ev();
        if let Some(name) = &r.marker {
            m = Monomial::from_powers(
                m.powers()
                    .iter()
                    .cloned()
                    .chain([(Var::marker(name), 1)]),
            );
        }
        Polynomial::term(1, m)
    }

    /// Sum of the evaluations of the rules of `bud`, times their markers.
    pub fn subs(&self, bud: &str) -> Polynomial {
        self.rules_for(bud)
            .fold(Polynomial::zero(), |acc, r| &acc + &Self::rule_value(r))
    }

    fn subs_map(&self) -> HashMap<Var, Polynomial> {
        let mut map: HashMap<Var, Polynomial> = self
            .buds
            .iter()
            .map(|b| (Var::counting(b), self.subs(b)))
            .collect();
        for m in &self.markers {
            map.insert(Var::marker(m), Polynomial::var(Var::marker(m)));
        }
        map
    }

    /// All derivation steps out of `d`, one per choice of rules, repeats kept.
    pub fn derivations(&self, d: &BudTree, limit: usize) -> Result<Vec<BudTree>> {
        self.bounded_derivations(d, limit, usize::MAX)
    }

    /// Derivation steps out of `d` whose result has at most `max_buds` buds.
    fn bounded_derivations(&self, d: &BudTree, limit: usize, max_buds: usize) -> Result<Vec<BudTree>> {
        let choices: Vec<Vec<(&BudTree, usize)>> = d
            .frontier()
            .into_iter()
            .map(|b| {
                let bodies: Vec<(&BudTree, usize)> =
                    self.rules_for(b).map(|r| (&r.body, r.body.bud_count())).collect();
                if bodies.is_empty() {
                    Err(Error::MissingRule(b.to_string()))
                } else {
                    Ok(bodies)
                }
            })
            .collect::<Result<_>>()?;
        // fewest buds still needed from position k onwards
        let mut rest = vec![0usize; choices.len() + 1];
        for k in (0..choices.len()).rev() {
            let least = choices[k].iter().map(|&(_, c)| c).min().unwrap_or(0);
            rest[k] = rest[k + 1].saturating_add(least);
        }
        let mut out = Vec::new();
        if rest[0] > max_buds {
            return Ok(out);
        }
        let mut picked: Vec<usize> = Vec::with_capacity(choices.len());
        let mut used = 0usize;
        let mut next = 0usize;
        loop {
            let k = picked.len();
            if k == choices.len() {
                let mut it = picked.iter().zip(&choices).map(|(&i, c)| c[i].0.clone());
                out.push(d.replace_buds(&mut it));
                if out.len() > limit {
                    return Err(Error::ExplosionGuard { limit });
                }
            } else if let Some(i) = (next..choices[k].len())
                .find(|&i| used + choices[k][i].1 + rest[k + 1] <= max_buds)
            {
                used += choices[k][i].1;
                picked.push(i);
                next = 0;
                continue;
            }
            // backtrack
            match picked.pop() {
                Some(i) => {
                    used -= choices[picked.len()][i].1;
                    next = i + 1;
                }
                None => return Ok(out),
            }
        }
    }

    /// Bud trees obtained from `d` in one step.
    pub fn derive_all(&self, d: &BudTree) -> Result<Vec<BudTree>> {
        let mut seen = HashSet::new();
        Ok(self
            .derivations(d, DEFAULT_GENERATION_LIMIT)?
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect())
    }

    fn next_level(&self, level: &[BudTree], limit: usize, max_buds: usize) -> Result<Vec<BudTree>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for d in level {
            for t in self.bounded_derivations(d, limit, max_buds)? {
                if seen.insert(t.clone()) {
                    out.push(t);
                    if out.len() > limit {
                        return Err(Error::ExplosionGuard { limit });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Bud trees derivable from the axiom in exactly `steps` steps.
    pub fn generate(&self, steps: usize) -> Result<Vec<BudTree>> {
        self.generate_with_limit(steps, DEFAULT_GENERATION_LIMIT)
    }

    pub fn generate_with_limit(&self, steps: usize, limit: usize) -> Result<Vec<BudTree>> {
        let mut level = vec![BudTree::bud(&self.axiom)];
        for _ in 0..steps {
            level = self.next_level(&level, limit, usize::MAX)?;
        }
        Ok(level)
    }

    /// Every derivable bud tree with at most `max_buds` buds.
    pub fn generate_up_to(&self, max_buds: usize) -> Result<Vec<BudTree>> {
        let mut level = vec![BudTree::bud(&self.axiom)];
        let mut seen: HashSet<BudTree> = level.iter().cloned().collect();
        let mut all = level.clone();
        while !level.is_empty() {
            level = self.next_level(&level, DEFAULT_GENERATION_LIMIT, max_buds)?;
            level.retain(|t| seen.insert(t.clone()));
            all.extend(level.iter().cloned());
            if all.len() > DEFAULT_GENERATION_LIMIT {
                return Err(Error::ExplosionGuard {
                    limit: DEFAULT_GENERATION_LIMIT,
                });
            }
        }
        Ok(all)
    }

    pub fn generating_graph(&self, steps: usize) -> Result<GeneratingGraph> {
        let mut index: HashMap<BudTree, usize> = HashMap::new();
        let mut vertices = vec![BudTree::bud(&self.axiom)];
        index.insert(vertices[0].clone(), 0);
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        for _ in 0..steps {
            let mut next = Vec::new();
            for &i in &frontier {
                for t in self.derivations(&vertices[i].clone(), DEFAULT_GENERATION_LIMIT)? {
                    let j = *index.entry(t.clone()).or_insert_with(|| {
                        vertices.push(t);
                        next.push(vertices.len() - 1);
                        vertices.len() - 1
                    });
                    edges.push((i, j));
                }
            }
            frontier = next;
        }
        Ok(GeneratingGraph { vertices, edges })
    }

    /// Sufficient condition for strictness: every rule whose body holds a
    /// single bud `c` satisfies `bud < c` in `order` (lowest first).
    pub fn check_strict(&self, order: &[&str]) -> bool {
        let pos = |b: &str| order.iter().position(|&o| o == b);
        if self.buds.iter().any(|b| pos(b).is_none()) {
            return false;
        }
        self.rules.iter().all(|r| {
            let f = r.body.frontier();
            f.len() != 1 || pos(&r.bud) < pos(f[0])
        })
    }

    /// Some order on the buds passing [`SynchronousGrammar::check_strict`].
    pub fn find_strict_order(&self) -> Option<Vec<String>> {
        // single-bud rules b -> c demand b < c: topological sort
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let id = |b: &str| self.buds.iter().position(|x| x == b).expect("validated");
        for r in &self.rules {
            let f = r.body.frontier();
            if f.len() == 1 {
                edges.push((id(&r.bud), id(f[0])));
            }
        }
        let n = self.buds.len();
        let mut indeg = vec![0; n];
        for &(_, b) in &edges {
            indeg[b] += 1;
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::new();
        while let Some(i) = ready.pop() {
            order.push(self.buds[i].clone());
            for &(a, b) in &edges {
                if a == i {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        ready.push(b);
                    }
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Sufficient condition for unambiguity: any two rules of the same bud
    /// have non-bud nodes at a common location that differ in arity, label
    /// or mark.
    pub fn check_unambiguous(&self) -> bool {
        fn differ(a: &BudTree, b: &BudTree) -> bool {
            match (a, b) {
                (
                    BudTree::Node {
                        label: la,
                        marked: ma,
                        children: ca,
                    },
                    BudTree::Node {
                        label: lb,
                        marked: mb,
                        children: cb,
                    },
                ) => {
                    la != lb
                        || ma != mb
                        || ca.len() != cb.len()
                        || ca.iter().zip(cb).any(|(x, y)| differ(x, y))
                }
                _ => false,
            }
        }
        self.buds.iter().all(|b| {
            let bodies: Vec<&BudTree> = self.rules_for(b).map(|r| &r.body).collect();
            (0..bodies.len()).all(|i| (i + 1..bodies.len()).all(|j| differ(bodies[i], bodies[j])))
        })
    }

    /// One application of the iteration: substitutes `subs(b)` for every bud `b` of `p`.
    pub fn step(&self, p: &Polynomial) -> Result<Polynomial> {
        p.substitute(&self.subs_map())
    }

    /// The exact `ℓ`-th iterate `S^(ℓ)`.
    pub fn iterate(&self, steps: usize) -> Polynomial {
        self.iterates(steps, None).pop().expect("at least the axiom")
    }

    /// Iterates `S^(0)` to `S^(steps)`, optionally truncated.
    fn iterates(&self, steps: usize, max_degree: Option<u32>) -> Vec<Polynomial> {
        // V_b holds the iterate started from bud b; V_b <- subs_b(V)
        let subs: Vec<(Var, Polynomial)> = self
            .buds
            .iter()
            .map(|b| (Var::counting(b), self.subs(b)))
            .collect();
        let mut current: HashMap<Var, Polynomial> = self
            .buds
            .iter()
            .map(|b| (Var::counting(b), Polynomial::var(Var::counting(b))))
            .collect();
        for m in &self.markers {
            current.insert(Var::marker(m), Polynomial::var(Var::marker(m)));
        }
        let axiom = Var::counting(&self.axiom);
        let mut out = vec![current[&axiom].clone()];
        for _ in 0..steps {
            let mut next = current.clone();
            for (v, s) in &subs {
                let p = s
                    .substitute_truncated(&current, max_degree)
                    .expect("all buds and markers assigned");
                next.insert(v.clone(), p);
            }
            current = next;
            out.push(current[&axiom].clone());
        }
        out
    }

    /// Generating series truncated to counting degree `max_degree`: the sum
    /// of the truncated iterates up to the first zero one.
    pub fn series(&self, max_degree: u32) -> Result<Polynomial> {
        self.series_with(max_degree, &[])
    }

    /// [`series`](Self::series) with some variables fixed to constants.
    /// The constants are substituted from the first iterate on, which keeps
    /// intermediate polynomials small.
    pub fn series_with(&self, max_degree: u32, fixed: &[(&str, i64)]) -> Result<Polynomial> {
        if self.find_strict_order().is_none() {
            return Err(Error::NotStrict);
        }
        let fixed: HashMap<&str, i64> = fixed.iter().copied().collect();
        if let Some(&c) = self.buds.iter().filter_map(|b| fixed.get(b.as_str())).find(|&&c| c != 0) {
            return Err(Error::OutOfRange {
                what: "nonzero constant for a bud",
                value: c,
            });
        }
        let start = |v: Var, name: &str| match fixed.get(name) {
            Some(&c) => Polynomial::constant(c),
            None => Polynomial::var(v),
        };
        let subs: Vec<(Var, Polynomial)> = self
            .buds
            .iter()
            .map(|b| (Var::counting(b), self.subs(b)))
            .collect();
        let mut current: HashMap<Var, Polynomial> = self
            .buds
            .iter()
            .map(|b| (Var::counting(b), start(Var::counting(b), b).truncate(max_degree)))
            .collect();
        for m in &self.markers {
            current.insert(Var::marker(m), start(Var::marker(m), m));
        }
        let axiom = Var::counting(&self.axiom);
        let mut total = Polynomial::zero();
        loop {
            if self.buds.iter().all(|b| current[&Var::counting(b)].is_zero()) {
                return Ok(total);
            }
            total = &total + &current[&axiom];
            let mut next = current.clone();
            for (v, p) in &subs {
                next.insert(v.clone(), p.substitute_truncated(&current, Some(max_degree))?);
            }
            current = next;
        }
    }
}

impl fmt::Display for SynchronousGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "buds: {}", self.buds.join(" "))?;
        writeln!(f, "axiom: {}", self.axiom)?;
        writeln!(f, "counting: {}", self.buds.join(" "))?;
        if !self.markers.is_empty() {
            writeln!(f, "markers: {}", self.markers.join(" "))?;
        }
        for b in &self.buds {
            let alts: Vec<String> = self
                .rules_for(b)
                .map(|r| match &r.marker {
                    Some(m) => format!("{} @{m}", r.body),
                    None => r.body.to_string(),
                })
                .collect();
            writeln!(f, "{b} -> {}", alts.join(" | "))?;
        }
        Ok(())
    }
}

impl FromStr for SynchronousGrammar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let syntax = |line: usize, message: String| Error::GrammarSyntax { line, message };
        let words = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
        let (mut buds, mut axiom, mut counting, mut markers) = (None, None, None, Vec::new());
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((lhs, rhs)) = line.split_once("->") {
                let bud = lhs.trim().to_string();
                for alt in rhs.split('|') {
                    let (tree, marker) = match alt.split_once('@') {
                        Some((t, m)) => (t, Some(m.trim().to_string())),
                        None => (alt, None),
                    };
                    let body: BudTree = tree
                        .trim()
                        .parse()
                        .map_err(|e: Error| syntax(line_no, e.to_string()))?;
                    rules.push(Rule {
                        bud: bud.clone(),
                        body,
                        marker,
                    });
                }
            } else if let Some((key, value)) = line.split_once(':') {
                match key.trim() {
                    "buds" => buds = Some(words(value)),
                    "axiom" => axiom = Some(value.trim().to_string()),
                    "counting" => counting = Some(words(value)),
                    "markers" => markers = words(value),
                    other => return Err(syntax(line_no, format!("unknown key `{other}`"))),
                }
            } else {
                return Err(syntax(line_no, "expected `key: value` or a rule".into()));
            }
        }
        let buds = buds.ok_or_else(|| syntax(0, "missing `buds:`".into()))?;
        let axiom = axiom.ok_or_else(|| syntax(0, "missing `axiom:`".into()))?;
        if let Some(c) = counting {
            let a: HashSet<&String> = c.iter().collect();
            let b: HashSet<&String> = buds.iter().collect();
            if a != b {
                return Err(syntax(0, "`counting:` must list exactly the buds".into()));
            }
        }
        SynchronousGrammar::new(buds, axiom, markers, rules)
    }
}

/// Identifiers accepted by [`builtin`].
pub const BUILTINS: &[&str] = &[
    "epl", "perf", "bal23", "bal", "max", "bi", "mbi", "mbi_xi", "bal01",
];

const EPL: &str = "buds: x y
axiom: x
x -> [2 <x> <y>] | [3 <x> <y> <x>]
y -> <x>
";

const PERF: &str = "buds: x
axiom: x
x -> [<x> <x>]
";

const BAL23: &str = "buds: x
axiom: x
x -> [2 <x> <x>] | [3 <x> <x> <x>]
";

const BAL: &str = "buds: x y
axiom: x
x -> [-1 <x> <y>] | [0 <x> <x>] | [1 <y> <x>]
y -> <x>
";

const MAX: &str = "buds: x y z
axiom: x
x -> [0 <x> <x>] | [1 <y> <x>] | [-1 <z> <y>]
y -> <x>
z -> [1 <y> <x>]
";

const BI: &str = "buds: x y z
axiom: x
x -> [-1 <x> <y>] | [0 <x> <x>] | [1 <y> <x>] | [-1* <z> <y>]
y -> <x>
z -> [0 <x> <x>] | [-1 <x> <y>]
";

const MBI: &str = "buds: x y z u v
axiom: x
x -> [-1 <v> <y>] | [0 <x> <x>] | [1 <y> <u>] | [-1* <z> <y>]
y -> <x>
z -> [-1 <x> <y>] | [0 <x> <x>]
u -> [-1 <v> <y>] | [-1* <z> <y>]
v -> [1 <y> <u>] | [-1* <z> <y>]
";

const MBI_XI: &str = "buds: x y z u v
axiom: x
markers: xi
x -> [-1 <v> <y>] | [0 <x> <x>] | [1 <y> <u>] | [-1* <z> <y>] @xi
y -> <x>
z -> [-1 <x> <y>] | [0 <x> <x>]
u -> [-1 <v> <y>] | [-1* <z> <y>] @xi
v -> [1 <y> <u>] | [-1* <z> <y>] @xi
";

const BAL01: &str = "buds: x y
axiom: x
x -> [0 <x> <x>] | [1 <y> <x>]
y -> <x>
";

/// A predefined grammar by identifier.
pub fn builtin(name: &str) -> Result<SynchronousGrammar> {
    let text = match name {
        "epl" => EPL,
        "perf" => PERF,
        "bal23" => BAL23,
        "bal" => BAL,
        "max" => MAX,
        "bi" => BI,
        "mbi" => MBI,
        "mbi_xi" => MBI_XI,
        "bal01" => BAL01,
        _ => return Err(Error::unknown("grammar", name)),
    };
    Ok(text.parse().expect("builtin grammars parse"))
}

/// The bud order certifying strictness of a builtin grammar, lowest first.
pub fn builtin_order(name: &str) -> Result<Vec<&'static str>> {
    Ok(match name {
        "epl" | "bal" | "bal01" => vec!["y", "x"],
        "max" => vec!["y", "z", "x"],
        "perf" | "bal23" => vec!["x"],
        "bi" => vec!["y", "z", "x"],
        "mbi" | "mbi_xi" => vec!["y", "v", "u", "z", "x"],
        _ => return Err(Error::unknown("grammar", name)),
    })
}

/// Variable renamings applied to a builtin's series (`u` and `v` play the
/// same role in the minimal-interval grammars and merge into `t`).
pub fn builtin_renames(name: &str) -> &'static [(&'static str, &'static str)] {
    match name {
        "mbi" | "mbi_xi" => &[("u", "t"), ("v", "t")],
        _ => &[],
    }
}

/// Applies the renamings of [`builtin_renames`] to a series.
pub fn merge_variables(p: &Polynomial, renames: &[(&str, &str)]) -> Polynomial {
    renames.iter().fold(p.clone(), |acc, (from, to)| {
        acc.rename(&Var::counting(from), &Var::counting(to))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::{is_balanced, BalancedTable};

    fn poly(s: &str) -> Polynomial {
        Polynomial::parse(s, &["xi"]).unwrap()
    }

    #[test]
    fn bud_tree_syntax() {
        for s in ["<x>", "[0 <x> <x>]", "[-1* <z> <y>]", "[<x> <x>]", "[* <x>]", "[3 <x> [<y>] <x>]"] {
            let t: BudTree = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("[0]".parse::<BudTree>().is_err());
        assert!("<x".parse::<BudTree>().is_err());
        assert!("[0 <x>".parse::<BudTree>().is_err());
        let t: BudTree = "[3 <x> <y> <x>]".parse().unwrap();
        assert_eq!(t.frontier(), vec!["x", "y", "x"]);
        assert_eq!(t.ev(), Monomial::from_powers([(Var::counting("x"), 2), (Var::counting("y"), 1)]));
    }

    #[test]
    fn builtins_round_trip() {
        for name in BUILTINS {
            let g = builtin(name).unwrap();
            let text = g.to_string();
            let back: SynchronousGrammar = text.parse().unwrap();
            assert_eq!(back, g, "{name}");
            assert_eq!(back.to_string(), text);
            assert!(g.check_strict(&builtin_order(name).unwrap()), "{name}");
            assert!(g.check_unambiguous(), "{name}");
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn grammar_file_errors() {
        assert!(matches!(
            "axiom: x\nx -> <x>".parse::<SynchronousGrammar>(),
            Err(Error::GrammarSyntax { .. })
        ));
        assert!(matches!(
            "buds: x y\naxiom: x\nx -> [<x> <y>]".parse::<SynchronousGrammar>(),
            Err(Error::MissingRule(_))
        ));
        assert!(matches!(
            "buds: x\naxiom: x\nx -> [<x> <q>]".parse::<SynchronousGrammar>(),
            Err(Error::Unknown { .. })
        ));
        assert!(matches!(
            "buds: x\naxiom: x\nx -> [<x> <x>] @m".parse::<SynchronousGrammar>(),
            Err(Error::Unknown { .. })
        ));
        assert!(matches!(
            "buds: x\naxiom: x\ncounting: y\nx -> [<x> <x>]".parse::<SynchronousGrammar>(),
            Err(Error::GrammarSyntax { .. })
        ));
        let g: SynchronousGrammar = "# perfect trees\nbuds: x\n\naxiom: x  # start\nx -> [<x> <x>]\n"
            .parse()
            .unwrap();
        assert_eq!(g, builtin("perf").unwrap());
    }

    #[test]
    fn subs_values() {
        let g = builtin("bal").unwrap();
        assert_eq!(g.subs("x"), poly("x^2 + 2·x·y"));
        assert_eq!(g.subs("y"), poly("x"));
        let g = builtin("bal01").unwrap();
        assert_eq!(g.subs("x"), poly("x^2 + x·y"));
        let g = builtin("epl").unwrap();
        assert_eq!(g.subs("x"), poly("x·y + x^2·y"));
        let g = builtin("max").unwrap();
        assert_eq!(g.subs("x"), poly("x^2 + x·y + y·z"));
        assert_eq!(g.subs("z"), poly("x·y"));
        let g = builtin("bi").unwrap();
        assert_eq!(g.subs("x"), poly("x^2 + 2·x·y + y·z"));
        assert_eq!(g.subs("z"), poly("x^2 + x·y"));
        let g = builtin("mbi").unwrap();
        let r = builtin_renames("mbi");
        assert_eq!(merge_variables(&g.subs("x"), r), poly("x^2 + 2·y·t + y·z"));
        assert_eq!(merge_variables(&g.subs("z"), r), poly("x^2 + x·y"));
        assert_eq!(merge_variables(&g.subs("u"), r), poly("y·t + y·z"));
        assert_eq!(merge_variables(&g.subs("v"), r), poly("y·t + y·z"));
        let g = builtin("mbi_xi").unwrap();
        assert_eq!(merge_variables(&g.subs("x"), r), poly("x^2 + 2·y·t + y·z·xi"));
        assert_eq!(merge_variables(&g.subs("u"), r), poly("y·t + y·z·xi"));
    }

    #[test]
    fn derivation_examples() {
        let g = builtin("epl").unwrap();
        let one = g.derive_all(&BudTree::bud("x")).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].to_string(), "[2 <x> <y>]");
        assert_eq!(one[1].to_string(), "[3 <x> <y> <x>]");
        let d: BudTree = "[3 <x> <y> <x>]".parse().unwrap();
        let next = g.derive_all(&d).unwrap();
        assert_eq!(next.len(), 4);
        assert!(next.contains(&"[3 [2 <x> <y>] <x> [3 <x> <y> <x>]]".parse().unwrap()));
    }

    #[test]
    fn generate_levels() {
        let g = builtin("epl").unwrap();
        assert_eq!(g.generate(0).unwrap(), vec![BudTree::bud("x")]);
        let l2 = g.generate(2).unwrap();
        assert_eq!(l2.len(), 6);
        let total = l2.iter().fold(Polynomial::zero(), |acc, d| &acc + &Polynomial::term(1, d.ev()));
        assert_eq!(total, poly("x^2·y + x^3·y + x^3·y^2 + 2·x^4·y^2 + x^5·y^2"));
        let p = builtin("perf").unwrap().generate(3).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].bud_count(), 8);
        assert!(matches!(
            builtin("bal").unwrap().generate_with_limit(4, 100),
            Err(Error::ExplosionGuard { limit: 100 })
        ));
    }

    #[test]
    fn certificates() {
        let g = builtin("epl").unwrap();
        assert!(g.check_strict(&["y", "x"]));
        assert!(!g.check_strict(&["x", "y"]));
        assert!(builtin("bal").unwrap().check_strict(&["y", "x"]));
        let loopy: SynchronousGrammar = "buds: x\naxiom: x\nx -> <x> | [<x> <x>]".parse().unwrap();
        assert!(!loopy.check_strict(&["x"]));
        assert_eq!(loopy.find_strict_order(), None);
        assert_eq!(loopy.series(3), Err(Error::NotStrict));
        let dup: SynchronousGrammar = "buds: x\naxiom: x\nx -> [0 <x> <x>] | [0 <x> <x>] | [1 <x>]"
            .parse()
            .unwrap();
        assert!(!dup.check_unambiguous());
        assert!(!dup.generating_graph(2).unwrap().is_tree());
        assert_eq!(
            builtin("mbi").unwrap().find_strict_order().map(|o| o.len()),
            Some(5)
        );
    }

    #[test]
    fn generating_graphs_are_trees() {
        for name in BUILTINS {
            let graph = builtin(name).unwrap().generating_graph(3).unwrap();
            assert_eq!(graph.sources(), vec![0], "{name}");
            assert!(graph.is_tree(), "{name}");
        }
    }

    #[test]
    fn iterates_match_displays() {
        let g = builtin("epl").unwrap();
        let sum = (0..=2).fold(Polynomial::zero(), |acc, l| &acc + &g.iterate(l));
        assert_eq!(sum, poly("x + x·y + 2·x^2·y + x^3·y + x^3·y^2 + 2·x^4·y^2 + x^5·y^2"));
        assert_eq!(
            builtin("bal23").unwrap().iterate(2),
            poly("x^4 + 2·x^5 + 2·x^6 + 3·x^7 + 3·x^8 + x^9")
        );
        let bal = builtin("bal").unwrap();
        assert_eq!(bal.iterate(1), poly("2·x·y + x^2"));
        assert_eq!(bal.iterate(2), poly("4·x^2·y + 2·x^3 + 4·x^2·y^2 + 4·x^3·y + x^4"));
        let perf = builtin("perf").unwrap();
        assert_eq!(perf.series(8).unwrap(), poly("x + x^2 + x^4 + x^8"));
        assert_eq!(perf.iterate(3), poly("x^8"));
    }

    #[test]
    fn step_is_outer_substitution() {
        let g = builtin("epl").unwrap();
        let mut s = poly("x");
        for l in 1..=4 {
            s = g.step(&s).unwrap();
            assert_eq!(s, g.iterate(l));
        }
    }

    #[test]
    fn series_against_generation() {
        for name in ["epl", "bal23", "bal", "max", "bi"] {
            let g = builtin(name).unwrap();
            let series = g.series(8).unwrap();
            let mut counted = Polynomial::zero();
            for d in g.generate_up_to(8).unwrap() {
                counted = &counted + &Polynomial::term(1, d.ev());
            }
            assert_eq!(series, counted, "{name}");
        }
    }

    #[test]
    fn bal_generates_balanced_trees() {
        let g = builtin("bal").unwrap();
        let table = BalancedTable::new(8);
        let mut by_size = vec![0usize; 9];
        for d in g.generate_up_to(9).unwrap() {
            if d.frontier().iter().all(|&b| b == "x") {
                let t = d.to_binary_tree().unwrap();
                assert!(is_balanced(&t));
                let labels: Vec<i64> = d.infix_labels().into_iter().map(Option::unwrap).collect();
                assert_eq!(labels, t.imbalances());
                by_size[t.node_count()] += 1;
            }
        }
        for (n, &c) in by_size.iter().enumerate() {
            assert_eq!(c, table.count(n));
        }
    }

    #[test]
    fn early_specialization_agrees() {
        let cases: [(&str, &[(&str, i64)]); 5] = [
            ("bal", &[("y", 0)]),
            ("max", &[("y", 0), ("z", 0)]),
            ("bi", &[("y", 0), ("z", 0)]),
            ("mbi_xi", &[("y", 0), ("z", 0), ("u", 0), ("v", 0)]),
            ("mbi_xi", &[("xi", 1), ("y", 0)]),
        ];
        for (name, fixed) in cases {
            let g = builtin(name).unwrap();
            let late = g.series(9).unwrap().specialize(fixed);
            assert_eq!(g.series_with(9, fixed).unwrap(), late, "{name}");
        }
        let g = builtin("bal").unwrap();
        assert!(g.series_with(5, &[("y", 1)]).is_err());
    }
}
