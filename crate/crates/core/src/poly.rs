//! Sparse multivariate polynomials with arbitrary-precision coefficients.
//!
//! Variables are either counting variables, which contribute to the
//! counting degree used for truncation, or marker variables, which do not.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    marker: bool,
    name: Arc<str>,
}

impl Var {
    pub fn counting(name: &str) -> Self {
        Var {
            marker: false,
            name: name.into(),
        }
    }

    pub fn marker(name: &str) -> Self {
        Var {
            marker: true,
            name: name.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_marker(&self) -> bool {
        self.marker
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A product of variable powers, exponents all positive.
///
/// Monomials are ordered graded-lexicographically: first by counting
/// degree, then by exponents over counting variables in name order, then by
/// the same comparison on marker variables.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(Var, u32)>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Monomial::from_powers([(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            *map.entry(v).or_insert(0) += e;
        }
        let exps: Vec<(Var, u32)> = map.into_iter().filter(|&(_, e)| e > 0).collect();
        let degree = exps.iter().filter(|(v, _)| !v.marker).map(|(_, e)| e).sum();
        Monomial { exps, degree }
    }

    /// Sum of the exponents of counting variables.
    pub fn counting_degree(&self) -> u32 {
        self.degree
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.exps
            .iter()
            .find(|(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                Ordering::Less => {
                    exps.push(self.exps[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(other.exps[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((self.exps[i].0.clone(), self.exps[i].1 + other.exps[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    fn without(&self, v: &Var) -> Monomial {
        Monomial::from_powers(self.exps.iter().filter(|(w, _)| w != v).cloned())
    }
}

fn lex(a: &[(Var, u32)], b: &[(Var, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match ea.cmp(eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
            },
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let split = |m: &Monomial| m.exps.iter().position(|(v, _)| v.marker).unwrap_or(m.exps.len());
        let (sa, sb) = (split(self), split(other));
        let md = |m: &Monomial, s: usize| m.exps[s..].iter().map(|&(_, e)| e).sum::<u32>();
        self.degree
            .cmp(&other.degree)
            .then_with(|| lex(&self.exps[..sa], &other.exps[..sb]))
            .then_with(|| md(self, sa).cmp(&md(other, sb)))
            .then_with(|| lex(&self.exps[sa..], &other.exps[sb..]))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (k, (v, e)) in self.exps.iter().enumerate() {
            if k > 0 {
                f.write_str("·")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Polynomial::term(1, Monomial::var(v))
    }

    pub fn term(c: impl Into<BigInt>, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c.into());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn from_map(map: HashMap<Monomial, BigInt>) -> Self {
        Polynomial {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Largest counting degree among the terms, `None` for zero.
    pub fn counting_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::counting_degree).max()
    }

    /// The polynomial multiplying `v^k`, with `v` removed.
    pub fn coefficient_of_power(&self, v: &Var, k: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if m.exponent(v) == k {
                out.add_term(m.without(v), c.clone());
            }
        }
        out
    }

    /// Drops terms of counting degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product keeping only terms of counting degree at most `max_degree`.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: Option<u32>) -> Polynomial {
        let bound = max_degree.unwrap_or(u32::MAX);
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (ma, ca) in &self.terms {
            if ma.degree > bound {
                continue;
            }
            for (mb, cb) in &other.terms {
                if ma.degree + mb.degree > bound {
                    continue;
                }
                *acc.entry(ma.times(mb)).or_default() += ca * cb;
            }
        }
        Polynomial::from_map(acc)
    }

    /// Simultaneous substitution; every variable must be assigned.
    pub fn substitute(&self, assignment: &HashMap<Var, Polynomial>) -> Result<Polynomial> {
        self.substitute_truncated(assignment, None)
    }

    /// [`Polynomial::substitute`] with products truncated to `max_degree`.
    /// Exact after truncation when every assigned polynomial has terms of
    /// counting degree at least the degree of the variable it replaces.
    pub fn substitute_truncated(
        &self,
        assignment: &HashMap<Var, Polynomial>,
        max_degree: Option<u32>,
    ) -> Result<Polynomial> {
        let mut powers: HashMap<(Var, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut prod = Polynomial::constant(c.clone());
            for (v, e) in &m.exps {
                let base = assignment
                    .get(v)
                    .ok_or_else(|| Error::Unassigned(v.name().to_string()))?;
                let pw = power_cached(&mut powers, v, base, *e, max_degree);
                prod = prod.mul_truncated(&pw, max_degree);
                if prod.is_zero() {
                    break;
                }
            }
            out = &out + &prod;
        }
        Ok(match max_degree {
            Some(d) => out.truncate(d),
            None => out,
        })
    }

    /// Replaces the named variables by integer constants.
    pub fn specialize(&self, values: &[(&str, i64)]) -> Polynomial {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut kept = Vec::new();
            for (v, e) in &m.exps {
                match values.iter().find(|(name, _)| *name == v.name()) {
                    Some(&(_, val)) => coeff *= BigInt::from(val).pow(*e),
                    None => kept.push((v.clone(), *e)),
                }
            }
            if !coeff.is_zero() {
                *acc.entry(Monomial::from_powers(kept)).or_default() += coeff;
            }
        }
        Polynomial::from_map(acc)
    }

    /// Renames variable `from` to `to`, merging terms that collide.
    pub fn rename(&self, from: &Var, to: &Var) -> Polynomial {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            let powers = m
                .exps
                .iter()
                .map(|(v, e)| (if v == from { to.clone() } else { v.clone() }, *e));
            *acc.entry(Monomial::from_powers(powers)).or_default() += c;
        }
        Polynomial::from_map(acc)
    }

    /// Parses text such as `x + 2·x^2·y - 3` (`*` is accepted for `·`).
    /// Names listed in `markers` become marker variables.
    pub fn parse(text: &str, markers: &[&str]) -> Result<Polynomial> {
        let mut p = Polynomial::zero();
        let s: String = text.replace('·', "*");
        let bytes = s.as_bytes();
        let mut pos = 0;
        let skip = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos] == b' ' {
                *pos += 1;
            }
        };
        let number = |pos: &mut usize| {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            s[start..*pos].to_string()
        };
        let mut first = true;
        loop {
            skip(&mut pos);
            if pos >= bytes.len() {
                if first {
                    return Err(Error::parse(pos, "empty polynomial"));
                }
                break;
            }
            let mut sign = BigInt::one();
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
                skip(&mut pos);
            } else if !first {
                return Err(Error::parse(pos, "expected '+' or '-'"));
            }
            first = false;
            let mut coeff = BigInt::one();
            let mut powers = Vec::new();
            let mut factor = true;
            while factor {
                skip(&mut pos);
                match bytes.get(pos) {
                    Some(b) if b.is_ascii_digit() => {
                        let digits = number(&mut pos);
                        coeff *= digits.parse::<BigInt>().expect("digits");
                    }
                    Some(b) if b.is_ascii_alphabetic() => {
                        let start = pos;
                        while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
                            pos += 1;
                        }
                        let name = &s[start..pos];
                        let v = if markers.contains(&name) {
                            Var::marker(name)
                        } else {
                            Var::counting(name)
                        };
                        let mut e = 1;
                        if bytes.get(pos) == Some(&b'^') {
                            pos += 1;
                            let digits = number(&mut pos);
                            e = digits
                                .parse()
                                .map_err(|_| Error::parse(pos, "expected exponent"))?;
                        }
                        powers.push((v, e));
                    }
                    _ => return Err(Error::parse(pos, "expected coefficient or variable")),
                }
                skip(&mut pos);
                factor = bytes.get(pos) == Some(&b'*');
                if factor {
                    pos += 1;
                }
            }
            p.add_term(Monomial::from_powers(powers), sign * coeff);
        }
        Ok(p)
    }
}

fn power_cached(
    cache: &mut HashMap<(Var, u32), Polynomial>,
    v: &Var,
    base: &Polynomial,
    e: u32,
    max_degree: Option<u32>,
) -> Polynomial {
    if e == 0 {
        return Polynomial::one();
    }
    if e == 1 {
        return match max_degree {
            Some(d) => base.truncate(d),
            None => base.clone(),
        };
    }
    if let Some(p) = cache.get(&(v.clone(), e)) {
        return p.clone();
    }
    let prev = power_cached(cache, v, base, e - 1, max_degree);
    let p = prev.mul_truncated(base, max_degree);
    cache.insert((v.clone(), e), p.clone());
    p
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, other: &Polynomial) -> Polynomial {
        self + &(-other)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, other: &Polynomial) -> Polynomial {
        self.mul_truncated(other, None)
    }
}

macro_rules! owned_op {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;

            fn $f(self, other: Polynomial) -> Polynomial {
                (&self).$f(&other)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}·{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}
