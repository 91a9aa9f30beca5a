//! Reference sequences and the counters that reproduce them.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::families::narayana_class;
use crate::intervals::series_counts;
use crate::patterns::interior_count;
use crate::poly::{Monomial, Polynomial};

/// Balanced trees by node count (OEIS A006265).
pub const BALANCED: &[u64] = &[
    1, 1, 2, 1, 4, 6, 4, 17, 32, 44, 60, 70, 184, 476, 872, 1553, 2720, 4288, 6312, 9004,
];

pub const MAXIMAL_BALANCED: &[u64] = &[
    1, 1, 1, 1, 2, 2, 2, 4, 6, 9, 11, 13, 22, 38, 60, 89, 128, 183, 256, 353, 512, 805, 1336,
    2221, 3594, 5665, 8774, 13433, 20359, 30550, 45437, 67086, 98491, 144492, 213876,
];

pub const BALANCED_INTERVALS: &[u64] = &[
    1, 1, 3, 1, 7, 12, 6, 52, 119, 137, 195, 231, 1019, 3503, 6593, 12616, 26178, 43500, 64157,
    94688, 232560, 817757, 2233757, 5179734, 11676838, 24867480,
];

pub const MAXIMAL_INTERVALS: &[u64] = &[
    1, 1, 1, 1, 3, 2, 2, 6, 9, 15, 15, 17, 41, 77, 125, 178, 252, 376, 531, 740, 1192, 2179, 4273,
    7738, 13012, 20776, 32389, 49841, 75457, 113011, 168888, 252881, 379348,
];

/// Interior balanced trees by height.
pub const INTERIOR_BY_HEIGHT: &[u64] = &[
    1, 1, 2, 1, 2, 2, 4, 8, 32, 256, 8192, 2097152, 17179869184,
];

pub const WEIGHT_BALANCED: &[u64] = &[
    1, 1, 2, 1, 4, 4, 4, 1, 8, 16, 32, 16, 32, 16, 8, 1, 16, 64, 256, 256, 1024, 1024,
];

pub const ZERO_ONE_BALANCED: &[u64] = &[1, 1, 1, 1, 1, 2, 2, 2, 3, 5, 7, 9, 11, 13, 17, 26, 42, 66];

/// Narayana numbers (OEIS A001263), rows `n = 1..=8`.
pub const NARAYANA: &[&[u64]] = &[
    &[1],
    &[1, 1],
    &[1, 3, 1],
    &[1, 6, 6, 1],
    &[1, 10, 20, 10, 1],
    &[1, 15, 50, 50, 15, 1],
    &[1, 21, 105, 175, 105, 21, 1],
    &[1, 28, 196, 490, 490, 196, 28, 1],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Balanced,
    MaximalBalanced,
    BalancedIntervals,
    MaximalIntervals,
    InteriorByHeight,
    WeightBalanced,
    ZeroOneBalanced,
    /// Row `n` of the Narayana table, indexed by `k`.
    Narayana(usize),
}

impl Family {
    pub const NAMES: [&'static str; 8] = [
        "balanced",
        "maximal-balanced",
        "balanced-intervals",
        "maximal-intervals",
        "interior-by-height",
        "weight-balanced",
        "zero-one-balanced",
        "narayana",
    ];

    /// Expected values, by index.
    pub fn fixture(&self) -> Vec<u64> {
        match self {
            Family::Balanced => BALANCED.to_vec(),
            Family::MaximalBalanced => MAXIMAL_BALANCED.to_vec(),
            Family::BalancedIntervals => BALANCED_INTERVALS.to_vec(),
            Family::MaximalIntervals => MAXIMAL_INTERVALS.to_vec(),
            Family::InteriorByHeight => INTERIOR_BY_HEIGHT.to_vec(),
            Family::WeightBalanced => WEIGHT_BALANCED.to_vec(),
            Family::ZeroOneBalanced => ZERO_ONE_BALANCED.to_vec(),
            Family::Narayana(n) => match n {
                0 => vec![1],
                n => NARAYANA.get(n - 1).map_or_else(Vec::new, |r| r.to_vec()),
            },
        }
    }

    /// Computed values for indices `0..=max`.
    pub fn compute(&self, max: usize) -> Result<Vec<BigInt>> {
        let from_series = |g: &str| -> Result<Vec<BigInt>> {
            Ok(series_counts(g, max)?
                .iter()
                .map(|p| p.coefficient(&Monomial::one()))
                .collect())
        };
        match self {
            Family::Balanced => from_series("bal"),
            Family::MaximalBalanced => from_series("max"),
            Family::BalancedIntervals => from_series("bi"),
            Family::MaximalIntervals => Ok(series_counts("mbi_xi", max)?
                .iter()
                .map(coefficient_sum)
                .collect()),
            Family::InteriorByHeight => Ok((0..=max).map(interior_count).collect()),
            Family::WeightBalanced => Ok(weight_balanced_counts(max)),
            Family::ZeroOneBalanced => from_series("bal01"),
            Family::Narayana(n) => {
                let top = n.saturating_sub(1).min(max);
                (0..=top)
                    .map(|k| narayana_class(*n, k).map(|c| BigInt::from(c.len())))
                    .collect()
            }
        }
    }
}

fn coefficient_sum(p: &Polynomial) -> BigInt {
    p.terms().map(|(_, c)| c.clone()).sum()
}

/// Weight-balanced counts from the split recurrence.
pub fn weight_balanced_counts(max: usize) -> Vec<BigInt> {
    let mut w: Vec<BigInt> = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let v = match n {
            0 | 1 => BigInt::from(1),
            n if n % 2 == 1 => &w[n / 2] * &w[n / 2],
            n => BigInt::from(2) * &w[n / 2] * &w[n / 2 - 1],
        };
        w.push(v);
    }
    w
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Narayana(n) => write!(f, "narayana({n})"),
            other => {
                let i = [
                    Family::Balanced,
                    Family::MaximalBalanced,
                    Family::BalancedIntervals,
                    Family::MaximalIntervals,
                    Family::InteriorByHeight,
                    Family::WeightBalanced,
                    Family::ZeroOneBalanced,
                ]
                .iter()
                .position(|g| g == other)
                .expect("named family");
                f.write_str(Self::NAMES[i])
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Family names; Narayana rows are written `narayana(n)`.
    fn from_str(s: &str) -> Result<Self> {
        let named: HashMap<&str, Family> = Self::NAMES
            .iter()
            .copied()
            .zip([
                Family::Balanced,
                Family::MaximalBalanced,
                Family::BalancedIntervals,
                Family::MaximalIntervals,
                Family::InteriorByHeight,
                Family::WeightBalanced,
                Family::ZeroOneBalanced,
            ])
            .collect();
        if let Some(f) = named.get(s) {
            return Ok(*f);
        }
        s.strip_prefix("narayana(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.trim().parse().ok())
            .map(Family::Narayana)
            .ok_or_else(|| Error::unknown("family", s))
    }
}

/// Computed values next to the expected ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceReport {
    pub family: Family,
    pub computed: Vec<BigInt>,
    /// `None` past the end of the fixture.
    pub expected: Vec<Option<u64>>,
}

impl SequenceReport {
    pub fn new(family: Family, max: usize) -> Result<Self> {
        let computed = family.compute(max)?;
        let fixture = family.fixture();
        let expected = (0..computed.len()).map(|i| fixture.get(i).copied()).collect();
        Ok(SequenceReport {
            family,
            computed,
            expected,
        })
    }

    /// Per index: `Some(true)` on agreement, `None` when nothing is expected.
    pub fn verdicts(&self) -> Vec<Option<bool>> {
        self.computed
            .iter()
            .zip(&self.expected)
            .map(|(c, e)| e.map(|e| *c == BigInt::from(e)))
            .collect()
    }

    pub fn all_match(&self) -> bool {
        self.verdicts().iter().all(|v| *v != Some(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for name in Family::NAMES.iter().filter(|n| **n != "narayana") {
            assert_eq!(name.parse::<Family>().unwrap().to_string(), *name);
        }
        assert_eq!("narayana(7)".parse::<Family>().unwrap(), Family::Narayana(7));
        assert!("catalan".parse::<Family>().is_err());
    }

    #[test]
    fn fixtures_reproduced() {
        let bounds = [
            (Family::Balanced, 19),
            (Family::MaximalBalanced, 34),
            (Family::BalancedIntervals, 25),
            (Family::MaximalIntervals, 32),
            (Family::InteriorByHeight, 12),
            (Family::WeightBalanced, 21),
            (Family::ZeroOneBalanced, 17),
            (Family::Narayana(7), 10),
        ];
        for (family, max) in bounds {
            let report = SequenceReport::new(family, max).unwrap();
            assert!(report.all_match(), "{family}");
            assert!(report.expected.iter().all(Option::is_some), "{family}");
        }
    }

    #[test]
    fn report_flags_unknown_tail() {
        let report = SequenceReport::new(Family::WeightBalanced, 23).unwrap();
        assert_eq!(report.verdicts()[22], None);
        assert_eq!(report.computed[23], BigInt::from(256));
        assert!(report.all_match());
    }

    #[test]
    fn narayana_rows_are_symmetric() {
        for row in NARAYANA {
            assert!(row.iter().eq(row.iter().rev()));
        }
    }
}
