use serde::{Deserialize, Serialize};

use super::profile::ProfileKind;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// `∫_E dr / r`.
    Logarithmic,
    /// `∫_E dr`.
    Linear,
    /// `Σ_{n ∈ E} 1 / n`.
    DiscreteLogarithmic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Members {
    /// Disjoint, sorted closed intervals.
    Intervals(Vec<(f64, f64)>),
    /// Sorted distinct integers.
    Integers(Vec<i64>),
}

/// Truncated measures of a set at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureRow {
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logarithmic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrete_logarithmic: Option<f64>,
}

/// One evaluated grid point: the tested quantity and whether the point
/// belongs to the set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SetSample {
    pub x: f64,
    pub value: f64,
    pub member: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalSet {
    pub kind: ProfileKind,
    pub members: Members,
    pub measures: Vec<MeasureRow>,
    /// Raw per-point values behind the membership decisions; empty for sets
    /// built directly from members.
    pub samples: Vec<SetSample>,
}

fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

impl ExceptionalSet {
    /// A union of closed intervals; overlapping or touching pieces merge.
    pub fn intervals(iv: Vec<(f64, f64)>) -> Result<Self> {
        if iv.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::validation("intervals need finite a <= b"));
        }
        Ok(ExceptionalSet {
            kind: ProfileKind::ContinuousSampled,
            members: Members::Intervals(merge(iv)),
            measures: Vec::new(),
            samples: Vec::new(),
        })
    }

    pub fn integers(mut n: Vec<i64>) -> Self {
        n.sort_unstable();
        n.dedup();
        ExceptionalSet {
            kind: ProfileKind::Discrete,
            members: Members::Integers(n),
            measures: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub(crate) fn from_samples(kind: ProfileKind, grid: &[f64], samples: Vec<SetSample>) -> Self {
        let mut set = match kind {
            ProfileKind::Discrete => {
                ExceptionalSet::integers(samples.iter().filter(|s| s.member).map(|s| s.x as i64).collect())
            }
            ProfileKind::ContinuousSampled => {
                // Each member sample owns the cell up to the next grid point.
                let cells = samples
                    .iter()
                    .filter(|s| s.member)
                    .map(|s| {
                        let i = grid.partition_point(|&g| g <= s.x);
                        (s.x, grid.get(i).copied().unwrap_or(s.x))
                    })
                    .collect();
                ExceptionalSet::intervals(cells).expect("grid cells are valid")
            }
        };
        if let (Some(first), Some(last)) = (samples.first(), samples.last()) {
            set.measures = set.measure_table(first.x, last.x, 32);
        }
        set.samples = samples;
        set
    }

    pub fn is_empty(&self) -> bool {
        match &self.members {
            Members::Intervals(iv) => iv.is_empty(),
            Members::Integers(n) => n.is_empty(),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match &self.members {
            Members::Intervals(iv) => iv.iter().any(|&(a, b)| a <= x && x <= b),
            Members::Integers(n) => x.fract() == 0.0 && n.binary_search(&(x as i64)).is_ok(),
        }
    }

    /// Largest point of the set, if any.
    pub fn sup(&self) -> Option<f64> {
        match &self.members {
            Members::Intervals(iv) => iv.last().map(|p| p.1),
            Members::Integers(n) => n.last().map(|&v| v as f64),
        }
    }

    pub fn is_subset_of(&self, other: &ExceptionalSet) -> bool {
        match (&self.members, &other.members) {
            (Members::Intervals(a), Members::Intervals(b)) => {
                a.iter().all(|&(x, y)| b.iter().any(|&(u, v)| u <= x && y <= v))
            }
            (Members::Integers(a), Members::Integers(b)) => a.iter().all(|n| b.binary_search(n).is_ok()),
            _ => false,
        }
    }

    /// Truncated measures at `rows` geometrically spaced radii in
    /// `[from, to]` (linearly spaced when `from <= 0`).
    pub fn measure_table(&self, from: f64, to: f64, rows: usize) -> Vec<MeasureRow> {
        let rows = rows.max(2);
        (0..rows)
            .map(|i| {
                let t = i as f64 / (rows - 1) as f64;
                let r = if from > 0.0 {
                    from * (to / from).powf(t)
                } else {
                    from + (to - from) * t
                };
                let r = if i == rows - 1 { to } else { r };
                let m = |k| measure(self, k, r).ok();
                MeasureRow {
                    r,
                    logarithmic: m(MeasureKind::Logarithmic),
                    linear: m(MeasureKind::Linear),
                    discrete_logarithmic: m(MeasureKind::DiscreteLogarithmic),
                }
            })
            .collect()
    }
}

/// Measure of `set ∩ (−∞, r_max]`.
pub fn measure(set: &ExceptionalSet, kind: MeasureKind, r_max: f64) -> Result<f64> {
    match (&set.members, kind) {
        (Members::Intervals(iv), MeasureKind::Linear) => {
            Ok(iv.iter().filter(|p| p.0 < r_max).map(|&(a, b)| b.min(r_max) - a).sum())
        }
        (Members::Intervals(iv), MeasureKind::Logarithmic) => {
            if iv.first().is_some_and(|p| p.0 <= 0.0) {
                return Err(Error::domain("logarithmic measure needs intervals in (0, ∞)"));
            }
            Ok(iv
                .iter()
                .filter(|p| p.0 < r_max)
                .map(|&(a, b)| (b.min(r_max) / a).ln())
                .sum())
        }
        (Members::Integers(n), MeasureKind::DiscreteLogarithmic) => {
            if n.first().is_some_and(|&v| v <= 0) {
                return Err(Error::domain("discrete logarithmic measure needs positive integers"));
            }
            Ok(n.iter()
                .take_while(|&&v| v as f64 <= r_max)
                .map(|&v| 1.0 / v as f64)
                .sum())
        }
        (Members::Intervals(_), MeasureKind::DiscreteLogarithmic) => {
            Err(Error::domain("discrete logarithmic measure applies to integer sets"))
        }
        (Members::Integers(_), _) => Err(Error::domain("logarithmic and linear measures apply to interval sets")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn measure_examples() {
        let e = ExceptionalSet::intervals(vec![(1.0, E)]).unwrap();
        assert!((measure(&e, MeasureKind::Logarithmic, 100.0).unwrap() - 1.0).abs() < 1e-15);

        let e = ExceptionalSet::intervals(vec![(8.0, 16.0), (2.0, 4.0)]).unwrap();
        assert!((measure(&e, MeasureKind::Logarithmic, 100.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(measure(&e, MeasureKind::Linear, 100.0).unwrap(), 10.0);
        assert_eq!(measure(&e, MeasureKind::Linear, 10.0).unwrap(), 4.0);

        let e = ExceptionalSet::integers((1..=10).collect());
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        assert!((measure(&e, MeasureKind::DiscreteLogarithmic, 10.0).unwrap() - 2.928_968_253_968_254).abs() < 1e-12);
        assert_eq!(measure(&e, MeasureKind::DiscreteLogarithmic, 10.0).unwrap(), h10);

        assert!(matches!(measure(&e, MeasureKind::Linear, 10.0), Err(Error::Domain(_))));
        let iv = ExceptionalSet::intervals(vec![(1.0, 2.0)]).unwrap();
        assert!(matches!(
            measure(&iv, MeasureKind::DiscreteLogarithmic, 10.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn merging_and_inclusion() {
        let e = ExceptionalSet::intervals(vec![(3.0, 4.0), (1.0, 2.0), (2.0, 2.5)]).unwrap();
        assert_eq!(e.members, Members::Intervals(vec![(1.0, 2.5), (3.0, 4.0)]));
        let small = ExceptionalSet::intervals(vec![(1.5, 2.0)]).unwrap();
        assert!(small.is_subset_of(&e));
        assert!(!e.is_subset_of(&small));
        assert!(e.contains(3.5) && !e.contains(2.7));
    }

    fn interval_set() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((1.0f64..100.0, 0.0f64..5.0), 0..6)
            .prop_map(|v| v.into_iter().map(|(a, w)| (a, a + w)).collect())
    }

    proptest! {
        #[test]
        fn measures_are_monotone_in_radius(iv in interval_set(), r1 in 1.0f64..120.0, r2 in 1.0f64..120.0) {
            let e = ExceptionalSet::intervals(iv).unwrap();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            for k in [MeasureKind::Logarithmic, MeasureKind::Linear] {
                prop_assert!(measure(&e, k, lo).unwrap() <= measure(&e, k, hi).unwrap() + 1e-12);
            }
        }

        #[test]
        fn measures_add_over_disjoint_sets(iv in interval_set(), split in 1.0f64..110.0, r in 1.0f64..120.0) {
            // Cut each interval at `split` into two disjoint families.
            let e = ExceptionalSet::intervals(iv).unwrap();
            let Members::Intervals(pieces) = &e.members else { unreachable!() };
            let left: Vec<_> = pieces.iter().filter(|p| p.0 < split).map(|&(a, b)| (a, b.min(split))).collect();
            let right: Vec<_> = pieces.iter().filter(|p| p.1 > split).map(|&(a, b)| (a.max(split), b)).collect();
            let l = ExceptionalSet::intervals(left).unwrap();
            let rt = ExceptionalSet::intervals(right).unwrap();
            for k in [MeasureKind::Logarithmic, MeasureKind::Linear] {
                let whole = measure(&e, k, r).unwrap();
                let parts = measure(&l, k, r).unwrap() + measure(&rt, k, r).unwrap();
                prop_assert!((whole - parts).abs() < 1e-9);
            }
        }

        #[test]
        fn discrete_measure_is_additive(a in proptest::collection::btree_set(1i64..200, 0..30), b in proptest::collection::btree_set(1i64..200, 0..30)) {
            let only_b: Vec<i64> = b.difference(&a).copied().collect();
            let union: Vec<i64> = a.union(&b).copied().collect();
            let k = MeasureKind::DiscreteLogarithmic;
            let sa = ExceptionalSet::integers(a.into_iter().collect());
            let sb = ExceptionalSet::integers(only_b);
            let su = ExceptionalSet::integers(union);
            let lhs = measure(&su, k, 150.0).unwrap();
            let rhs = measure(&sa, k, 150.0).unwrap() + measure(&sb, k, 150.0).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
