//! Exceptional sets on the positive half-line, their weight
//! `q_E(r) = m ln(e r / m)` with `m = mes(E ∩ [0, r])`, and an empirical
//! probe of the bound of `|u|` over `E` by that weight.

use serde::{Deserialize, Serialize};

use crate::error::{check_interval, Error, Result};
use crate::grid::validate_increasing;
use crate::measure::ComplexPoint;
use crate::potential::{AxisFunction, FunctionModel};
use crate::quad::{integrate_log_panels, QuadSpec};

/// A finite union of bounded intervals in `[0, inf)`, stored merged and sorted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExcision", into = "RawExcision")]
pub struct ExcisionSet {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawExcision {
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<RawExcision> for ExcisionSet {
    type Error = Error;

    fn try_from(raw: RawExcision) -> Result<Self> {
        ExcisionSet::new(raw.intervals.into_iter().map(|p| (p[0], p[1])).collect())
    }
}

impl From<ExcisionSet> for RawExcision {
    fn from(e: ExcisionSet) -> Self {
        RawExcision {
            intervals: e.intervals.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl ExcisionSet {
    /// Builds the set, merging overlapping or touching intervals.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "excision interval [{lo}, {hi}] must satisfy 0 <= lo < hi < inf"
                )));
            }
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 < x);
        i < self.intervals.len() && self.intervals[i].0 <= x
    }

    /// `mes(E ∩ [0, r])`.
    pub fn measure_upto(&self, r: f64) -> f64 {
        let mut m = 0.0;
        for &(lo, hi) in &self.intervals {
            if lo >= r {
                break;
            }
            m += hi.min(r) - lo;
        }
        m
    }

    /// `m ln(e r / m)` with `m = mes(E ∩ [0, r])`; zero when `m = 0`.
    pub fn q_e(&self, r: f64) -> f64 {
        let m = self.measure_upto(r);
        if m > 0.0 {
            m * (1.0 + (r / m).ln())
        } else {
            0.0
        }
    }

    /// `E ∩ [a, b]` as a list of nonempty pieces.
    pub fn clip(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .filter_map(|&(lo, hi)| {
                let (l, h) = (lo.max(a), hi.min(b));
                (h > l).then_some((l, h))
            })
            .collect()
    }
}

/// `q_E` extended evenly to the whole line.
impl AxisFunction for ExcisionSet {
    fn value(&self, x: f64) -> f64 {
        self.q_e(x.abs())
    }

    fn kinks(&self) -> Vec<f64> {
        self.intervals.iter().flat_map(|&(a, b)| [a, b]).collect()
    }
}

/// Outcome of [`lemma_le_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcisionProbe {
    /// `(r, R, lhs, rhs, c)` with `lhs = int_{E∩(r,R]} |u|/x^2`,
    /// `rhs = int_r^R q_E/t^2` and `c = lhs / (rhs + 1)`.
    pub rows: Vec<[f64; 5]>,
    pub c_max: f64,
    /// Largest `c` over pairs with `R <= R_max / 2`.
    pub c_half: f64,
    /// `c_max <= 1.05 c_half` (up to `1e-12`).
    pub stable: bool,
}

/// Fits the smallest `c` with `int_{E∩(r,R]} |u(x)|/x^2 dx <= c (int_r^R q_E(t)/t^2 dt + 1)`
/// on every grid pair and checks that it stops growing across the final
/// doubling of the range.
pub fn lemma_le_probe(u: &FunctionModel, e: &ExcisionSet, r_grid: &[f64], spec: &QuadSpec) -> Result<ExcisionProbe> {
    validate_increasing(r_grid, "excision probe")?;
    if r_grid.len() < 2 {
        return Err(Error::InvalidArgument("excision probe needs at least two grid points".into()));
    }
    let n = r_grid.len();
    let mut lhs_prefix = vec![0.0; n];
    let mut rhs_prefix = vec![0.0; n];
    for i in 1..n {
        let (a, b) = (r_grid[i - 1], r_grid[i]);
        let mut lhs = 0.0;
        for (lo, hi) in e.clip(a, b) {
            let zeros = u.real_zeros_in(lo, hi);
            if zeros.iter().any(|&z| z == lo || z == hi) {
                return Err(Error::ZeroAtEndpoint(lo));
            }
            let f = |x: f64| u.eval(ComplexPoint::new(x, 0.0)).abs() / (x * x);
            lhs += integrate_log_panels(&f, lo, hi, &zeros, spec)?.value;
        }
        let g = |t: f64| e.q_e(t) / (t * t);
        let rhs = integrate_log_panels(&g, a, b, &e.kinks(), spec)?.value;
        lhs_prefix[i] = lhs_prefix[i - 1] + lhs;
        rhs_prefix[i] = rhs_prefix[i - 1] + rhs;
    }
    let big = r_grid[n - 1];
    let mut rows = Vec::with_capacity(n * (n - 1) / 2);
    let (mut c_max, mut c_half) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            check_interval(r_grid[i], r_grid[j])?;
            let lhs = lhs_prefix[j] - lhs_prefix[i];
            let rhs = rhs_prefix[j] - rhs_prefix[i];
            let c = (lhs / (rhs + 1.0)).max(0.0);
            c_max = c_max.max(c);
            if r_grid[j] <= 0.5 * big {
                c_half = c_half.max(c);
            }
            rows.push([r_grid[i], r_grid[j], lhs, rhs, c]);
        }
    }
    Ok(ExcisionProbe {
        rows,
        c_max,
        c_half,
        stable: c_max <= 1.05 * c_half + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_space;
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn measure_examples() {
        let e = ExcisionSet::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(e.measure_upto(0.5), 0.5);
        let e2 = ExcisionSet::new(vec![(2.0, 3.0), (0.0, 1.0)]).unwrap();
        assert_eq!(e2.measure_upto(2.5), 1.5);
        assert_eq!(ExcisionSet::empty().measure_upto(7.0), 0.0);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(ExcisionSet::empty().q_e(3.0), 0.0);
        let e = ExcisionSet::new(vec![(0.0, 1.0)]).unwrap();
        assert!((e.q_e(E) - 2.0).abs() < 1e-15);
        let full = ExcisionSet::new(vec![(0.0, 5.0)]).unwrap();
        assert!((full.q_e(5.0) - 5.0).abs() < 1e-15);
        assert!((full.q_e(3.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn merging_and_json() {
        let e = ExcisionSet::new(vec![(3.0, 4.0), (0.5, 2.0), (1.5, 3.0), (6.0, 7.0)]).unwrap();
        assert_eq!(e.intervals(), &[(0.5, 4.0), (6.0, 7.0)]);
        assert!(e.contains(4.0) && !e.contains(5.0) && e.contains(0.5));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"intervals":[[0.5,4.0],[6.0,7.0]]}"#);
        let back: ExcisionSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<ExcisionSet>(r#"{"intervals":[[2,1]]}"#).is_err());
        assert!(ExcisionSet::new(vec![(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn probe_examples() {
        let grid = log_space(1.0, 1e3, 8).unwrap();
        let spec = QuadSpec::default();
        let sin = FunctionModel::log_abs_sin_pi();
        let e = ExcisionSet::new(vec![(2.25, 2.75), (5.25, 5.75)]).unwrap();
        let p = lemma_le_probe(&sin, &e, &grid, &spec).unwrap();
        assert!(p.c_max.is_finite() && p.c_max > 0.0);
        assert!(p.stable);
        let p = lemma_le_probe(&sin, &ExcisionSet::empty(), &grid, &spec).unwrap();
        assert_eq!(p.c_max, 0.0);
        let p = lemma_le_probe(&FunctionModel::radial_linear(0.0), &e, &grid, &spec).unwrap();
        assert!(p.rows.iter().all(|row| row[2] == 0.0));
    }

    #[test]
    fn probe_handles_zero_inside_set() {
        let grid = log_space(1.0, 100.0, 4).unwrap();
        let e = ExcisionSet::new(vec![(2.5, 3.5)]).unwrap();
        let p = lemma_le_probe(&FunctionModel::log_abs_sin_pi(), &e, &grid, &QuadSpec::default()).unwrap();
        assert!(p.c_max.is_finite());
    }

    fn union_strategy() -> impl Strategy<Value = ExcisionSet> {
        prop::collection::vec((0.0f64..50.0, 0.01f64..10.0), 0..8)
            .prop_map(|v| ExcisionSet::new(v.into_iter().map(|(a, w)| (a, a + w)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn weight_is_monotone_and_bounded(e in union_strategy(), rs in prop::collection::vec(0.001f64..100.0, 2..20)) {
            let mut rs = rs;
            rs.sort_by(f64::total_cmp);
            for w in rs.windows(2) {
                prop_assert!(e.q_e(w[0]) <= e.q_e(w[1]) + 1e-12);
            }
            for &r in &rs {
                prop_assert!(e.q_e(r) <= r * (1.0 + 1e-14));
            }
        }

        #[test]
        fn weight_is_monotone_in_set(e in union_strategy(), extra in union_strategy(), r in 0.001f64..100.0) {
            let mut both = e.intervals().to_vec();
            both.extend_from_slice(extra.intervals());
            let bigger = ExcisionSet::new(both).unwrap();
            prop_assert!(e.q_e(r) <= bigger.q_e(r) + 1e-12);
        }

        #[test]
        fn measure_is_lipschitz(e in union_strategy(), a in 0.0f64..80.0, b in 0.0f64..80.0) {
            prop_assert!((e.measure_upto(a) - e.measure_upto(b)).abs() <= (a - b).abs() + 1e-12);
        }
    }
}
