//! Finite-range estimators of the logarithmic block-densities of an
//! interval function `l(r, R)`, the submeasure axiom checks and the
//! sum/max closures.
//!
//! Every limit over `r` is replaced by a maximum over a log-spaced grid with
//! `r a <= r_max`; the per-`a` table is always returned for inspection.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_interval, Error, Result};
use crate::grid::{log_space, validate_increasing};
use crate::measure::{AtomicMeasure, Side};
use crate::potential::{j_real, AxisFunction, FunctionModel};
use crate::quad::QuadSpec;

type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A pure map `(r, R) -> l(r, R)` defined for `r0 <= r < R`.
#[derive(Clone)]
pub struct IntervalFunction {
    eval: EvalFn,
    pub r0: f64,
    pub label: String,
}

impl std::fmt::Debug for IntervalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntervalFunction")
            .field("label", &self.label)
            .field("r0", &self.r0)
            .finish()
    }
}

impl IntervalFunction {
    pub fn new(label: impl Into<String>, r0: f64, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            r0,
            label: label.into(),
        }
    }

    pub fn eval(&self, r: f64, big_r: f64) -> f64 {
        (self.eval)(r, big_r)
    }

    /// `ln(R/r)`.
    pub fn log_ratio() -> Self {
        Self::new("ln(R/r)", f64::MIN_POSITIVE, |r, big_r| (big_r / r).ln())
    }

    /// `c l`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self::new(format!("{c}*({})", self.label), self.r0, move |r, big_r| c * inner(r, big_r))
    }

    /// Logarithmic submeasure `max(l_rh, l_lh)` of an atomic measure.
    pub fn submeasure(mu: Arc<AtomicMeasure>) -> Self {
        let label = format!("l[{}]", mu.label());
        Self::new(label, f64::MIN_POSITIVE, move |r, big_r| {
            mu.l_submeasure(r, big_r).unwrap_or(f64::NAN)
        })
    }

    /// One-sided logarithmic measure of an atomic measure.
    pub fn side(mu: Arc<AtomicMeasure>, side: Side) -> Self {
        let label = format!("l_{}[{}]", if side == Side::Right { "rh" } else { "lh" }, mu.label());
        Self::new(label, f64::MIN_POSITIVE, move |r, big_r| {
            mu.l_side(side, r, big_r).unwrap_or(f64::NAN)
        })
    }

    /// An additive function `l(r, R) = F(R) - F(r)` with `F` tabulated at
    /// `nodes` from the segment integrals `seg(a, b)`. Off-node arguments
    /// integrate from the nearest node below. Requires `r0 = nodes[0]`.
    pub fn additive(
        label: impl Into<String>,
        nodes: &[f64],
        seg: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        validate_increasing(nodes, "additive interval function")?;
        let parts: Vec<f64> = nodes
            .par_windows(2)
            .map(|w| seg(w[0], w[1]))
            .collect::<Result<_>>()?;
        let mut prefix = Vec::with_capacity(nodes.len());
        prefix.push(0.0);
        for p in parts {
            prefix.push(prefix.last().unwrap() + p);
        }
        let nodes = nodes.to_vec();
        let r0 = nodes[0];
        let primitive = move |x: f64| -> f64 {
            let i = nodes.partition_point(|&t| t <= x);
            if i == 0 {
                return f64::NAN;
            }
            let base = nodes[i - 1];
            if base == x {
                prefix[i - 1]
            } else {
                prefix[i - 1] + seg(base, x).unwrap_or(f64::NAN)
            }
        };
        Ok(Self::new(label, r0, move |r, big_r| primitive(big_r) - primitive(r)))
    }

    /// `J_{iR}(r, R; u)` tabulated at `nodes`.
    pub fn j_imag(model: Arc<FunctionModel>, nodes: &[f64], spec: QuadSpec) -> Result<Self> {
        let label = format!("J_iR[{}]", model.metadata);
        Self::additive(label, nodes, move |a, b| model.j_imag(a, b, &spec))
    }

    /// `J_R(r, R; v)` tabulated at `nodes`.
    pub fn j_real(
        label: impl Into<String>,
        v: Arc<dyn AxisFunction + Send + Sync>,
        nodes: &[f64],
        spec: QuadSpec,
    ) -> Result<Self> {
        Self::additive(label, nodes, move |a, b| j_real(v.as_ref(), a, b, &spec))
    }
}

/// Pointwise sum; both inputs must share `r0`.
pub fn combine_sum(l1: &IntervalFunction, l2: &IntervalFunction) -> Result<IntervalFunction> {
    combine(l1, l2, "+", |a, b| a + b)
}

/// Pointwise maximum; both inputs must share `r0`.
pub fn combine_max(l1: &IntervalFunction, l2: &IntervalFunction) -> Result<IntervalFunction> {
    combine(l1, l2, "max", f64::max)
}

fn combine(l1: &IntervalFunction, l2: &IntervalFunction, op: &str, f: fn(f64, f64) -> f64) -> Result<IntervalFunction> {
    if l1.r0 != l2.r0 {
        return Err(Error::InvalidArgument(format!(
            "interval functions have different r0 ({} vs {})",
            l1.r0, l2.r0
        )));
    }
    let (a, b) = (l1.eval.clone(), l2.eval.clone());
    Ok(IntervalFunction::new(
        format!("{op}({}, {})", l1.label, l2.label),
        l1.r0,
        move |r, big_r| f(a(r, big_r), b(r, big_r)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityVariant {
    Bar,
    Underbar,
    Inf,
    B,
}

impl DensityVariant {
    pub fn name(self) -> &'static str {
        match self {
            DensityVariant::Bar => "bar",
            DensityVariant::Underbar => "underbar",
            DensityVariant::Inf => "inf",
            DensityVariant::B => "b",
        }
    }
}

/// One row of an estimator table: `l(r, a r)` and its ratio to `ln a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub a: f64,
    pub r: f64,
    pub l: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    /// For the `a`-based variants: `(a, max_r l(r, a r)/ln a)`.
    /// For `b`: `(probe b, growth of the grid supremum over the last doubling)`.
    pub per_a_values: Vec<(f64, f64)>,
    pub r_max: f64,
    pub variant: DensityVariant,
    /// Final bisection bracket of the `b` variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<(f64, f64)>,
    #[serde(skip)]
    pub rows: Vec<DensityRow>,
}

/// Grids and tolerances shared by the estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub a_grid: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub per_decade: usize,
    pub b_tol: f64,
    /// Margin used by density comparisons.
    pub tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            a_grid: vec![10.0, 100.0, 1000.0],
            r_min: 10.0,
            r_max: 1e6,
            per_decade: 32,
            b_tol: 0.02,
            tol: 0.1,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        validate_increasing(&self.a_grid, "a_grid")?;
        if self.a_grid[0] <= 1.0 {
            return Err(Error::InvalidArgument("a_grid entries must exceed 1".into()));
        }
        if !(self.b_tol > 0.0) || !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument("b_tol must be > 0 and tol >= 0".into()));
        }
        if !(self.r_min > 0.0 && self.r_max > self.r_min) {
            return Err(Error::InvalidArgument(format!(
                "estimator range needs 0 < r_min < r_max (got {}, {})",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    pub fn r_grid(&self) -> Result<Vec<f64>> {
        log_space(self.r_min, self.r_max, self.per_decade)
    }

    /// Every argument the `a`-based estimators evaluate: the r-grid and its
    /// images `r a` inside the range.
    pub fn nodes(&self) -> Result<Vec<f64>> {
        let grid = self.r_grid()?;
        let mut nodes = grid.clone();
        for &a in &self.a_grid {
            nodes.extend(grid.iter().map(|r| r * a).filter(|&x| x <= self.r_max));
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        Ok(nodes)
    }

    /// Configuration for the picture dilated by `a`: radii scale by `a`,
    /// densities (and hence the comparison margin) by `1/a`.
    pub fn dilated(&self, a: f64) -> Self {
        Self {
            r_min: self.r_min * a,
            r_max: self.r_max * a,
            b_tol: self.b_tol / a,
            tol: self.tol / a,
            ..self.clone()
        }
    }

    /// Same configuration with another r-grid density.
    pub fn with_grid_scale(&self, per_decade: usize) -> Self {
        Self {
            per_decade,
            ..self.clone()
        }
    }
}

/// Builds the per-`a` table of `max_r l(r, a r)/ln a` with `r a <= r_max`.
fn per_a_table(l: &IntervalFunction, a_grid: &[f64], r_grid: &[f64]) -> Result<(Vec<(f64, f64)>, Vec<DensityRow>, f64)> {
    validate_increasing(a_grid, "a_grid")?;
    validate_increasing(r_grid, "r_grid")?;
    if a_grid[0] <= 1.0 {
        return Err(Error::InvalidArgument("a_grid entries must exceed 1".into()));
    }
    if r_grid[0] < l.r0 {
        return Err(Error::EmptyRange(format!(
            "r-grid starts at {} below r0 = {} of `{}`",
            r_grid[0], l.r0, l.label
        )));
    }
    let r_max = *r_grid.last().unwrap();
    let a_max = *a_grid.last().unwrap();
    if r_max / a_max < r_grid[0] {
        return Err(Error::EmptyRange(format!(
            "r_max / a_max = {} is below the first grid radius {}",
            r_max / a_max,
            r_grid[0]
        )));
    }
    let mut per_a = Vec::with_capacity(a_grid.len());
    let mut rows = Vec::new();
    for &a in a_grid {
        let ln_a = a.ln();
        let these: Vec<DensityRow> = r_grid
            .par_iter()
            .filter(|&&r| r * a <= r_max * (1.0 + 1e-12))
            .map(|&r| {
                let v = l.eval(r, r * a);
                DensityRow {
                    a,
                    r,
                    l: v,
                    ratio: v / ln_a,
                }
            })
            .collect();
        if let Some(bad) = these.iter().find(|row| !row.l.is_finite()) {
            return Err(Error::NonFinite { at: bad.r, value: bad.l });
        }
        let best = these.iter().map(|row| row.ratio).fold(f64::NEG_INFINITY, f64::max);
        per_a.push((a, best));
        rows.extend(these);
    }
    Ok((per_a, rows, r_max))
}

fn estimate(variant: DensityVariant, per_a: Vec<(f64, f64)>, rows: Vec<DensityRow>, r_max: f64) -> DensityEstimate {
    let value = match variant {
        DensityVariant::Bar => per_a.last().unwrap().1,
        DensityVariant::Underbar => {
            let tail = per_a.len() / 2;
            per_a[tail..].iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
        }
        _ => per_a.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
    };
    DensityEstimate {
        value,
        per_a_values: per_a,
        r_max,
        variant,
        bracket: None,
        rows,
    }
}

/// Upper density: the per-`a` surrogate at the largest `a`.
pub fn dens_bar(l: &IntervalFunction, a_grid: &[f64], r_grid: &[f64]) -> Result<DensityEstimate> {
    let (per_a, rows, r_max) = per_a_table(l, a_grid, r_grid)?;
    Ok(estimate(DensityVariant::Bar, per_a, rows, r_max))
}

/// Lower density: minimum of the per-`a` surrogate over the upper half of `a_grid`.
pub fn dens_underbar(l: &IntervalFunction, a_grid: &[f64], r_grid: &[f64]) -> Result<DensityEstimate> {
    let (per_a, rows, r_max) = per_a_table(l, a_grid, r_grid)?;
    Ok(estimate(DensityVariant::Underbar, per_a, rows, r_max))
}

/// Infimum density: minimum of the per-`a` surrogate over all of `a_grid`.
pub fn dens_inf(l: &IntervalFunction, a_grid: &[f64], r_grid: &[f64]) -> Result<DensityEstimate> {
    let (per_a, rows, r_max) = per_a_table(l, a_grid, r_grid)?;
    Ok(estimate(DensityVariant::Inf, per_a, rows, r_max))
}

/// All three `a`-based estimates from a single table.
pub fn dens_all_a(l: &IntervalFunction, a_grid: &[f64], r_grid: &[f64]) -> Result<[DensityEstimate; 3]> {
    let (per_a, rows, r_max) = per_a_table(l, a_grid, r_grid)?;
    Ok([
        estimate(DensityVariant::Bar, per_a.clone(), rows.clone(), r_max),
        estimate(DensityVariant::Underbar, per_a.clone(), rows.clone(), r_max),
        estimate(DensityVariant::Inf, per_a, rows, r_max),
    ])
}

/// Smallest `b` (to within `b_tol`) for which `l(r, R) - b ln(R/r)` stays
/// bounded over grid pairs.
///
/// Bounded means: the supremum over pairs with `R <= r_max` exceeds the one
/// over `R <= r_max/2` by at most `(b_tol/2) ln 2`, i.e. the residual slope
/// in `ln R` is below `b_tol/2`.
pub fn dens_b(l: &IntervalFunction, r_grid: &[f64], b_tol: f64) -> Result<DensityEstimate> {
    validate_increasing(r_grid, "r_grid")?;
    if !(b_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("b_tol {b_tol} must be positive")));
    }
    if r_grid.len() < 3 {
        return Err(Error::EmptyRange("b-density needs at least three grid points".into()));
    }
    if r_grid[0] < l.r0 {
        return Err(Error::EmptyRange(format!("r-grid starts below r0 of `{}`", l.label)));
    }
    let n = r_grid.len();
    let r_max = r_grid[n - 1];
    let half = r_grid.partition_point(|&x| x <= 0.5 * r_max);
    if half < 2 {
        return Err(Error::EmptyRange("b-density needs grid points below r_max/2".into()));
    }
    // table[i][j - i - 1] = (l(r_i, r_j), ln(r_j / r_i))
    let table: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| (l.eval(r_grid[i], r_grid[j]), (r_grid[j] / r_grid[i]).ln()))
                .collect()
        })
        .collect();
    for (i, row) in table.iter().enumerate() {
        if let Some((k, v)) = row.iter().enumerate().find(|(_, v)| !v.0.is_finite()) {
            return Err(Error::NonFinite {
                at: r_grid[i + 1 + k],
                value: v.0,
            });
        }
    }
    let growth = |b: f64| -> f64 {
        let (mut s_half, mut s_full) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (i, row) in table.iter().enumerate() {
            for (k, &(v, lg)) in row.iter().enumerate() {
                let j = i + 1 + k;
                let s = v - b * lg;
                s_full = s_full.max(s);
                if j < half {
                    s_half = s_half.max(s);
                }
            }
        }
        s_full - s_half
    };
    let threshold = 0.5 * b_tol * std::f64::consts::LN_2;
    let mut probes = Vec::new();
    let bounded = |b: f64, probes: &mut Vec<(f64, f64)>| {
        let g = growth(b);
        probes.push((b, g));
        g <= threshold
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if bounded(0.0, &mut probes) {
        hi = 0.0;
    } else {
        while !bounded(hi, &mut probes) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::UnboundedTail(format!(
                    "no finite b within [0, 1e6] for `{}`",
                    l.label
                )));
            }
        }
        while hi - lo > 0.25 * b_tol {
            let mid = 0.5 * (lo + hi);
            if bounded(mid, &mut probes) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(DensityEstimate {
        value: hi,
        per_a_values: probes,
        r_max,
        variant: DensityVariant::B,
        bracket: Some((lo, hi)),
        rows: Vec::new(),
    })
}

/// Result of [`submeasure_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmeasureReport {
    /// `(r, l(r, 2r))` for grid radii with `2r` inside the grid range.
    pub doubling: Vec<(f64, f64)>,
    /// Finite and without trend: the maximum over the upper half of the
    /// doubling values is at most `2 * (head maximum) + 1`.
    pub l1_pass: bool,
    /// `(r1, r2, r3, excess)` for triples where
    /// `l(r1, r3) > l(r1, r2) + l(r2, r3) + 1e-9`.
    pub violations: Vec<(f64, f64, f64, f64)>,
    pub l2_pass: bool,
    pub nonnegative: bool,
    pub pass: bool,
}

/// Checks logarithmic growth on doublings and subadditivity on every grid triple.
pub fn submeasure_check(l: &IntervalFunction, r_grid: &[f64]) -> Result<SubmeasureReport> {
    validate_increasing(r_grid, "r_grid")?;
    if r_grid.len() < 3 {
        return Err(Error::InvalidArgument("submeasure check needs at least three grid points".into()));
    }
    let n = r_grid.len();
    let top = r_grid[n - 1];
    let doubling: Vec<(f64, f64)> = r_grid
        .iter()
        .filter(|&&r| 2.0 * r <= top)
        .map(|&r| (r, l.eval(r, 2.0 * r)))
        .collect();
    let l1_pass = if doubling.len() < 2 {
        doubling.iter().all(|d| d.1.is_finite())
    } else {
        let mid = doubling.len() / 2;
        let head = doubling[..mid].iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
        let tail = doubling[mid..].iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
        doubling.iter().all(|d| d.1.is_finite()) && tail <= 2.0 * head.max(0.0) + 1.0
    };
    let table: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| if j > i { l.eval(r_grid[i], r_grid[j]) } else { 0.0 }).collect())
        .collect();
    let nonnegative = (0..n).all(|i| (i + 1..n).all(|j| table[i][j] >= 0.0));
    let violations: Vec<(f64, f64, f64, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let table = &table;
            (i + 1..n).flat_map(move |j| {
                (j + 1..n).filter_map(move |k| {
                    let excess = table[i][k] - table[i][j] - table[j][k];
                    (!(excess <= 1e-9)).then_some((r_grid[i], r_grid[j], r_grid[k], excess))
                })
            })
        })
        .collect();
    let l2_pass = violations.is_empty();
    Ok(SubmeasureReport {
        doubling,
        l1_pass,
        l2_pass,
        violations,
        nonnegative,
        pass: l1_pass && l2_pass && nonnegative,
    })
}

/// The four estimates of one interval function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub label: String,
    pub bar: DensityEstimate,
    pub underbar: DensityEstimate,
    pub inf: DensityEstimate,
    pub b: DensityEstimate,
}

impl DensitySummary {
    pub fn values(&self) -> [f64; 4] {
        [self.bar.value, self.underbar.value, self.inf.value, self.b.value]
    }

    /// Largest pairwise difference among the four estimates.
    pub fn spread(&self) -> f64 {
        let v = self.values();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Runs all four estimators with the grids of `cfg`.
pub fn density_summary(l: &IntervalFunction, cfg: &EstimatorConfig) -> Result<DensitySummary> {
    cfg.validate()?;
    let r_grid = cfg.r_grid()?;
    let [bar, underbar, inf] = dens_all_a(l, &cfg.a_grid, &r_grid)?;
    let b = dens_b(l, &r_grid, cfg.b_tol)?;
    Ok(DensitySummary {
        label: l.label.clone(),
        bar,
        underbar,
        inf,
        b,
    })
}

/// Checks `0 < r < R` and evaluates; convenience for callers holding raw pairs.
pub fn eval_checked(l: &IntervalFunction, r: f64, big_r: f64) -> Result<f64> {
    check_interval(r, big_r)?;
    if r < l.r0 {
        return Err(Error::EmptyRange(format!("r = {r} below r0 = {}", l.r0)));
    }
    let v = l.eval(r, big_r);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: r, value: v })
    }
}
