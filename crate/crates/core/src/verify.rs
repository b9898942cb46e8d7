//! Executable checks of the growth inequalities: the pointwise hypothesis,
//! the fitted-constant margin for `(r, R]` functionals, tail integrals
//! `I_N`, the averaged function `d(R)`, the density inequality and the
//! uniqueness decision.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{density_summary, DensitySummary, EstimatorConfig, IntervalFunction};
use crate::error::{check_interval, Error, Result};
use crate::excision::ExcisionSet;
use crate::grid::{log_space, validate_increasing};
use crate::measure::{AtomicMeasure, ComplexPoint, Side};
use crate::potential::{j_real, AxisFunction, AxisSum, FunctionModel};
use crate::profile::{maximize_on, Profile};
use crate::quad::{integrate_log_panels, QuadSpec};

/// A function `u` with Riesz measure `nu` and a majorant `M` with Riesz measure `mu`.
#[derive(Debug, Clone)]
pub struct GrowthPair {
    pub u: Arc<FunctionModel>,
    pub m: Arc<FunctionModel>,
    pub nu: Arc<AtomicMeasure>,
    pub mu: Arc<AtomicMeasure>,
}

impl GrowthPair {
    /// Checks that canonical products carry the same total weight as the
    /// measure paired with them.
    pub fn new(u: Arc<FunctionModel>, m: Arc<FunctionModel>, nu: Arc<AtomicMeasure>, mu: Arc<AtomicMeasure>) -> Result<Self> {
        for (model, meas, name) in [(&u, &nu, "u"), (&m, &mu, "M")] {
            model.validate()?;
            if let crate::potential::ModelKind::CanonicalProduct { zeros, .. } = &model.kind {
                if (zeros.total_mass() - meas.total_mass()).abs() > 1e-9 * (1.0 + meas.total_mass()) {
                    return Err(Error::InvalidArgument(format!(
                        "measure of {name} does not match the zeros of its canonical product"
                    )));
                }
            }
        }
        Ok(Self { u, m, nu, mu })
    }
}

/// Additive terms and the exceptional set of the pointwise hypothesis.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HypothesisSpec {
    pub q: Profile,
    pub q0: Profile,
    #[serde(rename = "E")]
    pub e: ExcisionSet,
    pub y_grid: Vec<f64>,
}

impl HypothesisSpec {
    pub fn validate(&self) -> Result<()> {
        self.q.validate()?;
        self.q0.validate()?;
        match self.q.asymptotic_slope() {
            Some(s) if s < 1.0 => {}
            Some(s) => {
                return Err(Error::InvalidArgument(format!(
                    "q must satisfy limsup q(y)/|y| < 1 (declared slope {s})"
                )))
            }
            None => return Err(Error::UndeclaredTail(self.q.label())),
        }
        if !self.y_grid.is_empty() {
            validate_increasing(&self.y_grid, "y_grid")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Tabulated outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub grid: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fitted_c: Option<f64>,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    pub scalars: BTreeMap<String, f64>,
}

impl VerificationReport {
    fn new(check: &str, grid: String, columns: &[&str]) -> Self {
        Self {
            check: check.into(),
            grid,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fitted_c: None,
            verdict: Verdict::Inconclusive,
            diagnostics: Vec::new(),
            scalars: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }
}

fn describe(grid: &[f64]) -> String {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{} points in [{a}, {b}]", grid.len()),
        _ => "empty".into(),
    }
}

/// Circle mean with the radius-0 limit `M(z)`.
fn circle_mean(m: &FunctionModel, z: ComplexPoint, r: f64, spec: &QuadSpec) -> Result<f64> {
    if r == 0.0 {
        Ok(m.eval(z))
    } else {
        m.circle_avg(z, r, spec)
    }
}

/// Checks `u(iy) + u(-iy) <= C_M(iy, q(y)) + C_M(-iy, q(y)) + 2 q0(y)` at
/// every grid `y` outside `E`.
pub fn hypothesis_check(pair: &GrowthPair, spec: &HypothesisSpec, quad: &QuadSpec) -> Result<VerificationReport> {
    spec.validate()?;
    let mut rep = VerificationReport::new("hypothesis", describe(&spec.y_grid), &["y", "lhs", "rhs", "slack"]);
    if spec.y_grid.is_empty() {
        rep.diagnostics.push("empty y-grid".into());
        return Ok(rep);
    }
    let active: Vec<f64> = spec.y_grid.iter().copied().filter(|&y| !spec.e.contains(y)).collect();
    let skipped = spec.y_grid.len() - active.len();
    let rows: Vec<[f64; 4]> = active
        .par_iter()
        .map(|&y| -> Result<[f64; 4]> {
            let up = ComplexPoint::new(0.0, y);
            let lhs = pair.u.eval(up) + pair.u.eval(-up);
            let q = spec.q.value(y);
            let rhs = circle_mean(&pair.m, up, q, quad)? + circle_mean(&pair.m, -up, q, quad)? + 2.0 * spec.q0.value(y);
            Ok([y, lhs, rhs, rhs - lhs])
        })
        .collect::<Result<_>>()?;
    let mut flagged = 0;
    let mut worst = f64::INFINITY;
    let mut pass = true;
    for row in &rows {
        if row[1] == f64::NEG_INFINITY {
            flagged += 1;
            continue;
        }
        let tol = 1e-8 * (1.0 + row[1].abs() + row[2].abs());
        if !(row[3] >= -tol) {
            pass = false;
        }
        worst = worst.min(row[3]);
    }
    rep.rows = rows.iter().map(|r| r.to_vec()).collect();
    rep.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    rep.scalars.insert("skipped_in_E".into(), skipped as f64);
    rep.scalars.insert("flagged_zeros".into(), flagged as f64);
    rep.scalars.insert("min_slack".into(), worst);
    if skipped > 0 {
        rep.diagnostics.push(format!("{skipped} grid points inside E skipped"));
    }
    if flagged > 0 {
        rep.diagnostics.push(format!("{flagged} grid points at zeros of u on the imaginary axis flagged"));
    }
    Ok(rep)
}

/// `I_N(r, R; q) = int_r^R t^N sup_{s >= t} Q(s)/s^(2+N) dt` with `Q(s) = 2 q(s)`.
pub fn tail_integral_in(q: &Profile, n: u32, r: f64, big_r: f64, quad: &QuadSpec) -> Result<f64> {
    check_interval(r, big_r)?;
    let nf = n as f64;
    // surfaces undeclared or infinite tails before integrating
    q.tail_sup(r, nf)?;
    let f = |t: f64| t.powi(n as i32) * q.tail_sup(t, nf).unwrap_or(f64::NAN);
    Ok(integrate_log_panels(&f, r, big_r, &q.kinks(), quad)?.value)
}

/// Prefix sums of `seg` over consecutive nodes.
fn prefix_sums(nodes: &[f64], seg: impl Fn(f64, f64) -> Result<f64> + Sync) -> Result<Vec<f64>> {
    let parts: Vec<f64> = nodes.par_windows(2).map(|w| seg(w[0], w[1])).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(nodes.len());
    out.push(0.0);
    for p in parts {
        out.push(out.last().unwrap() + p);
    }
    Ok(out)
}

/// Fits the smallest `C` with
/// `max(l_nu, J_iR(u)) - min(l_mu^rh, l_mu^lh, J_iR(M)) <= C (J_R(q0 + q_E) + I_N(q) + 1)`
/// over all grid pairs `r0 <= r < R`, and tests that it stops growing: the
/// fit over all pairs may exceed the fit over `R <= R_max/2` by at most 5%.
///
/// Without a passing hypothesis check the verdict is inconclusive; the
/// stabilization flag is reported either way.
pub fn theorem1_margin(
    pair: &GrowthPair,
    spec: &HypothesisSpec,
    n: u32,
    r0: f64,
    grid: &[f64],
    quad: &QuadSpec,
) -> Result<VerificationReport> {
    validate_increasing(grid, "margin grid")?;
    let nodes: Vec<f64> = grid.iter().copied().filter(|&x| x >= r0).collect();
    if nodes.len() < 3 {
        return Err(Error::EmptyRange(format!("fewer than three grid radii at or above r0 = {r0}")));
    }
    let hyp = hypothesis_check(pair, spec, quad)?;
    let mut rep = VerificationReport::new(
        "theorem1",
        describe(&nodes),
        &["r", "R", "lhs", "base", "penalty", "ratio"],
    );
    let ju = prefix_sums(&nodes, |a, b| pair.u.j_imag(a, b, quad))?;
    let jm = if Arc::ptr_eq(&pair.u, &pair.m) {
        ju.clone()
    } else {
        prefix_sums(&nodes, |a, b| pair.m.j_imag(a, b, quad))?
    };
    let additive = AxisSum(vec![&spec.q0 as &dyn AxisFunction, &spec.e]);
    let pen_real = prefix_sums(&nodes, |a, b| j_real(&additive, a, b, quad))?;
    let pen_tail = prefix_sums(&nodes, |a, b| tail_integral_in(&spec.q, n, a, b, quad))?;
    let k = nodes.len();
    let big = nodes[k - 1];
    let rows: Vec<Vec<[f64; 6]>> = (0..k)
        .into_par_iter()
        .map(|i| -> Result<Vec<[f64; 6]>> {
            (i + 1..k)
                .map(|j| {
                    let (r, rr) = (nodes[i], nodes[j]);
                    let lhs = pair.nu.l_submeasure(r, rr)?.max(ju[j] - ju[i]);
                    let base = pair
                        .mu
                        .l_side(Side::Right, r, rr)?
                        .min(pair.mu.l_side(Side::Left, r, rr)?)
                        .min(jm[j] - jm[i]);
                    let pen = pen_real[j] - pen_real[i] + pen_tail[j] - pen_tail[i];
                    Ok([r, rr, lhs, base, pen, (lhs - base) / (pen + 1.0)])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let (mut c_full, mut c_half) = (0.0f64, 0.0f64);
    for row in rows.iter().flatten() {
        if !row[5].is_finite() {
            return Err(Error::NonFinite { at: row[0], value: row[5] });
        }
        c_full = c_full.max(row[5]);
        if row[1] <= 0.5 * big {
            c_half = c_half.max(row[5]);
        }
    }
    let stabilized = c_full <= 1.05 * c_half + 1e-12;
    rep.rows = rows.into_iter().flatten().map(|r| r.to_vec()).collect();
    rep.fitted_c = Some(c_full);
    rep.scalars.insert("c_half".into(), c_half);
    rep.scalars.insert("stabilized".into(), f64::from(u8::from(stabilized)));
    rep.scalars.insert("hypothesis_pass".into(), f64::from(u8::from(hyp.verdict == Verdict::Pass)));
    rep.scalars.insert("N".into(), n as f64);
    rep.scalars.insert("r0".into(), r0);
    rep.verdict = match (hyp.verdict, stabilized) {
        (Verdict::Pass, true) => Verdict::Pass,
        (Verdict::Pass, false) => Verdict::Fail,
        _ => {
            rep.diagnostics.push("hypothesis check did not pass; margin reported for information".into());
            Verdict::Inconclusive
        }
    };
    if !stabilized {
        rep.diagnostics.push(format!(
            "fitted constant grows over the last doubling: {c_half} -> {c_full}"
        ));
    }
    rep.diagnostics.extend(hyp.diagnostics);
    Ok(rep)
}

/// Is `s -> 2 q(s)/s^(2+N)` nonincreasing on the grid?
fn tail_decreasing(q: &Profile, n: u32, grid: &[f64]) -> bool {
    let f = |s: f64| 2.0 * q.value(s) / s.powi(2 + n as i32);
    grid.windows(2).all(|w| f(w[1]) <= f(w[0]) * (1.0 + 1e-12))
}

/// For the constant, sublinear power and linear families: finds the
/// smallest `N <= n_search` (starting from the bound implied by
/// `limsup y Q'(y)/Q(y)`) with `Q/s^(2+N)` decreasing, then fits
/// `C = max I_N / J_R(q)` over grid pairs in `[r, R]`.
pub fn propqn_check(q: &Profile, n_search: u32, r: f64, big_r: f64, quad: &QuadSpec) -> Result<VerificationReport> {
    check_interval(r, big_r)?;
    q.validate()?;
    match q {
        Profile::Zero | Profile::Constant { .. } => {}
        Profile::Power { alpha, .. } if *alpha < 1.0 => {}
        Profile::Linear { a, .. } if *a < 1.0 => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "family `{}` is not constant, power with alpha < 1 or linear with slope < 1",
                q.label()
            )))
        }
    }
    let grid = log_space(r, big_r, 8)?;
    let mut rep = VerificationReport::new("propQN", describe(&grid), &["r", "R", "I_N", "J_R", "ratio"]);
    let c5 = q.log_derivative_limsup().unwrap_or(0.0);
    let n_min = (c5 - 2.0).ceil().max(0.0) as u32;
    let n = (n_min..=n_search.max(n_min))
        .find(|&n| tail_decreasing(q, n, &grid))
        .ok_or_else(|| Error::InvalidArgument(format!("no N <= {n_search} makes the tail decreasing")))?;
    let i_n = prefix_sums(&grid, |a, b| tail_integral_in(q, n, a, b, quad))?;
    let jr = prefix_sums(&grid, |a, b| j_real(q, a, b, quad))?;
    let mut c = 0.0f64;
    let mut dev = 0.0f64;
    for (i, j) in crate::grid::index_pairs(grid.len()) {
        let a = i_n[j] - i_n[i];
        let b = jr[j] - jr[i];
        let ratio = if a == 0.0 && b == 0.0 { 0.0 } else { a / b };
        if b > 0.0 {
            dev = dev.max((ratio / TAU - 1.0).abs());
        }
        c = c.max(ratio);
        rep.rows.push(vec![grid[i], grid[j], a, b, ratio]);
    }
    rep.fitted_c = Some(c);
    rep.scalars.insert("N".into(), n as f64);
    rep.scalars.insert("C5".into(), c5);
    rep.scalars.insert("max_rel_dev_from_2pi".into(), dev);
    rep.verdict = if c.is_finite() { Verdict::Pass } else { Verdict::Fail };
    Ok(rep)
}

/// `sup_{s >= t} P(s)/s`.
fn ratio_tail_sup(p: &Profile, t: f64) -> Result<f64> {
    let f = |s: f64| p.value(s) / s;
    match p {
        Profile::Custom(c) => return Err(Error::UndeclaredTail(c.label.clone())),
        _ if p.asymptotic_slope().map_or(true, |s| s.is_infinite()) => {
            return Err(Error::UnboundedTail(p.label()))
        }
        _ => {}
    }
    // beyond the last kink every family has P(s)/s nonincreasing
    let mut knots: Vec<f64> = p.kinks().into_iter().filter(|&s| s > t).collect();
    if knots.is_empty() {
        return Ok(f(t));
    }
    knots.push(t);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut best = knots.iter().map(|&s| f(s)).fold(f64::NEG_INFINITY, f64::max);
    for w in knots.windows(2) {
        best = best.max(maximize_on(&f, w[0], w[1]));
    }
    Ok(best)
}

/// `d(R) = (1/ln(R/r0)) int_{r0}^R p(t)/t dt` with `p(t) = sup_{s >= t} P(s)/s`,
/// on each `R` of the grid; checks that `d` is nonincreasing and that it
/// decays exactly when `P(t)/t -> 0`.
///
/// Decay is read off the grid as `d(R_last) <= d(R_first)/2` (or `d` vanishing).
pub fn prop2_d_function(p: &Profile, r0: f64, r_grid: &[f64], quad: &QuadSpec) -> Result<VerificationReport> {
    p.validate()?;
    validate_increasing(r_grid, "R-grid")?;
    if r_grid[0] <= r0 {
        return Err(Error::InvalidArgument(format!("R-grid must lie above r0 = {r0}")));
    }
    ratio_tail_sup(p, r0)?;
    let mut nodes = vec![r0];
    nodes.extend_from_slice(r_grid);
    let g = |t: f64| ratio_tail_sup(p, t).unwrap_or(f64::NAN) / t;
    let acc = prefix_sums(&nodes, |a, b| Ok(integrate_log_panels(&g, a, b, &p.kinks(), quad)?.value))?;
    let mut rep = VerificationReport::new("prop2", describe(r_grid), &["R", "d"]);
    let d: Vec<f64> = r_grid.iter().enumerate().map(|(i, &rr)| acc[i + 1] / (rr / r0).ln()).collect();
    for (rr, v) in r_grid.iter().zip(&d) {
        rep.rows.push(vec![*rr, *v]);
    }
    let decreasing = d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15);
    let (first, last) = (d[0], *d.last().unwrap());
    let decays = last <= 1e-12 || last <= 0.5 * first;
    let p0 = p.asymptotic_slope() == Some(0.0);
    rep.scalars.insert("decreasing".into(), f64::from(u8::from(decreasing)));
    rep.scalars.insert("decays".into(), f64::from(u8::from(decays)));
    rep.scalars.insert("slope_zero".into(), f64::from(u8::from(p0)));
    rep.verdict = if decreasing && decays == p0 { Verdict::Pass } else { Verdict::Fail };
    if decays != p0 {
        rep.diagnostics.push(format!("decay of d ({decays}) disagrees with limsup P(t)/t = 0 ({p0})"));
    }
    Ok(rep)
}

/// `J_R(r, R; q0 + q + q_E)` over the estimator nodes.
fn additive_penalty(spec: &HypothesisSpec, cfg: &EstimatorConfig, quad: &QuadSpec) -> Result<IntervalFunction> {
    let terms: Arc<dyn AxisFunction + Send + Sync> = Arc::new(OwnedSum(vec![
        Box::new(spec.q0.clone()),
        Box::new(spec.q.clone()),
        Box::new(spec.e.clone()),
    ]));
    IntervalFunction::j_real("J_R[q0+q+q_E]", terms, &cfg.nodes()?, *quad)
}

struct OwnedSum(Vec<Box<dyn AxisFunction + Send + Sync>>);

impl AxisFunction for OwnedSum {
    fn value(&self, x: f64) -> f64 {
        self.0.iter().map(|f| f.value(x)).sum()
    }

    fn kinks(&self) -> Vec<f64> {
        self.0.iter().flat_map(|f| f.kinks()).collect()
    }
}

/// Density of the additive penalty must vanish; returns its upper estimate.
fn penalty_density(spec: &HypothesisSpec, cfg: &EstimatorConfig, quad: &QuadSpec) -> Result<DensitySummary> {
    density_summary(&additive_penalty(spec, cfg, quad)?, cfg)
}

fn max_value(s: &DensitySummary) -> f64 {
    s.values().into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Checks `dens(l_nu) <= min(dens l_mu^rh, dens l_mu^lh) <= dens(l_mu)` within
/// `cfg.tol`, after confirming that the penalty density is at most `cfg.tol`.
pub fn theorem2_check(pair: &GrowthPair, spec: &HypothesisSpec, cfg: &EstimatorConfig, quad: &QuadSpec) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut rep = VerificationReport::new(
        "theorem2",
        format!("r in [{}, {}], {} per decade, a in {:?}", cfg.r_min, cfg.r_max, cfg.per_decade, cfg.a_grid),
        &["bar", "underbar", "inf", "b"],
    );
    let hyp = hypothesis_check(pair, spec, quad)?;
    let pen = penalty_density(spec, cfg, quad)?;
    let d_nu = density_summary(&IntervalFunction::submeasure(pair.nu.clone()), cfg)?;
    let d_rh = density_summary(&IntervalFunction::side(pair.mu.clone(), Side::Right), cfg)?;
    let d_lh = density_summary(&IntervalFunction::side(pair.mu.clone(), Side::Left), cfg)?;
    let d_mu = density_summary(&IntervalFunction::submeasure(pair.mu.clone()), cfg)?;
    for s in [&d_nu, &d_rh, &d_lh, &d_mu, &pen] {
        rep.rows.push(s.values().to_vec());
    }
    let (nu, rh, lh, mu) = (d_nu.bar.value, d_rh.bar.value, d_lh.bar.value, d_mu.bar.value);
    let side_min = rh.min(lh);
    rep.scalars.insert("dens_nu".into(), nu);
    rep.scalars.insert("dens_mu_rh".into(), rh);
    rep.scalars.insert("dens_mu_lh".into(), lh);
    rep.scalars.insert("dens_mu".into(), mu);
    rep.scalars.insert("dens_penalty".into(), max_value(&pen));
    rep.diagnostics.push("rows: nu, mu_rh, mu_lh, mu, penalty".into());
    let lj = max_value(&pen) <= cfg.tol;
    rep.verdict = if hyp.verdict != Verdict::Pass {
        rep.diagnostics.push("hypothesis check did not pass".into());
        Verdict::Inconclusive
    } else if !lj {
        rep.diagnostics.push(format!("penalty density {} exceeds tolerance {}", max_value(&pen), cfg.tol));
        Verdict::Inconclusive
    } else if nu <= side_min + cfg.tol && side_min <= mu + cfg.tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    OnlyZeroFunction,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Outcome {
    pub decision: Decision,
    pub dens_zeros: f64,
    pub dens_majorant: f64,
    pub dens_penalty: f64,
    pub report: VerificationReport,
}

/// Decides whether an entire function of exponential type vanishing on `z`
/// with `ln|f(iy) f(-iy)|` bounded through `M` must vanish identically:
/// yes when `dens(l_Z) > dens(J_iR(M)) + cfg.tol`, otherwise inconclusive.
/// Never asserts that a nonzero function exists.
pub fn theorem3_decide(
    z: Arc<AtomicMeasure>,
    m: Arc<FunctionModel>,
    spec: &HypothesisSpec,
    cfg: &EstimatorConfig,
    quad: &QuadSpec,
) -> Result<Theorem3Outcome> {
    cfg.validate()?;
    let mut rep = VerificationReport::new(
        "theorem3",
        format!("r in [{}, {}], {} per decade, a in {:?}", cfg.r_min, cfg.r_max, cfg.per_decade, cfg.a_grid),
        &["bar", "underbar", "inf", "b"],
    );
    let pen = max_value(&penalty_density(spec, cfg, quad)?);
    let estimates = density_summary(&IntervalFunction::submeasure(z), cfg)
        .and_then(|dz| Ok((dz, density_summary(&IntervalFunction::j_imag(m, &cfg.nodes()?, *quad)?, cfg)?)));
    let (dz, dj) = match estimates {
        Ok(v) => v,
        Err(e) => {
            rep.diagnostics.push(format!("estimator failure: {e}"));
            return Ok(Theorem3Outcome {
                decision: Decision::Inconclusive,
                dens_zeros: f64::NAN,
                dens_majorant: f64::NAN,
                dens_penalty: pen,
                report: rep,
            });
        }
    };
    rep.rows.push(dz.values().to_vec());
    rep.rows.push(dj.values().to_vec());
    rep.diagnostics.push("rows: zeros, majorant".into());
    let (a, b) = (dz.bar.value, dj.bar.value);
    let decision = if pen > cfg.tol {
        rep.diagnostics.push(format!("penalty density {pen} exceeds tolerance {}", cfg.tol));
        Decision::Inconclusive
    } else if a > b + cfg.tol {
        Decision::OnlyZeroFunction
    } else {
        Decision::Inconclusive
    };
    rep.verdict = match decision {
        Decision::OnlyZeroFunction => Verdict::Pass,
        Decision::Inconclusive => Verdict::Inconclusive,
    };
    rep.scalars.insert("dens_zeros".into(), a);
    rep.scalars.insert("dens_majorant".into(), b);
    rep.scalars.insert("dens_penalty".into(), pen);
    Ok(Theorem3Outcome {
        decision,
        dens_zeros: a,
        dens_majorant: b,
        dens_penalty: pen,
        report: rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Genus;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn quad() -> QuadSpec {
        QuadSpec::default()
    }

    fn lattice(step: f64, cutoff: f64) -> Arc<AtomicMeasure> {
        Arc::new(AtomicMeasure::arithmetic("lattice", step, cutoff, true).unwrap())
    }

    fn sine_pair(scale_u: f64, nu: Arc<AtomicMeasure>) -> GrowthPair {
        let m = Arc::new(FunctionModel::log_abs_sin_pi());
        let u = if scale_u == 1.0 {
            m.clone()
        } else {
            Arc::new(FunctionModel::log_abs_sin_pi_scaled(scale_u))
        };
        GrowthPair::new(u, m, nu, lattice(1.0, 1e5)).unwrap()
    }

    fn radial(cu: f64, cm: f64) -> GrowthPair {
        let empty = Arc::new(AtomicMeasure::empty("none"));
        GrowthPair::new(
            Arc::new(FunctionModel::radial_linear(cu)),
            Arc::new(FunctionModel::radial_linear(cm)),
            empty.clone(),
            empty,
        )
        .unwrap()
    }

    fn spec(q: Profile, q0: Profile) -> HypothesisSpec {
        HypothesisSpec {
            q,
            q0,
            e: ExcisionSet::empty(),
            y_grid: log_space(0.1, 1e4, 8).unwrap(),
        }
    }

    #[test]
    fn hypothesis_examples() {
        let rep = hypothesis_check(&sine_pair(1.0, lattice(1.0, 1e5)), &spec(Profile::constant(1.0), Profile::Zero), &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        let rep = hypothesis_check(&radial(2.0, 1.0), &spec(Profile::Zero, Profile::Zero), &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.rows.iter().filter(|r| r[0] > 1.0).all(|r| r[3] < 0.0));
        let rep = hypothesis_check(&radial(1.0, 1.0), &spec(Profile::Zero, Profile::constant(1.0)), &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn hypothesis_skips_excised_points() {
        let mut s = spec(Profile::Zero, Profile::Zero);
        s.e = ExcisionSet::new(vec![(1.0, 10.0)]).unwrap();
        let rep = hypothesis_check(&radial(1.0, 1.0), &s, &quad()).unwrap();
        assert_eq!(rep.scalar("skipped_in_E"), Some(9.0));
        s.q = Profile::linear(1.5, 0.0);
        assert!(hypothesis_check(&radial(1.0, 1.0), &s, &quad()).is_err());
    }

    #[test]
    fn tail_integral_examples() {
        let v = tail_integral_in(&Profile::constant(1.0), 0, 1.0, 2.0, &quad()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // Q(s) = s
        let v = tail_integral_in(&Profile::linear(0.5, 0.0), 0, 1.0, E, &quad()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(tail_integral_in(&Profile::Zero, 3, 1.0, 5.0, &quad()).unwrap(), 0.0);
        assert!(matches!(
            tail_integral_in(&Profile::power(1.0, 4.0), 0, 1.0, 2.0, &quad()),
            Err(Error::UnboundedTail(_))
        ));
    }

    #[test]
    fn tail_integral_of_bump() {
        // a bump at s = 5: sup_{s>=t} Q(s)/s^2 stays at the bump value for t < 5
        let q = Profile::Sampled {
            points: vec![[0.0, 0.0], [4.0, 0.0], [5.0, 10.0], [6.0, 0.0]],
        };
        let bump = 20.0 / 25.0;
        let v = tail_integral_in(&q, 0, 1.0, 2.0, &quad()).unwrap();
        assert!((v - bump).abs() < 1e-6, "{v}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tail_integral_monotone_and_additive(c in 0.0f64..3.0, alpha in 0.0f64..0.99, r in 0.5f64..5.0, w1 in 0.1f64..20.0, w2 in 0.1f64..20.0) {
            let q = Profile::power(c, alpha);
            let (r2, r3) = (r + w1, r + w1 + w2);
            let a = tail_integral_in(&q, 0, r, r2, &quad()).unwrap();
            let b = tail_integral_in(&q, 0, r2, r3, &quad()).unwrap();
            let ab = tail_integral_in(&q, 0, r, r3, &quad()).unwrap();
            prop_assert!((ab - a - b).abs() <= 1e-9 * (1.0 + ab));
            prop_assert!(ab >= a - 1e-15 && ab >= b - 1e-15);
            // decreasing tail: equals 2 pi J_R(q)
            let j = j_real(&q, r, r3, &quad()).unwrap();
            prop_assert!((ab - TAU * j).abs() <= 1e-9 * (1.0 + ab));
        }
    }

    #[test]
    fn margin_trivial_pair() {
        let grid = log_space(2.0, 1e3, 8).unwrap();
        let rep = theorem1_margin(&radial(0.0, 1.0), &spec(Profile::Zero, Profile::Zero), 0, 2.0, &grid, &quad()).unwrap();
        assert_eq!(rep.fitted_c, Some(0.0));
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn margin_inconclusive_without_hypothesis() {
        let grid = log_space(2.0, 1e3, 8).unwrap();
        let rep = theorem1_margin(&radial(2.0, 1.0), &spec(Profile::Zero, Profile::Zero), 0, 2.0, &grid, &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert_eq!(rep.scalar("hypothesis_pass"), Some(0.0));
    }

    #[test]
    fn margin_is_monotone_under_refinement() {
        let pair = sine_pair(1.0, lattice(1.0, 1e5));
        let s = spec(Profile::constant(1.0), Profile::Zero);
        let coarse = log_space(2.0, 1e3, 4).unwrap();
        let fine = log_space(2.0, 1e3, 8).unwrap();
        let a = theorem1_margin(&pair, &s, 0, 2.0, &coarse, &quad()).unwrap();
        let b = theorem1_margin(&pair, &s, 0, 2.0, &fine, &quad()).unwrap();
        assert!(a.fitted_c.unwrap() <= b.fitted_c.unwrap() + 1e-12);
    }

    #[test]
    fn propqn_examples() {
        let rep = propqn_check(&Profile::power(0.5, 0.5), 3, 1.0, 1e3, &quad()).unwrap();
        assert_eq!(rep.scalar("N"), Some(0.0));
        assert!(rep.fitted_c.unwrap() <= TAU * (1.0 + 1e-6));
        assert!(rep.scalar("max_rel_dev_from_2pi").unwrap() <= 1e-6);
        let rep = propqn_check(&Profile::constant(1.0), 3, 1.0, 1e3, &quad()).unwrap();
        assert!(rep.scalar("max_rel_dev_from_2pi").unwrap() <= 1e-6);
        let rep = propqn_check(&Profile::Zero, 3, 1.0, 1e3, &quad()).unwrap();
        assert_eq!(rep.fitted_c, Some(0.0));
        assert!(propqn_check(&Profile::linear(1.5, 0.0), 3, 1.0, 10.0, &quad()).is_err());
    }

    #[test]
    fn d_function_examples() {
        let grid = [1e2, 1e4, 1e6, 1e8];
        let rep = prop2_d_function(&Profile::power(1.0, 0.5), 1.0, &grid, &quad()).unwrap();
        let d6 = rep.rows[2][1];
        let exact = 2.0 * (1.0 - 1e-3) / 1e6f64.ln();
        assert!((d6 - exact).abs() < 1e-9, "{d6}");
        assert_eq!(rep.verdict, Verdict::Pass);
        let rep = prop2_d_function(&Profile::Zero, 1.0, &grid, &quad()).unwrap();
        assert!(rep.rows.iter().all(|r| r[1] == 0.0));
        assert_eq!(rep.verdict, Verdict::Pass);
        let rep = prop2_d_function(&Profile::linear(1.0, 0.0), 1.0, &grid, &quad()).unwrap();
        assert!(rep.rows.iter().all(|r| (r[1] - 1.0).abs() < 1e-9));
        assert_eq!(rep.scalar("decays"), Some(0.0));
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn d_function_with_sampled_growth() {
        // P(t)/t has a bump at t = 10 and decays afterwards
        let p = Profile::Sampled {
            points: vec![[1.0, 0.0], [10.0, 5.0], [20.0, 5.0]],
        };
        let rep = prop2_d_function(&p, 1.0, &[1e2, 1e4, 1e6], &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    fn small_cfg() -> EstimatorConfig {
        EstimatorConfig {
            r_max: 1e5,
            per_decade: 16,
            ..EstimatorConfig::default()
        }
    }

    #[test]
    fn theorem2_examples() {
        let cfg = small_cfg();
        let s = spec(Profile::constant(1.0), Profile::Zero);
        let rep = theorem2_check(&sine_pair(1.0, lattice(1.0, 1e5)), &s, &cfg, &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        for k in ["dens_nu", "dens_mu_rh", "dens_mu_lh", "dens_mu"] {
            assert!((rep.scalar(k).unwrap() - 1.0).abs() <= 0.1);
        }
        let rep = theorem2_check(&sine_pair(0.5, lattice(2.0, 1e5)), &s, &cfg, &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!((rep.scalar("dens_nu").unwrap() - 0.5).abs() <= 0.05);
        let zero_u = GrowthPair::new(
            Arc::new(FunctionModel::radial_linear(0.0)),
            Arc::new(FunctionModel::log_abs_sin_pi()),
            Arc::new(AtomicMeasure::empty("none")),
            lattice(1.0, 1e5),
        )
        .unwrap();
        let rep = theorem2_check(&zero_u, &s, &cfg, &quad()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.scalar("dens_nu"), Some(0.0));
    }

    #[test]
    fn theorem3_examples() {
        let cfg = small_cfg();
        let s = spec(Profile::Zero, Profile::Zero);
        let m = Arc::new(FunctionModel::log_abs_sin_pi());
        let out = theorem3_decide(lattice(0.5, 1e5), m.clone(), &s, &cfg, &quad()).unwrap();
        assert_eq!(out.decision, Decision::OnlyZeroFunction);
        assert!((out.dens_majorant - 1.0).abs() < 0.1);
        let out = theorem3_decide(lattice(2.0, 1e5), m.clone(), &s, &cfg, &quad()).unwrap();
        assert_eq!(out.decision, Decision::Inconclusive);
        let out = theorem3_decide(Arc::new(AtomicMeasure::empty("none")), m, &s, &cfg, &quad()).unwrap();
        assert_eq!(out.decision, Decision::Inconclusive);
        assert_eq!(out.dens_zeros, 0.0);
    }

    #[test]
    fn theorem3_is_dilation_invariant() {
        let cfg = small_cfg();
        let s = spec(Profile::Zero, Profile::Zero);
        let m = FunctionModel::log_abs_sin_pi();
        for step in [0.5, 2.0] {
            let z = AtomicMeasure::arithmetic("z", step, 1e5, true).unwrap();
            let base = theorem3_decide(Arc::new(z.clone()), Arc::new(m.clone()), &s, &cfg, &quad()).unwrap();
            for a in [2.0, 10.0] {
                let out = theorem3_decide(
                    Arc::new(z.dilate(a).unwrap()),
                    Arc::new(m.dilate(a).unwrap()),
                    &s,
                    &cfg.dilated(a),
                    &quad(),
                )
                .unwrap();
                assert_eq!(out.decision, base.decision, "step {step}, a {a}");
            }
        }
    }

    #[test]
    fn pair_consistency() {
        let zeros = Arc::new(AtomicMeasure::arithmetic("z", 1.0, 10.0, false).unwrap());
        let u = Arc::new(FunctionModel::canonical_product(zeros.clone(), Genus::One));
        let m = Arc::new(FunctionModel::radial_linear(1.0));
        let empty = Arc::new(AtomicMeasure::empty("none"));
        assert!(GrowthPair::new(u.clone(), m.clone(), zeros, empty.clone()).is_ok());
        assert!(GrowthPair::new(u, m, empty.clone(), empty).is_err());
    }
}
