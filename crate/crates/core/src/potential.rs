//! Zero-generated subharmonic functions `u = log|f|` and simple radial models:
//! pointwise evaluation, circle/disk/sup means, J-integrals and type.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_interval, Error, Result};
use crate::measure::{AtomicMeasure, ComplexPoint};
use crate::profile::{golden_max, Profile};
use crate::quad::{integrate, integrate_log_panels, QuadSpec};

/// Genus of a canonical product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Genus {
    Zero,
    One,
}

impl TryFrom<u8> for Genus {
    type Error = Error;

    fn try_from(g: u8) -> Result<Self> {
        match g {
            0 => Ok(Genus::Zero),
            1 => Ok(Genus::One),
            _ => Err(Error::InvalidArgument(format!("genus must be 0 or 1, got {g}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Real,
    Imag,
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    /// `sum w log|E_p(z/z_k)|`, with `log|z|` factors for atoms at the origin.
    CanonicalProduct { zeros: Arc<AtomicMeasure>, genus: Genus },
    /// `log|sin(pi * scale * z)|`, zeros at `k/scale`.
    LogAbsSinPi { scale: f64 },
    /// `c|z|`
    RadialLinear { c: f64 },
    /// Samples along one axis, linearly interpolated in that coordinate and
    /// held constant beyond the sampled range. Off-axis points use the
    /// coordinate along the axis only.
    Sampled { axis: Axis, points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone)]
pub struct FunctionModel {
    pub kind: ModelKind,
    pub metadata: String,
}

/// A zero seen from a circle center: distance and weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearbyZero {
    pub dist: f64,
    pub weight: f64,
}

/// How the circle mean `C` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethod {
    Jensen,
    Quadrature,
    /// Jensen value reported, quadrature computed alongside as a cross-check.
    Hybrid,
}

/// Circle mean, disk mean and circle supremum at one `(center, radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub center: ComplexPoint,
    pub radius: f64,
    pub c: f64,
    pub b: f64,
    pub msup: f64,
    pub method: MeanMethod,
    /// Quadrature value of `C` when computed alongside the Jensen value.
    pub c_quadrature: Option<f64>,
    /// Number of zeros materialized inside the disk.
    pub zeros_used: usize,
}

/// Finite-range type surrogate with the per-radius table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeEstimate {
    pub value: f64,
    pub per_r: Vec<(f64, f64)>,
}

impl FunctionModel {
    pub fn canonical_product(zeros: Arc<AtomicMeasure>, genus: Genus) -> Self {
        let metadata = format!("canonical product genus {} over `{}`", genus as u8, zeros.label());
        Self {
            kind: ModelKind::CanonicalProduct { zeros, genus },
            metadata,
        }
    }

    pub fn log_abs_sin_pi() -> Self {
        Self::log_abs_sin_pi_scaled(1.0)
    }

    pub fn log_abs_sin_pi_scaled(scale: f64) -> Self {
        Self {
            kind: ModelKind::LogAbsSinPi { scale },
            metadata: format!("log|sin(pi*{scale}*z)|"),
        }
    }

    pub fn radial_linear(c: f64) -> Self {
        Self {
            kind: ModelKind::RadialLinear { c },
            metadata: format!("{c}|z|"),
        }
    }

    pub fn sampled(axis: Axis, points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() || points.windows(2).any(|w| w[0][0] >= w[1][0]) {
            return Err(Error::InvalidArgument(
                "sampled model needs nonempty, strictly increasing abscissae".into(),
            ));
        }
        Ok(Self {
            kind: ModelKind::Sampled { axis, points },
            metadata: "axis samples".into(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ModelKind::LogAbsSinPi { scale } if !(*scale > 0.0 && scale.is_finite()) => {
                Err(Error::InvalidArgument(format!("sine scale {scale} must be positive")))
            }
            ModelKind::RadialLinear { c } if !(*c >= 0.0 && c.is_finite()) => {
                Err(Error::InvalidArgument(format!("radial slope {c} must be >= 0")))
            }
            _ => Ok(()),
        }
    }

    /// Model of `z -> u(z / a)`, whose zeros are dilated by `a`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        let kind = match &self.kind {
            ModelKind::CanonicalProduct { zeros, genus } => ModelKind::CanonicalProduct {
                zeros: Arc::new(zeros.dilate(a)?),
                genus: *genus,
            },
            ModelKind::LogAbsSinPi { scale } => ModelKind::LogAbsSinPi { scale: scale / a },
            ModelKind::RadialLinear { c } => ModelKind::RadialLinear { c: c / a },
            ModelKind::Sampled { axis, points } => ModelKind::Sampled {
                axis: *axis,
                points: points.iter().map(|p| [p[0] * a, p[1]]).collect(),
            },
        };
        Ok(Self {
            kind,
            metadata: format!("{} dilated by {a}", self.metadata),
        })
    }

    pub fn has_zero_list(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::CanonicalProduct { .. } | ModelKind::LogAbsSinPi { .. }
        )
    }

    /// `u(z)`; `-inf` exactly at zeros.
    pub fn eval(&self, z: ComplexPoint) -> f64 {
        match &self.kind {
            ModelKind::CanonicalProduct { zeros, genus } => {
                zeros.atoms().iter().map(|a| a.weight * factor_log(z, a.pos, *genus)).sum()
            }
            ModelKind::LogAbsSinPi { scale } => log_abs_sin_pi(z * *scale),
            ModelKind::RadialLinear { c } => c * z.norm(),
            ModelKind::Sampled { axis, points } => {
                let t = match axis {
                    Axis::Real => z.re,
                    Axis::Imag => z.im,
                };
                interp(points, t)
            }
        }
    }

    /// Zeros within closed distance `r` of `z`, with their distances.
    ///
    /// For the sine model the integer lattice is materialized only on the
    /// window `|k/scale - Re z| <= r`.
    pub fn zeros_near(&self, z: ComplexPoint, r: f64) -> Result<Vec<NearbyZero>> {
        match &self.kind {
            ModelKind::CanonicalProduct { zeros, .. } => Ok(zeros
                .atoms()
                .iter()
                .filter_map(|a| {
                    let d = (a.pos - z).norm();
                    (d <= r).then_some(NearbyZero {
                        dist: d,
                        weight: a.weight,
                    })
                })
                .collect()),
            ModelKind::LogAbsSinPi { scale } => {
                let lo = ((z.re - r) * scale).ceil() as i64;
                let hi = ((z.re + r) * scale).floor() as i64;
                Ok((lo..=hi)
                    .filter_map(|k| {
                        let d = (ComplexPoint::new(k as f64 / scale, 0.0) - z).norm();
                        (d <= r).then_some(NearbyZero { dist: d, weight: 1.0 })
                    })
                    .collect())
            }
            _ => Err(Error::NoZeroList(self.metadata.clone())),
        }
    }

    /// Real zeros in `[lo, hi]`, sorted; empty for models without a zero list.
    pub fn real_zeros_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        match &self.kind {
            ModelKind::CanonicalProduct { zeros, .. } => {
                let mut v: Vec<f64> = zeros
                    .atoms()
                    .iter()
                    .filter(|a| a.pos.im == 0.0 && a.pos.re >= lo && a.pos.re <= hi)
                    .map(|a| a.pos.re)
                    .collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            ModelKind::LogAbsSinPi { scale } => {
                let a = (lo * scale).ceil() as i64;
                let b = (hi * scale).floor() as i64;
                (a..=b).map(|k| k as f64 / scale).filter(|&x| x >= lo && x <= hi).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Distance from `z` to the nearest zero, `inf` for zero-free models.
    fn zero_distance(&self, z: ComplexPoint) -> f64 {
        match &self.kind {
            ModelKind::CanonicalProduct { zeros, .. } => zeros
                .atoms()
                .iter()
                .map(|a| (a.pos - z).norm())
                .fold(f64::INFINITY, f64::min),
            ModelKind::LogAbsSinPi { scale } => {
                let k = (z.re * scale).round();
                (ComplexPoint::new(k / scale, 0.0) - z).norm()
            }
            _ => f64::INFINITY,
        }
    }

    /// `u(z)` with the factors of zeros located exactly at `z` removed, and
    /// the total weight of those zeros.
    pub fn regularized_eval(&self, z: ComplexPoint) -> Result<(f64, f64)> {
        match &self.kind {
            ModelKind::CanonicalProduct { zeros, genus } => {
                let mut value = 0.0;
                let mut m = 0.0;
                for a in zeros.atoms() {
                    if a.pos == z {
                        m += a.weight;
                        // log|1 - w/z_k| - log|w - z_k| = -log|z_k|, plus Re(w/z_k) = 1 for genus 1
                        if a.pos.norm() > 0.0 {
                            let extra = if *genus == Genus::One { 1.0 } else { 0.0 };
                            value += a.weight * (extra - a.pos.norm().ln());
                        }
                    } else {
                        value += a.weight * factor_log(z, a.pos, *genus);
                    }
                }
                Ok((value, m))
            }
            ModelKind::LogAbsSinPi { scale } => {
                let k = (z.re * scale).round();
                if z.im == 0.0 && k / scale == z.re {
                    // |sin(pi s w)| ~ pi s |w - z| near a simple zero
                    Ok(((PI * scale).ln(), 1.0))
                } else {
                    Ok((self.eval(z), 0.0))
                }
            }
            _ => Err(Error::NoZeroList(self.metadata.clone())),
        }
    }

    /// Circle mean via Jensen's identity
    /// `C(z, r) = u_reg(z) + m log r + int_0^r (n(z,t) - m)/t dt`,
    /// summed exactly between jump radii.
    pub fn circle_avg_jensen(&self, z: ComplexPoint, r: f64) -> Result<f64> {
        self.jensen_parts(z, r).map(|(c, _, _)| c)
    }

    /// Returns `(C, B, zeros_used)` from the zero list.
    fn jensen_parts(&self, z: ComplexPoint, r: f64) -> Result<(f64, f64, usize)> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
        }
        let (u_reg, m) = self.regularized_eval(z)?;
        let mut near = self.zeros_near(z, r)?;
        near.retain(|nz| nz.dist > 0.0);
        near.sort_by(|a, b| a.dist.total_cmp(&b.dist));
        let ln_r = r.ln();
        let mut c = u_reg + m * ln_r;
        let mut b = u_reg + m * (ln_r - 0.5);
        for nz in &near {
            let lr = (r / nz.dist).ln();
            c += nz.weight * lr;
            let q = nz.dist / r;
            b += nz.weight * (lr - 0.5 + 0.5 * q * q);
        }
        Ok((c, b, near.len() + usize::from(m > 0.0)))
    }

    /// Trapezoidal rule for `(1/2pi) int u(z + r e^{i theta}) d theta`.
    ///
    /// A node within `1e-12` of a zero is moved by half a step.
    pub fn circle_avg_quadrature(&self, z: ComplexPoint, r: f64, nodes: usize) -> Result<f64> {
        if nodes < 16 {
            return Err(Error::InvalidArgument(format!("need at least 16 nodes, got {nodes}")));
        }
        if r == 0.0 {
            return Ok(self.eval(z));
        }
        let h = TAU / nodes as f64;
        let check_zeros = self.has_zero_list();
        let mut sum = 0.0;
        for j in 0..nodes {
            let mut theta = h * j as f64;
            let mut w = z + ComplexPoint::from_polar(r, theta);
            if check_zeros && self.zero_distance(w) < 1e-12 {
                theta += 0.5 * h;
                w = z + ComplexPoint::from_polar(r, theta);
            }
            sum += self.eval(w);
        }
        Ok(sum / nodes as f64)
    }

    /// Circle mean by the best available route: Jensen when the model has a
    /// zero list, otherwise the trapezoidal rule. Radius 0 returns `u(z)`.
    pub fn circle_avg(&self, z: ComplexPoint, r: f64, spec: &QuadSpec) -> Result<f64> {
        if r == 0.0 {
            return Ok(self.eval(z));
        }
        if let ModelKind::RadialLinear { c } = self.kind {
            if z.norm() == 0.0 {
                return Ok(c * r);
            }
        }
        if self.has_zero_list() {
            self.circle_avg_jensen(z, r)
        } else {
            self.circle_avg_quadrature(z, r, spec.nodes)
        }
    }

    /// `B(z, r) = (2/r^2) int_0^r C(z, t) t dt`.
    pub fn disk_avg(&self, z: ComplexPoint, r: f64, spec: &QuadSpec) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
        }
        if self.has_zero_list() {
            return self.jensen_parts(z, r).map(|(_, b, _)| b);
        }
        let nodes = spec.nodes.min(1024).max(16);
        let integrand = |t: f64| t * self.circle_avg_quadrature(z, t, nodes).unwrap_or(f64::NAN);
        let inner = integrate(&integrand, 0.0, r, 1e-12 * r * r, &QuadSpec { tol: 1e-9, ..*spec })?;
        Ok(2.0 * inner.value / (r * r))
    }

    /// Largest value on the circle: best node of the θ-grid, polished by
    /// golden-section search over the neighbouring cells. A lower bound on
    /// the true supremum.
    pub fn sup_circle(&self, z: ComplexPoint, r: f64, nodes: usize) -> Result<f64> {
        if nodes < 16 {
            return Err(Error::InvalidArgument(format!("need at least 16 nodes, got {nodes}")));
        }
        let f = |theta: f64| self.eval(z + ComplexPoint::from_polar(r, theta));
        let h = TAU / nodes as f64;
        let (mut best_j, mut best) = (0, f64::NEG_INFINITY);
        for j in 0..nodes {
            let v = f(h * j as f64);
            if v > best {
                best = v;
                best_j = j;
            }
        }
        let theta = h * best_j as f64;
        Ok(best.max(golden_max(&f, theta - h, theta + h, 60)))
    }

    /// `C`, `B` and `Msup` at one point; `cross_check` also runs the
    /// trapezoidal rule alongside Jensen.
    pub fn mean_value(&self, z: ComplexPoint, r: f64, spec: &QuadSpec, cross_check: bool) -> Result<MeanValue> {
        let msup = self.sup_circle(z, r, spec.nodes)?;
        if self.has_zero_list() {
            let (c, b, zeros_used) = self.jensen_parts(z, r)?;
            let c_quadrature = if cross_check {
                Some(self.circle_avg_quadrature(z, r, spec.nodes)?)
            } else {
                None
            };
            Ok(MeanValue {
                center: z,
                radius: r,
                c,
                b,
                msup,
                method: if cross_check { MeanMethod::Hybrid } else { MeanMethod::Jensen },
                c_quadrature,
                zeros_used,
            })
        } else {
            let c = self.circle_avg(z, r, spec)?;
            let b = self.disk_avg(z, r, spec)?;
            Ok(MeanValue {
                center: z,
                radius: r,
                c,
                b,
                msup,
                method: MeanMethod::Quadrature,
                c_quadrature: None,
                zeros_used: 0,
            })
        }
    }

    /// Positions `y > 0` where `u(iy) + u(-iy)` has a logarithmic
    /// singularity, with the total zero weight there.
    fn imaginary_axis_zeros(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        if let ModelKind::CanonicalProduct { zeros, .. } = &self.kind {
            for a in zeros.atoms() {
                if a.pos.re == 0.0 && a.pos.im != 0.0 {
                    let y = a.pos.im.abs();
                    match out.iter_mut().find(|(p, _)| *p == y) {
                        Some(e) => e.1 += a.weight,
                        None => out.push((y, a.weight)),
                    }
                }
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// `J_{iR}(r, R; u) = (1/2pi) int_r^R (u(-iy) + u(iy)) / y^2 dy`.
    ///
    /// Zeros on the imaginary axis inside `(r, R)` become panel edges and
    /// their `alpha log|y - y0| / y^2` part is integrated in closed form.
    pub fn j_imag(&self, r: f64, big_r: f64, spec: &QuadSpec) -> Result<f64> {
        check_interval(r, big_r)?;
        let sing: Vec<(f64, f64)> = self
            .imaginary_axis_zeros()
            .into_iter()
            .filter(|&(y, _)| y >= r && y <= big_r)
            .collect();
        if let Some(&(y, _)) = sing.iter().find(|&&(y, _)| y == r || y == big_r) {
            return Err(Error::ZeroAtEndpoint(y));
        }
        let g = |y: f64| {
            let mut v = self.eval(ComplexPoint::new(0.0, y)) + self.eval(ComplexPoint::new(0.0, -y));
            for &(y0, alpha) in &sing {
                v -= alpha * (y - y0).abs().ln();
            }
            v / (y * y)
        };
        let breaks: Vec<f64> = sing.iter().map(|s| s.0).collect();
        let smooth = integrate_log_panels(&g, r, big_r, &breaks, spec)?.value;
        let analytic: f64 = sing
            .iter()
            .map(|&(y0, alpha)| alpha * (log_over_square_antiderivative(big_r, y0) - log_over_square_antiderivative(r, y0)))
            .sum();
        Ok((smooth + analytic) / TAU)
    }

    /// Type surrogate: the largest `Msup(0, r)/r` over the grid.
    pub fn type_estimate(&self, r_grid: &[f64], nodes: usize) -> Result<TypeEstimate> {
        if r_grid.is_empty() {
            return Err(Error::InvalidArgument("type estimate needs a nonempty grid".into()));
        }
        let mut per_r = Vec::with_capacity(r_grid.len());
        for &r in r_grid {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument(format!("grid radius {r} must be positive")));
            }
            per_r.push((r, self.sup_circle(ComplexPoint::new(0.0, 0.0), r, nodes)? / r));
        }
        let value = per_r.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).max(0.0);
        Ok(TypeEstimate { value, per_r })
    }
}

/// `int ln|y - c| / y^2 dy = -ln|y - c|/y + (1/c) ln|(y - c)/y|`.
fn log_over_square_antiderivative(y: f64, c: f64) -> f64 {
    let d = (y - c).abs();
    -d.ln() / y + (d / y).ln() / c
}

/// `log|E_p(z / a)|` for a zero at `a`; `log|z|` for `a = 0`.
fn factor_log(z: ComplexPoint, a: ComplexPoint, genus: Genus) -> f64 {
    let ra = a.norm();
    if ra == 0.0 {
        return z.norm().ln();
    }
    let base = (a - z).norm().ln() - ra.ln();
    match genus {
        Genus::Zero => base,
        Genus::One => base + (z / a).re,
    }
}

/// `log|sin(pi z)|`, stable for large `|Im z|`.
pub fn log_abs_sin_pi(z: ComplexPoint) -> f64 {
    let d = z.re - z.re.round();
    let s = (PI * d).sin();
    let ay = PI * z.im.abs();
    if ay > 1.0 {
        // |sin pi z|^2 = e^{2|y|pi}/4 (1 - 2 cos(2 pi x) e^{-2 pi |y|} + e^{-4 pi |y|})
        let e = (-2.0 * ay).exp();
        let cos2 = 1.0 - 2.0 * s * s;
        ay - LN_2 + 0.5 * (-2.0 * cos2 * e + e * e).ln_1p()
    } else {
        let sh = ay.sinh();
        0.5 * (s * s + sh * sh).ln()
    }
}

fn interp(points: &[[f64; 2]], t: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if t <= first[0] {
        return first[1];
    }
    if t >= last[0] {
        return last[1];
    }
    let i = points.partition_point(|p| p[0] <= t);
    let (p0, p1) = (points[i - 1], points[i]);
    p0[1] + (t - p0[0]) / (p1[0] - p0[0]) * (p1[1] - p0[1])
}

/// A real-variable function that can be fed to `j_real`.
pub trait AxisFunction: Sync {
    fn value(&self, x: f64) -> f64;

    /// Abscissae where the function is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl AxisFunction for Profile {
    fn value(&self, x: f64) -> f64 {
        Profile::value(self, x)
    }

    fn kinks(&self) -> Vec<f64> {
        Profile::kinks(self)
    }
}

/// The restriction of a model to the real axis.
pub struct RealTrace<'a>(pub &'a FunctionModel);

impl AxisFunction for RealTrace<'_> {
    fn value(&self, x: f64) -> f64 {
        self.0.eval(ComplexPoint::new(x, 0.0))
    }
}

impl<F: Fn(f64) -> f64 + Sync> AxisFunction for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Pointwise sum of axis functions.
pub struct AxisSum<'a>(pub Vec<&'a dyn AxisFunction>);

impl AxisFunction for AxisSum<'_> {
    fn value(&self, x: f64) -> f64 {
        self.0.iter().map(|f| f.value(x)).sum()
    }

    fn kinks(&self) -> Vec<f64> {
        self.0.iter().flat_map(|f| f.kinks()).collect()
    }
}

/// `J_R(r, R; v) = (1/2pi) int_r^R (v(x) + v(-x)) / x^2 dx`.
pub fn j_real(v: &dyn AxisFunction, r: f64, big_r: f64, spec: &QuadSpec) -> Result<f64> {
    check_interval(r, big_r)?;
    let g = |x: f64| (v.value(x) + v.value(-x)) / (x * x);
    let breaks: Vec<f64> = v.kinks().into_iter().map(f64::abs).collect();
    Ok(integrate_log_panels(&g, r, big_r, &breaks, spec)?.value / TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;
    use std::f64::consts::E;

    fn product(zeros: &[(f64, f64)], genus: Genus) -> FunctionModel {
        let atoms = zeros
            .iter()
            .map(|&(re, im)| Atom {
                pos: ComplexPoint::new(re, im),
                weight: 1.0,
            })
            .collect();
        FunctionModel::canonical_product(Arc::new(AtomicMeasure::new("z", atoms).unwrap()), genus)
    }

    const O: ComplexPoint = ComplexPoint::new(0.0, 0.0);

    #[test]
    fn eval_examples() {
        let s = FunctionModel::log_abs_sin_pi();
        assert!(s.eval(ComplexPoint::new(0.5, 0.0)).abs() < 1e-15);
        assert!((s.eval(ComplexPoint::new(0.0, 1.0)) - 2.446_576_284_453_113).abs() < 1e-12);
        let p = product(&[(1.0, 0.0)], Genus::Zero);
        assert!((p.eval(ComplexPoint::new(3.0, 0.0)) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(p.eval(ComplexPoint::new(1.0, 0.0)), f64::NEG_INFINITY);
        assert_eq!(s.eval(ComplexPoint::new(-7.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn sine_branches_agree() {
        for &(x, y) in &[(0.3, 0.3), (0.3, 0.33), (1.7, 0.32), (0.0, 0.5), (2.25, 0.318)] {
            let z = ComplexPoint::new(x, y);
            let direct = (PI * z).sin().norm().ln();
            assert!((log_abs_sin_pi(z) - direct).abs() < 1e-13, "{z}");
        }
        // far from the axis the direct formula overflows
        let v = log_abs_sin_pi(ComplexPoint::new(0.25, 400.0));
        assert!((v - (PI * 400.0 - LN_2)).abs() < 1e-12);
    }

    #[test]
    fn genus_one_adds_harmonic_term() {
        let p0 = product(&[(2.0, 0.0)], Genus::Zero);
        let p1 = product(&[(2.0, 0.0)], Genus::One);
        let z = ComplexPoint::new(0.5, 1.0);
        assert!((p1.eval(z) - p0.eval(z) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn jensen_examples() {
        let logz = product(&[(0.0, 0.0)], Genus::Zero);
        assert!((logz.circle_avg_jensen(O, E).unwrap() - 1.0).abs() < 1e-15);
        let s = FunctionModel::log_abs_sin_pi();
        assert!((s.circle_avg_jensen(O, 2.5).unwrap() - 4.339_889_184_100_285).abs() < 1e-6);
        let one = product(&[(1.0, 0.0)], Genus::Zero);
        assert!(one.circle_avg_jensen(O, 0.5).unwrap().abs() < 1e-15);
        assert!(matches!(
            FunctionModel::radial_linear(1.0).circle_avg_jensen(O, 1.0),
            Err(Error::NoZeroList(_))
        ));
    }

    #[test]
    fn quadrature_examples() {
        let logz = product(&[(0.0, 0.0)], Genus::Zero);
        assert!((logz.circle_avg_quadrature(O, E, 64).unwrap() - 1.0).abs() < 1e-12);
        let one = product(&[(1.0, 0.0)], Genus::Zero);
        assert!((one.circle_avg_quadrature(O, 2.0, 1 << 14).unwrap() - 2f64.ln()).abs() < 1e-4);
        let s = FunctionModel::log_abs_sin_pi();
        // nodes land on the zeros at +-1, +-2 and are shifted
        assert!((s.circle_avg_quadrature(O, 2.5, 1 << 16).unwrap() - 4.3399).abs() < 1e-3);
        assert!(logz.circle_avg_quadrature(O, 1.0, 8).is_err());
    }

    #[test]
    fn genus_one_jensen_matches_quadrature() {
        let p = product(&[(1.0, 0.5), (-2.0, 1.0), (0.3, -3.0)], Genus::One);
        let z = ComplexPoint::new(0.2, -0.1);
        let j = p.circle_avg_jensen(z, 2.2).unwrap();
        let q = p.circle_avg_quadrature(z, 2.2, 1 << 14).unwrap();
        assert!((j - q).abs() < 1e-6, "{j} vs {q}");
    }

    #[test]
    fn central_zero_regularization() {
        // zero at z itself: C = u_reg + log r + ...
        let p = product(&[(1.0, 0.0), (3.0, 0.0)], Genus::Zero);
        let z = ComplexPoint::new(1.0, 0.0);
        let j = p.circle_avg_jensen(z, 0.5).unwrap();
        let q = p.circle_avg_quadrature(z, 0.5, 1 << 12).unwrap();
        assert!((j - q).abs() < 1e-10, "{j} vs {q}");
        let s = FunctionModel::log_abs_sin_pi_scaled(2.0);
        let z = ComplexPoint::new(0.5, 0.0);
        let j = s.circle_avg_jensen(z, 0.3).unwrap();
        let q = s.circle_avg_quadrature(z, 0.3, 1 << 12).unwrap();
        assert!((j - q).abs() < 1e-10, "{j} vs {q}");
    }

    #[test]
    fn disk_examples() {
        let spec = QuadSpec::default();
        let logz = product(&[(0.0, 0.0)], Genus::Zero);
        assert!((logz.disk_avg(O, E, &spec).unwrap() - 0.5).abs() < 1e-15);
        let one = product(&[(1.0, 0.0)], Genus::Zero);
        assert!(one.disk_avg(O, 0.5, &spec).unwrap().abs() < 1e-15);
        let s = FunctionModel::log_abs_sin_pi();
        assert!(s.disk_avg(O, 2.5, &spec).unwrap() <= s.circle_avg_jensen(O, 2.5).unwrap());
        // c|z| at the origin: B = 2cr/3
        let lin = FunctionModel::radial_linear(1.5);
        assert!((lin.disk_avg(O, 2.0, &spec).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn disk_mean_matches_radial_quadrature() {
        let p = product(&[(0.7, 0.2), (-0.4, -1.1)], Genus::Zero);
        let z = ComplexPoint::new(0.1, 0.1);
        let r = 1.6;
        let jensen = p.disk_avg(z, r, &QuadSpec::default()).unwrap();
        let oracle = integrate(
            &|t: f64| t * p.circle_avg_jensen(z, t).unwrap(),
            0.0,
            r,
            1e-13,
            &QuadSpec::default(),
        )
        .unwrap()
        .value
            * 2.0
            / (r * r);
        assert!((jensen - oracle).abs() < 1e-9);
    }

    #[test]
    fn sup_examples() {
        let logz = product(&[(0.0, 0.0)], Genus::Zero);
        assert!((logz.sup_circle(O, 3.0, 64).unwrap() - 3f64.ln()).abs() < 1e-14);
        assert!((FunctionModel::radial_linear(1.0).sup_circle(O, 3.0, 64).unwrap() - 3.0).abs() < 1e-14);
        let s = FunctionModel::log_abs_sin_pi();
        assert!((s.sup_circle(O, 1.0, 64).unwrap() - 2.446_576_284_453_113).abs() < 1e-3);
    }

    #[test]
    fn j_imag_examples() {
        let spec = QuadSpec::default();
        let lin = FunctionModel::radial_linear(1.0);
        assert!((lin.j_imag(1.0, E, &spec).unwrap() - 1.0 / PI).abs() < 1e-9);
        assert_eq!(FunctionModel::radial_linear(0.0).j_imag(1.0, 5.0, &spec).unwrap(), 0.0);
        let s = FunctionModel::log_abs_sin_pi();
        let v = s.j_imag(1.0, E, &spec).unwrap();
        // independent mpmath value of (1/pi) int_1^e log sinh(pi y) / y^2 dy
        assert!((v - 0.860_458_078_597_565).abs() < 1e-9, "{v}");
        assert!((v - 0.8601).abs() < 1e-3);
        assert!(lin.j_imag(2.0, 1.0, &spec).is_err());
    }

    #[test]
    fn j_imag_with_axis_zeros() {
        let spec = QuadSpec::default();
        let p = product(&[(0.0, 2.0), (0.0, -3.0), (1.0, 1.0)], Genus::Zero);
        let v = p.j_imag(1.0, 5.0, &spec).unwrap();
        // brute force: fine midpoint rule on panels that avoid the singular points
        let f = |y: f64| (p.eval(ComplexPoint::new(0.0, y)) + p.eval(ComplexPoint::new(0.0, -y))) / (y * y);
        let n = 4_000_000;
        let h = 4.0 / n as f64;
        let brute: f64 = (0..n).map(|i| f(1.0 + h * (i as f64 + 0.5))).sum::<f64>() * h / TAU;
        assert!((v - brute).abs() < 1e-5, "{v} vs {brute}");
        assert!(matches!(p.j_imag(2.0, 4.0, &spec), Err(Error::ZeroAtEndpoint(_))));
    }

    #[test]
    fn j_real_examples() {
        let spec = QuadSpec::default();
        let abs = |x: f64| x.abs();
        assert!((j_real(&abs, 1.0, E, &spec).unwrap() - 1.0 / PI).abs() < 1e-9);
        let two_pi = Profile::constant(TAU);
        let v = j_real(&two_pi, 2.0, 8.0, &spec).unwrap();
        assert!((v - 2.0 * (0.5 - 0.125)).abs() < 1e-12);
        assert_eq!(j_real(&Profile::Zero, 1.0, 9.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn type_examples() {
        let grid = [10.0, 100.0, 1000.0];
        let t = FunctionModel::radial_linear(1.0).type_estimate(&grid, 64).unwrap();
        assert!((t.value - 1.0).abs() < 1e-12);
        let t = FunctionModel::log_abs_sin_pi().type_estimate(&grid, 256).unwrap();
        assert!((t.value - PI).abs() < 0.01, "{}", t.value);
        assert_eq!(t.per_r.len(), 3);
        let zeros = Arc::new(AtomicMeasure::arithmetic("1..100", 1.0, 100.0, false).unwrap());
        let t = FunctionModel::canonical_product(zeros, Genus::One)
            .type_estimate(&grid, 256)
            .unwrap();
        assert!(t.value.is_finite());
    }

    #[test]
    fn sampled_model_on_imaginary_axis() {
        let m = FunctionModel::sampled(Axis::Imag, vec![[-10.0, 10.0], [0.0, 0.0], [10.0, 10.0]]).unwrap();
        // v(iy) = |y| on [-10, 10]
        let v = m.j_imag(1.0, E, &QuadSpec::default()).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-9);
        assert!(m.circle_avg_jensen(O, 1.0).is_err());
    }

    #[test]
    fn mean_value_chain() {
        let spec = QuadSpec {
            nodes: 4096,
            ..QuadSpec::default()
        };
        let s = FunctionModel::log_abs_sin_pi();
        let mv = s.mean_value(O, 2.5, &spec, true).unwrap();
        assert!(mv.b <= mv.c && mv.c <= mv.msup);
        assert_eq!(mv.method, MeanMethod::Hybrid);
        assert_eq!(mv.zeros_used, 5);
        let lin = FunctionModel::radial_linear(1.0).mean_value(ComplexPoint::new(1.0, 1.0), 2.0, &spec, false).unwrap();
        assert!(lin.b <= lin.c + 1e-9 && lin.c <= lin.msup + 1e-9);
    }
}
