//! Even nonnegative profiles on the real line: the additive terms `q`, `q0`
//! and the growth functions `P` used by the verifier.
//!
//! Every profile is a function of `|y|`, so `Q(s) = q(s) + q(-s) = 2 q(s)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// User-supplied profile with optional declared asymptotics.
#[derive(Clone)]
pub struct CustomProfile {
    pub label: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `limsup q(y)/|y|`, when known.
    pub slope: Option<f64>,
    /// `(t, N) -> sup_{s >= t} Q(s) / s^(2+N)`.
    pub tail_sup: Option<Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>>,
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("label", &self.label)
            .field("slope", &self.slope)
            .field("tail_sup", &self.tail_sup.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Constant { c: f64 },
    /// `a|y| + b`
    Linear { a: f64, b: f64 },
    /// `c|y|^alpha`
    Power { c: f64, alpha: f64 },
    /// Piecewise linear in `|y|` through the given `[s, value]` points,
    /// constant beyond the first and last abscissa.
    Sampled { points: Vec<[f64; 2]> },
    Sum { terms: Vec<Profile> },
    #[serde(skip)]
    Custom(CustomProfile),
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Zero
    }
}

impl Profile {
    pub fn constant(c: f64) -> Self {
        Profile::Constant { c }
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Profile::Linear { a, b }
    }

    pub fn power(c: f64, alpha: f64) -> Self {
        Profile::Power { c, alpha }
    }

    pub fn sum(terms: Vec<Profile>) -> Self {
        Profile::Sum { terms }
    }

    /// Checks nonnegativity and continuity constraints of the parametric families.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self {
            Profile::Zero | Profile::Custom(_) => Ok(()),
            Profile::Constant { c } if !(*c >= 0.0 && c.is_finite()) => bad(format!("constant profile {c} must be >= 0")),
            Profile::Linear { a, b } if !(*a >= 0.0 && *b >= 0.0 && a.is_finite() && b.is_finite()) => {
                bad(format!("linear profile needs a, b >= 0 (got {a}, {b})"))
            }
            Profile::Power { c, alpha } if !(*c >= 0.0 && *alpha >= 0.0 && c.is_finite() && alpha.is_finite()) => {
                bad(format!("power profile needs c, alpha >= 0 (got {c}, {alpha})"))
            }
            Profile::Sampled { points } => {
                if points.is_empty() {
                    return bad("sampled profile needs at least one point".into());
                }
                if points.windows(2).any(|w| w[0][0] >= w[1][0]) {
                    return bad("sampled profile abscissae must increase".into());
                }
                if points.iter().any(|p| p[0] < 0.0 || !(p[1] >= 0.0) || !p[1].is_finite()) {
                    return bad("sampled profile needs s >= 0 and finite values >= 0".into());
                }
                Ok(())
            }
            Profile::Sum { terms } => terms.iter().try_for_each(Profile::validate),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Profile::Zero => "0".into(),
            Profile::Constant { c } => format!("{c}"),
            Profile::Linear { a, b } => format!("{a}|y|+{b}"),
            Profile::Power { c, alpha } => format!("{c}|y|^{alpha}"),
            Profile::Sampled { points } => format!("sampled[{}]", points.len()),
            Profile::Sum { terms } => terms.iter().map(Profile::label).collect::<Vec<_>>().join(" + "),
            Profile::Custom(c) => c.label.clone(),
        }
    }

    /// `q(y)`.
    pub fn value(&self, y: f64) -> f64 {
        let s = y.abs();
        match self {
            Profile::Zero => 0.0,
            Profile::Constant { c } => *c,
            Profile::Linear { a, b } => a * s + b,
            Profile::Power { c, alpha } => {
                if *alpha == 0.0 {
                    *c
                } else {
                    c * s.powf(*alpha)
                }
            }
            Profile::Sampled { points } => interp(points, s),
            Profile::Sum { terms } => terms.iter().map(|t| t.value(s)).sum(),
            Profile::Custom(c) => (c.f)(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Constant { c } => *c == 0.0,
            Profile::Linear { a, b } => *a == 0.0 && *b == 0.0,
            Profile::Power { c, .. } => *c == 0.0,
            Profile::Sampled { points } => points.iter().all(|p| p[1] == 0.0),
            Profile::Sum { terms } => terms.iter().all(Profile::is_zero),
            Profile::Custom(_) => false,
        }
    }

    /// `limsup_{|y| -> inf} q(y)/|y|`; `None` when undeclared.
    pub fn asymptotic_slope(&self) -> Option<f64> {
        match self {
            Profile::Zero | Profile::Constant { .. } | Profile::Sampled { .. } => Some(0.0),
            Profile::Linear { a, .. } => Some(*a),
            Profile::Power { c, alpha } => Some(if *c == 0.0 || *alpha < 1.0 {
                0.0
            } else if *alpha == 1.0 {
                *c
            } else {
                f64::INFINITY
            }),
            Profile::Sum { terms } => terms.iter().map(Profile::asymptotic_slope).sum(),
            Profile::Custom(c) => c.slope,
        }
    }

    /// `limsup y Q'(y)/Q(y)` for differentiable families; `None` otherwise.
    pub fn log_derivative_limsup(&self) -> Option<f64> {
        match self {
            Profile::Zero | Profile::Constant { .. } | Profile::Sampled { .. } => Some(0.0),
            Profile::Linear { a, .. } => Some(if *a > 0.0 { 1.0 } else { 0.0 }),
            Profile::Power { c, alpha } => Some(if *c > 0.0 { *alpha } else { 0.0 }),
            Profile::Sum { terms } => terms
                .iter()
                .map(Profile::log_derivative_limsup)
                .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v))),
            Profile::Custom(_) => None,
        }
    }

    /// Abscissae where the profile has kinks.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Profile::Sampled { points } => points.iter().map(|p| p[0]).collect(),
            Profile::Sum { terms } => terms.iter().flat_map(Profile::kinks).collect(),
            _ => Vec::new(),
        }
    }

    /// Point beyond which `Q(s)/s^(2+N)` is known to be nonincreasing.
    fn decreasing_from(&self, n: f64) -> Result<Option<f64>> {
        match self {
            Profile::Zero | Profile::Constant { .. } | Profile::Linear { .. } => Ok(Some(0.0)),
            Profile::Power { c, alpha } => {
                if *c > 0.0 && *alpha > 2.0 + n {
                    Err(Error::UnboundedTail(self.label()))
                } else {
                    Ok(Some(0.0))
                }
            }
            Profile::Sampled { points } => Ok(Some(points.last().map_or(0.0, |p| p[0]))),
            Profile::Sum { terms } => {
                let mut hi = 0.0f64;
                for t in terms {
                    match t.decreasing_from(n)? {
                        Some(v) => hi = hi.max(v),
                        None => return Ok(None),
                    }
                }
                Ok(Some(hi))
            }
            Profile::Custom(_) => Ok(None),
        }
    }

    /// `sup_{s >= t} Q(s) / s^(2+N)` with `Q(s) = 2 q(s)`.
    ///
    /// Analytic for the parametric families; sampled parts are maximized over
    /// their segments with golden-section refinement; custom profiles need a
    /// declared tail supremum.
    pub fn tail_sup(&self, t: f64, n: f64) -> Result<f64> {
        if !(t > 0.0) || !(n >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail sup needs t > 0, N >= 0 (got {t}, {n})")));
        }
        if let Profile::Custom(c) = self {
            return match &c.tail_sup {
                Some(ts) => Ok(ts(t, n)),
                None => Err(Error::UndeclaredTail(c.label.clone())),
            };
        }
        let k = 2.0 + n;
        let qn = |s: f64| 2.0 * self.value(s) / s.powf(k);
        let from = match self.decreasing_from(n)? {
            Some(v) => v,
            None => return Err(Error::UndeclaredTail(self.label())),
        };
        if t >= from {
            return Ok(qn(t));
        }
        let mut knots: Vec<f64> = self.kinks().into_iter().filter(|&s| s > t && s < from).collect();
        knots.push(t);
        knots.push(from);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut best = knots.iter().map(|&s| qn(s)).fold(f64::NEG_INFINITY, f64::max);
        for w in knots.windows(2) {
            best = best.max(maximize_on(&qn, w[0], w[1]));
        }
        Ok(best)
    }
}

fn interp(points: &[[f64; 2]], s: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if s <= first[0] {
        return first[1];
    }
    if s >= last[0] {
        return last[1];
    }
    let i = points.partition_point(|p| p[0] <= s);
    let (p0, p1) = (points[i - 1], points[i]);
    let w = (s - p0[0]) / (p1[0] - p0[0]);
    p0[1] + w * (p1[1] - p0[1])
}

/// Grid scan plus golden-section polish of `f` on `[a, b]`.
pub(crate) fn maximize_on<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    const GRID: usize = 16;
    let h = (b - a) / GRID as f64;
    let mut best_i = 0;
    let mut best = f(a);
    for i in 1..=GRID {
        let v = f(a + h * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = (a + h * (best_i as f64 - 1.0)).max(a);
    let hi = (a + h * (best_i as f64 + 1.0)).min(b);
    best.max(golden_max(f, lo, hi, 60))
}

pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_are_even() {
        for p in [Profile::linear(0.5, 1.0), Profile::power(2.0, 0.5), Profile::constant(3.0)] {
            assert_eq!(p.value(-4.0), p.value(4.0));
        }
        assert_eq!(Profile::linear(0.5, 1.0).value(-4.0), 3.0);
    }

    #[test]
    fn slopes() {
        assert_eq!(Profile::linear(0.75, 1.0).asymptotic_slope(), Some(0.75));
        assert_eq!(Profile::power(2.0, 0.5).asymptotic_slope(), Some(0.0));
        assert_eq!(Profile::power(0.5, 1.0).asymptotic_slope(), Some(0.5));
        assert_eq!(Profile::sum(vec![Profile::linear(0.25, 0.0), Profile::power(0.5, 1.0)]).asymptotic_slope(), Some(0.75));
    }

    #[test]
    fn tail_sup_parametric_is_pointwise() {
        let p = Profile::linear(0.5, 2.0);
        let t = 3.0;
        assert!((p.tail_sup(t, 0.0).unwrap() - 2.0 * 3.5 / 9.0).abs() < 1e-15);
        assert!(matches!(Profile::power(1.0, 3.0).tail_sup(1.0, 0.0), Err(Error::UnboundedTail(_))));
    }

    #[test]
    fn tail_sup_sampled_bump() {
        // q rises to 100 at s = 10 then stays there: sup of 2q/s^2 from t = 1 is
        // attained on the rising segment or at the knot.
        let p = Profile::Sampled {
            points: vec![[0.0, 0.0], [10.0, 100.0]],
        };
        let v = p.tail_sup(1.0, 0.0).unwrap();
        // on [1, 10] 2*10s/s^2 = 20/s is decreasing, so the sup is at t = 1
        assert!((v - 20.0).abs() < 1e-9);
        let p = Profile::Sampled {
            points: vec![[0.0, 0.0], [2.0, 0.0], [4.0, 100.0]],
        };
        // 2*(50 s - 100)/s^2 peaks at s = 4
        let v = p.tail_sup(1.0, 0.0).unwrap();
        assert!((v - 12.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn custom_needs_declared_tail() {
        let c = Profile::Custom(CustomProfile {
            label: "osc".into(),
            f: Arc::new(|s: f64| 1.0 + s.sin()),
            slope: Some(0.0),
            tail_sup: None,
        });
        assert!(matches!(c.tail_sup(1.0, 0.0), Err(Error::UndeclaredTail(_))));
    }

    #[test]
    fn json_round_trip() {
        let p: Profile = serde_json::from_str(r#"{"kind":"sum","terms":[{"kind":"constant","c":1.0},{"kind":"power","c":0.5,"alpha":0.5}]}"#).unwrap();
        assert!((p.value(4.0) - 2.0).abs() < 1e-15);
        let back: Profile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back.value(9.0), p.value(9.0));
    }

    #[test]
    fn validation() {
        assert!(Profile::linear(-1.0, 0.0).validate().is_err());
        assert!(Profile::Sampled { points: vec![[1.0, 1.0], [1.0, 2.0]] }.validate().is_err());
        assert!(Profile::power(1.0, 0.5).validate().is_ok());
    }
}
