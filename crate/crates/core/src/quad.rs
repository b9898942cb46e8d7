//! Adaptive Gauss-Kronrod quadrature on bounded intervals.
//!
//! The 7/15-point pair never evaluates the integrand at interval endpoints,
//! so integrable logarithmic singularities may sit exactly on a panel edge.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Quadrature controls shared by the circle rules and the adaptive line rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadSpec {
    /// Node count for periodic (circle) trapezoidal rules.
    pub nodes: usize,
    /// Relative tolerance for adaptive line integrals.
    pub tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            nodes: 4096,
            tol: 1e-11,
            max_depth: 48,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
}

/// One 15-point Kronrod evaluation with its embedded 7-point Gauss estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for (j, x) in XGK.iter().enumerate().take(7) {
        let dx = h * x;
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the total error
/// falls below `max(abs_tol, spec.tol * |value|)`. Fails when a panel would
/// exceed `spec.max_depth` or the integrand turns non-finite.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, spec: &QuadSpec) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_err: 0.0,
        });
    }
    let (v, e) = gk15(f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v,
        err: e,
        depth: 0,
    }];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if !value.is_finite() || !err.is_finite() {
            let worst = panels
                .iter()
                .find(|p| !p.value.is_finite() || !p.err.is_finite())
                .map(|p| 0.5 * (p.a + p.b))
                .unwrap_or(a);
            return Err(Error::NonFinite { at: worst, value });
        }
        if err <= abs_tol.max(spec.tol * value.abs()) {
            return Ok(Integral {
                value,
                abs_err: err,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("nonempty");
        let p = panels.swap_remove(idx);
        if p.depth >= spec.max_depth {
            return Err(Error::QuadratureFailed { a, b, err });
        }
        let m = 0.5 * (p.a + p.b);
        for (lo, hi) in [(p.a, m), (m, p.b)] {
            let (v, e) = gk15(f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value: v,
                err: e,
                depth: p.depth + 1,
            });
        }
    }
}

/// Integrates over `[a, b]` split at the given break points and at every
/// factor-of-two step, so integrands decaying like powers of `x` keep a
/// uniform relative accuracy across decades. Requires `0 < a <= b`.
pub fn integrate_log_panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<Integral> {
    let mut edges = vec![a];
    let mut x = a * 2.0;
    while x < b {
        edges.push(x);
        x *= 2.0;
    }
    edges.extend(breaks.iter().copied().filter(|&t| t > a && t < b));
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = Integral {
        value: 0.0,
        abs_err: 0.0,
    };
    for w in edges.windows(2) {
        let part = integrate(f, w[0], w[1], 1e-15, spec)?;
        total.value += part.value;
        total.abs_err += part.abs_err;
    }
    Ok(total)
}
