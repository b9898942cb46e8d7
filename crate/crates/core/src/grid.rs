//! Logarithmically spaced grids and pair enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A log-spaced grid description: `per_decade` points per factor of ten
/// from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub start: f64,
    pub stop: f64,
    pub per_decade: usize,
}

impl LogGrid {
    pub fn new(start: f64, stop: f64, per_decade: usize) -> Self {
        Self {
            start,
            stop,
            per_decade,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        log_space(self.start, self.stop, self.per_decade)
    }
}

/// Log-spaced points from `start` to `stop` (both included).
///
/// Powers of ten falling on the lattice are reproduced exactly, so grids
/// with integer decades hit `10^k` bit-for-bit.
pub fn log_space(start: f64, stop: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop >= start && stop.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidArgument(format!(
            "log grid needs 0 < start <= stop, per_decade > 0 (got {start}, {stop}, {per_decade})"
        )));
    }
    let decades = (stop / start).log10();
    let steps = (decades * per_decade as f64).round().max(0.0) as usize;
    if steps == 0 {
        return Ok(vec![start]);
    }
    let l0 = start.log10();
    let l1 = stop.log10();
    let mut out = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let e = l0 + (l1 - l0) * i as f64 / steps as f64;
        let rounded = e.round();
        let v = if (e - rounded).abs() < 1e-12 {
            10f64.powi(rounded as i32)
        } else {
            10f64.powf(e)
        };
        out.push(v);
    }
    out[0] = start;
    out[steps] = stop;
    Ok(out)
}

/// Checks that `points` is nonempty, positive, finite and strictly increasing.
pub fn validate_increasing(points: &[f64], what: &str) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(format!("{what}: grid is empty")));
    }
    if points.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "{what}: grid points must be positive and finite"
        )));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{what}: grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// All index pairs `(i, j)` with `i < j`.
pub fn index_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
