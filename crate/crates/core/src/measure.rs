//! Finite atomic measures on the plane and their interval functionals.
//!
//! All radial queries use the half-open annulus `r < |z| <= R`. Membership is
//! decided by exact comparison on the computed modulus; there is no fuzz.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_interval, Error, Result};

/// A point of the complex plane.
pub type ComplexPoint = Complex64;

/// A weighted point mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub pos: ComplexPoint,
    pub weight: f64,
}

/// Nonnegative angular weight `k(arg z)`, 2π-periodic.
#[derive(Clone)]
pub enum AngularWeight {
    Unit,
    CosPlus,
    CosMinus,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for AngularWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit => write!(f, "Unit"),
            Self::CosPlus => write!(f, "CosPlus"),
            Self::CosMinus => write!(f, "CosMinus"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl AngularWeight {
    /// Weight of an atom at `z`. The argument of the origin is taken as 0.
    fn at(&self, z: ComplexPoint) -> f64 {
        let rho = z.norm();
        let cos = if rho == 0.0 { 1.0 } else { z.re / rho };
        match self {
            Self::Unit => 1.0,
            Self::CosPlus => cos.max(0.0),
            Self::CosMinus => (-cos).max(0.0),
            Self::Custom(k) => {
                let theta = if rho == 0.0 { 0.0 } else { z.arg() };
                k(theta)
            }
        }
    }
}

/// Which half-plane a logarithmic functional looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Re z > 0`, weight `Re(1/z)`.
    Right,
    /// `Re z < 0`, weight `Re(-1/z)`.
    Left,
}

/// Prefix tables for one side, over atoms sorted by modulus.
#[derive(Debug, Clone, Default)]
struct SideTables {
    /// `sum w * cos^±(arg z)` over the first `k` atoms.
    count: Vec<f64>,
    /// `sum w * Re(±1/z)` restricted to the side's open half-plane.
    log_sum: Vec<f64>,
    /// `H(rho_i)`: antiderivative of `mu(t; cos^±)/t^2` at each sorted radius.
    anchor: Vec<f64>,
}

/// A finite list of weighted atoms, immutable after construction.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    label: String,
    atoms: Vec<Atom>,
    radii: Vec<f64>,
    mass: Vec<f64>,
    right: SideTables,
    left: SideTables,
    /// Index of the first atom with positive modulus.
    first_positive: usize,
}

impl AtomicMeasure {
    pub fn new(label: impl Into<String>, atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            if !(a.pos.re.is_finite() && a.pos.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "atom position {} is not finite",
                    a.pos
                )));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "atom weight {} must be positive and finite",
                    a.weight
                )));
            }
        }
        let mut atoms = atoms;
        atoms.sort_by(|x, y| x.pos.norm().total_cmp(&y.pos.norm()));
        let radii: Vec<f64> = atoms.iter().map(|a| a.pos.norm()).collect();
        let first_positive = radii.partition_point(|&r| r == 0.0);
        let mut mass = Vec::with_capacity(atoms.len() + 1);
        mass.push(0.0);
        for a in &atoms {
            mass.push(mass.last().unwrap() + a.weight);
        }
        let right = Self::side_tables(&atoms, &radii, first_positive, Side::Right);
        let left = Self::side_tables(&atoms, &radii, first_positive, Side::Left);
        Ok(Self {
            label: label.into(),
            atoms,
            radii,
            mass,
            right,
            left,
            first_positive,
        })
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::new(label, Vec::new()).expect("empty measure is valid")
    }

    /// Unit atoms at `k * step` for `k = 1, 2, ...` while `k * step <= cutoff`;
    /// mirrored to `-k * step` when `both_signs`.
    pub fn arithmetic(label: impl Into<String>, step: f64, cutoff: f64, both_signs: bool) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && cutoff.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "arithmetic lattice needs a positive step (got {step})"
            )));
        }
        let n = (cutoff / step).floor().max(0.0) as usize;
        let mut atoms = Vec::with_capacity(if both_signs { 2 * n } else { n });
        for k in 1..=n {
            let x = k as f64 * step;
            if x > cutoff {
                break;
            }
            atoms.push(Atom {
                pos: ComplexPoint::new(x, 0.0),
                weight: 1.0,
            });
            if both_signs {
                atoms.push(Atom {
                    pos: ComplexPoint::new(-x, 0.0),
                    weight: 1.0,
                });
            }
        }
        Self::new(label, atoms)
    }

    fn side_tables(atoms: &[Atom], radii: &[f64], first_positive: usize, side: Side) -> SideTables {
        let k = match side {
            Side::Right => AngularWeight::CosPlus,
            Side::Left => AngularWeight::CosMinus,
        };
        let n = atoms.len();
        let mut count = Vec::with_capacity(n + 1);
        let mut log_sum = Vec::with_capacity(n + 1);
        count.push(0.0);
        log_sum.push(0.0);
        for a in atoms {
            count.push(count.last().unwrap() + a.weight * k.at(a.pos));
            log_sum.push(log_sum.last().unwrap() + a.weight * side_kernel(a.pos, side));
        }
        // H(rho_fp) = 0; on [rho_{i-1}, rho_i) the step function equals count[i].
        let mut anchor = vec![0.0; n];
        for i in first_positive + 1..n {
            anchor[i] = anchor[i - 1] + count[i] * (1.0 / radii[i - 1] - 1.0 / radii[i]);
        }
        SideTables {
            count,
            log_sum,
            anchor,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        *self.mass.last().unwrap()
    }

    /// Image of the measure under `z -> a z`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("dilation factor {a} must be positive")));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|x| Atom {
                pos: x.pos * a,
                weight: x.weight,
            })
            .collect();
        Self::new(format!("{}*{a}", self.label), atoms)
    }

    /// Number of atoms with `|z| <= t`.
    fn upto(&self, t: f64) -> usize {
        self.radii.partition_point(|&rho| rho <= t)
    }

    /// Sorted moduli of the atoms.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// `mu(r; k)`: sum of `w * k(arg z)` over atoms in the closed disk of radius `r`.
    pub fn counting_function(&self, r: f64, k: &AngularWeight) -> f64 {
        let n = self.upto(r);
        match k {
            AngularWeight::Unit => self.mass[n],
            AngularWeight::CosPlus => self.right.count[n],
            AngularWeight::CosMinus => self.left.count[n],
            AngularWeight::Custom(_) => self.atoms[..n].iter().map(|a| a.weight * k.at(a.pos)).sum(),
        }
    }

    /// `mu(D(0, r))` with the closed-disk convention of `counting_function`.
    pub fn radial_counting(&self, r: f64) -> f64 {
        self.mass[self.upto(r)]
    }

    /// Largest value of `mu^rad(r) / r` over the grid: a finite-range lower
    /// surrogate for the upper density `limsup mu^rad(r) / r`.
    pub fn upper_density_estimate(&self, r_grid: &[f64]) -> Result<f64> {
        if r_grid.is_empty() {
            return Err(Error::InvalidArgument("upper density needs a nonempty grid".into()));
        }
        if r_grid.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::InvalidArgument("upper density grid must be positive".into()));
        }
        Ok(r_grid
            .iter()
            .map(|&r| self.radial_counting(r) / r)
            .fold(0.0, f64::max))
    }

    fn tables(&self, side: Side) -> &SideTables {
        match side {
            Side::Right => &self.right,
            Side::Left => &self.left,
        }
    }

    /// Logarithmic measure of `(r, R]` on one side.
    pub fn l_side(&self, side: Side, r: f64, big_r: f64) -> Result<f64> {
        check_interval(r, big_r)?;
        let t = self.tables(side);
        let v = t.log_sum[self.upto(big_r)] - t.log_sum[self.upto(r)];
        Ok(v.max(0.0))
    }

    pub fn l_rh(&self, r: f64, big_r: f64) -> Result<f64> {
        self.l_side(Side::Right, r, big_r)
    }

    pub fn l_lh(&self, r: f64, big_r: f64) -> Result<f64> {
        self.l_side(Side::Left, r, big_r)
    }

    /// `max(l_rh, l_lh)`.
    pub fn l_submeasure(&self, r: f64, big_r: f64) -> Result<f64> {
        Ok(self.l_rh(r, big_r)?.max(self.l_lh(r, big_r)?))
    }

    /// Antiderivative of `mu(t; cos^±) / t^2`, exact for the step function.
    fn breve_antiderivative(&self, side: Side, t: f64) -> f64 {
        let tab = self.tables(side);
        let k = self.upto(t);
        let fp = self.first_positive;
        if k <= fp {
            // only atoms at the origin lie in the disk
            let inv_first = self.radii.get(fp).map_or(0.0, |r| 1.0 / r);
            return -tab.count[fp] * (1.0 / t - inv_first);
        }
        tab.anchor[k - 1] + tab.count[k] * (1.0 / self.radii[k - 1] - 1.0 / t)
    }

    /// `int_r^R mu(t; cos^±) / t^2 dt`, integrated exactly between jump radii.
    pub fn breve_side(&self, side: Side, r: f64, big_r: f64) -> Result<f64> {
        check_interval(r, big_r)?;
        let v = self.breve_antiderivative(side, big_r) - self.breve_antiderivative(side, r);
        Ok(v.max(0.0))
    }

    pub fn breve_l_rh(&self, r: f64, big_r: f64) -> Result<f64> {
        self.breve_side(Side::Right, r, big_r)
    }

    pub fn breve_l_lh(&self, r: f64, big_r: f64) -> Result<f64> {
        self.breve_side(Side::Left, r, big_r)
    }

    pub fn breve_l_submeasure(&self, r: f64, big_r: f64) -> Result<f64> {
        Ok(self.breve_l_rh(r, big_r)?.max(self.breve_l_lh(r, big_r)?))
    }
}

fn side_kernel(z: ComplexPoint, side: Side) -> f64 {
    let d = z.norm_sqr();
    match side {
        Side::Right if z.re > 0.0 => z.re / d,
        Side::Left if z.re < 0.0 => -z.re / d,
        _ => 0.0,
    }
}
