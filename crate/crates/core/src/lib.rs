//! Growth functionals of atomic measures and zero-generated subharmonic
//! functions: logarithmic measures of intervals, circle and disk means,
//! J-integrals, logarithmic block-densities, excision weights and
//! executable checks of the growth/uniqueness inequalities built on them.

pub mod density;
pub mod error;
pub mod excision;
pub mod grid;
pub mod measure;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod verify;

pub use density::{
    combine_max, combine_sum, dens_b, dens_bar, dens_inf, dens_underbar, density_summary, submeasure_check, DensityEstimate,
    DensityRow, DensitySummary, DensityVariant, EstimatorConfig, IntervalFunction, SubmeasureReport,
};
pub use error::{Error, Result};
pub use excision::{lemma_le_probe, ExcisionProbe, ExcisionSet};
pub use grid::{log_space, LogGrid};
pub use measure::{AngularWeight, Atom, AtomicMeasure, ComplexPoint, Side};
pub use potential::{j_real, Axis, AxisFunction, FunctionModel, Genus, MeanMethod, MeanValue, ModelKind, TypeEstimate};
pub use profile::{CustomProfile, Profile};
pub use quad::{Integral, QuadSpec};
pub use verify::{
    hypothesis_check, prop2_d_function, propqn_check, tail_integral_in, theorem1_margin, theorem2_check, theorem3_decide,
    Decision, GrowthPair, HypothesisSpec, Theorem3Outcome, VerificationReport, Verdict,
};
