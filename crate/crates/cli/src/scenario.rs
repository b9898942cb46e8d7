//! Scenario files: named measures and models plus per-command sections.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use growthlab::density::EstimatorConfig;
use growthlab::potential::{Axis, Genus};
use growthlab::{Atom, AtomicMeasure, ComplexPoint, FunctionModel, HypothesisSpec, LogGrid, Profile, QuadSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub re: f64,
    pub im: f64,
    #[serde(default = "one")]
    pub w: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSource {
    Atoms(Vec<AtomJson>),
    /// JSON array of atoms, relative to the scenario file.
    File(PathBuf),
    Lattice {
        step: f64,
        cutoff: f64,
        #[serde(default)]
        both_signs: bool,
    },
    Empty {},
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ZerosRef {
    Name(String),
    Atoms(Vec<AtomJson>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    CanonicalProduct {
        zeros: ZerosRef,
        #[serde(default)]
        genus: u8,
    },
    LogAbsSinPi {
        #[serde(default = "one")]
        scale: f64,
    },
    RadialLinear {
        c: f64,
    },
    Sampled {
        axis: Axis,
        points: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    pub measures: Vec<String>,
    #[serde(default)]
    pub grid: Option<LogGrid>,
    #[serde(default)]
    pub pairs: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvgPoint {
    pub model: String,
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvgSection {
    pub points: Vec<AvgPoint>,
    #[serde(default)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    LogRatio {
        #[serde(default = "one")]
        scale: f64,
    },
    Submeasure {
        measure: String,
    },
    RightMeasure {
        measure: String,
    },
    LeftMeasure {
        measure: String,
    },
    JImag {
        model: String,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
    Max {
        terms: Vec<FunctionSpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRefs {
    pub u: String,
    #[serde(rename = "M")]
    pub m: String,
    pub nu: String,
    pub mu: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcisionProbeSection {
    pub model: String,
    pub grid: LogGrid,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSection {
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsSection {
    #[serde(default)]
    pub q: Option<Profile>,
    #[serde(default = "default_n_search")]
    pub n_search: u32,
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    #[serde(default, rename = "P")]
    pub p: Option<Profile>,
    #[serde(default)]
    pub r0: Option<f64>,
    #[serde(default, rename = "R_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default)]
    pub excision_probe: Option<ExcisionProbeSection>,
    #[serde(default)]
    pub random: Option<RandomSection>,
}

fn default_n_search() -> u32 {
    4
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default)]
    pub pair: Option<PairRefs>,
    #[serde(default)]
    pub hypothesis: HypothesisSpec,
    #[serde(default, rename = "N")]
    pub n: u32,
    #[serde(default)]
    pub r0: Option<f64>,
    #[serde(default)]
    pub grid: Option<LogGrid>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    /// Zero set for the uniqueness decision.
    #[serde(default)]
    pub zeros: Option<String>,
    /// Majorant model for the uniqueness decision.
    #[serde(default)]
    pub majorant: Option<String>,
    #[serde(default)]
    pub props: Option<PropsSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSource>,
    #[serde(default)]
    pub models: BTreeMap<String, ModelSpec>,
    #[serde(default)]
    pub quad: QuadSpec,
    #[serde(default)]
    pub measure: Option<MeasureSection>,
    #[serde(default)]
    pub avg: Option<AvgSection>,
    #[serde(default)]
    pub density: Option<DensitySection>,
    #[serde(default)]
    pub verify: Option<VerifySection>,
}

/// Parses JSON text, reporting `path:line:column` on failure.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text, path)
}

/// Resolves names against the scenario, building each measure once.
pub struct Resolver<'a> {
    scenario: &'a Scenario,
    base: PathBuf,
    measures: BTreeMap<String, Arc<AtomicMeasure>>,
    models: BTreeMap<String, Arc<FunctionModel>>,
}

fn atoms_from_json(list: &[AtomJson]) -> Vec<Atom> {
    list.iter()
        .map(|a| Atom {
            pos: ComplexPoint::new(a.re, a.im),
            weight: a.w,
        })
        .collect()
}

impl<'a> Resolver<'a> {
    pub fn new(scenario: &'a Scenario, scenario_path: &Path) -> Self {
        Self {
            scenario,
            base: scenario_path.parent().map(Path::to_path_buf).unwrap_or_default(),
            measures: BTreeMap::new(),
            models: BTreeMap::new(),
        }
    }

    pub fn measure(&mut self, name: &str) -> Result<Arc<AtomicMeasure>, CliError> {
        if let Some(m) = self.measures.get(name) {
            return Ok(m.clone());
        }
        let src = self
            .scenario
            .measures
            .get(name)
            .ok_or_else(|| CliError::Malformed(format!("unknown measure `{name}`")))?;
        let built = match src {
            MeasureSource::Atoms(list) => AtomicMeasure::new(name, atoms_from_json(list)),
            MeasureSource::File(rel) => {
                let path = self.base.join(rel);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let list: Vec<AtomJson> = parse_json(&text, &path)?;
                AtomicMeasure::new(name, atoms_from_json(&list))
            }
            MeasureSource::Lattice { step, cutoff, both_signs } => AtomicMeasure::arithmetic(name, *step, *cutoff, *both_signs),
            MeasureSource::Empty {} => Ok(AtomicMeasure::empty(name)),
        }
        .map_err(|e| CliError::Malformed(format!("measure `{name}`: {e}")))?;
        let built = Arc::new(built);
        self.measures.insert(name.to_string(), built.clone());
        Ok(built)
    }

    pub fn model(&mut self, name: &str) -> Result<Arc<FunctionModel>, CliError> {
        if let Some(m) = self.models.get(name) {
            return Ok(m.clone());
        }
        let spec = self
            .scenario
            .models
            .get(name)
            .ok_or_else(|| CliError::Malformed(format!("unknown model `{name}`")))?
            .clone();
        let bad = |e: growthlab::Error| CliError::Malformed(format!("model `{name}`: {e}"));
        let mut model = match spec {
            ModelSpec::CanonicalProduct { zeros, genus } => {
                let genus = Genus::try_from(genus).map_err(bad)?;
                let zeros = match zeros {
                    ZerosRef::Name(n) => self.measure(&n)?,
                    ZerosRef::Atoms(list) => Arc::new(AtomicMeasure::new(name, atoms_from_json(&list)).map_err(bad)?),
                };
                FunctionModel::canonical_product(zeros, genus)
            }
            ModelSpec::LogAbsSinPi { scale } => FunctionModel::log_abs_sin_pi_scaled(scale),
            ModelSpec::RadialLinear { c } => FunctionModel::radial_linear(c),
            ModelSpec::Sampled { axis, points } => FunctionModel::sampled(axis, points).map_err(bad)?,
        };
        model.validate().map_err(bad)?;
        model.metadata = format!("{name}: {}", model.metadata);
        let model = Arc::new(model);
        self.models.insert(name.to_string(), model.clone());
        Ok(model)
    }
}
