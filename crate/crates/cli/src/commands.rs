//! The four subcommands. Each computes its tables first and hands them to
//! an [`Output`] that writes files in a fixed order.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use growthlab::density::{combine_max, combine_sum, density_summary, EstimatorConfig, IntervalFunction};
use growthlab::grid::{index_pairs, log_space};
use growthlab::{
    hypothesis_check, lemma_le_probe, prop2_d_function, propqn_check, theorem1_margin, theorem2_check, theorem3_decide,
    AngularWeight, Atom, AtomicMeasure, ComplexPoint, ExcisionSet, GrowthPair, HypothesisSpec, LogGrid, QuadSpec, Side,
    VerificationReport,
};

use crate::error::CliError;
use crate::format::{fmt_g, Csv};
use crate::scenario::{FunctionSpec, Resolver, Scenario, VerifySection};

/// Files written during one run, removed again if the run fails.
pub struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn cleanup(&self) {
        for p in &self.written {
            let _ = std::fs::remove_file(p);
        }
    }
}

/// Options shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub grid_scale: usize,
    pub seed: u64,
}

fn scaled(grid: &LogGrid, opts: RunOptions) -> LogGrid {
    LogGrid {
        per_decade: grid.per_decade * opts.grid_scale,
        ..*grid
    }
}

fn scaled_cfg(cfg: &EstimatorConfig, opts: RunOptions) -> EstimatorConfig {
    cfg.with_grid_scale(cfg.per_decade * opts.grid_scale)
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Malformed(format!("scenario has no `{name}` section")))
}

pub fn cmd_measure(sc: &Scenario, path: &Path, out: &mut Output, opts: RunOptions) -> Result<(), CliError> {
    let sec = section(&sc.measure, "measure")?;
    let mut res = Resolver::new(sc, path);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    if let Some(g) = &sec.grid {
        let pts = scaled(g, opts).points()?;
        pairs.extend(index_pairs(pts.len()).map(|(i, j)| (pts[i], pts[j])));
    }
    for p in &sec.pairs {
        if !pairs.contains(&(p[0], p[1])) {
            pairs.push((p[0], p[1]));
        }
    }
    if pairs.is_empty() {
        return Err(CliError::Malformed("measure section needs a grid or explicit pairs".into()));
    }
    for name in &sec.measures {
        let mu = res.measure(name)?;
        let mut csv = Csv::new(&["r", "R", "l_rh", "l_lh", "l_sub", "breve_rh", "breve_lh", "breve_sub"]);
        for &(r, big_r) in &pairs {
            csv.num_row(&[
                r,
                big_r,
                mu.l_rh(r, big_r)?,
                mu.l_lh(r, big_r)?,
                mu.l_submeasure(r, big_r)?,
                mu.breve_l_rh(r, big_r)?,
                mu.breve_l_lh(r, big_r)?,
                mu.breve_l_submeasure(r, big_r)?,
            ]);
        }
        out.write(&format!("measure_{}.csv", file_stem(name)), &csv.into_string())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AvgSummary {
    points: usize,
    max_difference: f64,
}

pub fn cmd_avg(sc: &Scenario, path: &Path, out: &mut Output, _opts: RunOptions) -> Result<(), CliError> {
    let sec = section(&sc.avg, "avg")?;
    let mut res = Resolver::new(sc, path);
    let spec = QuadSpec {
        nodes: sec.nodes.unwrap_or(1 << 16),
        ..sc.quad
    };
    let mut csv = Csv::new(&[
        "model",
        "center_re",
        "center_im",
        "radius",
        "C_jensen",
        "C_quadrature",
        "difference",
        "B",
        "Msup",
        "method",
    ]);
    let mut max_diff = 0.0f64;
    for p in &sec.points {
        let model = res.model(&p.model)?;
        let z = ComplexPoint::new(p.center[0], p.center[1]);
        let mv = model.mean_value(z, p.radius, &spec, true)?;
        let (cj, cq) = match mv.c_quadrature {
            Some(q) => (mv.c, q),
            None => (f64::NAN, mv.c),
        };
        let diff = (cj - cq).abs();
        if diff.is_finite() {
            max_diff = max_diff.max(diff);
        }
        let method = serde_json::to_value(mv.method)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let mut cells = vec![p.model.clone()];
        cells.extend([z.re, z.im, p.radius, cj, cq, diff, mv.b, mv.msup].iter().map(|&v| fmt_g(v)));
        cells.push(method);
        csv.raw_row(cells);
    }
    out.write("avg.csv", &csv.into_string())?;
    out.json(
        "avg_summary.json",
        &AvgSummary {
            points: sec.points.len(),
            max_difference: max_diff,
        },
    )
}

fn build_function(
    spec: &FunctionSpec,
    res: &mut Resolver,
    cfg: &EstimatorConfig,
    quad: &QuadSpec,
) -> Result<IntervalFunction, CliError> {
    Ok(match spec {
        FunctionSpec::LogRatio { scale } => IntervalFunction::log_ratio().scaled(*scale),
        FunctionSpec::Submeasure { measure } => IntervalFunction::submeasure(res.measure(measure)?),
        FunctionSpec::RightMeasure { measure } => IntervalFunction::side(res.measure(measure)?, Side::Right),
        FunctionSpec::LeftMeasure { measure } => IntervalFunction::side(res.measure(measure)?, Side::Left),
        FunctionSpec::JImag { model } => IntervalFunction::j_imag(res.model(model)?, &cfg.nodes()?, *quad)?,
        FunctionSpec::Sum { terms } | FunctionSpec::Max { terms } => {
            let mut acc: Option<IntervalFunction> = None;
            for t in terms {
                let f = build_function(t, res, cfg, quad)?;
                acc = Some(match acc {
                    None => f,
                    Some(a) if matches!(spec, FunctionSpec::Sum { .. }) => combine_sum(&a, &f)?,
                    Some(a) => combine_max(&a, &f)?,
                });
            }
            acc.ok_or_else(|| CliError::Malformed("empty sum/max of interval functions".into()))?
        }
    })
}

pub fn cmd_density(sc: &Scenario, path: &Path, out: &mut Output, opts: RunOptions) -> Result<(), CliError> {
    let sec = section(&sc.density, "density")?;
    let cfg = scaled_cfg(&sec.estimator, opts);
    cfg.validate()?;
    let mut res = Resolver::new(sc, path);
    let mut summaries = Vec::new();
    for f in &sec.functions {
        let l = build_function(f, &mut res, &cfg, &sc.quad)?;
        summaries.push(density_summary(&l, &cfg)?);
    }
    let mut summary = Csv::new(&["function", "bar", "underbar", "inf", "b", "spread"]);
    let mut table = Csv::new(&["function", "variant", "a", "r", "l", "ratio"]);
    let mut probes = Csv::new(&["function", "b", "growth"]);
    for s in &summaries {
        let mut cells = vec![s.label.clone()];
        cells.extend(s.values().iter().chain(std::iter::once(&s.spread())).map(|&v| fmt_g(v)));
        summary.raw_row(cells);
        for est in [&s.bar, &s.underbar, &s.inf] {
            for row in &est.rows {
                let mut cells = vec![s.label.clone(), est.variant.name().to_string()];
                cells.extend([row.a, row.r, row.l, row.ratio].iter().map(|&v| fmt_g(v)));
                table.raw_row(cells);
            }
        }
        for &(b, g) in &s.b.per_a_values {
            probes.raw_row([s.label.clone(), fmt_g(b), fmt_g(g)]);
        }
    }
    out.write("density_summary.csv", &summary.into_string())?;
    out.write("density_table.csv", &table.into_string())?;
    out.write("density_b_probes.csv", &probes.into_string())?;
    out.json("density_summary.json", &summaries)
}

/// Which verification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Thm1,
    Thm2,
    Thm3,
    Props,
}

fn report_csv(rep: &VerificationReport) -> String {
    let cols: Vec<&str> = rep.columns.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&cols);
    for row in &rep.rows {
        csv.num_row(row);
    }
    csv.into_string()
}

fn write_report(out: &mut Output, stem: &str, rep: &VerificationReport) -> Result<(), CliError> {
    out.write(&format!("{stem}.csv"), &report_csv(rep))?;
    out.json(&format!("{stem}.json"), rep)
}

fn pair(sec: &VerifySection, res: &mut Resolver) -> Result<GrowthPair, CliError> {
    let p = section(&sec.pair, "verify.pair")?;
    Ok(GrowthPair::new(res.model(&p.u)?, res.model(&p.m)?, res.measure(&p.nu)?, res.measure(&p.mu)?)?)
}

/// The hypothesis grid, defaulting to the margin grid or `[1, 1e4]`.
fn hypothesis(sec: &VerifySection, grid: Option<&[f64]>) -> Result<HypothesisSpec, CliError> {
    let mut h = sec.hypothesis.clone();
    if h.y_grid.is_empty() {
        h.y_grid = match grid {
            Some(g) => g.to_vec(),
            None => log_space(1.0, 1e4, 8)?,
        };
    }
    Ok(h)
}

pub fn cmd_verify(sc: &Scenario, path: &Path, out: &mut Output, opts: RunOptions, which: Which) -> Result<(), CliError> {
    let sec = section(&sc.verify, "verify")?;
    let mut res = Resolver::new(sc, path);
    let quad = sc.quad;
    match which {
        Which::Thm1 => {
            let grid = scaled(section(&sec.grid, "verify.grid")?, opts).points()?;
            let spec = hypothesis(sec, Some(&grid))?;
            let pair = pair(sec, &mut res)?;
            let hyp = hypothesis_check(&pair, &spec, &quad)?;
            let rep = theorem1_margin(&pair, &spec, sec.n, sec.r0.unwrap_or(grid[0]), &grid, &quad)?;
            write_report(out, "hypothesis", &hyp)?;
            write_report(out, "thm1", &rep)
        }
        Which::Thm2 => {
            let cfg = scaled_cfg(&sec.estimator, opts);
            let spec = hypothesis(sec, None)?;
            let pair = pair(sec, &mut res)?;
            let rep = theorem2_check(&pair, &spec, &cfg, &quad)?;
            write_report(out, "thm2", &rep)
        }
        Which::Thm3 => {
            let cfg = scaled_cfg(&sec.estimator, opts);
            let spec = hypothesis(sec, None)?;
            let zeros = res.measure(section(&sec.zeros, "verify.zeros")?)?;
            let m = res.model(section(&sec.majorant, "verify.majorant")?)?;
            let outcome = theorem3_decide(zeros, m, &spec, &cfg, &quad)?;
            out.write("thm3.csv", &report_csv(&outcome.report))?;
            out.json("thm3.json", &outcome)
        }
        Which::Props => {
            let props = section(&sec.props, "verify.props")?;
            let mut reports = Vec::new();
            if let Some(q) = &props.q {
                let [r, big_r] = props.interval.unwrap_or([1.0, 1e3]);
                let rep = propqn_check(q, props.n_search, r, big_r, &quad)?;
                write_report(out, "propqn", &rep)?;
                reports.push(rep);
            }
            if let Some(p) = &props.p {
                let r_grid = if props.r_grid.is_empty() {
                    vec![1e2, 1e4, 1e6, 1e8]
                } else {
                    props.r_grid.clone()
                };
                let rep = prop2_d_function(p, props.r0.unwrap_or(1.0), &r_grid, &quad)?;
                write_report(out, "prop2", &rep)?;
                reports.push(rep);
            }
            if let Some(probe) = &props.excision_probe {
                let model = res.model(&probe.model)?;
                let grid = scaled(&probe.grid, opts).points()?;
                let p = lemma_le_probe(&model, &sec.hypothesis.e, &grid, &quad)?;
                let mut csv = Csv::new(&["r", "R", "lhs", "rhs", "c"]);
                for row in &p.rows {
                    csv.num_row(row);
                }
                out.write("excision_probe.csv", &csv.into_string())?;
                out.json("excision_probe.json", &serde_json::json!({
                    "c_max": p.c_max,
                    "c_half": p.c_half,
                    "stable": p.stable,
                }))?;
            }
            if let Some(random) = &props.random {
                out.write("props_random.csv", &random_sweep(random.count, opts.seed)?)?;
            }
            out.json("props.json", &reports)
        }
    }
}

/// Seeded sweep over random measures and excision sets: the residual of the
/// integration-by-parts identity (relative) and the number of `q_E` invariant breaches.
fn random_sweep(count: usize, seed: u64) -> Result<String, CliError> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut csv = Csv::new(&["trial", "atoms", "max_ibp_residual", "qe_violations"]);
    for trial in 0..count {
        let n = rng.gen_range(1..=1000usize);
        let atoms: Vec<Atom> = (0..n)
            .map(|_| Atom {
                pos: ComplexPoint::from_polar(10f64.powf(rng.gen_range(-1.0..2.0)), rng.gen_range(0.0..std::f64::consts::TAU)),
                weight: rng.gen_range(0.1..2.0),
            })
            .collect();
        let mu = AtomicMeasure::new("random", atoms)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let a = 10f64.powf(rng.gen_range(-1.5..2.3));
            let b = 10f64.powf(rng.gen_range(-1.5..2.3));
            if a == b {
                continue;
            }
            let (r, big_r) = (a.min(b), a.max(b));
            let hi = mu.counting_function(big_r, &AngularWeight::CosPlus) / big_r;
            let lo = mu.counting_function(r, &AngularWeight::CosPlus) / r;
            let (l, breve) = (mu.l_rh(r, big_r)?, mu.breve_l_rh(r, big_r)?);
            let scale = (l.abs() + breve.abs() + hi.abs() + lo.abs()).max(1.0);
            worst = worst.max(((l - breve) - (hi - lo)).abs() / scale);
        }
        let k = rng.gen_range(0..8);
        let intervals: Vec<(f64, f64)> = (0..k)
            .map(|_| {
                let lo = rng.gen_range(0.0..100.0);
                (lo, lo + rng.gen_range(0.001..20.0))
            })
            .collect();
        let e = ExcisionSet::new(intervals)?;
        let mut rs: Vec<f64> = (0..20).map(|_| rng.gen_range(1e-3..150.0)).collect();
        rs.sort_by(f64::total_cmp);
        let breaches = rs.windows(2).filter(|w| e.q_e(w[1]) < e.q_e(w[0])).count()
            + rs.iter().filter(|&&r| e.q_e(r) > r).count();
        csv.num_row(&[trial as f64, n as f64, worst, breaches as f64]);
    }
    Ok(csv.into_string())
}
