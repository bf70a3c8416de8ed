use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use rasch_doe::geometry::{locate_center, CenterConfig, CenterResult, CenterStatus};
use rasch_doe::optimizer::{optimize_design, OptimizerConfig};
use rasch_doe::regions::{
    compare_readings, corner_inequalities, is_corner_optimal_by_theorem, kw_certificate, OptimalityVerdict,
};
use rasch_doe::slice::{half_open_grid, redundancy_probe, slice_row, ProbeConfig, SliceRegion};
use rasch_doe::symmetry::{
    act_on_design, act_on_parameters, representation_matrix, verify_transformation, GroupElement,
};
use rasch_doe::{fisher, geometry, InteractionModel, ParameterVector};

use crate::error::{CliError, Result};
use crate::files::{beta_from_map, read_json, to_json_string, DesignFile, ParameterFile};
use crate::format::{g12, json12};
use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "rasch-doe", version, about = "D-optimal designs and optimality regions for Rasch Poisson counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for grid evaluation (row order is unaffected).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write result files and manifest.json into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the corner-design inequalities, their values and the verdict.
    Inequalities(InequalitiesArgs),
    /// Compute a D-optimal design by multiplicative iteration.
    Optimize(OptimizeArgs),
    /// Check a design against the equivalence theorem.
    Certify(CertifyArgs),
    /// Analytic centers of the LMI relaxation along a λ grid.
    CenterPath(CenterPathArgs),
    /// Evaluate the symmetric (s, t) slice of the corner region (d = 2).
    RegionSlice(RegionSliceArgs),
    /// Sample the slice for points that witness non-redundant inequalities.
    Probe(ProbeArgs),
    /// Compare the inequality system with the equivalence-theorem check.
    Compare(CompareArgs),
    /// Apply permutations and flips to parameters and designs.
    Symmetry(SymmetryArgs),
}

/// Model and parameter selection, shared by most commands.
#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    /// Number of rules.
    #[arg(long)]
    pub k: Option<usize>,
    /// Interaction order.
    #[arg(long)]
    pub d: Option<usize>,
    /// Parameter JSON file.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Symmetric point: `s=<μ_i>,t=<μ_ij>` (t only for d ≥ 2).
    #[arg(long)]
    pub symmetric: Option<String>,
    /// Every singleton intensity set to this value.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Coefficients as the JSON object of a parameter file, e.g. '{"1": -2, "2": -2}'.
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct InequalitiesArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    /// Include every monomial term in the listing.
    #[arg(long)]
    pub terms: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[arg(long, default_value_t = 200_000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub kw_tolerance: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub prune_threshold: f64,
    /// Starting design (JSON); default is uniform on all settings.
    #[arg(long)]
    pub seed_design: Option<PathBuf>,
    /// Record log det after every iteration in the report.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    /// Design JSON file to check.
    #[arg(long)]
    pub design: PathBuf,
}

#[derive(Debug, Args)]
pub struct CenterPathArgs {
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Explicit comma-separated λ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Vec<f64>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Start every Newton solve at the vertex centroid.
    #[arg(long)]
    pub cold: bool,
    /// Also export the center matrices (row-major) as matrices.json.
    #[arg(long)]
    pub matrices: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 0.0)]
    pub s_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
}

#[derive(Debug, Args)]
pub struct RegionSliceArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[command(flatten)]
    pub region: RegionArgs,
    /// Grid points per axis; the grid is half-open, `(min, max]`.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Explicit s values (overrides the s range).
    #[arg(long, value_delimiter = ',')]
    pub s_values: Vec<f64>,
    /// Explicit t values (overrides the t range).
    #[arg(long, value_delimiter = ',')]
    pub t_values: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[command(flatten)]
    pub region: RegionArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Additional regular grid points per axis.
    #[arg(long, default_value_t = 0)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    /// Number of random β points; without it the single given point is echoed in full.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta_max: f64,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    #[command(flatten)]
    pub theta: ThetaArgs,
    /// Group element, e.g. "perm=2,1,3;flips=1,3" (repeatable).
    #[arg(long = "g")]
    pub elements: Vec<String>,
    /// Use the whole group (k ≤ 6).
    #[arg(long)]
    pub all: bool,
    /// Reset β_∅ to zero after acting.
    #[arg(long)]
    pub renormalize: bool,
    /// Design JSON to transform and check the information-matrix law on.
    #[arg(long)]
    pub design: Option<PathBuf>,
}

/// What a command produced.
pub struct Outcome {
    /// `(file name, contents)`.
    pub files: Vec<(String, String)>,
    /// Printed when no output directory is given.
    pub stdout: String,
    /// Reported after the outputs are written.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn single(name: &str, contents: String) -> Self {
        Outcome { files: vec![(name.into(), contents.clone())], stdout: contents, failure: None }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::usage(msg))
}

impl ThetaArgs {
    fn model(&self, manifest: &mut RunManifest) -> Result<(InteractionModel, Option<ParameterFile>)> {
        let file: Option<ParameterFile> = match &self.params {
            Some(p) => {
                manifest.inputs.push(p.display().to_string());
                Some(read_json(p)?)
            }
            None => None,
        };
        let (k, d) = match &file {
            Some(f) => {
                if self.k.is_some_and(|k| k != f.k) || self.d.is_some_and(|d| d != f.d) {
                    return usage(format!("--k/--d disagree with the parameter file (k = {}, d = {})", f.k, f.d));
                }
                (f.k, f.d)
            }
            None => (self.k.ok_or_else(|| CliError::usage("--k is required without --params"))?, self.d.unwrap_or(1)),
        };
        manifest.flag("k", k);
        manifest.flag("d", d);
        Ok((InteractionModel::new(k, d)?, file))
    }

    fn resolve(&self, manifest: &mut RunManifest) -> Result<(InteractionModel, ParameterVector)> {
        let (m, file) = self.model(manifest)?;
        let sources = [file.is_some(), self.symmetric.is_some(), self.lambda.is_some(), self.beta.is_some()];
        if sources.iter().filter(|s| **s).count() > 1 {
            return usage("give at most one of --params, --symmetric, --lambda, --beta");
        }
        let theta = if let Some(f) = file {
            f.to_parameters(&m)?
        } else if let Some(text) = &self.symmetric {
            manifest.flag("symmetric", text);
            ParameterVector::symmetric(&m, &parse_symmetric(text)?)?
        } else if let Some(l) = self.lambda {
            manifest.flag("lambda", l);
            ParameterVector::symmetric(&m, &[l])?
        } else if let Some(text) = &self.beta {
            manifest.flag("beta", text);
            let map: BTreeMap<String, f64> = serde_json::from_str(text)?;
            beta_from_map(&m, &map)?
        } else {
            ParameterVector::zeros(&m)
        };
        Ok((m, theta))
    }
}

/// `s=0.5,t=0.8` (or bare `0.5,0.8`) into intensity levels by cardinality.
pub fn parse_symmetric(text: &str) -> Result<Vec<f64>> {
    let mut levels = Vec::new();
    for (i, part) in text.split(',').map(str::trim).enumerate() {
        let value = match part.split_once('=') {
            Some((key, v)) => {
                let want = ["s", "t"].get(i).copied().unwrap_or("");
                if key.trim() != want {
                    return usage(format!("expected key {want:?} at position {} in {text:?}", i + 1));
                }
                v
            }
            None => part,
        };
        levels.push(value.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad number {value:?}")))?);
    }
    if levels.is_empty() || levels.len() > 2 {
        return usage(format!("symmetric point {text:?} needs one or two levels"));
    }
    Ok(levels)
}

fn verdict_json(v: &OptimalityVerdict) -> Value {
    json!({
        "optimal": v.optimal,
        "boundary": v.boundary,
        "max_value": json12(v.max_value),
        "bound": json12(v.bound),
        "worst": v.worst_setting.to_string(),
    })
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    if threads == 0 {
        return usage("--threads must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Compute(format!("thread pool: {e}")))
}

pub fn inequalities(a: &InequalitiesArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (m, theta) = a.theta.resolve(manifest)?;
    let verdict = is_corner_optimal_by_theorem(&theta, &m)?;
    let normalized = theta.normalized();
    let list: Vec<Value> = corner_inequalities(&m)?
        .iter()
        .map(|q| {
            let lhs = q.evaluate(&normalized);
            let mut entry = json!({
                "C": q.label.key(),
                "size": q.label.len(),
                "lhs": json12(lhs),
                "holds": lhs <= 1.0 + rasch_doe::regions::THEOREM_TOLERANCE,
            });
            if a.terms {
                entry["terms"] = q
                    .terms
                    .iter()
                    .map(|t| {
                        json!({
                            "omitted": t.omitted.key(),
                            "coefficient": t.coefficient,
                            "factors": t.support.iter().map(|&i| m.subsets()[i].key()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
            }
            entry
        })
        .collect();
    let mut sizes: Vec<usize> = verdict.violated.iter().map(|c| c.len()).collect();
    sizes.dedup();
    let report = json!({
        "k": m.k(),
        "d": m.d(),
        "verdict": if verdict.optimal { "optimal" } else { "not-optimal" },
        "boundary": verdict.boundary,
        "max_lhs": json12(verdict.max_value),
        "violated": verdict.violated.iter().map(|c| c.key()).collect::<Vec<_>>(),
        "violated_sizes": sizes,
        "inequalities": list,
    });
    Ok(Outcome::single("inequalities.json", to_json_string(&report)))
}

pub fn optimize(a: &OptimizeArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (m, theta) = a.theta.resolve(manifest)?;
    let seed = match &a.seed_design {
        Some(p) => {
            manifest.inputs.push(p.display().to_string());
            Some(read_json::<DesignFile>(p)?.to_design()?)
        }
        None => None,
    };
    let cfg = OptimizerConfig {
        max_iterations: a.max_iterations,
        kw_tolerance: a.kw_tolerance,
        prune_threshold: a.prune_threshold,
        seed,
        record_trace: a.trace,
    };
    manifest.flag("max_iterations", a.max_iterations);
    manifest.flag("kw_tolerance", a.kw_tolerance);
    manifest.flag("prune_threshold", a.prune_threshold);
    let res = optimize_design(&theta, &m, &cfg)?;
    let design = DesignFile::from_design(&res.design);
    let mut report = json!({
        "iterations": res.iterations,
        "converged": res.converged,
        "final_kw_max": json12(res.final_kw_max),
        "p": m.p(),
        "log_det": json12(res.log_det),
        "structure": res.structure.name(),
        "support_size": res.design.support_size(),
        "max_averaging_residual": json12(res.max_averaging_residual),
    });
    if a.trace {
        report["log_det_trace"] = res.log_det_trace.iter().map(|v| json12(*v)).collect();
    }
    let failure =
        (!res.converged).then(|| CliError::Compute(format!("no convergence after {} iterations", res.iterations)));
    Ok(Outcome {
        files: vec![("design.json".into(), to_json_string(&design)), ("report.json".into(), to_json_string(&report))],
        stdout: to_json_string(&json!({ "design": design, "report": report })),
        failure,
    })
}

pub fn certify(a: &CertifyArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (m, theta) = a.theta.resolve(manifest)?;
    manifest.inputs.push(a.design.display().to_string());
    let w = read_json::<DesignFile>(&a.design)?.to_design()?;
    let v = kw_certificate(&w, &theta, &m)?;
    let sens = fisher::sensitivity_function(&w, &theta, &m)?;
    let mut report = verdict_json(&v);
    report["violated"] = v
        .violated
        .iter()
        .map(|s| rasch_doe::BinarySetting::from_subset(m.k(), *s).map(|x| x.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into();
    report["sensitivities"] = sens.iter().map(|(x, d)| (x.to_string(), json12(*d))).collect::<Map<_, _>>().into();
    Ok(Outcome::single("certificate.json", to_json_string(&report)))
}

fn lambda_grid(a: &CenterPathArgs) -> Result<Vec<f64>> {
    match (a.lambdas.is_empty(), a.from, a.to, a.step) {
        (false, None, None, None) => Ok(a.lambdas.clone()),
        (true, Some(from), Some(to), Some(step)) => {
            if !(step > 0.0) {
                return usage("--step must be positive");
            }
            let n = ((to - from).abs() / step + 1e-9).floor() as usize;
            let dir = if to < from { -1.0 } else { 1.0 };
            // rounded to the step's decimal places so that grids print cleanly
            let scale = 10f64.powi((-step.log10()).ceil().max(0.0) as i32 + 3);
            Ok((0..=n).map(|i| ((from + dir * step * i as f64) * scale).round() / scale).collect())
        }
        (true, None, None, None) => usage("give --lambdas or --from/--to/--step"),
        _ => usage("--lambdas and --from/--to/--step are exclusive, and the range needs all three"),
    }
}

pub fn center_path(a: &CenterPathArgs, threads: usize, manifest: &mut RunManifest) -> Result<Outcome> {
    let m = InteractionModel::new(a.k, a.d)?;
    manifest.flag("k", a.k);
    manifest.flag("d", a.d);
    manifest.flag("warm_start", !a.cold);
    let grid = lambda_grid(a)?;
    if grid.is_empty() {
        return usage("empty λ grid");
    }
    let cfg = CenterConfig::default();
    let family = |l: f64| geometry::symmetric_lambda_polytope(&m, l);
    let centers: Vec<CenterResult> = if a.cold {
        pool(threads)?.install(|| {
            grid.par_iter().map(|&l| Ok(locate_center(&family(l)?, None, &cfg)?)).collect::<Result<Vec<_>>>()
        })?
    } else {
        geometry::center_path(&grid, family, &cfg, true)?.rows.into_iter().map(|r| r.center).collect()
    };
    let first_exit = centers.iter().position(|c| !c.inside_polytope());
    let dim = centers.first().map_or(0, |c| c.coordinates.len());
    let mut csv = String::from("param");
    for i in 1..=dim {
        csv.push_str(&format!(",coord_{i}"));
    }
    csv.push_str(",log_det,status,inside,first_exit\n");
    for (i, (l, c)) in grid.iter().zip(&centers).enumerate() {
        csv.push_str(&g12(*l));
        for u in &c.coordinates {
            csv.push(',');
            csv.push_str(&g12(*u));
        }
        csv.push_str(&format!(
            ",{},{},{},{}\n",
            g12(c.log_det),
            c.status.name(),
            c.inside_polytope(),
            first_exit == Some(i)
        ));
    }
    let mut out = Outcome::single("center_path.csv", csv);
    if a.matrices {
        let rows: Vec<Value> = grid
            .iter()
            .zip(&centers)
            .map(|(l, c)| {
                let rows: Vec<Vec<Value>> =
                    c.matrix.to_rows().iter().map(|r| r.iter().map(|v| json12(*v)).collect()).collect();
                json!({ "param": json12(*l), "status": c.status.name(), "matrix": rows })
            })
            .collect();
        out.files.push(("matrices.json".into(), to_json_string(&rows)));
    }
    if centers.iter().all(|c| c.status == CenterStatus::MaxIterations) {
        out.failure = Some(CliError::Compute("no analytic center converged".into()));
    }
    Ok(out)
}

fn axis(min: f64, max: f64, points: usize, explicit: &[f64]) -> Vec<f64> {
    if explicit.is_empty() {
        half_open_grid(min, max, points)
    } else {
        explicit.to_vec()
    }
}

pub fn region_slice(a: &RegionSliceArgs, threads: usize, manifest: &mut RunManifest) -> Result<Outcome> {
    let m = InteractionModel::new(a.k, a.d)?;
    manifest.flag("k", a.k);
    manifest.flag("d", a.d);
    manifest.flag("points", a.points);
    let s_grid = axis(a.region.s_min, a.region.s_max, a.points, &a.s_values);
    let t_grid = axis(a.region.t_min, a.region.t_max, a.points, &a.t_values);
    // validates the model and the grids before fanning out
    rasch_doe::slice::region_slice(&m, &s_grid[..s_grid.len().min(1)], &t_grid[..t_grid.len().min(1)])?;
    let points: Vec<(f64, f64)> = s_grid.iter().flat_map(|&s| t_grid.iter().map(move |&t| (s, t))).collect();
    let rows = pool(threads)?
        .install(|| points.par_iter().map(|&(s, t)| slice_row(&m, s, t)).collect::<std::result::Result<Vec<_>, _>>())?;
    let mut csv = String::from("s,t");
    for c in 3..=m.k() {
        csv.push_str(&format!(",lhs_{c}"));
    }
    csv.push_str(",binding_c,verdict\n");
    for r in &rows {
        csv.push_str(&format!("{},{}", g12(r.s), g12(r.t)));
        for v in &r.lhs {
            csv.push(',');
            csv.push_str(&g12(*v));
        }
        let binding = r.binding.map(|c| c.to_string()).unwrap_or_default();
        csv.push_str(&format!(",{binding},{}\n", if r.optimal { "optimal" } else { "not-optimal" }));
    }
    Ok(Outcome::single("region_slice.csv", csv))
}

pub fn probe(a: &ProbeArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let m = InteractionModel::new(a.k, a.d)?;
    manifest.flag("k", a.k);
    manifest.flag("d", a.d);
    manifest.flag("samples", a.samples);
    manifest.flag("grid", a.grid);
    manifest.seed = Some(a.seed);
    let region = SliceRegion { s: (a.region.s_min, a.region.s_max), t: (a.region.t_min, a.region.t_max) };
    let cfg = ProbeConfig { samples: a.samples, seed: a.seed, grid_per_axis: a.grid };
    if cfg.samples == 0 && cfg.grid_per_axis == 0 {
        return usage("nothing to sample: --samples and --grid are both zero");
    }
    let report = redundancy_probe(&m, region, cfg)?;
    let entries: Map<String, Value> = report
        .entries
        .iter()
        .map(|(c, e)| {
            let witness = e.witness.map(|(s, t)| json!([json12(s), json12(t)])).unwrap_or(Value::Null);
            (
                c.to_string(),
                json!({
                    "redundant_in_region": e.redundant_in_region,
                    "witness": witness,
                    "witness_count": e.witness_count,
                }),
            )
        })
        .collect();
    Ok(Outcome::single("probe.json", to_json_string(&Value::Object(entries))))
}

fn lhs_map(cmp: &rasch_doe::regions::ReadingComparison) -> Map<String, Value> {
    cmp.theorem_lhs.iter().map(|(c, v)| (c.key(), json12(*v))).collect()
}

fn saturated_map(cmp: &rasch_doe::regions::ReadingComparison) -> Map<String, Value> {
    cmp.saturated.iter().map(|(x, v)| (x.to_string(), json12(*v))).collect()
}

pub fn compare(a: &CompareArgs, threads: usize, manifest: &mut RunManifest) -> Result<Outcome> {
    let Some(samples) = a.samples else {
        let (m, theta) = a.theta.resolve(manifest)?;
        let cmp = compare_readings(&theta, &m)?;
        let sens = fisher::sensitivity_function(&rasch_doe::regions::corner_design(&m)?, &theta, &m)?;
        let report = json!({
            "beta": ParameterFile::from_parameters(&m, &theta).beta,
            "agree": cmp.agree(),
            "theorem": verdict_json(&cmp.theorem),
            "kw": verdict_json(&cmp.kw),
            "theorem_lhs": lhs_map(&cmp),
            "saturated": saturated_map(&cmp),
            "kw_sensitivities": sens.iter().map(|(x, d)| (x.to_string(), json12(*d))).collect::<Map<_, _>>(),
        });
        return Ok(Outcome::single("compare.json", to_json_string(&report)));
    };
    if a.theta.params.is_some() || a.theta.symmetric.is_some() || a.theta.lambda.is_some() || a.theta.beta.is_some() {
        return usage("--samples draws its own β grid; drop the parameter options");
    }
    if !(a.beta_min < a.beta_max) {
        return usage("--beta-min must be below --beta-max");
    }
    let (m, _) = a.theta.model(manifest)?;
    manifest.seed = Some(a.seed);
    manifest.flag("samples", samples);
    manifest.flag("beta_min", a.beta_min);
    manifest.flag("beta_max", a.beta_max);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let thetas: Vec<ParameterVector> = (0..samples)
        .map(|_| {
            let beta = (0..m.p()).map(|_| rng.random_range(a.beta_min..=a.beta_max)).collect();
            ParameterVector::new(&m, beta)
        })
        .collect::<std::result::Result<_, _>>()?;
    let results = pool(threads)?
        .install(|| thetas.par_iter().map(|t| compare_readings(t, &m)).collect::<std::result::Result<Vec<_>, _>>())?;
    let disagreements: Vec<Value> = thetas
        .iter()
        .zip(&results)
        .enumerate()
        .filter(|(_, (_, c))| !c.agree())
        .map(|(i, (t, c))| {
            json!({
                "index": i,
                "beta": ParameterFile::from_parameters(&m, t).beta,
                "theorem": verdict_json(&c.theorem),
                "kw": verdict_json(&c.kw),
                "theorem_lhs": lhs_map(c),
                "saturated": saturated_map(c),
            })
        })
        .collect();
    let agreements = samples - disagreements.len();
    let report = json!({
        "k": m.k(),
        "d": m.d(),
        "points": samples,
        "agreements": agreements,
        "agreement_rate": json12(if samples == 0 { 1.0 } else { agreements as f64 / samples as f64 }),
        "corner_optimal_by_kw": results.iter().filter(|c| c.kw.optimal).count(),
        "disagreements": disagreements,
    });
    Ok(Outcome::single("compare.json", to_json_string(&report)))
}

pub fn symmetry(a: &SymmetryArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let (m, theta) = a.theta.resolve(manifest)?;
    let mut elements =
        a.elements.iter().map(|s| GroupElement::parse(s, m.k())).collect::<std::result::Result<Vec<_>, _>>()?;
    if a.all {
        elements.extend(GroupElement::all(m.k())?);
    }
    if elements.is_empty() {
        return usage("give at least one --g or --all");
    }
    let design = match &a.design {
        Some(p) => {
            manifest.inputs.push(p.display().to_string());
            Some(read_json::<DesignFile>(p)?.to_design()?)
        }
        None => None,
    };
    manifest.flag("renormalize", a.renormalize);
    let mut orbit = Vec::with_capacity(elements.len());
    let mut details = Vec::with_capacity(elements.len());
    for g in &elements {
        let rep = representation_matrix(g, &m)?;
        let moved = act_on_parameters(g, &theta, &m, a.renormalize)?;
        let params = ParameterFile::from_parameters(&m, &moved);
        let q: Vec<Vec<i64>> = (0..m.p()).map(|i| rep.q.row(i).to_vec()).collect();
        let mut entry = json!({
            "element": g.to_string(),
            "q": q,
            "det_q": rep.determinant() as i64,
            "parameters": params,
        });
        if let Some(w) = &design {
            let check = verify_transformation(g, w, &theta, &m)?;
            entry["design"] = serde_json::to_value(DesignFile::from_design(&act_on_design(g, w)?))?;
            entry["transformation"] = json!({
                "residual": json12(check.residual),
                "det_relative_difference": json12(check.det_relative_difference),
            });
        }
        orbit.push(params);
        details.push(entry);
    }
    let report = json!({ "orbit": orbit, "elements": details });
    Ok(Outcome::single("symmetry.json", to_json_string(&report)))
}
