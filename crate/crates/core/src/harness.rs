//! Experiment drivers behind the command-line front end. Each driver is
//! deterministic given its spec: trials draw from per-trial random streams
//! and results are collected in trial order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::landscape::{self, AxisSpec, CoverageReport, GridMode, LandscapeGrid, RegionTally};
use crate::measurement::{self, estimate_norm_and_radius, MeasurementEnsemble, MeasurementModel};
use crate::rng::{self, Domain};
use crate::signal::{align_phase, random_ball_init_indexed, relative_error, ComplexSignal};
use crate::solver::{self, Algo, HessianProbe, RunSummary, SolveResult, SolveStatus, SolverConfig};
use crate::trs::{self, RealTrsProblem, TrsCase};

/// Relative error below which a sweep trial counts as a recovery.
pub const SWEEP_SUCCESS_TOL: f64 = 1e-3;
/// Relative distance below which a Figure-1 style trial counts as a recovery.
pub const FIGURE1_SUCCESS_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Gen,
    Solve,
    Figure1,
    Sweep,
    Landscape,
    Certify,
    TrsBench,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Gen => "gen",
            ExperimentKind::Solve => "solve",
            ExperimentKind::Figure1 => "figure1",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Landscape => "landscape",
            ExperimentKind::Certify => "certify",
            ExperimentKind::TrsBench => "trs-bench",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

/// Objective used by landscape grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    PopulationReal,
    PopulationComplex,
    Empirical,
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population-real" => Ok(GridKind::PopulationReal),
            "population-complex" => Ok(GridKind::PopulationComplex),
            "empirical" => Ok(GridKind::Empirical),
            other => Err(Error::InvalidArgument(format!("unknown grid kind '{other}'"))),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    /// Number of measurements; `None` means `ceil(5 n log n)`.
    pub m: Option<usize>,
    /// Sweep ratios `m/n`, strictly increasing.
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub model: MeasurementModel,
    pub algo: Algo,
    pub delta: Option<f64>,
    pub mu: f64,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    /// Base of the logarithm in `m = 5 n log n`; `None` is natural log.
    pub log_base: Option<f64>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Ensemble file to load instead of generating one.
    pub input: Option<PathBuf>,
    /// Coverage-scan sample count.
    pub samples: usize,
    /// Certificate samples per region.
    pub per_region: usize,
    /// Grid points per axis.
    pub steps: usize,
    pub grid: GridKind,
}

impl ExperimentSpec {
    /// Defaults for `kind`, matching the experiment's reference setting.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentSpec {
            kind,
            n: 64,
            m: None,
            ratios: (4..=10).map(f64::from).collect(),
            trials: 1,
            seed: 1,
            model: MeasurementModel::GaussianComplex,
            algo: Algo::TrmAdaptive,
            delta: None,
            mu: 0.05,
            tol: None,
            max_iters: None,
            log_base: None,
            format: OutputFormat::Csv,
            out: None,
            input: None,
            samples: 100_000,
            per_region: 200,
            steps: 101,
            grid: GridKind::PopulationReal,
        };
        match kind {
            ExperimentKind::Figure1 => ExperimentSpec { n: 100, trials: 100, algo: Algo::Gd, ..base },
            ExperimentKind::Sweep => ExperimentSpec { n: 128, trials: 25, ..base },
            ExperimentKind::Landscape => ExperimentSpec { n: 2, ..base },
            ExperimentKind::TrsBench => ExperimentSpec { n: 20, trials: 200, ..base },
            _ => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.kind == ExperimentKind::Sweep {
            if self.ratios.is_empty() {
                return bad("ratio list is empty".into());
            }
            if self.ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return bad("ratios must be positive".into());
            }
            if self.ratios.windows(2).any(|w| w[1] <= w[0]) {
                return bad("ratios must be strictly increasing".into());
            }
        }
        if let Some(b) = self.log_base {
            if !(b > 1.0 && b.is_finite()) {
                return bad(format!("log base must exceed 1, got {b}"));
            }
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("step size must be positive, got {}", self.mu));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return bad(format!("tolerance must be positive, got {t}"));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return bad(format!("delta must be positive, got {d}"));
            }
        }
        if self.kind == ExperimentKind::Landscape && self.steps < 2 {
            return bad("landscape grids need at least 2 steps".into());
        }
        Ok(())
    }

    /// Measurement count for dimension `n`.
    pub fn resolve_m(&self) -> usize {
        self.m.unwrap_or_else(|| measurement::sample_count(5.0, self.n, self.log_base))
    }

    /// Solver configuration after applying `algo`, `delta`, `mu`, `tol`,
    /// and `max_iters`.
    pub fn solver_config(&self) -> SolverConfig {
        let mut c = SolverConfig::for_algo(self.algo);
        c.step_mu = self.mu;
        match self.algo {
            Algo::TrmFixed => c.delta = self.delta,
            Algo::TrmAdaptive => c.delta0 = self.delta,
            Algo::Gd => {}
        }
        if let Some(t) = self.tol {
            c.tol_grad = t;
        }
        if let Some(k) = self.max_iters {
            c.max_iters = k;
        }
        c
    }
}

/// Worker cap from `PR_THREADS`, if set.
pub fn pool_threads() -> Result<Option<usize>> {
    match std::env::var("PR_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|k: &usize| *k > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("PR_THREADS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Rayon pool capped by `PR_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = pool_threads()? {
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))
}

/// Unit-norm target for `model`: complex Gaussian for the Gaussian model and
/// real Gaussian for the real masked-DCT model.
pub fn target_signal(model: MeasurementModel, n: usize, seed: u64) -> Result<ComplexSignal> {
    match model {
        MeasurementModel::GaussianComplex => ComplexSignal::gaussian_unit(n, seed, 0),
        MeasurementModel::MaskedDctReal => {
            let mut g = rng::stream(seed, Domain::Signal, 0);
            let v: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut g)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            ComplexSignal::from_real(&v.iter().map(|a| a / norm).collect::<Vec<_>>())
        }
    }
}

/// A target and its ensemble. For the masked-DCT model the row count is
/// rounded up to a whole number of masks.
pub fn make_instance(
    model: MeasurementModel,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<(MeasurementEnsemble, ComplexSignal)> {
    let x = target_signal(model, n, seed)?;
    let ens = match model {
        MeasurementModel::GaussianComplex => measurement::gen_gaussian_ensemble(n, m, &x, seed)?,
        MeasurementModel::MaskedDctReal => measurement::gen_masked_dct_ensemble(n, m.div_ceil(n), &x, seed)?,
    };
    Ok((ens, x))
}

fn spec_instance(spec: &ExperimentSpec) -> Result<(MeasurementEnsemble, Option<ComplexSignal>)> {
    match &spec.input {
        Some(path) => io::read_ensemble(path),
        None => make_instance(spec.model, spec.n, spec.resolve_m(), spec.seed).map(|(e, x)| (e, Some(x))),
    }
}

/// Random initial point for `trial`, uniform in the ball of radius `R0`.
pub fn trial_init(ensemble: &MeasurementEnsemble, seed: u64, trial: u64) -> Result<ComplexSignal> {
    let (_, r0) = estimate_norm_and_radius(ensemble);
    random_ball_init_indexed(ensemble.n(), r0, seed, trial)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes `csv` or `json` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, format: OutputFormat, csv: &str, json: &serde_json::Value) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => csv.to_string(),
        OutputFormat::Json => to_json_text(json),
    };
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `path` with `suffix` appended to the file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn neg_log10(v: f64) -> f64 {
    -v.log10()
}

fn fmt_f(v: f64) -> String {
    format!("{v:e}")
}

// ---------------------------------------------------------------- gen

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenReport {
    pub model: MeasurementModel,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub x_norm_est: f64,
    pub path: PathBuf,
}

/// Draws an instance and stores it, with its target, in the binary container.
pub fn run_gen(spec: &ExperimentSpec) -> Result<GenReport> {
    spec.validate()?;
    let path = spec
        .out
        .clone()
        .ok_or_else(|| Error::InvalidArgument("gen needs an output path".into()))?;
    let (ens, x) = make_instance(spec.model, spec.n, spec.resolve_m(), spec.seed)?;
    io::write_ensemble(&path, &ens, Some(&x))?;
    Ok(GenReport {
        model: ens.model(),
        n: ens.n(),
        m: ens.m(),
        seed: spec.seed,
        x_norm_est: estimate_norm_and_radius(&ens).0,
        path,
    })
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub result: SolveResult,
    pub summary: RunSummary,
}

/// One solve from the trial-0 random initialization.
pub fn run_solve(spec: &ExperimentSpec) -> Result<SolveReport> {
    spec.validate()?;
    let (ens, x) = spec_instance(spec)?;
    let config = spec.solver_config();
    let z0 = trial_init(&ens, spec.seed, 0)?;
    let result = solver::solve(&ens, &config, &z0, x.as_ref())?;
    let summary = RunSummary::new(spec.seed, &config, &result, x.as_ref(), SWEEP_SUCCESS_TOL)?;
    Ok(SolveReport { result, summary })
}

impl SolveReport {
    /// Trace CSV to `out` (or stdout) and the summary JSON beside it. With
    /// JSON format the summary goes to `out` instead.
    pub fn write(&self, out: Option<&Path>, format: OutputFormat) -> Result<()> {
        let summary = serde_json::to_value(&self.summary).expect("serializable");
        emit(out, format, &self.result.trace.to_csv(), &summary)?;
        if let (Some(p), OutputFormat::Csv) = (out, format) {
            write_text(&sibling(p, ".summary.json"), &to_json_text(&summary))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- multi-trial runs

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub dist: f64,
    pub rel_error: f64,
}

fn run_trials(
    pool: &rayon::ThreadPool,
    ens: &MeasurementEnsemble,
    x: &ComplexSignal,
    config: &SolverConfig,
    seed: u64,
    trials: usize,
) -> Result<Vec<TrialRow>> {
    use rayon::prelude::*;
    pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let z0 = trial_init(ens, seed, t)?;
                let res = solver::solve(ens, config, &z0, Some(x))?;
                let last = res.trace.records.last().expect("terminal record");
                let dist = align_phase(&res.z, x)?.dist;
                Ok(TrialRow {
                    trial: t,
                    iterations: res.iterations,
                    status: res.status,
                    final_f: last.f,
                    final_grad_norm: last.grad_norm,
                    dist,
                    rel_error: relative_error(&res.z, x)?,
                })
            })
            .collect()
    })
}

// ---------------------------------------------------------------- figure 1

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure1Report {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub algo: Algo,
    pub mu: f64,
    pub x_norm: f64,
    pub rows: Vec<TrialRow>,
    pub successes: usize,
    pub all_success: bool,
}

/// Many random initializations against one fixed instance. A trial succeeds
/// when its final distance to the target circle is at most `1e-4 ‖x‖`.
pub fn run_figure1(spec: &ExperimentSpec) -> Result<Figure1Report> {
    spec.validate()?;
    let pool = thread_pool()?;
    let (ens, x) = make_instance(spec.model, spec.n, spec.resolve_m(), spec.seed)?;
    let rows = run_trials(&pool, &ens, &x, &spec.solver_config(), spec.seed, spec.trials)?;
    let x_norm = x.norm();
    let successes = rows.iter().filter(|r| r.dist <= FIGURE1_SUCCESS_TOL * x_norm).count();
    Ok(Figure1Report {
        n: ens.n(),
        m: ens.m(),
        seed: spec.seed,
        algo: spec.algo,
        mu: spec.mu,
        x_norm,
        successes,
        all_success: successes == rows.len(),
        rows,
    })
}

impl Figure1Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,iterations,status,final_f,final_grad_norm,dist,neg_log10_dist,neg_log10_f,success\n");
        for r in &self.rows {
            out += &format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.trial,
                r.iterations,
                serde_json::to_value(r.status).unwrap().as_str().unwrap(),
                fmt_f(r.final_f),
                fmt_f(r.final_grad_norm),
                fmt_f(r.dist),
                fmt_f(neg_log10(r.dist)),
                fmt_f(neg_log10(r.final_f)),
                r.dist <= FIGURE1_SUCCESS_TOL * self.x_norm
            );
        }
        out
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub m: usize,
    pub successes: usize,
    pub trials: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub seed: u64,
    pub algo: Algo,
    pub model: MeasurementModel,
    pub success_tol: f64,
    /// Ratio `m/n = 4` above which the measurement map is injective.
    pub injectivity_ratio: f64,
    pub rows: Vec<SweepRow>,
    pub trials: Vec<Vec<TrialRow>>,
}

/// Recovery probability per ratio: one instance per ratio (seeded by
/// `derive_seed(seed, ratio index)`) and `trials` random inits each.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepReport> {
    spec.validate()?;
    let pool = thread_pool()?;
    let config = spec.solver_config();
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for (i, &ratio) in spec.ratios.iter().enumerate() {
        let seed = rng::derive_seed(spec.seed, i as u64);
        let m = (ratio * spec.n as f64).round() as usize;
        let (ens, x) = make_instance(spec.model, spec.n, m, seed)?;
        let trials = run_trials(&pool, &ens, &x, &config, seed, spec.trials)?;
        let successes = trials.iter().filter(|t| t.rel_error <= SWEEP_SUCCESS_TOL).count();
        rows.push(SweepRow {
            ratio,
            m: ens.m(),
            successes,
            trials: spec.trials,
            probability: successes as f64 / spec.trials as f64,
        });
        all.push(trials);
    }
    Ok(SweepReport {
        n: spec.n,
        seed: spec.seed,
        algo: spec.algo,
        model: spec.model,
        success_tol: SWEEP_SUCCESS_TOL,
        injectivity_ratio: 4.0,
        rows,
        trials: all,
    })
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ratio,m,successes,trials,probability\n");
        for r in &self.rows {
            out += &format!("{},{},{},{},{}\n", r.ratio, r.m, r.successes, r.trials, r.probability);
        }
        out
    }

    /// Largest drop in success count between consecutive ratios.
    pub fn max_drop(&self) -> usize {
        self.rows.windows(2).map(|w| w[0].successes.saturating_sub(w[1].successes)).max().unwrap_or(0)
    }
}

// ---------------------------------------------------------------- landscape

/// A grid over `[-2, 2]²` for the target `x = (1, 0)`. Only `n = 2` is
/// supported.
pub fn run_landscape(spec: &ExperimentSpec) -> Result<LandscapeGrid> {
    spec.validate()?;
    if spec.n != 2 {
        return Err(Error::InvalidArgument(format!("landscape grids need n = 2, got {}", spec.n)));
    }
    let mode = match spec.grid {
        GridKind::PopulationReal => GridMode::PopulationRealGaussian,
        GridKind::PopulationComplex => GridMode::PopulationComplex,
        GridKind::Empirical => GridMode::Empirical {
            model: spec.model,
            samples: match spec.model {
                MeasurementModel::GaussianComplex => spec.resolve_m(),
                MeasurementModel::MaskedDctReal => spec.resolve_m().div_ceil(2),
            },
        },
    };
    let axis = AxisSpec::new(-2.0, 2.0, spec.steps)?;
    thread_pool()?.install(|| landscape::landscape_grid_2d(mode, &[1.0, 0.0], axis, axis, spec.seed))
}

/// Grid-local minima and saddles: interior points whose value is below all
/// eight neighbours, and interior points where the neighbour differences
/// change sign at least four times around the ring.
pub fn grid_critical_points(grid: &LandscapeGrid) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let v = &grid.values;
    let rows = v.len();
    let cols = v.first().map_or(0, Vec::len);
    let ring = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)];
    let mut minima = Vec::new();
    let mut saddles = Vec::new();
    for i in 1..rows.saturating_sub(1) {
        for j in 1..cols.saturating_sub(1) {
            let c = v[i][j];
            let diffs: Vec<f64> = ring
                .iter()
                .map(|(di, dj)| v[(i as isize + di) as usize][(j as isize + dj) as usize] - c)
                .collect();
            if diffs.iter().all(|d| *d > 0.0) {
                minima.push((i, j));
                continue;
            }
            let changes = (0..8).filter(|k| (diffs[*k] > 0.0) != (diffs[(k + 1) % 8] > 0.0)).count();
            if changes >= 4 {
                saddles.push((i, j));
            }
        }
    }
    (minima, saddles)
}

// ---------------------------------------------------------------- certify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub coverage: CoverageReport,
    pub tallies: Vec<RegionTally>,
    pub hessian_probe: ProbeSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub points: usize,
    pub samples: usize,
    pub m_h_emp: f64,
    pub m_h_max_emp: f64,
    pub eig_min: f64,
    pub eig_max: f64,
    pub m_h_bound: f64,
    pub m_h_max_bound: f64,
    pub lower_pass_rate: f64,
    pub upper_pass_rate: f64,
}

impl ProbeSummary {
    pub fn new(probe: &HessianProbe, x_norm: f64) -> Self {
        ProbeSummary {
            points: probe.samples.len() / solver::PROBE_DIRECTIONS,
            samples: probe.samples.len(),
            m_h_emp: probe.m_h_emp,
            m_h_max_emp: probe.m_h_max_emp,
            eig_min: probe.eig_min,
            eig_max: probe.eig_max,
            m_h_bound: 22.0 / 25.0 * x_norm * x_norm,
            m_h_max_bound: 4.5 * x_norm * x_norm,
            lower_pass_rate: probe.lower_pass_rate(x_norm),
            upper_pass_rate: probe.upper_pass_rate(x_norm),
        }
    }
}

/// Coverage scan of `samples` points, finite-sample certificates for
/// `per_region` points per region, and a restricted-Hessian probe. Returns
/// the report and the per-sample certificate rows.
pub fn run_certify(spec: &ExperimentSpec) -> Result<(CertifyReport, Vec<landscape::CertifiedSample>)> {
    spec.validate()?;
    let (ens, x) = spec_instance(spec)?;
    let x = x.ok_or_else(|| Error::InvalidArgument("certify needs an ensemble with a stored target".into()))?;
    thread_pool()?.install(|| {
        let coverage = landscape::coverage_scan(&x, spec.samples, spec.seed)?;
        let (tallies, samples) = landscape::certify_regions(&ens, &x, spec.per_region, spec.seed)?;
        let probe = solver::hessian_bound_probe(&ens, &x, spec.per_region, spec.seed)?;
        let report = CertifyReport {
            n: ens.n(),
            m: ens.m(),
            seed: spec.seed,
            coverage,
            tallies,
            hessian_probe: ProbeSummary::new(&probe, x.norm()),
        };
        Ok((report, samples))
    })
}

// ---------------------------------------------------------------- trs bench

/// A random subproblem of dimension `d`. Hard instances have a negative
/// bottom eigenvalue (of multiplicity one or two), `b` orthogonal to its
/// eigenspace, and a radius larger than the pseudo-inverse step.
pub fn trs_instance(d: usize, seed: u64, index: u64, hard: bool) -> Result<RealTrsProblem> {
    use rand::Rng;
    if d == 0 {
        return Err(Error::Dimension("subproblem dimension must be positive".into()));
    }
    let mut g = rng::stream(seed, Domain::Instance, index);
    let raw = DMatrix::from_fn(d, d, |_, _| rng::standard_normal(&mut g));
    let q = raw.qr().q();
    let mut vals: Vec<f64> = (0..d).map(|_| 4.0 * g.gen::<f64>() - 2.0).collect();
    vals.sort_by(f64::total_cmp);
    let mut beta: Vec<f64> = (0..d).map(|_| rng::standard_normal(&mut g)).collect();
    let mut r = 0.1 + 2.0 * g.gen::<f64>();
    if hard {
        let bottom = -0.5 - g.gen::<f64>();
        let mult = if d >= 2 && g.gen::<bool>() { 2 } else { 1 };
        vals[..mult].iter_mut().for_each(|v| *v = bottom);
        for v in vals[mult..].iter_mut() {
            *v = v.max(bottom + 0.2);
        }
        beta[..mult].iter_mut().for_each(|b| *b = 0.0);
        let pinv: f64 = vals[mult..]
            .iter()
            .zip(&beta[mult..])
            .map(|(l, b)| (b / (l - bottom)).powi(2))
            .sum::<f64>()
            .sqrt();
        r = pinv * (1.1 + g.gen::<f64>()) + 1e-3;
    }
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(vals)) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let b = &q * DVector::from_vec(beta);
    RealTrsProblem::new(a, b, r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrsBenchRow {
    pub index: u64,
    pub dim: usize,
    pub constructed_hard: bool,
    pub case: TrsCase,
    pub lambda: f64,
    pub kkt_residual: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    pub dual_min_eig: f64,
    pub q_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrsBenchReport {
    pub instances: usize,
    pub hard_instances: usize,
    pub max_kkt: f64,
    pub max_q_gap: f64,
    /// 50th, 90th, 99th, and 100th percentiles of the KKT residual.
    pub kkt_percentiles: [f64; 4],
    pub rows: Vec<TrsBenchRow>,
}

/// Solves `trials` random subproblems (dimension cycling through `2..=n`,
/// every fifth one hard) and compares each with the eigen oracle.
pub fn run_trs_bench(spec: &ExperimentSpec) -> Result<TrsBenchReport> {
    use rayon::prelude::*;
    spec.validate()?;
    let max_d = spec.n.max(2);
    let rows: Vec<TrsBenchRow> = thread_pool()?.install(|| {
        (0..spec.trials as u64)
            .into_par_iter()
            .map(|i| {
                let d = 2 + (i as usize % (max_d - 1));
                let hard = i % 5 == 4;
                let p = trs_instance(d, spec.seed, i, hard)?;
                let sol = trs::solve_trs_exact(&p, 1e-14)?;
                let oracle = trs::trs_eigen_oracle(&p)?;
                let kkt = trs::kkt_report(&p, &sol.w, sol.lambda)?;
                Ok(TrsBenchRow {
                    index: i,
                    dim: d,
                    constructed_hard: hard,
                    case: sol.case,
                    lambda: sol.lambda,
                    kkt_residual: kkt.stationarity,
                    feasibility: kkt.feasibility,
                    complementarity: kkt.complementarity,
                    dual_min_eig: kkt.dual_min_eig,
                    q_gap: (p.q(&sol.w) - p.q(&oracle.w)).abs(),
                })
            })
            .collect::<Result<_>>()
    })?;
    let mut kkt: Vec<f64> = rows.iter().map(|r| r.kkt_residual).collect();
    kkt.sort_by(f64::total_cmp);
    let pct = |q: f64| kkt[((q * (kkt.len() - 1) as f64).round() as usize).min(kkt.len() - 1)];
    Ok(TrsBenchReport {
        instances: rows.len(),
        hard_instances: rows.iter().filter(|r| r.constructed_hard).count(),
        max_kkt: kkt.last().copied().unwrap_or(0.0),
        max_q_gap: rows.iter().map(|r| r.q_gap).fold(0.0, f64::max),
        kkt_percentiles: [pct(0.5), pct(0.9), pct(0.99), pct(1.0)],
        rows,
    })
}

impl TrsBenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,dim,constructed_hard,case,lambda,kkt_residual,feasibility,complementarity,dual_min_eig,q_gap\n",
        );
        for r in &self.rows {
            out += &format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.index,
                r.dim,
                r.constructed_hard,
                serde_json::to_value(r.case).unwrap().as_str().unwrap(),
                fmt_f(r.lambda),
                fmt_f(r.kkt_residual),
                fmt_f(r.feasibility),
                fmt_f(r.complementarity),
                fmt_f(r.dual_min_eig),
                fmt_f(r.q_gap)
            );
        }
        out
    }
}

// ---------------------------------------------------------------- terminal rate

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub run: u64,
    pub converged: bool,
    pub rel_error: f64,
    pub exponent: Option<f64>,
    pub pairs: usize,
    pub iters_1e2_to_1e10: Option<usize>,
    pub phase_violations: usize,
}

/// Terminal convergence of `runs` adaptive solves on independent instances:
/// fitted exponent over the unconstrained tail below `grad_norm = 0.1‖x‖²`
/// and above the round-off floor `1e-12‖x‖²`, and the iteration count from
/// `grad_norm ≤ 1e-2 ‖x‖²` to `grad_norm ≤ 1e-10 ‖x‖²`.
pub fn terminal_rates(n: usize, m: usize, runs: usize, seed: u64) -> Result<Vec<RateRow>> {
    use rayon::prelude::*;
    thread_pool()?.install(|| {
        (0..runs as u64)
            .into_par_iter()
            .map(|k| {
                let s = rng::derive_seed(seed, k);
                let (ens, x) = make_instance(MeasurementModel::GaussianComplex, n, m, s)?;
                let z0 = trial_init(&ens, s, 0)?;
                let mut config = SolverConfig::trm_adaptive();
                config.tol_grad = 1e-13;
                let res = solver::trm_solve(&ens, &config, &z0, Some(&x))?;
                let x2 = x.norm_sq();
                let noise_floor = 1e-12 * x2;
                let tail = tail_trace(&res.trace);
                let fit = solver::fit_terminal_rate(&tail, 1e-1 * x2, noise_floor);
                Ok(RateRow {
                    run: k,
                    converged: res.status == SolveStatus::Converged,
                    rel_error: relative_error(&res.z, &x)?,
                    exponent: fit.map(|f| f.exponent),
                    pairs: fit.map_or(0, |f| f.pairs),
                    iters_1e2_to_1e10: solver::iterations_between(&res.trace, 1e-2 * x2, 1e-10 * x2),
                    phase_violations: res.trace.phase_violations(x.norm() / 7f64.sqrt()),
                })
            })
            .collect()
    })
}

/// Accepted records from the last constrained step onward, so the fit covers
/// only the final unconstrained phase.
fn tail_trace(trace: &solver::RunTrace) -> solver::RunTrace {
    let acc: Vec<solver::TraceRecord> = trace.accepted().copied().collect();
    let start = acc
        .iter()
        .rposition(|r| r.step_kind != solver::StepKind::TrmUnconstrained && r.step_kind != solver::StepKind::Stop)
        .map_or(0, |p| p + 1);
    solver::RunTrace { records: acc[start..].to_vec() }
}

// ---------------------------------------------------------------- options

/// Overrides shared by every subcommand, used both as command-line flags and
/// as keys of a TOML config file. Unset fields keep the experiment default.
#[derive(Debug, Clone, Default, PartialEq, clap::Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Signal dimension (the subproblem dimension for trs-bench).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of measurements [default: ceil(5 n log n)].
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated sweep ratios m/n.
    #[arg(long, value_delimiter = ',')]
    pub ratio_list: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// gaussian | masked-dct
    #[arg(long)]
    pub model: Option<String>,
    /// trm-fixed | trm-adaptive | gd
    #[arg(long)]
    pub algo: Option<String>,
    /// Trust radius (fixed mode) or initial radius (adaptive mode).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Gradient-descent step size.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Gradient-norm stopping tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Base of the logarithm in m = 5 n log n [default: e].
    #[arg(long)]
    pub log_base: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Ensemble file written by `gen`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Coverage-scan sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Certificate samples per region.
    #[arg(long)]
    pub per_region: Option<usize>,
    /// Landscape grid points per axis.
    #[arg(long)]
    pub steps: Option<usize>,
    /// population-real | population-complex | empirical
    #[arg(long)]
    pub grid: Option<String>,
    /// TOML file supplying any of the options above; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Options {
    /// Parses a TOML config file.
    pub fn from_toml(text: &str) -> Result<Options> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Options> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Field-wise `self` if set, else `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        Options {
            n: self.n.or(fallback.n),
            m: self.m.or(fallback.m),
            ratio_list: self.ratio_list.or(fallback.ratio_list),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            model: self.model.or(fallback.model),
            algo: self.algo.or(fallback.algo),
            delta: self.delta.or(fallback.delta),
            mu: self.mu.or(fallback.mu),
            tol: self.tol.or(fallback.tol),
            max_iters: self.max_iters.or(fallback.max_iters),
            log_base: self.log_base.or(fallback.log_base),
            out: self.out.or(fallback.out),
            format: self.format.or(fallback.format),
            input: self.input.or(fallback.input),
            samples: self.samples.or(fallback.samples),
            per_region: self.per_region.or(fallback.per_region),
            steps: self.steps.or(fallback.steps),
            grid: self.grid.or(fallback.grid),
            config: self.config.or(fallback.config),
        }
    }

    /// Flags merged over the config file (if any) merged over the defaults
    /// for `kind`.
    pub fn resolve(self, kind: ExperimentKind) -> Result<ExperimentSpec> {
        let merged = match &self.config {
            Some(path) => {
                let file = Options::load(path)?;
                self.or(file)
            }
            None => self,
        };
        let mut s = ExperimentSpec::defaults(kind);
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = merged.$field { s.$field = v; } )* };
        }
        set!(n, trials, seed, mu, samples, per_region, steps);
        s.m = merged.m.or(s.m);
        s.delta = merged.delta.or(s.delta);
        s.tol = merged.tol.or(s.tol);
        s.max_iters = merged.max_iters.or(s.max_iters);
        s.log_base = merged.log_base.or(s.log_base);
        s.out = merged.out.or(s.out);
        s.input = merged.input.or(s.input);
        if let Some(r) = merged.ratio_list {
            s.ratios = r;
        }
        if let Some(v) = merged.model {
            s.model = v.parse()?;
        }
        if let Some(v) = merged.algo {
            s.algo = v.parse()?;
        }
        if let Some(v) = merged.format {
            s.format = v.parse()?;
        }
        if let Some(v) = merged.grid {
            s.grid = v.parse()?;
        }
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentSpec {
        ExperimentSpec { n: 6, trials: 4, ..ExperimentSpec::defaults(kind) }
    }

    #[test]
    fn flags_override_config_file() {
        let file = Options::from_toml("n = 12\ntrials = 3\nratio-list = [4.0, 6.0]\nalgo = \"gd\"\n").unwrap();
        let flags = Options { n: Some(9), ..Options::default() };
        let merged = flags.or(file);
        assert_eq!(merged.n, Some(9));
        assert_eq!(merged.trials, Some(3));
        let spec = merged.resolve(ExperimentKind::Sweep).unwrap();
        assert_eq!(spec.ratios, vec![4.0, 6.0]);
        assert_eq!(spec.algo, Algo::Gd);
        assert!(Options::from_toml("bogus = 1").is_err());
        let bad = Options { model: Some("fourier".into()), ..Options::default() };
        assert!(matches!(bad.resolve(ExperimentKind::Solve), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn spec_validation() {
        let mut s = small(ExperimentKind::Sweep);
        s.ratios = vec![4.0, 4.0];
        assert!(matches!(s.validate(), Err(Error::InvalidArgument(_))));
        s.ratios = vec![4.0, 5.0];
        s.trials = 0;
        assert!(s.validate().is_err());
        assert_eq!(ExperimentSpec::defaults(ExperimentKind::Figure1).resolve_m(), 2303);
    }

    #[test]
    fn figure1_small_is_deterministic() {
        let s = small(ExperimentKind::Figure1);
        let a = run_figure1(&s).unwrap();
        let b = run_figure1(&s).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 4);
        assert!(a.to_csv().starts_with("trial,iterations,status"));
    }

    #[test]
    fn sweep_small_rows() {
        let mut s = small(ExperimentKind::Sweep);
        s.ratios = vec![6.0, 10.0];
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[1].m, 60);
        assert_eq!(r.rows[1].successes, 4);
    }

    #[test]
    fn trs_instances_hard_case_is_hard() {
        for i in 0..20 {
            let p = trs_instance(6, 3, i, true).unwrap();
            let sol = trs::solve_trs_exact(&p, 1e-14).unwrap();
            assert_eq!(sol.case, TrsCase::Hard, "instance {i}");
        }
    }

    #[test]
    fn landscape_population_real_topology() {
        let s = ExperimentSpec { steps: 41, ..ExperimentSpec::defaults(ExperimentKind::Landscape) };
        let grid = run_landscape(&s).unwrap();
        let (minima, saddles) = grid_critical_points(&grid);
        assert_eq!(minima.len(), 2, "{minima:?}");
        assert_eq!(saddles.len(), 2, "{saddles:?}");
    }
}
