//! The tangent-constrained trust-region method and the gradient-descent
//! baseline, with per-iteration traces.
//!
//! Gradient norms in traces are the stacked norm `√2‖∇_z f‖`. The descent
//! stopping rule follows the half-gradient convention `‖∇_z f‖ ≤ tol`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::measurement::{estimate_norm_and_radius, MeasurementEnsemble};
use crate::objective;
use crate::rng::{self, Domain};
use crate::signal::{align_phase, random_unit, ComplexSignal};
use crate::trs::{self, PreparedTrs, TangentBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    TrmFixed,
    TrmAdaptive,
    Gd,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::TrmFixed => "trm-fixed",
            Algo::TrmAdaptive => "trm-adaptive",
            Algo::Gd => "gd",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trm-fixed" => Ok(Algo::TrmFixed),
            "trm-adaptive" => Ok(Algo::TrmAdaptive),
            "gd" => Ok(Algo::Gd),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Solver parameters. Radii left as `None` are derived from the norm
/// estimate `x_est = sqrt(mean y²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algo: Algo,
    /// Fixed-mode radius; defaults to `x_est / (n ln m)^{7/2}`.
    pub delta: Option<f64>,
    /// Adaptive-mode initial radius; defaults to `x_est / 10`.
    pub delta0: Option<f64>,
    /// Adaptive-mode radius cap; defaults to `x_est`.
    pub delta_max: Option<f64>,
    pub eta_accept: f64,
    pub grow: f64,
    pub shrink: f64,
    /// Gradient-descent step size.
    pub step_mu: f64,
    /// Stopping tolerance: stacked gradient norm for the trust-region
    /// method, half-gradient norm for gradient descent.
    pub tol_grad: f64,
    /// Bisection tolerance of the subproblem solver, relative to `x_est²`.
    pub tol_eps_trs: f64,
    pub max_iters: usize,
}

impl SolverConfig {
    pub fn trm_adaptive() -> Self {
        SolverConfig {
            algo: Algo::TrmAdaptive,
            delta: None,
            delta0: None,
            delta_max: None,
            eta_accept: 0.1,
            grow: 2.0,
            shrink: 0.25,
            step_mu: 0.05,
            tol_grad: 1e-11,
            tol_eps_trs: 1e-14,
            max_iters: 500,
        }
    }

    pub fn trm_fixed(delta: Option<f64>) -> Self {
        SolverConfig { algo: Algo::TrmFixed, delta, max_iters: 10_000, ..Self::trm_adaptive() }
    }

    pub fn gd(step_mu: f64) -> Self {
        SolverConfig { algo: Algo::Gd, step_mu, tol_grad: 1e-5, max_iters: 100_000, ..Self::trm_adaptive() }
    }

    pub fn for_algo(algo: Algo) -> Self {
        match algo {
            Algo::TrmAdaptive => Self::trm_adaptive(),
            Algo::TrmFixed => Self::trm_fixed(None),
            Algo::Gd => Self::gd(0.05),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("solver config: {what}")));
        if !(0.0 < self.shrink && self.shrink < 1.0 && 1.0 < self.grow) {
            return bad("need 0 < shrink < 1 < grow");
        }
        if !(0.0 <= self.eta_accept && self.eta_accept < 1.0) {
            return bad("need 0 <= eta_accept < 1");
        }
        if !(self.tol_grad > 0.0 && self.tol_eps_trs > 0.0 && self.step_mu > 0.0) {
            return bad("tolerances and step size must be positive");
        }
        for (name, v) in [("delta", self.delta), ("delta0", self.delta0), ("delta_max", self.delta_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(&format!("{name} must be positive"));
                }
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        Ok(())
    }
}

/// Theory-mode radius `x_est / (n ln m)^{7/2}`.
pub fn theory_delta(n: usize, m: usize, x_est: f64) -> f64 {
    x_est / ((n as f64).powf(3.5) * (m as f64).ln().powf(3.5))
}

/// Guard radius `3 sqrt(n ln m)·R0` that contains the initial sublevel set.
pub fn guard_radius(n: usize, m: usize, r0: f64) -> f64 {
    3.0 * ((n as f64) * (m as f64).ln()).sqrt() * r0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Gd,
    /// Accepted step on the trust-region boundary.
    TrmConstrained,
    /// Accepted step strictly inside the trust region.
    TrmUnconstrained,
    /// Accepted step at a point too close to the origin for a tangent basis,
    /// solved over all of `C^n`.
    TrmFull,
    Rejected,
    /// Terminal record at the returned point; no step taken.
    Stop,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Gd => "gd",
            StepKind::TrmConstrained => "trm-constrained",
            StepKind::TrmUnconstrained => "trm-unconstrained",
            StepKind::TrmFull => "trm-full",
            StepKind::Rejected => "rejected",
            StepKind::Stop => "stop",
        }
    }
}

/// One iteration: the state before the step and the step taken from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub dist: Option<f64>,
    pub step_kind: StepKind,
    pub delta: f64,
    pub model_decrease: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,f,grad_norm,dist,step_kind,delta,model_decrease\n");
        for r in &self.records {
            let dist = r.dist.map(|d| format!("{d:e}")).unwrap_or_default();
            out += &format!(
                "{},{:e},{:e},{},{},{:e},{:e}\n",
                r.iter,
                r.f,
                r.grad_norm,
                dist,
                r.step_kind.as_str(),
                r.delta,
                r.model_decrease
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Records of accepted steps and the terminal record.
    pub fn accepted(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(|r| r.step_kind != StepKind::Rejected)
    }

    /// Constrained steps taken after an unconstrained step made within
    /// distance `near` of the target circle. Records without a distance never
    /// start the count.
    pub fn phase_violations(&self, near: f64) -> usize {
        let mut entered = false;
        let mut count = 0;
        for r in self.accepted() {
            match r.step_kind {
                StepKind::TrmUnconstrained if r.dist.is_some_and(|d| d <= near) => entered = true,
                StepKind::TrmConstrained if entered => count += 1,
                _ => {}
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub z: ComplexSignal,
    pub trace: RunTrace,
    pub status: SolveStatus,
    /// Number of steps taken, rejected ones included.
    pub iterations: usize,
}

fn dist_to(x_opt: Option<&ComplexSignal>, z: &ComplexSignal) -> Result<Option<f64>> {
    x_opt.map(|x| align_phase(z, x).map(|a| a.dist)).transpose()
}

/// Dispatches on `config.algo`.
pub fn solve(
    ensemble: &MeasurementEnsemble,
    config: &SolverConfig,
    z0: &ComplexSignal,
    x_opt: Option<&ComplexSignal>,
) -> Result<SolveResult> {
    match config.algo {
        Algo::Gd => gradient_descent(ensemble, config, z0, x_opt),
        _ => trm_solve(ensemble, config, z0, x_opt),
    }
}

struct Model {
    f: f64,
    grad_norm: f64,
    basis: TangentBasis,
    prepared: PreparedTrs,
}

fn build_model(ensemble: &MeasurementEnsemble, z: &ComplexSignal, floor: f64) -> Result<Model> {
    let (f, g, h) = objective::second_order_model(ensemble, z)?;
    let basis = match trs::build_tangent_basis_with_floor(z, floor) {
        Ok(b) => b,
        Err(Error::Degenerate(_)) => TangentBasis::full(z),
        Err(e) => return Err(e),
    };
    let p = trs::reduce_from_model(&basis, &g, &h, 1.0)?;
    let prepared = PreparedTrs::new(p.a, p.b)?;
    Ok(Model { f, grad_norm: objective::stacked_norm(&g), basis, prepared })
}

/// Trust-region method with steps restricted to the tangent subspace
/// `{δ : Im(δ^* z) = 0}`.
///
/// Fixed mode accepts every step with a constant radius. Adaptive mode uses
/// the ratio `ρ` of actual to predicted decrease: `ρ < 1/4` shrinks the
/// radius, `ρ > 3/4` on the boundary grows it (capped at `delta_max`), and
/// the step is accepted when `ρ > eta_accept`. Iteration stops once the
/// stacked gradient norm is at most `tol_grad` and `λ_min(A) ≥ −tol_grad·x_est`.
pub fn trm_solve(
    ensemble: &MeasurementEnsemble,
    config: &SolverConfig,
    z0: &ComplexSignal,
    x_opt: Option<&ComplexSignal>,
) -> Result<SolveResult> {
    config.validate()?;
    if config.algo == Algo::Gd {
        return Err(Error::InvalidArgument("trm_solve needs a trust-region algorithm".into()));
    }
    ensemble.check_signal("initial point", z0)?;
    let (n, m) = (ensemble.n(), ensemble.m());
    let (x_est, r0) = estimate_norm_and_radius(ensemble);
    if x_est == 0.0 {
        return Err(Error::Degenerate("all magnitudes are zero".into()));
    }
    let guard = guard_radius(n, m, r0);
    if z0.norm() > guard {
        return Err(Error::InvalidArgument(format!(
            "initial point norm {:e} exceeds the guard radius {guard:e}",
            z0.norm()
        )));
    }
    let adaptive = config.algo == Algo::TrmAdaptive;
    let delta_max = config.delta_max.unwrap_or(x_est);
    let mut delta = if adaptive {
        config.delta0.unwrap_or(x_est / 10.0).min(delta_max)
    } else {
        config.delta.unwrap_or_else(|| theory_delta(n, m, x_est))
    };
    let eps = config.tol_eps_trs * x_est * x_est;
    let floor = 1e-8 * x_est;

    let mut z = z0.clone();
    let mut model = build_model(ensemble, &z, floor)?;
    let mut trace = RunTrace::default();
    let mut iter = 0;
    let status = loop {
        let dist = dist_to(x_opt, &z)?;
        let second_order_ok = model.prepared.min_eig() >= -config.tol_grad * x_est;
        if model.grad_norm <= config.tol_grad && second_order_ok {
            break SolveStatus::Converged;
        }
        if iter >= config.max_iters {
            break SolveStatus::MaxIters;
        }
        let sol = model.prepared.solve(delta, eps)?;
        let step_norm = sol.w.norm();
        let predicted = -model.prepared.q(&sol.w);
        let step = model.basis.apply(&sol.w);
        let z_new = ComplexSignal::new(z.as_vector() + &step)?;
        let f_new = objective::eval_f(ensemble, &z_new)?;
        let on_boundary = step_norm >= (1.0 - 1e-9) * delta;
        let kind = if model.basis.is_full() {
            StepKind::TrmFull
        } else if on_boundary {
            StepKind::TrmConstrained
        } else {
            StepKind::TrmUnconstrained
        };
        let accept = if adaptive {
            let actual = model.f - f_new;
            let tiny = 1e-14 * model.f.abs().max(f64::MIN_POSITIVE);
            let rho = if predicted.abs() <= tiny && actual.abs() <= tiny { 1.0 } else { actual / predicted };
            let delta_used = delta;
            if rho < 0.25 {
                delta *= config.shrink;
            } else if rho > 0.75 && on_boundary {
                delta = (delta * config.grow).min(delta_max);
            }
            let accept = rho > config.eta_accept;
            trace.records.push(TraceRecord {
                iter,
                f: model.f,
                grad_norm: model.grad_norm,
                dist,
                step_kind: if accept { kind } else { StepKind::Rejected },
                delta: delta_used,
                model_decrease: predicted,
            });
            accept
        } else {
            trace.records.push(TraceRecord {
                iter,
                f: model.f,
                grad_norm: model.grad_norm,
                dist,
                step_kind: kind,
                delta,
                model_decrease: predicted,
            });
            true
        };
        iter += 1;
        if accept {
            z = z_new;
            model = build_model(ensemble, &z, floor)?;
        }
    };
    trace.records.push(TraceRecord {
        iter,
        f: model.f,
        grad_norm: model.grad_norm,
        dist: dist_to(x_opt, &z)?,
        step_kind: StepKind::Stop,
        delta,
        model_decrease: 0.0,
    });
    Ok(SolveResult { z, trace, status, iterations: iter })
}

/// Fixed-step Wirtinger gradient descent `z ← z − μ ∇_z f(z)`. Stops when
/// `‖∇_z f‖ ≤ tol_grad`; gives up as diverged once `f` exceeds `10⁶ f(z0)`.
pub fn gradient_descent(
    ensemble: &MeasurementEnsemble,
    config: &SolverConfig,
    z0: &ComplexSignal,
    x_opt: Option<&ComplexSignal>,
) -> Result<SolveResult> {
    config.validate()?;
    if config.algo != Algo::Gd {
        return Err(Error::InvalidArgument("gradient_descent needs algo = gd".into()));
    }
    ensemble.check_signal("initial point", z0)?;
    let mu = Complex64::new(config.step_mu, 0.0);
    let mut z = z0.clone();
    let mut trace = RunTrace::default();
    let mut f0 = None;
    let mut iter = 0;
    let (status, f, g) = loop {
        let (f, g) = objective::value_and_grad(ensemble, &z)?;
        let f_start = *f0.get_or_insert(f);
        if !f.is_finite() || (f_start > 0.0 && f > 1e6 * f_start) {
            break (SolveStatus::Diverged, f, g);
        }
        if g.norm() <= config.tol_grad {
            break (SolveStatus::Converged, f, g);
        }
        if iter >= config.max_iters {
            break (SolveStatus::MaxIters, f, g);
        }
        trace.records.push(TraceRecord {
            iter,
            f,
            grad_norm: objective::stacked_norm(&g),
            dist: dist_to(x_opt, &z)?,
            step_kind: StepKind::Gd,
            delta: config.step_mu,
            model_decrease: 0.0,
        });
        z = ComplexSignal::new(z.as_vector() - g * mu)
            .map_err(|_| Error::NonFinite(format!("iterate became non-finite at step {iter}")))?;
        iter += 1;
    };
    trace.records.push(TraceRecord {
        iter,
        f,
        grad_norm: objective::stacked_norm(&g),
        dist: if f.is_finite() { dist_to(x_opt, &z)? } else { None },
        step_kind: StepKind::Stop,
        delta: config.step_mu,
        model_decrease: 0.0,
    });
    Ok(SolveResult { z, trace, status, iterations: iter })
}

/// Restricted curvatures near the target circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianProbe {
    /// Smallest sampled `(1/2)ξᵀAξ` over points and random unit tangent `ξ`.
    pub m_h_emp: f64,
    /// Largest sampled `(1/2)ξᵀAξ` over points and random unit tangent `ξ`.
    pub m_h_max_emp: f64,
    /// Smallest eigenvalue of `A/2` over all points.
    pub eig_min: f64,
    /// Largest eigenvalue of `A/2` over all points.
    pub eig_max: f64,
    /// Every sampled `(1/2)ξᵀAξ`, grouped by point.
    pub samples: Vec<f64>,
}

/// Random tangent directions drawn at each probe point.
pub const PROBE_DIRECTIONS: usize = 8;

impl HessianProbe {
    /// Fraction of samples with `(1/2)ξᵀAξ ≥ 0.8·(22/25)‖x‖²`.
    pub fn lower_pass_rate(&self, x_norm: f64) -> f64 {
        let bound = 0.8 * 22.0 / 25.0 * x_norm * x_norm;
        self.samples.iter().filter(|v| **v >= bound).count() as f64 / self.samples.len() as f64
    }

    /// Fraction of samples with `(1/2)ξᵀAξ ≤ 1.2·(9/2)‖x‖²`.
    pub fn upper_pass_rate(&self, x_norm: f64) -> f64 {
        let bound = 1.2 * 4.5 * x_norm * x_norm;
        self.samples.iter().filter(|v| **v <= bound).count() as f64 / self.samples.len() as f64
    }
}

/// Samples `num_points` points `x e^{iψ} + t u` with `‖u‖ = 1` and
/// `t ≤ ‖x‖/100`, and evaluates `(1/2)ξᵀAξ` for the reduced Hessian `A` along
/// [`PROBE_DIRECTIONS`] random unit tangent directions at each. The extreme
/// eigenvalues of `A/2` are reported alongside.
pub fn hessian_bound_probe(
    ensemble: &MeasurementEnsemble,
    x: &ComplexSignal,
    num_points: usize,
    seed: u64,
) -> Result<HessianProbe> {
    use rand::Rng;
    use rayon::prelude::*;
    ensemble.check_signal("probe target", x)?;
    if num_points == 0 {
        return Err(Error::InvalidArgument("probe needs at least one point".into()));
    }
    let per_point: Vec<(Vec<f64>, f64, f64)> = (0..num_points as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, Domain::Sample, i);
            let psi = std::f64::consts::TAU * rng.gen::<f64>();
            let t = x.norm() / 100.0 * rng.gen::<f64>();
            let u = random_unit(&mut rng, x.len());
            let z = ComplexSignal::new(x.rotated(psi).as_vector() + u.as_vector() * Complex64::new(t, 0.0))?;
            let basis = trs::build_tangent_basis(&z)?;
            let p = trs::reduce_subproblem(ensemble, &z, &basis, 1.0)?;
            let d = p.a.nrows();
            let values = (0..PROBE_DIRECTIONS)
                .map(|_| {
                    let w = nalgebra::DVector::from_fn(d, |_, _| rng::standard_normal(&mut rng));
                    let w = &w / w.norm();
                    0.5 * w.dot(&(&p.a * &w))
                })
                .collect();
            let eig = eigen::sym_eigen(&p.a)?;
            Ok((values, 0.5 * eig.values[0], 0.5 * eig.values[d - 1]))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = per_point.iter().flat_map(|p| p.0.iter().copied()).collect();
    Ok(HessianProbe {
        m_h_emp: samples.iter().copied().fold(f64::INFINITY, f64::min),
        m_h_max_emp: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        eig_min: per_point.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        eig_max: per_point.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max),
        samples,
    })
}

/// Least-squares fit of `log g_{r+1} = log C + p log g_r` over consecutive
/// accepted records with `g_r` in `[floor, start]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub exponent: f64,
    pub log_c: f64,
    pub pairs: usize,
}

pub fn fit_terminal_rate(trace: &RunTrace, start: f64, floor: f64) -> Option<RateFit> {
    let g: Vec<f64> = trace.accepted().map(|r| r.grad_norm).collect();
    let pairs: Vec<(f64, f64)> = g
        .windows(2)
        .filter(|w| w[0] <= start && w[0] >= floor && w[1] >= floor)
        .map(|w| (w[0].ln(), w[1].ln()))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let k = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let exponent = sxy / sxx;
    Some(RateFit { exponent, log_c: my - exponent * mx, pairs: pairs.len() })
}

/// Iterations between the first record with `grad_norm ≤ hi` and the first
/// with `grad_norm ≤ lo`.
pub fn iterations_between(trace: &RunTrace, hi: f64, lo: f64) -> Option<usize> {
    let first = |t: f64| trace.records.iter().find(|r| r.grad_norm <= t).map(|r| r.iter);
    Some(first(lo)? - first(hi)?)
}

/// Run summary for JSON export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub config: SolverConfig,
    pub iterations: usize,
    pub status: SolveStatus,
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub final_rel_error: Option<f64>,
    pub success: Option<bool>,
}

impl RunSummary {
    /// Success means relative error at most `success_tol`.
    pub fn new(
        seed: u64,
        config: &SolverConfig,
        result: &SolveResult,
        x_opt: Option<&ComplexSignal>,
        success_tol: f64,
    ) -> Result<Self> {
        let last = result.trace.records.last().expect("trace has a terminal record");
        let rel = x_opt.map(|x| crate::signal::relative_error(&result.z, x)).transpose()?;
        Ok(RunSummary {
            seed,
            config: config.clone(),
            iterations: result.iterations,
            status: result.status,
            final_f: last.f,
            final_grad_norm: last.grad_norm,
            final_rel_error: rel,
            success: rel.map(|r| r <= success_tol),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::gen_gaussian_ensemble;
    use crate::signal::random_ball_init;

    fn instance(n: usize, m: usize, seed: u64) -> (MeasurementEnsemble, ComplexSignal) {
        let x = ComplexSignal::gaussian_unit(n, seed, 0).unwrap();
        (gen_gaussian_ensemble(n, m, &x, seed).unwrap(), x)
    }

    #[test]
    fn start_at_target_stops_immediately() {
        let (ens, x) = instance(8, 80, 1);
        let res = trm_solve(&ens, &SolverConfig::trm_adaptive(), &x, Some(&x)).unwrap();
        assert_eq!(res.iterations, 0);
        assert_eq!(res.status, SolveStatus::Converged);
        assert_eq!(res.trace.records.len(), 1);
        let gd = gradient_descent(&ens, &SolverConfig::gd(0.05), &x.rotated(0.5), Some(&x)).unwrap();
        assert_eq!(gd.iterations, 0);
    }

    #[test]
    fn adaptive_trm_recovers_small_instance() {
        let (ens, x) = instance(10, 120, 3);
        let (_, r0) = estimate_norm_and_radius(&ens);
        let z0 = random_ball_init(10, r0, 5).unwrap();
        let res = trm_solve(&ens, &SolverConfig::trm_adaptive(), &z0, Some(&x)).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(crate::signal::relative_error(&res.z, &x).unwrap() < 1e-8);
        let accepted: Vec<f64> = res.trace.accepted().map(|r| r.f).collect();
        assert!(accepted.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn gd_recovers_small_instance() {
        let (ens, x) = instance(6, 100, 4);
        let (_, r0) = estimate_norm_and_radius(&ens);
        let z0 = random_ball_init(6, r0, 2).unwrap();
        let res = gradient_descent(&ens, &SolverConfig::gd(0.05), &z0, Some(&x)).unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(crate::signal::relative_error(&res.z, &x).unwrap() < 1e-4);
    }

    #[test]
    fn gd_divergence_is_reported() {
        let (ens, _) = instance(4, 40, 2);
        let z0 = ComplexSignal::gaussian(4, 1, 1).unwrap().scaled(3.0);
        let res = gradient_descent(&ens, &SolverConfig::gd(5.0), &z0, None).unwrap();
        assert_eq!(res.status, SolveStatus::Diverged);
    }

    #[test]
    fn guard_radius_rejects_far_start() {
        let (ens, _) = instance(4, 40, 2);
        let (_, r0) = estimate_norm_and_radius(&ens);
        let far = ComplexSignal::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap().scaled(guard_radius(4, 40, r0) * 1.01);
        assert!(matches!(
            trm_solve(&ens, &SolverConfig::trm_adaptive(), &far, None),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn origin_uses_full_basis_step() {
        let (ens, x) = instance(5, 60, 6);
        let res = trm_solve(&ens, &SolverConfig::trm_adaptive(), &ComplexSignal::zeros(5).unwrap(), Some(&x)).unwrap();
        assert_eq!(res.trace.records[0].step_kind, StepKind::TrmFull);
        assert_eq!(res.status, SolveStatus::Converged);
    }

    #[test]
    fn trace_csv_header_and_rows() {
        let (ens, x) = instance(4, 40, 2);
        let z0 = x.scaled(0.9);
        let res = trm_solve(&ens, &SolverConfig::trm_adaptive(), &z0, Some(&x)).unwrap();
        let csv = res.trace.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iter,f,grad_norm,dist,step_kind,delta,model_decrease");
        assert_eq!(lines.count(), res.trace.records.len());
        assert!(csv.trim_end().ends_with(",0e0"));
    }

    #[test]
    fn rate_fit_recovers_exponent() {
        let mut trace = RunTrace::default();
        let mut g: f64 = 1e-1;
        for i in 0..5 {
            trace.records.push(TraceRecord {
                iter: i,
                f: 0.0,
                grad_norm: g,
                dist: None,
                step_kind: StepKind::TrmUnconstrained,
                delta: 1.0,
                model_decrease: 0.0,
            });
            g = 3.0 * g * g;
        }
        let fit = fit_terminal_rate(&trace, 1.0, 1e-30).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert!((fit.log_c - 3f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::trm_adaptive();
        c.shrink = 1.5;
        assert!(c.validate().is_err());
        assert!("newton".parse::<Algo>().is_err());
        assert_eq!("gd".parse::<Algo>().unwrap(), Algo::Gd);
    }
}
