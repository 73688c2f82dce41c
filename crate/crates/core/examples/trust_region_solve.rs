//! The trust-region method in adaptive and fixed-radius modes, with the
//! per-iteration trace.

use gpr::harness::{make_instance, trial_init};
use gpr::solver::{fit_terminal_rate, trm_solve, SolverConfig};
use gpr::{relative_error, MeasurementModel};

fn main() -> gpr::Result<()> {
    let (ens, x) = make_instance(MeasurementModel::GaussianComplex, 32, 600, 8)?;
    let z0 = trial_init(&ens, 8, 0)?;
    let adaptive = trm_solve(&ens, &SolverConfig::trm_adaptive(), &z0, Some(&x))?;
    println!(
        "adaptive: {:?} after {} iterations, relative error {:.2e}",
        adaptive.status,
        adaptive.iterations,
        relative_error(&adaptive.z, &x)?
    );
    for r in &adaptive.trace.records {
        println!(
            "  {:>3} f {:.3e} grad {:.3e} dist {:.3e} {:<17} delta {:.3e}",
            r.iter,
            r.f,
            r.grad_norm,
            r.dist.unwrap_or(f64::NAN),
            r.step_kind.as_str(),
            r.delta
        );
    }
    if let Some(fit) = fit_terminal_rate(&adaptive.trace, 1e-2, 1e-12) {
        println!("terminal rate exponent {:.2} over {} pairs", fit.exponent, fit.pairs);
    }

    let (small, xs) = make_instance(MeasurementModel::GaussianComplex, 3, 60, 8)?;
    let mut fixed = SolverConfig::trm_fixed(Some(0.05));
    fixed.max_iters = 2000;
    let res = trm_solve(&small, &fixed, &xs.scaled(0.7), Some(&xs))?;
    println!(
        "fixed radius 0.05 at n = 3: {:?} after {} iterations, relative error {:.2e}",
        res.status,
        res.iterations,
        relative_error(&res.z, &xs)?
    );
    Ok(())
}
