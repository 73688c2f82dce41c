//! Fixed-step Wirtinger gradient descent from a random start.

use gpr::harness::{make_instance, trial_init};
use gpr::solver::{gradient_descent, SolverConfig};
use gpr::{relative_error, MeasurementModel};

fn main() -> gpr::Result<()> {
    let (ens, x) = make_instance(MeasurementModel::GaussianComplex, 32, 600, 2)?;
    let z0 = trial_init(&ens, 2, 0)?;
    let res = gradient_descent(&ens, &SolverConfig::gd(0.05), &z0, Some(&x))?;
    let last = res.trace.records.last().unwrap();
    println!(
        "{:?} after {} steps: f = {:.3e}, stacked gradient {:.3e}, relative error {:.2e}",
        res.status,
        res.iterations,
        last.f,
        last.grad_norm,
        relative_error(&res.z, &x)?
    );
    Ok(())
}
