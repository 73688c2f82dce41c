//! Tangent basis, subproblem reduction, the exact bisection solver, and the
//! eigen oracle, including a hard case.

use gpr::eigen::min_eig_sym;
use gpr::harness::{make_instance, trs_instance};
use gpr::trs::{build_tangent_basis, kkt_report, reduce_subproblem, solve_trs_exact, trs_eigen_oracle};
use gpr::{ComplexSignal, MeasurementModel};

fn main() -> gpr::Result<()> {
    let (ens, _) = make_instance(MeasurementModel::GaussianComplex, 8, 100, 4)?;
    let z = ComplexSignal::gaussian(8, 4, 9)?;
    let basis = build_tangent_basis(&z)?;
    let p = reduce_subproblem(&ens, &z, &basis, 0.3)?;
    let (lam_min, _) = min_eig_sym(&p.a)?;
    let sol = solve_trs_exact(&p, 1e-14)?;
    let oracle = trs_eigen_oracle(&p)?;
    let step = basis.apply(&sol.w);
    println!("reduced dimension {} (2n - 1), lambda_min(A) = {lam_min:.4}", basis.dim());
    println!(
        "{:?} solution: ||w|| = {:.4}, lambda = {:.6}, Q = {:.8}, oracle Q = {:.8}",
        sol.case,
        sol.w.norm(),
        sol.lambda,
        p.q(&sol.w),
        p.q(&oracle.w)
    );
    println!("step is tangent: Im(step^* z) = {:.2e}", step.dotc(z.as_vector()).im);

    let hard = trs_instance(6, 1, 0, true)?;
    let sol = solve_trs_exact(&hard, 1e-14)?;
    let kkt = kkt_report(&hard, &sol.w, sol.lambda)?;
    println!(
        "hard instance: case {:?}, stationarity {:.1e}, lambda_min(A + lambda I) = {:.1e}",
        sol.case, kkt.stationarity, kkt.dual_min_eig
    );
    Ok(())
}
