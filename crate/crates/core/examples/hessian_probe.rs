//! Restricted curvatures near the target circle along random tangent directions.

use gpr::harness::{make_instance, ProbeSummary};
use gpr::measurement::sample_count;
use gpr::solver::hessian_bound_probe;
use gpr::MeasurementModel;

fn main() -> gpr::Result<()> {
    let n = 24;
    let (ens, x) = make_instance(MeasurementModel::GaussianComplex, n, sample_count(5.0, n, None), 6)?;
    let probe = hessian_bound_probe(&ens, &x, 40, 6)?;
    let s = ProbeSummary::new(&probe, x.norm());
    println!("min curvature {:.3} (bound {:.3}), pass rate {:.2}", s.m_h_emp, 0.8 * s.m_h_bound, s.lower_pass_rate);
    println!("max curvature {:.3} (bound {:.3}), pass rate {:.2}", s.m_h_max_emp, 1.2 * s.m_h_max_bound, s.upper_pass_rate);
    println!("exact spectrum of A/2 spans [{:.3}, {:.3}]", s.eig_min, s.eig_max);
    Ok(())
}
