//! Exact subproblem solver against the eigen oracle on random instances,
//! every fifth one a hard case.

use gpr::harness::{run_trs_bench, ExperimentKind, ExperimentSpec};

fn main() -> gpr::Result<()> {
    let report = run_trs_bench(&ExperimentSpec::defaults(ExperimentKind::TrsBench))?;
    println!("{} instances, {} hard", report.instances, report.hard_instances);
    println!("KKT residual percentiles (50/90/99/100): {:?}", report.kkt_percentiles);
    println!("largest gap to the oracle objective: {:.2e}", report.max_q_gap);
    Ok(())
}
