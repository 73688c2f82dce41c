//! Gradient descent from many random starts on one instance. Pass `full` for
//! n = 100, m = 2303, and 100 starts.

use gpr::harness::{run_figure1, ExperimentKind, ExperimentSpec};

fn main() -> gpr::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Figure1);
    if !full {
        spec.n = 30;
        spec.trials = 10;
    }
    let report = run_figure1(&spec)?;
    print!("{}", report.to_csv());
    eprintln!("{}/{} runs reached dist <= 1e-4 ||x|| (n = {}, m = {})", report.successes, report.rows.len(), report.n, report.m);
    Ok(())
}
