//! Recovery probability against m/n with the adaptive trust-region method.
//! Pass `full` for n = 128 and 25 trials per ratio.

use gpr::harness::{run_sweep, ExperimentKind, ExperimentSpec};

fn main() -> gpr::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Sweep);
    if !full {
        spec.n = 24;
        spec.trials = 5;
        spec.ratios = vec![2.0, 3.0, 4.0, 6.0, 8.0, 10.0];
    }
    print!("{}", run_sweep(&spec)?.to_csv());
    Ok(())
}
