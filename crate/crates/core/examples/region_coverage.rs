//! Region membership of single points and a coverage scan over the sampling
//! mixture.

use gpr::landscape::{classify_region, coverage_scan};
use gpr::ComplexSignal;

fn main() -> gpr::Result<()> {
    let x = ComplexSignal::gaussian_unit(10, 2, 0)?;
    for (name, z) in [
        ("near target", x.rotated(0.3).scaled(1.05)),
        ("near origin", x.scaled(0.05)),
        ("far away", x.scaled(1.8)),
    ] {
        let c = classify_region(&x, &z)?;
        println!(
            "{name:>11}: R1 {} R2z {} R2h {} R3 {} (dist {:.3})",
            c.in_r1, c.in_r2z, c.in_r2h, c.in_r3, c.dist
        );
    }
    let report = coverage_scan(&x, 20_000, 2)?;
    println!(
        "coverage scan: {} samples, {} uncovered (R1 {}, R2z {}, R2h {}, R3 {})",
        report.num_samples, report.uncovered, report.in_r1, report.in_r2z, report.in_r2h, report.in_r3
    );
    Ok(())
}
