//! Finite-sample curvature and gradient certificates per region.

use gpr::harness::make_instance;
use gpr::landscape::certify_regions;
use gpr::measurement::sample_count;
use gpr::MeasurementModel;

fn main() -> gpr::Result<()> {
    let n = 24;
    let m = sample_count(5.0, n, None);
    let (ens, x) = make_instance(MeasurementModel::GaussianComplex, n, m, 11)?;
    let (tallies, samples) = certify_regions(&ens, &x, 50, 11)?;
    println!("n = {n}, m = {m}, {} certified samples", samples.len());
    for t in tallies {
        println!("{:>3}: {}/{} pass ({:.1}%)", t.region.as_str(), t.passed, t.samples, 100.0 * t.pass_rate);
    }
    Ok(())
}
