//! Distance to the target circle `{x e^{iφ}}` and the relative error.

use gpr::{align_phase, relative_error, ComplexSignal};

fn main() -> gpr::Result<()> {
    let x = ComplexSignal::gaussian_unit(8, 1, 0)?;
    let z = x.rotated(1.234).scaled(1.01);
    let a = align_phase(&z, &x)?;
    println!("phi = {:.6} (expected 1.234), dist = {:.3e}", a.phi, a.dist);
    println!("relative error = {:.3e}", relative_error(&z, &x)?);
    let w = ComplexSignal::gaussian(8, 2, 0)?;
    println!("random point: dist = {:.4}", align_phase(&w, &x)?.dist);
    Ok(())
}
