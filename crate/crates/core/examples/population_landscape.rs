//! Closed-form expected objective at its critical points: the origin, the
//! target circle, and the saddle set `{‖z‖ = ‖x‖/√2, x^* z = 0}`.

use gpr::objective::{population_f, population_grad, population_hessian_form};
use gpr::ComplexSignal;
use num_complex::Complex64;

fn main() -> gpr::Result<()> {
    let n = 6;
    let x = ComplexSignal::gaussian(n, 5, 0)?;
    let xn = x.norm();
    let w = ComplexSignal::gaussian(n, 5, 1)?;
    let perp = w.as_vector() - x.as_vector() * (x.inner(&w) / Complex64::new(xn * xn, 0.0));
    let s = ComplexSignal::new(&perp * Complex64::new(xn / (2f64.sqrt() * perp.norm()), 0.0))?;
    let zero = ComplexSignal::zeros(n)?;
    for (name, z) in [("origin", &zero), ("target", &x.rotated(0.7)), ("saddle", &s)] {
        println!(
            "{name:>6}: E f = {:.6}, ||grad E f|| = {:.2e}",
            population_f(&x, z)?,
            population_grad(&x, z)?.norm()
        );
    }
    let dir = x.rotated(gpr::align_phase(&s, &x)?.phi);
    println!(
        "form along x e^(i phi) at the saddle = {:.6}, -2||x||^4 = {:.6}",
        population_hessian_form(&x, &s, &dir)?,
        -2.0 * xn.powi(4)
    );
    Ok(())
}
