//! Objective, Wirtinger gradient, and Hessian quadratic form, checked
//! against finite differences; dense Hessian blocks for small n.

use gpr::objective::{
    directional_derivative, eval_f, hessian_dense, hessian_quadratic_form, stacked_norm, wirtinger_grad,
};
use gpr::{gen_gaussian_ensemble, ComplexSignal};
use num_complex::Complex64;

fn main() -> gpr::Result<()> {
    let (n, m) = (12, 120);
    let x = ComplexSignal::gaussian_unit(n, 3, 0)?;
    let ens = gen_gaussian_ensemble(n, m, &x, 3)?;
    let z = ComplexSignal::gaussian(n, 3, 1)?;
    let d = ComplexSignal::gaussian(n, 3, 2)?;

    let f = |t: f64| -> gpr::Result<f64> {
        eval_f(&ens, &ComplexSignal::new(z.as_vector() + d.as_vector() * Complex64::new(t, 0.0))?)
    };
    let g = wirtinger_grad(&ens, &z)?;
    let h = 1e-5;
    let fd1 = (f(h)? - f(-h)?) / (2.0 * h);
    let fd2 = (f(h)? - 2.0 * f(0.0)? + f(-h)?) / (h * h);
    let first = directional_derivative(&g, &d);
    let second = hessian_quadratic_form(&ens, &z, &d)?;
    println!("f(z) = {:.6}, stacked gradient norm = {:.6}", f(0.0)?, stacked_norm(&g));
    println!("first order:  analytic {first:.10}  finite difference {fd1:.10}");
    println!("second order: analytic {second:.8}  finite difference {fd2:.8}");

    let hd = hessian_dense(&ens, &z)?;
    println!(
        "dense blocks: form from B, C = {:.8}; real Hessian is {}x{}",
        hd.quadratic_form(&d),
        hd.real_hessian().nrows(),
        hd.real_hessian().ncols()
    );
    println!("at the target: f = {:.3e}", eval_f(&ens, &x)?);
    Ok(())
}
