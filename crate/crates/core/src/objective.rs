//! The least-squares objective, its Wirtinger derivatives, and the population
//! (expected) objective under complex Gaussian measurements.
//!
//! Gradients are the `∇_z` half only. The stacked gradient `[∇_z f; ∇_z̄ f]`
//! has norm `√2·‖∇_z f‖`; see [`stacked_norm`]. Quadratic forms are
//! `[δ; δ̄]^* ∇²f [δ; δ̄]`, which equals `d²/dt² f(z + tδ)` at `t = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::MeasurementEnsemble;
use crate::signal::ComplexSignal;

/// Default limit on `n` for materialized `n×n` Hessian blocks.
pub const DENSE_HESSIAN_CAP: usize = 2048;

const BLOCK: usize = 256;

/// Blocked pairwise summation: sums of `BLOCK` consecutive terms are combined
/// by a fixed binary tree, so the result does not depend on thread count.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    if terms.len() <= BLOCK {
        return terms.iter().sum();
    }
    let mid = (terms.len() / 2).next_multiple_of(BLOCK).min(terms.len());
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// `‖[∇_z f; ∇_z̄ f]‖ = √2·‖∇_z f‖`.
pub fn stacked_norm(grad_z: &DVector<Complex64>) -> f64 {
    std::f64::consts::SQRT_2 * grad_z.norm()
}

/// First-order change `d/dt f(z + tδ)|₀ = 2 Re(δ^* ∇_z f)`.
pub fn directional_derivative(grad_z: &DVector<Complex64>, delta: &DVector<Complex64>) -> f64 {
    2.0 * delta.dotc(grad_z).re
}

fn check(ensemble: &MeasurementEnsemble, z: &ComplexSignal) -> Result<()> {
    ensemble.check_signal("objective point", z)
}

pub fn eval_f(ensemble: &MeasurementEnsemble, z: &ComplexSignal) -> Result<f64> {
    check(ensemble, z)?;
    let s = ensemble.project(z);
    Ok(f_from_projections(ensemble, &s))
}

fn f_from_projections(ensemble: &MeasurementEnsemble, s: &[Complex64]) -> f64 {
    let terms: Vec<f64> = s
        .iter()
        .zip(ensemble.magnitudes_sq())
        .map(|(sk, y2)| {
            let r = y2 - sk.norm_sqr();
            r * r
        })
        .collect();
    pairwise_sum(&terms) / (2.0 * ensemble.m() as f64)
}

/// `(1/m) Σ c_k a_k` for per-row coefficients `c_k`, accumulated blockwise.
fn combine_rows(ensemble: &MeasurementEnsemble, coeffs: &[Complex64]) -> DVector<Complex64> {
    let n = ensemble.n();
    let mut total = vec![Complex64::new(0.0, 0.0); n];
    let mut block = vec![Complex64::new(0.0, 0.0); n];
    for (start, chunk) in coeffs.chunks(BLOCK).enumerate() {
        block.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for (i, c) in chunk.iter().enumerate() {
            let row = ensemble.row(start * BLOCK + i);
            for (b, r) in block.iter_mut().zip(row) {
                // a_k = conj(row)
                *b += c * r.conj();
            }
        }
        for (t, b) in total.iter_mut().zip(&block) {
            *t += b;
        }
    }
    let inv_m = 1.0 / ensemble.m() as f64;
    DVector::from_iterator(n, total.into_iter().map(|t| t * inv_m))
}

fn grad_from_projections(ensemble: &MeasurementEnsemble, s: &[Complex64]) -> DVector<Complex64> {
    let coeffs: Vec<Complex64> = s
        .iter()
        .zip(ensemble.magnitudes_sq())
        .map(|(sk, y2)| sk * (sk.norm_sqr() - y2))
        .collect();
    combine_rows(ensemble, &coeffs)
}

/// `∇_z f = (1/m) Σ (|a_k^* z|² − y_k²) a_k a_k^* z`.
pub fn wirtinger_grad(ensemble: &MeasurementEnsemble, z: &ComplexSignal) -> Result<DVector<Complex64>> {
    check(ensemble, z)?;
    let s = ensemble.project(z);
    Ok(grad_from_projections(ensemble, &s))
}

/// `f(z)` and `∇_z f(z)` from a single pass of projections.
pub fn value_and_grad(
    ensemble: &MeasurementEnsemble,
    z: &ComplexSignal,
) -> Result<(f64, DVector<Complex64>)> {
    check(ensemble, z)?;
    let s = ensemble.project(z);
    Ok((f_from_projections(ensemble, &s), grad_from_projections(ensemble, &s)))
}

/// `(2/m) Σ [(2|a_k^* z|² − y_k²)|a_k^* δ|² + Re((a_k^* z)² conj(a_k^* δ)²)]`.
pub fn hessian_quadratic_form(
    ensemble: &MeasurementEnsemble,
    z: &ComplexSignal,
    delta: &ComplexSignal,
) -> Result<f64> {
    check(ensemble, z)?;
    ensemble.check_signal("direction", delta)?;
    let s = ensemble.project(z);
    let t = ensemble.project(delta);
    let terms: Vec<f64> = s
        .iter()
        .zip(&t)
        .zip(ensemble.magnitudes_sq())
        .map(|((sk, tk), y2)| {
            (2.0 * sk.norm_sqr() - y2) * tk.norm_sqr() + (sk * sk * tk.conj() * tk.conj()).re
        })
        .collect();
    Ok(2.0 * pairwise_sum(&terms) / ensemble.m() as f64)
}

/// Gradient and the two distinct `n×n` blocks of the Wirtinger Hessian
/// `[B C; C̄ B̄]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WirtingerDerivatives {
    pub grad_z: DVector<Complex64>,
    /// `B = (1/m) Σ (2|a_k^* z|² − y_k²) a_k a_k^*`, Hermitian.
    pub hess_b: DMatrix<Complex64>,
    /// `C = (1/m) Σ (a_k^* z)² a_k a_kᵀ`, complex symmetric.
    pub hess_c: DMatrix<Complex64>,
}

impl WirtingerDerivatives {
    /// `2 δ^* B δ + 2 Re(δ^* C δ̄)`.
    pub fn quadratic_form(&self, delta: &DVector<Complex64>) -> f64 {
        let bd = &self.hess_b * delta;
        let cd = &self.hess_c * delta.map(|c| c.conj());
        2.0 * delta.dotc(&bd).re + 2.0 * delta.dotc(&cd).re
    }

    /// Real `2n×2n` Hessian acting on `[Re δ; Im δ]`.
    pub fn real_hessian(&self) -> DMatrix<f64> {
        real_hessian_from_blocks(&self.hess_b, &self.hess_c)
    }
}

/// Real symmetric matrix `H` with `[u; v]ᵀ H [u; v]` equal to the quadratic
/// form at `δ = u + iv`: `H = 2 [[Br + Cr, Ci − Bi], [Bi + Ci, Br − Cr]]`.
pub fn real_hessian_from_blocks(b: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = b.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        let (bb, cc) = (b[(bi, bj)], c[(bi, bj)]);
        2.0 * match (i < n, j < n) {
            (true, true) => bb.re + cc.re,
            (true, false) => cc.im - bb.im,
            (false, true) => bb.im + cc.im,
            (false, false) => bb.re - cc.re,
        }
    })
}

/// Full derivatives with the default cap on `n`.
pub fn hessian_dense(ensemble: &MeasurementEnsemble, z: &ComplexSignal) -> Result<WirtingerDerivatives> {
    hessian_dense_with_cap(ensemble, z, DENSE_HESSIAN_CAP)
}

pub fn hessian_dense_with_cap(
    ensemble: &MeasurementEnsemble,
    z: &ComplexSignal,
    cap: usize,
) -> Result<WirtingerDerivatives> {
    check(ensemble, z)?;
    let n = ensemble.n();
    if n > cap {
        return Err(Error::Capacity { n, cap });
    }
    let s = ensemble.project(z);
    let grad_z = grad_from_projections(ensemble, &s);
    let (hess_b, hess_c) = hessian_blocks(ensemble, &s);
    Ok(WirtingerDerivatives { grad_z, hess_b, hess_c })
}

/// Builds `B` and `C` with real matrix products. With `R = P + iQ` the matrix
/// of rows `a_k^*`, `B = R^* W R` and `C = R̄ᵀ Σ R̄` for diagonal weights
/// `W = diag(2|s_k|² − y_k²)/m` and `Σ = diag(s_k²)/m`.
fn hessian_blocks(
    ensemble: &MeasurementEnsemble,
    s: &[Complex64],
) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let (n, m) = (ensemble.n(), ensemble.m());
    let rows = ensemble.rows();
    let p = DMatrix::from_fn(m, n, |k, j| rows[k * n + j].re);
    let q = DMatrix::from_fn(m, n, |k, j| rows[k * n + j].im);
    let pt = p.transpose();
    let qt = q.transpose();
    let inv_m = 1.0 / m as f64;
    let w: Vec<f64> = s
        .iter()
        .zip(ensemble.magnitudes_sq())
        .map(|(sk, y2)| (2.0 * sk.norm_sqr() - y2) * inv_m)
        .collect();
    let sig: Vec<Complex64> = s.iter().map(|sk| sk * sk * inv_m).collect();
    let scale = |mat: &DMatrix<f64>, d: &dyn Fn(usize) -> f64| {
        let mut out = mat.clone();
        for (k, mut row) in out.row_iter_mut().enumerate() {
            row *= d(k);
        }
        out
    };
    let wp = scale(&p, &|k| w[k]);
    let wq = scale(&q, &|k| w[k]);
    let ptwp = &pt * &wp;
    let qtwq = &qt * &wq;
    let ptwq = &pt * &wq;
    let b = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(ptwp[(i, j)] + qtwq[(i, j)], ptwq[(i, j)] - ptwq[(j, i)])
    });

    // R̄ = P − iQ, so R̄ᵀ Σ R̄ = (Pᵀ − iQᵀ)(Σr + iΣi)(P − iQ).
    let srp = scale(&p, &|k| sig[k].re);
    let srq = scale(&q, &|k| sig[k].re);
    let sip = scale(&p, &|k| sig[k].im);
    let siq = scale(&q, &|k| sig[k].im);
    let pt_sr_p = &pt * &srp;
    let qt_sr_q = &qt * &srq;
    let pt_sr_q = &pt * &srq;
    let pt_si_p = &pt * &sip;
    let qt_si_q = &qt * &siq;
    let pt_si_q = &pt * &siq;
    let c = DMatrix::from_fn(n, n, |i, j| {
        let re = pt_sr_p[(i, j)] - qt_sr_q[(i, j)] + pt_si_q[(i, j)] + pt_si_q[(j, i)];
        let im = pt_si_p[(i, j)] - qt_si_q[(i, j)] - pt_sr_q[(i, j)] - pt_sr_q[(j, i)];
        Complex64::new(re, im)
    });
    (b, c)
}

/// `f(z)`, `∇_z f(z)` and the real `2n×2n` Hessian at `z`, as used by the
/// trust-region solver.
pub fn second_order_model(
    ensemble: &MeasurementEnsemble,
    z: &ComplexSignal,
) -> Result<(f64, DVector<Complex64>, DMatrix<f64>)> {
    check(ensemble, z)?;
    let n = ensemble.n();
    if n > DENSE_HESSIAN_CAP {
        return Err(Error::Capacity { n, cap: DENSE_HESSIAN_CAP });
    }
    let s = ensemble.project(z);
    let f = f_from_projections(ensemble, &s);
    let g = grad_from_projections(ensemble, &s);
    let (b, c) = hessian_blocks(ensemble, &s);
    Ok((f, g, real_hessian_from_blocks(&b, &c)))
}

/// `E[f(z)] = ‖x‖⁴ + ‖z‖⁴ − ‖x‖²‖z‖² − |x^* z|²` for complex Gaussian rows.
pub fn population_f(x: &ComplexSignal, z: &ComplexSignal) -> Result<f64> {
    crate::error::check_dims("population point", x.len(), z.len())?;
    let (nx, nz) = (x.norm_sq(), z.norm_sq());
    Ok(nx * nx + nz * nz - nx * nz - x.inner(z).norm_sqr())
}

/// `∇_z E[f] = (2‖z‖² − ‖x‖²) z − (x^* z) x`.
pub fn population_grad(x: &ComplexSignal, z: &ComplexSignal) -> Result<DVector<Complex64>> {
    crate::error::check_dims("population point", x.len(), z.len())?;
    let coef = 2.0 * z.norm_sq() - x.norm_sq();
    let xz = x.inner(z);
    Ok(z.as_vector().map(|c| c * coef) - x.as_vector().map(|c| c * xz))
}

/// `2[2|z^*δ|² − |x^*δ|² + (2‖z‖² − ‖x‖²)‖δ‖²] + 4 Re((δ^* z)²)`.
pub fn population_hessian_form(x: &ComplexSignal, z: &ComplexSignal, delta: &ComplexSignal) -> Result<f64> {
    crate::error::check_dims("population point", x.len(), z.len())?;
    crate::error::check_dims("direction", x.len(), delta.len())?;
    let zd = z.inner(delta);
    let xd = x.inner(delta);
    let dz = delta.inner(z);
    Ok(2.0 * (2.0 * zd.norm_sqr() - xd.norm_sqr() + (2.0 * z.norm_sq() - x.norm_sq()) * delta.norm_sq())
        + 4.0 * (dz * dz).re)
}

/// `E[f(z)]` for real Gaussian rows `a ~ N(0, I)` and real `x`, `z`:
/// `(3/2)‖x‖⁴ + (3/2)‖z‖⁴ − ‖x‖²‖z‖² − 2(xᵀz)²`.
pub fn population_f_real(x: &[f64], z: &[f64]) -> Result<f64> {
    crate::error::check_dims("population point", x.len(), z.len())?;
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let nz: f64 = z.iter().map(|v| v * v).sum();
    let xz: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
    Ok(1.5 * nx * nx + 1.5 * nz * nz - nx * nz - 2.0 * xz * xz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{gen_gaussian_ensemble, MeasurementModel};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn instance(n: usize, m: usize, seed: u64) -> (MeasurementEnsemble, ComplexSignal) {
        let x = ComplexSignal::gaussian(n, seed, 0).unwrap();
        (gen_gaussian_ensemble(n, m, &x, seed).unwrap(), x)
    }

    #[test]
    fn hand_instance_value() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let vecs = vec![
            DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
        ];
        let x = ComplexSignal::from_real(&[1.0, 0.0]).unwrap();
        let ens = MeasurementEnsemble::from_sensing_vectors(MeasurementModel::GaussianComplex, &vecs, &x).unwrap();
        let z = ComplexSignal::from_real(&[0.0, 1.0]).unwrap();
        assert!((eval_f(&ens, &z).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_at_target_circle() {
        let (ens, x) = instance(6, 50, 1);
        assert!(eval_f(&ens, &x).unwrap() < 1e-28);
        assert!(eval_f(&ens, &x.rotated(1.234)).unwrap() < 1e-26);
        let g = wirtinger_grad(&ens, &x.rotated(0.3)).unwrap();
        assert!(g.norm() <= 1e-12 * x.norm().powi(3));
        let z0 = ComplexSignal::zeros(6).unwrap();
        assert_eq!(wirtinger_grad(&ens, &z0).unwrap().norm(), 0.0);
    }

    #[test]
    fn dense_blocks_match_direct_form() {
        let (ens, _) = instance(5, 40, 3);
        let z = ComplexSignal::gaussian(5, 3, 7).unwrap();
        let d = hessian_dense(&ens, &z).unwrap();
        let bh = d.hess_b.adjoint();
        assert!((&d.hess_b - &bh).norm() <= 1e-14 * d.hess_b.norm());
        assert!((&d.hess_c - d.hess_c.transpose()).norm() <= 1e-14 * d.hess_c.norm());
        for k in 0..20 {
            let delta = ComplexSignal::gaussian(5, 9, k).unwrap();
            let direct = hessian_quadratic_form(&ens, &z, &delta).unwrap();
            let dense = d.quadratic_form(&delta);
            assert!((direct - dense).abs() <= 1e-10 * direct.abs().max(1.0));
            let r = delta.to_real();
            let real = (r.transpose() * d.real_hessian() * &r)[(0, 0)];
            assert!((direct - real).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn dense_at_origin() {
        let (ens, _) = instance(3, 30, 5);
        let d = hessian_dense(&ens, &ComplexSignal::zeros(3).unwrap()).unwrap();
        assert_eq!(d.hess_c.norm(), 0.0);
        let mut want = DMatrix::<Complex64>::zeros(3, 3);
        for k in 0..30 {
            let a = ens.sensing_vector(k);
            want -= &a * a.adjoint() * c(ens.magnitudes_sq()[k] / 30.0, 0.0);
        }
        assert!((d.hess_b - want).norm() < 1e-13);
    }

    #[test]
    fn capacity_guard() {
        let (ens, x) = instance(4, 10, 0);
        assert!(matches!(hessian_dense_with_cap(&ens, &x, 3), Err(Error::Capacity { n: 4, cap: 3 })));
    }

    #[test]
    fn form_at_target_along_target() {
        let (ens, x) = instance(4, 30, 2);
        let form = hessian_quadratic_form(&ens, &x, &x).unwrap();
        let want: f64 = ens.magnitudes_sq().iter().map(|y2| 4.0 * y2 * y2).sum::<f64>() / 30.0;
        assert!((form - want).abs() <= 1e-12 * want);
        let flat = hessian_quadratic_form(&ens, &x, &x.rotated(std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(flat.abs() <= 1e-12 * want);
    }

    #[test]
    fn population_closed_forms() {
        let x = ComplexSignal::gaussian(4, 1, 0).unwrap();
        let zero = ComplexSignal::zeros(4).unwrap();
        assert!((population_f(&x, &zero).unwrap() - x.norm_sq().powi(2)).abs() < 1e-12);
        assert!(population_f(&x, &x.rotated(0.4)).unwrap().abs() < 1e-12);
        assert!(population_grad(&x, &x.rotated(2.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
