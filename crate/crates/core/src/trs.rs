//! The tangent-constrained trust-region subproblem.
//!
//! At an iterate `z` the step `δ` is restricted to the real subspace
//! `{δ : Im(δ^* z) = 0}`, which removes the flat direction `iz` along the
//! target circle. A real-orthonormal basis of that subspace turns the problem
//! into a classical one, `min (1/2)wᵀAw + bᵀw` subject to `‖w‖ ≤ r`, which is
//! solved exactly by bisection on the multiplier.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{self, check_symmetric, max_abs, SymmetricEigen};
use crate::error::{Error, Result};
use crate::measurement::MeasurementEnsemble;
use crate::objective;
use crate::signal::{complexify, realify, ComplexSignal};

/// Below this norm a point has no usable tangent normal.
pub const DEGENERATE_NORM: f64 = 1e-100;

/// Real-orthonormal basis of the tangent subspace at `z_anchor`, stored as a
/// Householder reflector `P = I − β v vᵀ` on `R^{2n}` whose first column is
/// the unit normal `[−Im z; Re z]/‖z‖`. The basis is columns `2..2n` of `P`.
///
/// The full variant spans all of `C^n` and is used at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBasis {
    z_anchor: ComplexSignal,
    reflector: Option<(DVector<f64>, f64)>,
}

impl TangentBasis {
    /// Identity basis of `R^{2n}` (no tangent constraint).
    pub fn full(z: &ComplexSignal) -> TangentBasis {
        TangentBasis { z_anchor: z.clone(), reflector: None }
    }

    pub fn is_full(&self) -> bool {
        self.reflector.is_none()
    }

    pub fn z_anchor(&self) -> &ComplexSignal {
        &self.z_anchor
    }

    pub fn n(&self) -> usize {
        self.z_anchor.len()
    }

    /// Reduced dimension: `2n − 1`, or `2n` for the full basis.
    pub fn dim(&self) -> usize {
        if self.is_full() { 2 * self.n() } else { 2 * self.n() - 1 }
    }

    /// `y ↦ P y` on `R^{2n}`.
    fn reflect(&self, y: &mut DVector<f64>) {
        if let Some((v, beta)) = &self.reflector {
            let s = beta * v.dot(y);
            y.axpy(-s, v, 1.0);
        }
    }

    /// Real coordinates `ξ` to the complex step `δ = Uξ`.
    pub fn apply(&self, xi: &DVector<f64>) -> DVector<Complex64> {
        debug_assert_eq!(xi.len(), self.dim());
        if self.is_full() {
            return complexify(xi);
        }
        let mut y = DVector::zeros(2 * self.n());
        y.rows_mut(1, xi.len()).copy_from(xi);
        self.reflect(&mut y);
        complexify(&y)
    }

    /// Real coordinates of the projection of a realified vector onto the basis.
    pub fn project_real(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut y = y.clone();
        self.reflect(&mut y);
        if self.is_full() { y } else { y.rows(1, self.dim()).into_owned() }
    }

    /// `Uᵀ H U` for a real symmetric `2n×2n` matrix `H`.
    pub fn reduce_matrix(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let Some((v, beta)) = &self.reflector else {
            return h.clone();
        };
        // P H P = H − β v wᵀ − β w vᵀ + β² (vᵀw) v vᵀ with w = H v.
        let w = h * v;
        let alpha = v.dot(&w);
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            let (i, j) = (i + 1, j + 1);
            h[(i, j)] - beta * (v[i] * w[j] + w[i] * v[j]) + beta * beta * alpha * v[i] * v[j]
        })
    }

    /// The basis as an `n×d` complex matrix `U`.
    pub fn columns(&self) -> DMatrix<Complex64> {
        let (n, d) = (self.n(), self.dim());
        let mut u = DMatrix::zeros(n, d);
        for j in 0..d {
            let mut e = DVector::zeros(d);
            e[j] = 1.0;
            u.set_column(j, &self.apply(&e));
        }
        u
    }
}

/// Tangent basis at `z` built from a Householder reflector.
pub fn build_tangent_basis(z: &ComplexSignal) -> Result<TangentBasis> {
    build_tangent_basis_with_floor(z, DEGENERATE_NORM)
}

/// As [`build_tangent_basis`] with a caller-chosen degeneracy floor on `‖z‖`.
pub fn build_tangent_basis_with_floor(z: &ComplexSignal, floor: f64) -> Result<TangentBasis> {
    let norm = z.norm();
    if !(norm > floor) {
        return Err(Error::Degenerate(format!("‖z‖ = {norm:e} is below {floor:e}")));
    }
    let n = z.len();
    let mut u = DVector::from_fn(2 * n, |i, _| if i < n { -z[i].im } else { z[i - n].re });
    u /= norm;
    // v = u + sign(u_1) e_1 avoids cancellation; then P e_1 = −sign(u_1) u.
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = u;
    v[0] += sign;
    let beta = 2.0 / v.norm_squared();
    Ok(TangentBasis { z_anchor: z.clone(), reflector: Some((v, beta)) })
}

/// `min Q(w) = (1/2)wᵀAw + bᵀw` subject to `‖w‖ ≤ r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTrsProblem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub r: f64,
}

impl RealTrsProblem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, r: f64) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension(format!("A is {}x{}, b has {}", a.nrows(), a.ncols(), b.len())));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("b has non-finite entries".into()));
        }
        check_symmetric(&a, 1e-12)?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("trust radius must be positive, got {r}")));
        }
        Ok(RealTrsProblem { a, b, r })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn q(&self, w: &DVector<f64>) -> f64 {
        0.5 * w.dot(&(&self.a * w)) + self.b.dot(w)
    }

    /// Model value `f + bᵀξ + (1/2)ξᵀAξ`.
    pub fn model_value(&self, f: f64, xi: &DVector<f64>) -> f64 {
        f + self.q(xi)
    }

    /// JSON record of the instance and a solution for failure triage.
    pub fn debug_json(&self, sol: &TrsSolution) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = self.a.row_iter().map(|r| r.iter().copied().collect()).collect();
        serde_json::json!({
            "A": rows,
            "b": self.b.as_slice(),
            "r": self.r,
            "w": sol.w.as_slice(),
            "lambda": sol.lambda,
            "case": sol.case,
            "kkt_residual": sol.kkt_residual,
            "q": self.q(&sol.w),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrsCase {
    Interior,
    Boundary,
    Hard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrsSolution {
    pub w: DVector<f64>,
    pub lambda: f64,
    pub case: TrsCase,
    /// `‖(A + λI)w + b‖`.
    pub kkt_residual: f64,
}

/// The optimality conditions evaluated at a candidate `(w, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    pub stationarity: f64,
    pub feasibility: f64,
    pub complementarity: f64,
    /// `λ_min(A + λI)`, nonnegative at a global solution.
    pub dual_min_eig: f64,
}

pub fn kkt_report(p: &RealTrsProblem, w: &DVector<f64>, lambda: f64) -> Result<KktReport> {
    let shifted = &p.a + DMatrix::identity(p.dim(), p.dim()) * lambda;
    let stationarity = (&shifted * w + &p.b).norm();
    let norm = w.norm();
    let (dual_min_eig, _) = eigen::min_eig_sym(&shifted)?;
    Ok(KktReport {
        stationarity,
        feasibility: (norm - p.r).max(0.0),
        complementarity: lambda * (norm - p.r).abs(),
        dual_min_eig,
    })
}

/// The reduced subproblem at `z`, with `b = Uᵀ realify(2∇_z f)` and `A = Uᵀ H U`.
pub fn reduce_subproblem(
    ensemble: &MeasurementEnsemble,
    z: &ComplexSignal,
    basis: &TangentBasis,
    delta: f64,
) -> Result<RealTrsProblem> {
    let (_, g, h) = objective::second_order_model(ensemble, z)?;
    reduce_from_model(basis, &g, &h, delta)
}

/// Reduction from a precomputed gradient and real Hessian.
pub fn reduce_from_model(
    basis: &TangentBasis,
    grad_z: &DVector<Complex64>,
    real_hessian: &DMatrix<f64>,
    delta: f64,
) -> Result<RealTrsProblem> {
    let b = basis.project_real(&(realify(grad_z) * 2.0));
    let a = basis.reduce_matrix(real_hessian);
    let asym = (&a - a.transpose()).norm();
    if asym > 1e-10 * a.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!("reduced Hessian asymmetry {asym:e}")));
    }
    let a = (&a + a.transpose()) * 0.5;
    RealTrsProblem::new(a, b, delta)
}

/// A subproblem with its eigendecomposition cached, so several radii can be
/// solved against the same `(A, b)`.
#[derive(Debug, Clone)]
pub struct PreparedTrs {
    a: DMatrix<f64>,
    b: DVector<f64>,
    eig: SymmetricEigen,
    /// `Qᵀ b` in the eigenbasis.
    beta: DVector<f64>,
    a_inf: f64,
}

impl PreparedTrs {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let p = RealTrsProblem::new(a, b, 1.0)?;
        let eig = eigen::sym_eigen(&p.a)?;
        let beta = eig.vectors.transpose() * &p.b;
        let a_inf = max_abs(&p.a);
        Ok(PreparedTrs { a: p.a, b: p.b, eig, beta, a_inf })
    }

    pub fn from_problem(p: &RealTrsProblem) -> Result<Self> {
        Self::new(p.a.clone(), p.b.clone())
    }

    pub fn min_eig(&self) -> f64 {
        self.eig.values[0]
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eig
    }

    pub fn problem(&self, r: f64) -> Result<RealTrsProblem> {
        RealTrsProblem::new(self.a.clone(), self.b.clone(), r)
    }

    fn dim(&self) -> usize {
        self.b.len()
    }

    /// `Q(w) = ½wᵀAw + bᵀw`.
    pub fn q(&self, w: &DVector<f64>) -> f64 {
        0.5 * w.dot(&(&self.a * w)) + self.b.dot(w)
    }

    /// `‖(A + λI)^{-1} b‖` for `λ > −λ_1`.
    fn step_norm(&self, lambda: f64) -> f64 {
        self.eig
            .values
            .iter()
            .zip(self.beta.iter())
            .map(|(l, b)| (b / (l + lambda)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Eigenbasis coefficients of `−(A + λI)^† b`, dropping shifted
    /// eigenvalues at or below `floor`.
    fn coeffs(&self, lambda: f64, floor: f64) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.eig.values.iter().zip(self.beta.iter()).map(|(l, b)| {
                let s = l + lambda;
                if s > floor { -b / s } else { 0.0 }
            }),
        )
    }

    fn finish(&self, c: &DVector<f64>, lambda: f64, case: TrsCase) -> TrsSolution {
        let w = &self.eig.vectors * c;
        let kkt_residual = (&self.a * &w + &w * lambda + &self.b).norm();
        TrsSolution { w, lambda, case, kkt_residual }
    }

    /// Exact solution by bisection on the multiplier, terminating once the
    /// bracket is narrower than `eps`.
    ///
    /// 1. If `A ≻ 0` and `‖A^{-1}b‖ ≤ r` the Newton point is returned.
    /// 2. Otherwise `λ` is bisected on `[0, ‖b‖/r + d·max|A_ij|]`. At each
    ///    midpoint `λ_M` the smallest eigenvalue of `A + λ_M I` is tested; a
    ///    near-zero value nudges `λ_M` up by `eps/10`. An indefinite shift or a
    ///    step longer than `r` raises the lower end, otherwise the upper end
    ///    drops. The upper end is returned.
    /// 3. If `A + λI` is singular to tolerance and the pseudo-inverse step is
    ///    inside the ball (the hard case), a bottom eigenvector is added to
    ///    reach the boundary.
    pub fn solve(&self, r: f64, eps: f64) -> Result<TrsSolution> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("trust radius must be positive, got {r}")));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let lam1 = self.min_eig();
        if lam1 > 0.0 && self.step_norm(0.0) <= r {
            return Ok(self.finish(&self.coeffs(0.0, 0.0), 0.0, TrsCase::Interior));
        }

        let d = self.dim() as f64;
        let mut lo = 0.0_f64;
        let mut hi = self.b.norm() / r + d * self.a_inf;
        let nudge = eps / 10.0;
        while hi - lo >= eps {
            let mut mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let mut shifted = lam1 + mid;
            if shifted.abs() <= nudge {
                mid += nudge;
                shifted = lam1 + mid;
            }
            if shifted <= 0.0 || self.step_norm(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda_hat = hi;

        let sing_tol = 2.0 * eps;
        if lam1 + lambda_hat <= sing_tol {
            let lambda = (-lam1).max(0.0);
            let c = self.coeffs(lambda, sing_tol);
            let base = c.norm();
            if base <= r {
                if lambda == 0.0 {
                    return Ok(self.finish(&c, 0.0, TrsCase::Interior));
                }
                let t = (r * r - base * base).max(0.0).sqrt();
                let mut plus = c.clone();
                plus[0] += t;
                let mut minus = c;
                minus[0] -= t;
                let (sp, sm) = (self.finish(&plus, lambda, TrsCase::Hard), self.finish(&minus, lambda, TrsCase::Hard));
                return Ok(if self.q(&sm.w) < self.q(&sp.w) { sm } else { sp });
            }
        }
        Ok(self.finish(&self.coeffs(lambda_hat, 0.0), lambda_hat, TrsCase::Boundary))
    }
}

/// One-shot exact solve (see [`PreparedTrs::solve`]).
pub fn solve_trs_exact(p: &RealTrsProblem, eps: f64) -> Result<TrsSolution> {
    PreparedTrs::from_problem(p)?.solve(p.r, eps)
}

/// Independent reference solver: a Jacobi eigendecomposition and bisection on
/// the secular equation `‖(A + λI)^{-1}b‖ = r` to machine precision, with an
/// explicit hard-case branch. Intended for verification only.
pub fn trs_eigen_oracle(p: &RealTrsProblem) -> Result<TrsSolution> {
    let d = p.dim();
    if d > 200 {
        return Err(Error::InvalidArgument(format!("oracle limited to d <= 200, got {d}")));
    }
    let eig = eigen::jacobi_eigen(&p.a)?;
    let vals: Vec<f64> = eig.values.iter().copied().collect();
    let vecs = eig.vectors;
    let beta = vecs.transpose() * &p.b;
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(p.b.norm() / p.r).max(1e-300);
    let tol = 1e-13 * scale;

    let norm_at = |lam: f64| -> f64 {
        vals.iter().zip(beta.iter()).map(|(l, b)| (b / (l + lam)).powi(2)).sum::<f64>().sqrt()
    };
    let build = |lam: f64, skip_below: f64| -> DVector<f64> {
        let c = DVector::from_iterator(
            d,
            vals.iter().zip(beta.iter()).map(|(l, b)| if l + lam > skip_below { -b / (l + lam) } else { 0.0 }),
        );
        &vecs * c
    };
    let finish = |w: DVector<f64>, lambda: f64, case: TrsCase| {
        let kkt_residual = (&p.a * &w + &w * lambda + &p.b).norm();
        TrsSolution { w, lambda, case, kkt_residual }
    };

    let lam1 = vals[0];
    if p.b.norm() == 0.0 && lam1 >= 0.0 {
        return Ok(finish(DVector::zeros(d), 0.0, TrsCase::Interior));
    }
    if lam1 > tol && norm_at(0.0) <= p.r {
        return Ok(finish(build(0.0, 0.0), 0.0, TrsCase::Interior));
    }
    let lower = (-lam1).max(0.0);
    let bottom_weight: f64 = vals
        .iter()
        .zip(beta.iter())
        .filter(|(l, _)| *l + lower <= tol)
        .map(|(_, b)| b * b)
        .sum::<f64>()
        .sqrt();
    // Bottom components at rounding level are treated as zero: bisecting the
    // secular equation that close to its pole cannot resolve the radius.
    if bottom_weight <= 1e-10 * p.b.norm().max(scale) {
        let w = build(lower, tol);
        let base = w.norm();
        if base <= p.r {
            if lower == 0.0 {
                return Ok(finish(w, 0.0, TrsCase::Interior));
            }
            let t = (p.r * p.r - base * base).sqrt();
            let q1 = vecs.column(0).into_owned();
            let plus = &w + &q1 * t;
            let minus = &w - &q1 * t;
            let pick = if p.q(&minus) < p.q(&plus) { minus } else { plus };
            return Ok(finish(pick, lower, TrsCase::Hard));
        }
    }
    // ‖w(λ)‖ decreases strictly on (lower, ∞); bracket and bisect to adjacent floats.
    let mut lo = lower;
    let mut hi = lower + p.b.norm() / p.r + scale;
    while norm_at(hi) > p.r {
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + lam1 <= 0.0 || norm_at(mid) > p.r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(finish(build(hi, 0.0), hi, TrsCase::Boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::gen_gaussian_ensemble;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(v))
    }

    #[test]
    fn scalar_basis_is_real_axis() {
        let z = ComplexSignal::from_real(&[1.0]).unwrap();
        let u = build_tangent_basis(&z).unwrap().columns();
        assert_eq!(u.ncols(), 1);
        assert!((u[(0, 0)].re.abs() - 1.0).abs() < 1e-15);
        assert!(u[(0, 0)].im.abs() < 1e-15);
    }

    #[test]
    fn basis_is_orthonormal_and_tangent() {
        let z = ComplexSignal::gaussian(6, 4, 1).unwrap();
        let basis = build_tangent_basis(&z).unwrap();
        let u = basis.columns();
        for i in 0..u.ncols() {
            let ci = u.column(i).into_owned();
            assert!(ci.dotc(&z).im.abs() <= 1e-14 * z.norm());
            for j in 0..u.ncols() {
                let dot = ci.dotc(&u.column(j).into_owned()).re;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-14);
            }
        }
        assert!(matches!(
            build_tangent_basis(&ComplexSignal::zeros(3).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn reduction_matches_direct_model() {
        let x = ComplexSignal::gaussian(5, 2, 0).unwrap();
        let ens = gen_gaussian_ensemble(5, 60, &x, 2).unwrap();
        let z = ComplexSignal::gaussian(5, 2, 9).unwrap();
        let basis = build_tangent_basis(&z).unwrap();
        let p = reduce_subproblem(&ens, &z, &basis, 1.0).unwrap();
        let g = objective::wirtinger_grad(&ens, &z).unwrap();
        for k in 0..10 {
            let xi = DVector::from_fn(9, |i, _| ((i * 7 + k * 3) % 5) as f64 - 2.0);
            let delta = ComplexSignal::new(basis.apply(&xi)).unwrap();
            let lin = objective::directional_derivative(&g, &delta);
            assert!((p.b.dot(&xi) - lin).abs() <= 1e-10 * lin.abs().max(1.0));
            let form = objective::hessian_quadratic_form(&ens, &z, &delta).unwrap();
            let red = xi.dot(&(&p.a * &xi));
            assert!((form - red).abs() <= 1e-9 * form.abs().max(1.0));
            assert!((delta.norm() - xi.norm()).abs() < 1e-12 * xi.norm());
        }
    }

    #[test]
    fn interior_identity_case() {
        let p = RealTrsProblem::new(DMatrix::identity(3, 3), DVector::from_vec(vec![-1.0, 0.0, 0.0]), 10.0).unwrap();
        let s = solve_trs_exact(&p, 1e-12).unwrap();
        assert_eq!(s.case, TrsCase::Interior);
        assert_eq!(s.lambda, 0.0);
        assert!((s.w[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_negative_curvature_is_hard_case() {
        let p = RealTrsProblem::new(diag(&[-1.0, 2.0]), DVector::zeros(2), 1.0).unwrap();
        for s in [solve_trs_exact(&p, 1e-12).unwrap(), trs_eigen_oracle(&p).unwrap()] {
            assert_eq!(s.case, TrsCase::Hard);
            assert!((s.lambda - 1.0).abs() < 1e-11);
            assert!((s.w[0].abs() - 1.0).abs() < 1e-12);
            assert!((p.q(&s.w) + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_gradient_psd_gives_zero_step() {
        let p = RealTrsProblem::new(diag(&[0.0, 1.0]), DVector::zeros(2), 1.0).unwrap();
        for s in [solve_trs_exact(&p, 1e-12).unwrap(), trs_eigen_oracle(&p).unwrap()] {
            assert_eq!(s.w.norm(), 0.0);
            assert_eq!(s.lambda, 0.0);
        }
    }

    #[test]
    fn boundary_case_agrees_with_oracle() {
        let p = RealTrsProblem::new(diag(&[-2.0, 1.0, 3.0]), DVector::from_vec(vec![1.0, 1.0, -1.0]), 0.5).unwrap();
        let s = solve_trs_exact(&p, 1e-12).unwrap();
        let o = trs_eigen_oracle(&p).unwrap();
        assert_eq!(s.case, TrsCase::Boundary);
        assert!((s.lambda - o.lambda).abs() < 1e-10);
        assert!((p.q(&s.w) - p.q(&o.w)).abs() < 1e-12);
        let k = kkt_report(&p, &s.w, s.lambda).unwrap();
        assert!(k.stationarity < 1e-10 && k.complementarity < 1e-10 && k.dual_min_eig >= -1e-10);
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        let mut a = DMatrix::identity(2, 2);
        a[(0, 1)] = 0.5;
        assert!(matches!(RealTrsProblem::new(a, DVector::zeros(2), 1.0), Err(Error::Contract(_))));
        let b = DVector::from_vec(vec![f64::INFINITY, 0.0]);
        assert!(matches!(RealTrsProblem::new(DMatrix::identity(2, 2), b, 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn debug_dump_has_all_fields() {
        let p = RealTrsProblem::new(diag(&[1.0]), DVector::from_vec(vec![1.0]), 0.1).unwrap();
        let s = solve_trs_exact(&p, 1e-12).unwrap();
        let j = p.debug_json(&s);
        for key in ["A", "b", "r", "w", "lambda", "case", "kkt_residual", "q"] {
            assert!(j.get(key).is_some(), "missing {key}");
        }
        assert_eq!(j["case"], "boundary");
    }
}
