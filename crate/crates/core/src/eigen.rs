//! Dense symmetric eigendecomposition: Householder reduction to tridiagonal
//! form followed by implicit-shift QL iterations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled * self.vectors.transpose()
    }
}

/// Largest absolute entry.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Rejects non-finite or non-square input and asymmetry above `rel_tol·‖A‖_F`.
pub fn check_symmetric(a: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!("matrix is {}x{}, expected square", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix has non-finite entries".into()));
    }
    let asym = (a - a.transpose()).norm();
    if asym > rel_tol * a.norm() {
        return Err(Error::Contract(format!(
            "matrix is not symmetric: ‖A − Aᵀ‖ = {asym:e}, ‖A‖ = {:e}",
            a.norm()
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix. Only the lower triangle
/// (after symmetrization) is used; asymmetry above `1e-10` relative is rejected.
pub fn sym_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    check_symmetric(a, 1e-10)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SymmetricEigen { values: DVector::zeros(0), vectors: DMatrix::zeros(0, 0) });
    }
    let mut v = (a + a.transpose()) * 0.5;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| d[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Smallest eigenvalue and a unit eigenvector.
pub fn min_eig_sym(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    let eig = sym_eigen(a)?;
    if eig.dim() == 0 {
        return Err(Error::Dimension("empty matrix has no eigenvalues".into()));
    }
    Ok((eig.values[0], eig.vectors.column(0).into_owned()))
}

/// Cyclic Jacobi eigendecomposition. Slower than [`sym_eigen`] but built on a
/// different algorithm, so it serves as an independent reference.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    check_symmetric(a, 1e-10)?;
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let floor = 1e-18 * m.norm();
    let mut converged = false;
    for sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].abs()).sum();
        if off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                // Entries negligible next to both diagonal entries are dropped.
                let g = 100.0 * apq.abs();
                let negligible = m[(p, p)].abs() + g == m[(p, p)].abs() && m[(q, q)].abs() + g == m[(q, q)].abs();
                if apq.abs() <= floor || (sweep > 3 && negligible) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Consistency("Jacobi sweeps failed to converge".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Householder tridiagonalization. On return `d` holds the diagonal, `e[1..]`
/// the subdiagonal, and `v` the accumulated orthogonal transform.
fn tridiagonalize(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iterations on the tridiagonal `(d, e)`, rotating `v` along.
fn ql_implicit(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let max_sweeps = 60 * n.max(1);
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::Consistency("QL iteration failed to converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (mut left, mut right) = v.columns_range_pair_mut(i, i + 1);
                    for (vi, vi1) in left.iter_mut().zip(right.iter_mut()) {
                        let t = *vi1;
                        *vi1 = s * *vi + c * t;
                        *vi = c * *vi - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{self, Domain};

    pub(crate) fn random_symmetric(d: usize, seed: u64) -> DMatrix<f64> {
        let mut g = rng::stream(seed, Domain::Instance, 0);
        let m = DMatrix::from_fn(d, d, |_, _| rng::standard_normal(&mut g));
        (&m + m.transpose()) * 0.5
    }

    #[test]
    fn diagonal_case() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -2.0, 7.0]));
        let (lam, v) = min_eig_sym(&a).unwrap();
        assert!((lam + 2.0).abs() < 1e-15);
        assert!((v[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residuals_and_orthogonality() {
        for (d, seed) in [(1, 0), (2, 1), (7, 2), (50, 3), (120, 4)] {
            let a = random_symmetric(d, seed);
            let eig = sym_eigen(&a).unwrap();
            let scale = a.norm();
            for j in 0..d {
                let v = eig.vectors.column(j);
                let res = (&a * v - v * eig.values[j]).norm();
                assert!(res <= 1e-12 * scale, "d={d} j={j} res={res:e}");
            }
            let gram = eig.vectors.transpose() * &eig.vectors;
            assert!((gram - DMatrix::identity(d, d)).norm() < 1e-12 * d as f64);
            assert!(eig.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn jacobi_agrees_with_ql() {
        for (d, seed) in [(1, 5), (6, 6), (30, 7)] {
            let a = random_symmetric(d, seed);
            let (ql, jac) = (sym_eigen(&a).unwrap(), jacobi_eigen(&a).unwrap());
            assert!((&ql.values - &jac.values).amax() < 1e-12);
            assert!((jac.reconstruct() - &a).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn shift_equivariance() {
        let a = random_symmetric(9, 11);
        let (l0, _) = min_eig_sym(&a).unwrap();
        let (l1, _) = min_eig_sym(&(&a + DMatrix::identity(9, 9) * 2.5)).unwrap();
        assert!((l1 - l0 - 2.5).abs() < 1e-12);
    }

    #[test]
    fn repeated_and_zero_spectra() {
        let eig = sym_eigen(&DMatrix::zeros(4, 4)).unwrap();
        assert!(eig.values.iter().all(|v| *v == 0.0));
        let eig = sym_eigen(&(DMatrix::identity(5, 5) * 3.0)).unwrap();
        assert!(eig.values.iter().all(|v| (*v - 3.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = DMatrix::identity(3, 3);
        a[(0, 1)] = 1.0;
        assert!(matches!(sym_eigen(&a), Err(Error::Contract(_))));
        a[(0, 1)] = f64::NAN;
        assert!(matches!(sym_eigen(&a), Err(Error::NonFinite(_))));
    }
}
