//! Measurement models and the problem instance they produce.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::rng::{self, Domain};
use crate::signal::ComplexSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementModel {
    /// i.i.d. rows `a_k = (X_k + iY_k)/sqrt(2)`.
    GaussianComplex,
    /// Orthonormal DCT-II rows modulated by random `{1, 0, -1}` masks.
    MaskedDctReal,
}

impl MeasurementModel {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementModel::GaussianComplex => "gaussian-complex",
            MeasurementModel::MaskedDctReal => "masked-dct-real",
        }
    }
}

impl fmt::Display for MeasurementModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasurementModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "gaussian-complex" => Ok(MeasurementModel::GaussianComplex),
            "masked-dct" | "masked-dct-real" => Ok(MeasurementModel::MaskedDctReal),
            other => Err(Error::InvalidArgument(format!("unknown measurement model '{other}'"))),
        }
    }
}

/// The sensing rows `a_k^*` together with the magnitudes `y_k = |a_k^* x|`.
///
/// Rows are stored contiguously in row-major order and hold the conjugated
/// sensing vectors, so `row(k) · z` is the projection `a_k^* z` directly.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    model: MeasurementModel,
    n: usize,
    m: usize,
    seed: u64,
    num_masks: Option<usize>,
    rows: Vec<Complex64>,
    magnitudes: Vec<f64>,
    magnitudes_sq: Vec<f64>,
}

impl MeasurementEnsemble {
    /// Assemble an ensemble from conjugated rows (`a_k^*`, row-major) and magnitudes.
    pub fn from_parts(
        model: MeasurementModel,
        n: usize,
        rows: Vec<Complex64>,
        magnitudes: Vec<f64>,
        seed: u64,
        num_masks: Option<usize>,
    ) -> Result<Self> {
        if n == 0 || magnitudes.is_empty() {
            return Err(Error::Dimension("ensemble needs n >= 1 and m >= 1".into()));
        }
        let m = magnitudes.len();
        check_dims("ensemble rows", m * n, rows.len())?;
        if rows.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("sensing rows contain non-finite values".into()));
        }
        if magnitudes.iter().any(|y| !y.is_finite() || *y < 0.0) {
            return Err(Error::Format("magnitudes must be finite and nonnegative".into()));
        }
        if model == MeasurementModel::MaskedDctReal && rows.iter().any(|c| c.im != 0.0) {
            return Err(Error::ModelMismatch("masked-dct-real rows must be real".into()));
        }
        let magnitudes_sq = magnitudes.iter().map(|y| y * y).collect();
        Ok(MeasurementEnsemble {
            model,
            n,
            m,
            seed,
            num_masks,
            rows,
            magnitudes,
            magnitudes_sq,
        })
    }

    /// Build from sensing vectors `a_k` (not conjugated) and a signal `x`.
    pub fn from_sensing_vectors(
        model: MeasurementModel,
        vectors: &[DVector<Complex64>],
        x: &ComplexSignal,
    ) -> Result<Self> {
        let n = x.len();
        let mut rows = Vec::with_capacity(vectors.len() * n);
        for a in vectors {
            check_dims("sensing vector", n, a.len())?;
            rows.extend(a.iter().map(|c| c.conj()));
        }
        let magnitudes = measure(&rows, n, x);
        Self::from_parts(model, n, rows, magnitudes, 0, None)
    }

    pub fn model(&self) -> MeasurementModel {
        self.model
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_masks(&self) -> Option<usize> {
        self.num_masks
    }

    /// Row `k`, i.e. the entries of `a_k^*`.
    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.rows[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> &[Complex64] {
        &self.rows
    }

    /// The sensing vector `a_k`.
    pub fn sensing_vector(&self, k: usize) -> DVector<Complex64> {
        DVector::from_iterator(self.n, self.row(k).iter().map(|c| c.conj()))
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn magnitudes_sq(&self) -> &[f64] {
        &self.magnitudes_sq
    }

    /// All projections `a_k^* z`.
    pub fn project(&self, z: &DVector<Complex64>) -> Vec<Complex64> {
        debug_assert_eq!(z.len(), self.n);
        let zs = z.as_slice();
        self.rows
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(zs).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn check_signal(&self, what: &str, z: &ComplexSignal) -> Result<()> {
        check_dims(what, self.n, z.len())
    }
}

fn measure(rows: &[Complex64], n: usize, x: &ComplexSignal) -> Vec<f64> {
    let xs = x.as_slice();
    rows.chunks_exact(n)
        .map(|row| row.iter().zip(xs).map(|(a, b)| a * b).sum::<Complex64>().norm())
        .collect()
}

fn validate_signal(n: usize, x: &ComplexSignal) -> Result<()> {
    if n == 0 {
        return Err(Error::Dimension("n must be >= 1".into()));
    }
    check_dims("signal", n, x.len())?;
    if x.norm_sq() == 0.0 {
        return Err(Error::InvalidArgument("signal must be nonzero".into()));
    }
    Ok(())
}

/// Complex Gaussian ensemble; row `k` is drawn from `MeasurementRow` stream `k`.
pub fn gen_gaussian_ensemble(
    n: usize,
    m: usize,
    x: &ComplexSignal,
    seed: u64,
) -> Result<MeasurementEnsemble> {
    validate_signal(n, x)?;
    if m == 0 {
        return Err(Error::Dimension("m must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(m * n);
    for k in 0..m {
        let mut rng = rng::stream(seed, Domain::MeasurementRow, k as u64);
        rows.extend((0..n).map(|_| rng::complex_normal(&mut rng).conj()));
    }
    let magnitudes = measure(&rows, n, x);
    MeasurementEnsemble::from_parts(MeasurementModel::GaussianComplex, n, rows, magnitudes, seed, None)
}

/// Orthonormal DCT-II matrix; entry `(t, i)` is row `t`, column `i`.
pub fn dct2_matrix(n: usize) -> Vec<Vec<f64>> {
    let nf = n as f64;
    (0..n)
        .map(|t| {
            let scale = if t == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            (0..n)
                .map(|i| {
                    scale * (std::f64::consts::PI * (2.0 * i as f64 + 1.0) * t as f64 / (2.0 * nf)).cos()
                })
                .collect()
        })
        .collect()
}

/// One mask entry: `1` and `-1` with probability 1/4 each, `0` with probability 1/2.
pub fn draw_mask_entry<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.gen_range(0..4u8) {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    }
}

/// Mask `j`, drawn from `Mask` stream `j`.
pub fn draw_mask(n: usize, seed: u64, j: usize) -> Vec<f64> {
    let mut rng = rng::stream(seed, Domain::Mask, j as u64);
    (0..n).map(|_| draw_mask_entry(&mut rng)).collect()
}

/// Masked DCT ensemble with random masks.
pub fn gen_masked_dct_ensemble(
    n: usize,
    num_masks: usize,
    x: &ComplexSignal,
    seed: u64,
) -> Result<MeasurementEnsemble> {
    let masks: Vec<Vec<f64>> = (0..num_masks).map(|j| draw_mask(n, seed, j)).collect();
    masked_dct_with_masks(n, &masks, x, seed)
}

/// Masked DCT ensemble with caller-supplied masks. Row `j*n + t` is DCT row `t`
/// multiplied entrywise by mask `j`.
pub fn masked_dct_with_masks(
    n: usize,
    masks: &[Vec<f64>],
    x: &ComplexSignal,
    seed: u64,
) -> Result<MeasurementEnsemble> {
    validate_signal(n, x)?;
    if !x.is_real() {
        return Err(Error::ModelMismatch(
            "the masked-dct-real model requires a real-valued signal".into(),
        ));
    }
    if masks.is_empty() {
        return Err(Error::Dimension("need at least one mask".into()));
    }
    let dct = dct2_matrix(n);
    let mut rows = Vec::with_capacity(masks.len() * n * n);
    for mask in masks {
        check_dims("mask", n, mask.len())?;
        for dct_row in &dct {
            rows.extend(dct_row.iter().zip(mask).map(|(c, d)| Complex64::new(c * d, 0.0)));
        }
    }
    let magnitudes = measure(&rows, n, x);
    MeasurementEnsemble::from_parts(
        MeasurementModel::MaskedDctReal,
        n,
        rows,
        magnitudes,
        seed,
        Some(masks.len()),
    )
}

/// `(sqrt(mean y^2), 3 sqrt(mean y^2))`: the norm estimate for `x` and the
/// initialization radius `R0`. All-zero magnitudes give `(0, 0)`.
pub fn estimate_norm_and_radius(ensemble: &MeasurementEnsemble) -> (f64, f64) {
    let mean_sq = ensemble.magnitudes_sq().iter().sum::<f64>() / ensemble.m() as f64;
    let est = mean_sq.sqrt();
    (est, 3.0 * est)
}

/// `m = ceil(c · n · log n)` with natural log by default.
pub fn sample_count(c: f64, n: usize, log_base: Option<f64>) -> usize {
    let ln = (n as f64).ln();
    let log = match log_base {
        Some(b) => ln / b.ln(),
        None => ln,
    };
    (c * n as f64 * log).ceil().max(1.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_case_magnitude_is_row_modulus() {
        let x = ComplexSignal::from_real(&[1.0]).unwrap();
        let ens = gen_gaussian_ensemble(1, 50, &x, 3).unwrap();
        for k in 0..50 {
            assert!((ens.magnitudes()[k] - ens.row(k)[0].norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_inputs_give_identical_ensembles() {
        let x = ComplexSignal::gaussian(6, 1, 0).unwrap();
        let a = gen_gaussian_ensemble(6, 40, &x, 99).unwrap();
        let b = gen_gaussian_ensemble(6, 40, &x, 99).unwrap();
        assert_eq!(a, b);
        let c = gen_gaussian_ensemble(6, 40, &x, 100).unwrap();
        assert_ne!(a.rows(), c.rows());
    }

    #[test]
    fn dimension_errors() {
        let x = ComplexSignal::from_real(&[1.0, 2.0]).unwrap();
        assert!(matches!(gen_gaussian_ensemble(3, 5, &x, 0), Err(Error::Dimension(_))));
        assert!(matches!(gen_gaussian_ensemble(2, 0, &x, 0), Err(Error::Dimension(_))));
        let zero = ComplexSignal::zeros(2).unwrap();
        assert!(gen_gaussian_ensemble(2, 5, &zero, 0).is_err());
    }

    #[test]
    fn dct_rows_are_orthonormal() {
        for n in [1, 2, 5, 16] {
            let d = dct2_matrix(n);
            for a in 0..n {
                for b in 0..n {
                    let dot: f64 = d[a].iter().zip(&d[b]).map(|(p, q)| p * q).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12, "n={n} ({a},{b}) dot={dot}");
                }
            }
        }
    }

    #[test]
    fn identity_mask_measures_dct_column() {
        let n = 4;
        let x = ComplexSignal::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let ens = masked_dct_with_masks(n, &[vec![1.0; n]], &x, 0).unwrap();
        let d = dct2_matrix(n);
        for t in 0..n {
            assert!((ens.magnitudes()[t] - d[t][0].abs()).abs() < 1e-15);
        }
        assert!(ens.rows().iter().all(|c| c.im == 0.0));
        assert_eq!(ens.m(), n);
    }

    #[test]
    fn masked_dct_rejects_complex_signal() {
        let x = ComplexSignal::from_vec(vec![c(1.0, 0.1), c(0.0, 0.0)]).unwrap();
        assert!(matches!(gen_masked_dct_ensemble(2, 3, &x, 0), Err(Error::ModelMismatch(_))));
    }

    #[test]
    fn masked_dct_row_count() {
        let x = ComplexSignal::from_real(&[1.0, -2.0, 0.5]).unwrap();
        let ens = gen_masked_dct_ensemble(3, 7, &x, 11).unwrap();
        assert_eq!(ens.m(), 21);
        assert_eq!(ens.num_masks(), Some(7));
    }

    #[test]
    fn constant_magnitudes_norm_estimate() {
        let rows = vec![c(1.0, 0.0); 4];
        let ens = MeasurementEnsemble::from_parts(
            MeasurementModel::GaussianComplex,
            1,
            rows,
            vec![2.0; 4],
            0,
            None,
        )
        .unwrap();
        assert_eq!(estimate_norm_and_radius(&ens), (2.0, 6.0));
        let zero = MeasurementEnsemble::from_parts(
            MeasurementModel::GaussianComplex,
            1,
            vec![c(1.0, 0.0)],
            vec![0.0],
            0,
            None,
        )
        .unwrap();
        assert_eq!(estimate_norm_and_radius(&zero), (0.0, 0.0));
    }

    #[test]
    fn sample_count_uses_natural_log() {
        assert_eq!(sample_count(5.0, 100, None), 2303);
        assert_eq!(sample_count(5.0, 64, None), 1331);
        assert_eq!(sample_count(5.0, 100, Some(10.0)), 1000);
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("gaussian".parse::<MeasurementModel>().unwrap(), MeasurementModel::GaussianComplex);
        assert_eq!("masked-dct".parse::<MeasurementModel>().unwrap(), MeasurementModel::MaskedDctReal);
        assert!("fourier".parse::<MeasurementModel>().is_err());
    }
}
