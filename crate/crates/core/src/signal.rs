//! Complex signals and alignment to the target circle `{x e^{iφ}}`.

use std::f64::consts::TAU;
use std::ops::Deref;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_dims, Error, Result};
use crate::rng::{self, Domain};

/// A length-`n` complex vector with finite entries, `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal(DVector<Complex64>);

impl ComplexSignal {
    pub fn new(entries: DVector<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("signal must have n >= 1".into()));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("signal has non-finite entries".into()));
        }
        Ok(ComplexSignal(entries))
    }

    pub fn from_vec(entries: Vec<Complex64>) -> Result<Self> {
        Self::new(DVector::from_vec(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::from_vec(entries.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DVector::zeros(n))
    }

    /// Standard complex Gaussian signal drawn from the `Signal` stream `index`.
    pub fn gaussian(n: usize, seed: u64, index: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, Domain::Signal, index);
        Self::new(DVector::from_fn(n, |_, _| rng::complex_normal(&mut rng)))
    }

    /// Gaussian signal rescaled to unit norm.
    pub fn gaussian_unit(n: usize, seed: u64, index: u64) -> Result<Self> {
        let s = Self::gaussian(n, seed, index)?;
        let norm = s.norm();
        Ok(s.scaled(1.0 / norm))
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<Complex64> {
        self.0
    }

    /// `self^* other`.
    pub fn inner(&self, other: &ComplexSignal) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: f64) -> ComplexSignal {
        ComplexSignal(self.0.map(|c| c * s))
    }

    pub fn rotated(&self, phi: f64) -> ComplexSignal {
        let w = Complex64::from_polar(1.0, phi);
        ComplexSignal(self.0.map(|c| c * w))
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|c| c.im == 0.0)
    }

    /// Canonical identification `C^n -> R^{2n}`: `[Re z; Im z]`.
    pub fn to_real(&self) -> DVector<f64> {
        realify(&self.0)
    }
}

impl Deref for ComplexSignal {
    type Target = DVector<Complex64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl From<ComplexSignal> for DVector<Complex64> {
    fn from(s: ComplexSignal) -> Self {
        s.0
    }
}

pub fn realify(v: &DVector<Complex64>) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

pub fn complexify(v: &DVector<f64>) -> DVector<Complex64> {
    let n = v.len() / 2;
    DVector::from_fn(n, |i, _| Complex64::new(v[i], v[i + n]))
}

/// Closest point of the target circle to `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAlignment {
    /// Minimizing phase in `[0, 2π)`.
    pub phi: f64,
    /// Residual `z - x e^{iφ}`.
    pub h: ComplexSignal,
    /// `dist(z, X) = ‖h‖`.
    pub dist: f64,
}

/// `φ(z) = arg(x^* z)`; zero when `x^* z = 0`, where every phase is optimal.
pub fn align_phase(z: &ComplexSignal, x: &ComplexSignal) -> Result<PhaseAlignment> {
    check_dims("align_phase", x.len(), z.len())?;
    if x.norm_sq() == 0.0 {
        return Err(Error::InvalidArgument("target signal must be nonzero".into()));
    }
    let c = x.inner(z);
    let phi = if c == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        c.arg().rem_euclid(TAU)
    };
    // rem_euclid can round up to exactly TAU
    let phi = if phi >= TAU { 0.0 } else { phi };
    let target = x.rotated(phi);
    let h = ComplexSignal(&z.0 - &target.0);
    let dist = h.norm();
    Ok(PhaseAlignment { phi, h, dist })
}

/// Relative recovery error `dist(z, X) / ‖x‖`.
pub fn relative_error(z: &ComplexSignal, x: &ComplexSignal) -> Result<f64> {
    Ok(align_phase(z, x)?.dist / x.norm())
}

/// Uniform draw from the complex ball of radius `r0`, i.e. the real
/// `2n`-dimensional ball under the canonical identification.
pub fn random_ball_init(n: usize, r0: f64, seed: u64) -> Result<ComplexSignal> {
    random_ball_init_indexed(n, r0, seed, 0)
}

/// As [`random_ball_init`], drawing from `Init` stream `index` (one per trial).
pub fn random_ball_init_indexed(n: usize, r0: f64, seed: u64, index: u64) -> Result<ComplexSignal> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r0}")));
    }
    if n == 0 {
        return Err(Error::Dimension("signal must have n >= 1".into()));
    }
    let mut rng = rng::stream(seed, Domain::Init, index);
    Ok(uniform_ball(&mut rng, n, r0))
}

pub(crate) fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> ComplexSignal {
    let dir = random_unit(rng, n);
    let u: f64 = rng.gen();
    let r = radius * u.powf(1.0 / (2 * n) as f64);
    dir.scaled(r)
}

/// Uniform unit vector in `C^n`.
pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexSignal {
    loop {
        let v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng::standard_normal(rng), rng::standard_normal(rng))
        });
        let norm = v.norm();
        if norm > 1e-300 {
            return ComplexSignal(v / Complex64::new(norm, 0.0));
        }
    }
}
