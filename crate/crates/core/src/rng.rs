//! Seeded, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha20 generator keyed
//! by the user seed. A generator is addressed by a `(domain, index)` pair which
//! is packed into the 64-bit ChaCha stream id as `(domain << 48) | index`:
//!
//! | domain            | index                         |
//! |-------------------|-------------------------------|
//! | `MeasurementRow`  | row `k` of an ensemble        |
//! | `Mask`            | mask `j` of a masked-DCT model |
//! | `Signal`          | signal number                 |
//! | `Init`            | solver trial number           |
//! | `Sample`          | sample point number           |
//! | `Instance`        | benchmark instance number     |
//! | `Derive`          | child seed number             |
//!
//! Since each row, trial, or sample owns its own stream, generated data does
//! not depend on evaluation order or on the number of worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    MeasurementRow = 1,
    Mask = 2,
    Signal = 3,
    Init = 4,
    Sample = 5,
    Instance = 6,
    Derive = 7,
}

const INDEX_BITS: u32 = 48;

/// Generator for `(domain, index)` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha20Rng {
    assert!(index < (1u64 << INDEX_BITS), "stream index out of range");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | index);
    rng
}

/// Child seed for sub-experiments (one per sweep ratio, say).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream(seed, Domain::Derive, index).gen()
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `(X + iY)/sqrt(2)` with `X, Y` independent standard normals.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re = standard_normal(rng);
    let im = standard_normal(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
