//! Generalized phase retrieval from magnitude-only measurements.
//!
//! The crate covers the full pipeline for the least-squares objective
//! `f(z) = (1/2m) Σ (y_k² − |a_k^* z|²)²`: measurement simulation, Wirtinger
//! derivatives, landscape certification, an exact trust-region subproblem
//! solver, the tangent-constrained trust-region method, a gradient-descent
//! baseline, and a reproducible experiment harness.

pub mod eigen;
pub mod error;
pub mod harness;
pub mod io;
pub mod landscape;
pub mod measurement;
pub mod objective;
pub mod rng;
pub mod signal;
pub mod solver;
pub mod trs;

pub use error::{Error, Result};
pub use measurement::{
    estimate_norm_and_radius, gen_gaussian_ensemble, gen_masked_dct_ensemble, MeasurementEnsemble,
    MeasurementModel,
};
pub use signal::{align_phase, random_ball_init, relative_error, ComplexSignal, PhaseAlignment};
