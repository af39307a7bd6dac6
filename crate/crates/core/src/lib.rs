//! Classical simulation of non-variational quantum walk optimisation.
//!
//! An amplified state is prepared by alternating a phase-separation unitary,
//! which rotates each solution by an angle proportional to its objective
//! value, with a continuous-time quantum walk over a problem-specific mixing
//! graph. The walk time and phase schedules are fixed by three parameters
//! `(gamma, t, beta)`, which the [`tuner`] can refine locally.
//!
//! Amplitudes are generic over [`Real`] (`f32` or `f64`); the aliases below
//! pick the double-precision instantiation used by the CLI and diagnostics.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod mixers;
pub mod problems;
pub mod scalar;
pub mod space;
pub mod state;
pub mod tuner;

use rand::SeedableRng;

pub use error::{Error, Result};
pub use scalar::Real;
pub use space::{Solution, SolutionSpace, SpaceKind};
pub use state::{Sense, StateVector};

/// Double-precision state vector.
pub type State = StateVector<f64>;
/// Single-precision state vector.
pub type State32 = StateVector<f32>;
/// Double-precision amplitude.
pub type Amplitude = num_complex::Complex<f64>;

/// Seeded generator used for all randomness in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
