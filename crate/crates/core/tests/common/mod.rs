#![allow(dead_code)]

use num_complex::Complex64;
use qwoa::{SolutionSpace, State};
use rand::Rng;

pub fn random_state(space: SolutionSpace, seed: u64) -> State {
    let mut rng = qwoa::rng(seed);
    let amps = (0..space.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut s = State::from_amplitudes(space, amps).unwrap();
    s.normalize();
    s
}

/// Max-norm distance between `a` and `b` after removing the best global phase.
pub fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter().zip(b).map(|(x, y)| (x - y * phase).norm()).fold(0.0, f64::max)
}

pub fn max_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let r = theta.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}
