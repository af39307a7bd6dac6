//! Dense complex state over a feasible solution space.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{Solution, SolutionSpace};

/// Largest state the simulator will allocate.
pub const STATE_CEILING: usize = 1 << 27;

/// Optimisation direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// `+1` for maximisation, `-1` for minimisation.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    space: SolutionSpace,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|s> = N^{-1/2} sum_x |x>`.
    pub fn equal_superposition(space: SolutionSpace) -> Result<Self> {
        check_ceiling(&space)?;
        let a = T::one() / T::of(space.len() as f64).sqrt();
        Ok(StateVector {
            space,
            amplitudes: vec![Complex::new(a, T::zero()); space.len()],
        })
    }

    /// Computational basis state at `index`.
    pub fn basis(space: SolutionSpace, index: usize) -> Result<Self> {
        check_ceiling(&space)?;
        if index >= space.len() {
            return Err(Error::IndexOutOfRange {
                index,
                size: space.len(),
            });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); space.len()];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { space, amplitudes })
    }

    pub fn from_amplitudes(space: SolutionSpace, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                actual: amplitudes.len(),
            });
        }
        Ok(StateVector { space, amplitudes })
    }

    pub fn space(&self) -> &SolutionSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(Complex::norm_sqr).sum()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > T::zero() {
            let inv = T::one() / norm;
            for a in &mut self.amplitudes {
                *a = a.scale(inv);
            }
        }
    }

    /// Multiplies every amplitude by `e^{i theta}`.
    pub fn apply_global_phase(&mut self, theta: T) {
        let phase = Complex::new(theta.cos(), theta.sin());
        for a in &mut self.amplitudes {
            *a *= phase;
        }
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(Complex::norm_sqr).collect()
    }

    pub fn probability_at(&self, index: usize) -> T {
        self.amplitudes[index].norm_sqr()
    }

    pub fn probability_of(&self, x: &[usize]) -> Result<T> {
        Ok(self.probability_at(self.space.index_of(x)?))
    }

    /// `sum_i |a_i|^2 f_i` for a precomputed objective table.
    pub fn expectation(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(values)
            .map(|(a, &f)| a.norm_sqr() * f)
            .sum()
    }

    /// Expectation of an arbitrary evaluator, decoding every solution.
    pub fn expectation_with<F>(&self, mut f: F) -> T
    where
        F: FnMut(&Solution) -> T,
    {
        self.amplitudes
            .iter()
            .zip(self.space.iter())
            .map(|(a, x)| a.norm_sqr() * f(&x))
            .sum()
    }

    /// Exact CVaR of the measurement distribution: the mean of `values` over
    /// the best `alpha` fraction of probability mass.
    pub fn cvar(&self, values: &[T], alpha: f64, sense: Sense) -> Result<T> {
        let probs: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr().f64()).collect();
        let vals: Vec<f64> = values.iter().map(|v| v.f64()).collect();
        cvar_weighted(&vals, &probs, alpha, sense).map(T::of)
    }

    /// Cumulative distribution used by [`sample`](Self::sample).
    pub fn sampler(&self) -> Sampler {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = self
            .amplitudes
            .iter()
            .map(|a| {
                acc += a.norm_sqr().f64();
                acc
            })
            .collect();
        Sampler { cumulative }
    }

    /// `shots` i.i.d. measurement outcomes as indices.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let sampler = self.sampler();
        let mut rng = crate::rng(seed);
        (0..shots).map(|_| sampler.draw(&mut rng)).collect()
    }

    /// Measurement outcomes decoded into solutions.
    pub fn sample_solutions(&self, shots: usize, seed: u64) -> Vec<Solution> {
        self.sample(shots, seed)
            .into_iter()
            .map(|i| self.space.solution_of(i).expect("sampled index in range"))
            .collect()
    }
}

fn check_ceiling(space: &SolutionSpace) -> Result<()> {
    if space.len() > STATE_CEILING {
        return Err(Error::TooLarge {
            what: "state vector",
            size: space.len() as u128,
            ceiling: STATE_CEILING as u128,
        });
    }
    Ok(())
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // guard against landing on a trailing zero-probability entry
        i.min(self.cumulative.len() - 1)
    }
}

/// CVaR of a discrete distribution given as (value, weight) pairs.
pub fn cvar_weighted(values: &[f64], weights: &[f64], alpha: f64, sense: Sense) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("CVaR alpha {alpha} not in (0, 1]")));
    }
    let total: f64 = weights.iter().sum();
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        match sense {
            Sense::Maximize => ord.reverse(),
            Sense::Minimize => ord,
        }
    });
    let budget = alpha * total;
    let mut taken = 0.0;
    let mut acc = 0.0;
    for i in order {
        let w = weights[i].min(budget - taken);
        if w <= 0.0 {
            break;
        }
        acc += w * values[i];
        taken += w;
    }
    Ok(acc / taken)
}

/// CVaR estimated from measured objective values (equal weight per shot).
pub fn cvar_from_samples(values: &[f64], alpha: f64, sense: Sense) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let weights = vec![1.0; values.len()];
    cvar_weighted(values, &weights, alpha, sense)
}
