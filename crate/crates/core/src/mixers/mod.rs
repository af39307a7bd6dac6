//! Continuous-time quantum walk mixers `U_M(t) = e^{-itA}`.
//!
//! The hypercube and Hamming mixers factor into commuting per-variable
//! rotations and are applied exactly in `O(N n)`. The transposition graph has
//! non-commuting terms, so its walk is applied with a Chebyshev expansion of
//! the exponential on the known spectral interval `[-d, d]`.

mod hamming;
mod hypercube;
mod oracle;
mod transposition;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{SolutionSpace, SpaceKind};
use crate::state::StateVector;

pub use hamming::apply_hamming_mixer;
pub use hypercube::apply_hypercube_mixer;
pub use oracle::{dense_adjacency, dense_mixer_oracle, ORACLE_CEILING};
pub use transposition::{apply_transposition_mixer, bessel_j_sequence, chebyshev_degree, TranspositionGraph};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// How a mixer treats the global phase of `e^{-itA}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// A known global phase is dropped (Hamming: `e^{-int} e^{-itA}`).
    PhaseFree,
    /// Exactly `e^{-itA}`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixerSpec {
    pub space: SolutionSpace,
    /// Target 2-norm error for the transposition mixer.
    pub tolerance: f64,
    /// Requested convention; only the Hamming mixer distinguishes the two.
    pub convention: PhaseConvention,
}

impl MixerSpec {
    pub fn new(space: SolutionSpace) -> Self {
        let convention = match space.kind() {
            SpaceKind::Integer => PhaseConvention::PhaseFree,
            _ => PhaseConvention::Exact,
        };
        MixerSpec {
            space,
            tolerance: DEFAULT_TOLERANCE,
            convention,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_convention(mut self, convention: PhaseConvention) -> Self {
        self.convention = convention;
        self
    }
}

/// A mixer bound to one solution space, reusable across applications.
#[derive(Debug, Clone)]
pub struct Mixer {
    spec: MixerSpec,
    graph: Option<TranspositionGraph>,
}

impl Mixer {
    pub fn new(spec: MixerSpec) -> Result<Self> {
        let graph = match spec.space.kind() {
            SpaceKind::Permutation => {
                if !(spec.tolerance > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "transposition mixer tolerance must be positive, got {}",
                        spec.tolerance
                    )));
                }
                Some(TranspositionGraph::new(spec.space)?)
            }
            _ => None,
        };
        Ok(Mixer { spec, graph })
    }

    pub fn for_space(space: SolutionSpace) -> Result<Self> {
        Self::new(MixerSpec::new(space))
    }

    pub fn spec(&self) -> &MixerSpec {
        &self.spec
    }

    /// Convention actually realised by [`apply`](Self::apply).
    pub fn convention(&self) -> PhaseConvention {
        match self.spec.space.kind() {
            SpaceKind::Integer => self.spec.convention,
            _ => PhaseConvention::Exact,
        }
    }

    pub fn apply<T: Real>(&self, state: &mut StateVector<T>, t: T) -> Result<()> {
        if *state.space() != self.spec.space {
            return Err(Error::InvalidParameter("state and mixer spaces differ".into()));
        }
        match self.spec.space.kind() {
            SpaceKind::Binary => apply_hypercube_mixer(state, t),
            SpaceKind::Integer => {
                apply_hamming_mixer(state, t)?;
                if self.spec.convention == PhaseConvention::Exact {
                    // undo the discarded e^{-int}
                    state.apply_global_phase(T::of(self.spec.space.n() as f64) * t);
                }
                Ok(())
            }
            SpaceKind::Permutation => {
                let graph = self.graph.as_ref().expect("graph built for permutation spaces");
                graph.apply_exp(state, t, self.spec.tolerance)
            }
        }
    }
}

/// `(A v)_u = sum_{w in neighbors(u)} v_w`.
pub fn adjacency_matvec<T: Real>(space: &SolutionSpace, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if v.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            actual: v.len(),
        });
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
    let (mut scratch, mut nbrs) = (Vec::new(), Vec::with_capacity(space.degree()));
    for (u, slot) in out.iter_mut().enumerate() {
        space.neighbor_indices(u, &mut scratch, &mut nbrs);
        *slot = nbrs.iter().map(|&w| v[w]).sum();
    }
    Ok(out)
}

pub(crate) fn expect_kind<T: Real>(state: &StateVector<T>, kind: SpaceKind) -> Result<()> {
    let actual = state.space().kind();
    if actual != kind {
        return Err(Error::WrongSpaceKind {
            expected: kind.name(),
            actual: actual.name(),
        });
    }
    Ok(())
}
