//! Phase separation, schedules, amplified-state preparation and the
//! measurement loop.
//!
//! The amplified state is
//!
//! ```text
//! |gamma, t, beta> = prod_{i=0}^{p-1} U_M(t_i) U_Q(±gamma_i / sigma) |s>
//! ```
//!
//! with the `i = 0` factor applied first, `U_Q(a) = e^{-i a f}`, and the sign
//! `+` for maximisation. Phase angles grow linearly over `[beta gamma, gamma]`
//! while walk times shrink linearly over `[beta t, t]`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixers::{Mixer, MixerSpec, PhaseConvention, DEFAULT_TOLERANCE};
use crate::problems::{self, Optimum, ProblemInstance};
use crate::scalar::{cis_neg, Real};
use crate::space::{Solution, SolutionSpace};
use crate::state::{Sense, StateVector};

pub const MANIFEST_FORMAT: &str = "qwoa-run";
pub const MANIFEST_VERSION: u32 = 1;

/// Per-iteration phase angles and walk times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub gammas: Vec<f64>,
    pub times: Vec<f64>,
}

/// `gamma_i` rises linearly from `beta gamma` to `gamma` and `t_i` falls
/// linearly from `t` to `beta t`; `p = 1` gives `(gamma, t)`.
pub fn schedule(p: usize, gamma: f64, t: f64, beta: f64) -> Result<Schedule> {
    AmplifyParams { p, gamma, t, beta }.validate()?;
    if p == 1 {
        return Ok(Schedule {
            gammas: vec![gamma],
            times: vec![t],
        });
    }
    let last = (p - 1) as f64;
    let (g0, t1) = (beta * gamma, beta * t);
    let mut gammas: Vec<f64> = (0..p).map(|i| g0 + (gamma - g0) * i as f64 / last).collect();
    let mut times: Vec<f64> = (0..p).map(|i| t - (t - t1) * i as f64 / last).collect();
    // pin the endpoints against rounding
    gammas[0] = g0;
    gammas[p - 1] = gamma;
    times[0] = t;
    times[p - 1] = t1;
    Ok(Schedule { gammas, times })
}

/// The three schedule parameters plus the iteration count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifyParams {
    pub p: usize,
    pub gamma: f64,
    pub t: f64,
    pub beta: f64,
}

impl AmplifyParams {
    pub fn new(p: usize, gamma: f64, t: f64, beta: f64) -> Self {
        AmplifyParams { p, gamma, t, beta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta {} not in (0, 1)", self.beta)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) || !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma {} and t {} must be finite and non-negative",
                self.gamma, self.t
            )));
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        schedule(self.p, self.gamma, self.t, self.beta)
    }
}

/// `a_x <- e^{-i (± angle) f(x)} a_x`, `+` for maximisation.
pub fn apply_phase_separation<T: Real>(state: &mut StateVector<T>, values: &[T], angle: T, sense: Sense) {
    debug_assert_eq!(values.len(), state.amplitudes().len());
    let signed = angle * T::of(sense.sign());
    if signed == T::zero() {
        return;
    }
    for (a, &f) in state.amplitudes_mut().iter_mut().zip(values) {
        *a *= cis_neg(signed * f);
    }
}

/// Probabilities of tracked solutions and the expectation after each iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub tracked: Vec<usize>,
    /// Phase angle used in each row; row 0 is the initial state.
    pub gammas: Vec<f64>,
    pub times: Vec<f64>,
    /// `probabilities[row][j]` for `tracked[j]`.
    pub probabilities: Vec<Vec<f64>>,
    pub expectation: Vec<f64>,
    pub norm_drift: Vec<f64>,
}

impl IterationTrace {
    pub fn rows(&self) -> usize {
        self.probabilities.len()
    }

    pub fn tracked_total(&self, row: usize) -> f64 {
        self.probabilities[row].iter().sum()
    }

    fn record<T: Real>(&mut self, state: &StateVector<T>, eval: &[T], gamma: f64, t: f64) {
        self.gammas.push(gamma);
        self.times.push(t);
        self.probabilities
            .push(self.tracked.iter().map(|&i| state.probability_at(i).f64()).collect());
        self.expectation.push(state.expectation(eval).f64());
        self.norm_drift.push((state.norm_sqr().f64() - 1.0).abs());
    }
}

/// Amplified-state preparation over one solution space.
#[derive(Debug, Clone)]
pub struct Qwoa {
    mixer: Mixer,
    sense: Sense,
}

impl Qwoa {
    pub fn new(spec: MixerSpec, sense: Sense) -> Result<Self> {
        Ok(Qwoa {
            mixer: Mixer::new(spec)?,
            sense,
        })
    }

    pub fn space(&self) -> &SolutionSpace {
        &self.mixer.spec().space
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn mixer(&self) -> &Mixer {
        &self.mixer
    }

    /// Prepares the amplified state for the phase objective `phase_values`
    /// normalised by `sigma`, tracing `tracked` and the expectation of `eval`.
    pub fn prepare<T: Real>(
        &self,
        phase_values: &[T],
        eval_values: &[T],
        sigma: f64,
        params: &AmplifyParams,
        tracked: &[usize],
    ) -> Result<(StateVector<T>, IterationTrace)> {
        let space = *self.space();
        for table in [phase_values, eval_values] {
            if table.len() != space.len() {
                return Err(Error::LengthMismatch {
                    expected: space.len(),
                    actual: table.len(),
                });
            }
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let sched = params.schedule()?;
        let mut state = StateVector::equal_superposition(space)?;
        let mut trace = IterationTrace {
            tracked: tracked.to_vec(),
            gammas: Vec::with_capacity(params.p + 1),
            times: Vec::with_capacity(params.p + 1),
            probabilities: Vec::with_capacity(params.p + 1),
            expectation: Vec::with_capacity(params.p + 1),
            norm_drift: Vec::with_capacity(params.p + 1),
        };
        trace.record(&state, eval_values, 0.0, 0.0);
        for (&gamma, &t) in sched.gammas.iter().zip(&sched.times) {
            apply_phase_separation(&mut state, phase_values, T::of(gamma / sigma), self.sense);
            self.mixer.apply(&mut state, T::of(t))?;
            trace.record(&state, eval_values, gamma, t);
        }
        Ok((state, trace))
    }
}

/// Which objective `solve` ranks measured solutions by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    /// Penalties switched off.
    Raw,
    /// Fixed penalties `lambda_F`.
    Fixed,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    #[serde(flatten)]
    pub amplify: AmplifyParams,
    /// Phase normalisation; exact standard deviation of the phase objective when absent.
    pub sigma: Option<f64>,
    /// Tunable penalties for the phase objective; `lambda_F` when absent.
    pub lambda_t: Option<Vec<f64>>,
    pub shots: usize,
    pub seed: u64,
    pub mixer_tolerance: f64,
    pub convention: PhaseConvention,
    pub selector: Selector,
}

impl RunParams {
    pub fn new(amplify: AmplifyParams) -> Self {
        RunParams {
            amplify,
            sigma: None,
            lambda_t: None,
            shots: 0,
            seed: 0,
            mixer_tolerance: DEFAULT_TOLERANCE,
            convention: PhaseConvention::PhaseFree,
            selector: Selector::Fixed,
        }
    }

    pub fn with_shots(mut self, shots: usize, seed: u64) -> Self {
        self.shots = shots;
        self.seed = seed;
        self
    }
}

/// An instance with its objective tables and optimum cached for repeated runs.
#[derive(Debug, Clone)]
pub struct Landscape {
    pub instance: ProblemInstance,
    /// `f_{lambda_F}` for every solution.
    pub eval_values: Vec<f64>,
    /// Optimum of `f_{lambda_F}`.
    pub optimum: Optimum,
    /// Raw objective, when it differs from `eval_values`.
    raw_values: Option<Vec<f64>>,
}

impl Landscape {
    pub fn new(instance: ProblemInstance) -> Result<Self> {
        let eval_values = instance.objective_table(&instance.lambda_f)?;
        let optimum = Optimum::of_table(&eval_values, instance.sense());
        let raw_values = if instance.has_penalties() && instance.lambda_f != instance.raw_lambda() {
            Some(instance.objective_table(&instance.raw_lambda())?)
        } else {
            None
        };
        Ok(Landscape {
            instance,
            eval_values,
            optimum,
            raw_values,
        })
    }

    pub fn space(&self) -> &SolutionSpace {
        &self.instance.space
    }

    pub fn sense(&self) -> Sense {
        self.instance.sense()
    }

    pub fn values(&self, selector: Selector) -> &[f64] {
        match selector {
            Selector::Fixed => &self.eval_values,
            Selector::Raw => self.raw_values.as_deref().unwrap_or(&self.eval_values),
        }
    }

    /// Phase objective under `lambda_t` (or `lambda_F`).
    pub fn phase_values(&self, lambda_t: Option<&[f64]>) -> Result<Vec<f64>> {
        match lambda_t {
            None => Ok(self.eval_values.clone()),
            Some(l) if l == self.instance.lambda_f.as_slice() => Ok(self.eval_values.clone()),
            Some(l) => {
                if l.len() != self.instance.family.penalty_len() {
                    return Err(Error::InvalidParameter(format!(
                        "expected {} penalty coefficients, got {}",
                        self.instance.family.penalty_len(),
                        l.len()
                    )));
                }
                problems::check_lambda(l)?;
                self.instance.objective_table(l)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        problems::mean(&self.eval_values)
    }

    /// Population standard deviation of `f_{lambda_F}`.
    pub fn sigma(&self) -> f64 {
        problems::population_std(&self.eval_values)
    }
}

/// Normalisation for a phase table; a constant objective only contributes a
/// global phase, so any positive value is equivalent and `1` is used.
pub fn phase_sigma(phase_values: &[f64]) -> f64 {
    let s = problems::population_std(phase_values);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Prepares the amplified state for `params` with the optimum set tracked.
pub fn prepare_amplified_state(landscape: &Landscape, params: &RunParams) -> Result<(StateVector<f64>, IterationTrace, f64)> {
    let phase_values = landscape.phase_values(params.lambda_t.as_deref())?;
    let sigma = params.sigma.unwrap_or_else(|| phase_sigma(&phase_values));
    let spec = MixerSpec::new(*landscape.space())
        .with_tolerance(params.mixer_tolerance)
        .with_convention(params.convention);
    let qwoa = Qwoa::new(spec, landscape.sense())?;
    let (state, trace) = qwoa.prepare(
        &phase_values,
        &landscape.eval_values,
        sigma,
        &params.amplify,
        &landscape.optimum.indices,
    )?;
    Ok((state, trace, sigma))
}

/// Best solution seen while measuring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestMeasured {
    pub index: usize,
    pub solution: Solution,
    pub value: f64,
    /// Shot at which it was first seen.
    pub shot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub best: Option<BestMeasured>,
    pub samples: Vec<usize>,
    /// State preparations consumed, one per shot.
    pub preparations: usize,
}

/// Measures `state` `shots` times and keeps the best solution under `values`.
pub fn measure_best<T: Real>(state: &StateVector<T>, values: &[f64], sense: Sense, shots: usize, seed: u64) -> SolveOutcome {
    let samples = state.sample(shots, seed);
    let mut best: Option<(usize, usize)> = None;
    for (shot, &i) in samples.iter().enumerate() {
        match best {
            Some((b, _)) if !sense.better(values[i], values[b]) => {}
            _ => best = Some((i, shot)),
        }
    }
    let best = best.map(|(index, shot)| BestMeasured {
        index,
        solution: state.space().solution_of(index).expect("sampled index in range"),
        value: values[index],
        shot,
    });
    SolveOutcome {
        best,
        samples,
        preparations: shots,
    }
}

/// Prepares the amplified state once and spends the shot budget measuring it.
pub fn solve(landscape: &Landscape, params: &RunParams) -> Result<(SolveOutcome, StateVector<f64>, IterationTrace, f64)> {
    let (state, trace, sigma) = prepare_amplified_state(landscape, params)?;
    let outcome = measure_best(&state, landscape.values(params.selector), landscape.sense(), params.shots, params.seed);
    Ok((outcome, state, trace, sigma))
}

/// Serialised record of a run, sufficient to rerun it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format: String,
    pub version: u32,
    pub instance_digest: String,
    /// Digest of the instance digest together with the run parameters.
    pub config_digest: String,
    pub params: RunParams,
    pub sigma: f64,
    pub optimum: Optimum,
    pub trace: IterationTrace,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<usize>>,
    pub best: Option<BestMeasured>,
}

impl RunManifest {
    pub fn new(
        landscape: &Landscape,
        params: &RunParams,
        sigma: f64,
        trace: IterationTrace,
        outcome: &SolveOutcome,
    ) -> Self {
        let instance_digest = landscape.instance.digest();
        RunManifest {
            format: MANIFEST_FORMAT.to_string(),
            version: MANIFEST_VERSION,
            config_digest: config_digest("run", &instance_digest, params),
            instance_digest,
            params: params.clone(),
            sigma,
            optimum: landscape.optimum.clone(),
            trace,
            samples: (params.shots > 0).then(|| outcome.samples.clone()),
            best: outcome.best.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    pub fn digest(&self) -> String {
        problems::digest_hex(self.to_json().as_bytes())
    }
}

/// Digest identifying one command applied to one instance with `config`.
pub fn config_digest<C: Serialize>(command: &str, instance_digest: &str, config: &C) -> String {
    let body = serde_json::to_string(config).expect("config serialises");
    problems::digest_hex(format!("{command}\n{instance_digest}\n{body}").as_bytes())
}

/// Checks `|<psi|psi> - 1|` against `tol`.
pub fn check_normalised<T: Real>(state: &StateVector<T>, tol: f64) -> Result<()> {
    let drift = (state.norm_sqr().f64() - 1.0).abs();
    if drift > tol {
        return Err(Error::InvalidParameter(format!("norm drift {drift:e} exceeds {tol:e}")));
    }
    Ok(())
}

/// `e^{i theta} * a` for every amplitude; used to compare states up to phase.
pub fn phase_aligned<T: Real>(reference: &[Complex<T>], other: &[Complex<T>]) -> Vec<Complex<T>> {
    let overlap: Complex<T> = reference.iter().zip(other).map(|(a, b)| a * b.conj()).sum();
    let norm = overlap.norm();
    if norm == T::zero() {
        return other.to_vec();
    }
    let phase = overlap.unscale(norm);
    other.iter().map(|b| b * phase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_instance, Family, SizeParams};

    #[test]
    fn two_point_schedule() {
        let s = schedule(2, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(s.gammas, vec![0.5, 1.0]);
        assert_eq!(s.times, vec![1.0, 0.5]);
        let s = schedule(1, 2.0, 0.3, 0.4).unwrap();
        assert_eq!((s.gammas, s.times), (vec![2.0], vec![0.3]));
    }

    #[test]
    fn near_unit_beta_is_constant() {
        let s = schedule(6, 1.7, 0.4, 1.0 - 1e-15).unwrap();
        assert!(s.gammas.iter().all(|&g| (g - 1.7).abs() < 1e-12));
        assert!(s.times.iter().all(|&t| (t - 0.4).abs() < 1e-12));
    }

    #[test]
    fn schedule_rejects_bad_params() {
        assert!(schedule(0, 1.0, 1.0, 0.5).is_err());
        assert!(schedule(3, 1.0, 1.0, 1.0).is_err());
        assert!(schedule(3, 1.0, 1.0, 0.0).is_err());
        assert!(schedule(3, -1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn maxcut_reference_schedule_endpoints() {
        let s = schedule(10, 2.4340, 0.4517, 0.2844).unwrap();
        assert!((s.gammas[0] - 0.6922).abs() < 5e-5);
        assert!((s.times[9] - 0.1285).abs() < 5e-5);
        assert_eq!(s.gammas[0], 0.2844 * 2.4340);
        assert_eq!(s.times[9], 0.2844 * 0.4517);
    }

    #[test]
    fn phase_separation_examples() {
        let space = SolutionSpace::binary(1).unwrap();
        let mut s = StateVector::<f64>::equal_superposition(space).unwrap();
        let before = s.clone();
        apply_phase_separation(&mut s, &[1.0, 4.0], 0.0, Sense::Maximize);
        assert_eq!(s, before);

        // constant objective: probabilities unchanged
        apply_phase_separation(&mut s, &[2.0, 2.0], 0.7, Sense::Minimize);
        assert!(s.probabilities().iter().all(|&p| (p - 0.5).abs() < 1e-15));

        // relative phase pi between the two basis states
        let mut s = before.clone();
        let (fa, fb) = (1.0, 4.0);
        apply_phase_separation(&mut s, &[fa, fb], std::f64::consts::PI / (fb - fa), Sense::Maximize);
        let rel = s.amplitudes()[1] / s.amplitudes()[0];
        assert!((rel - Complex::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_gamma_leaves_state_uniform() {
        let inst = generate_instance(Family::Qap, SizeParams::new(5, 5), 3).unwrap();
        let land = Landscape::new(inst).unwrap();
        let params = RunParams::new(AmplifyParams::new(4, 0.0, 0.8, 0.5));
        let (state, trace, _) = prepare_amplified_state(&land, &params).unwrap();
        let uniform = 1.0 / land.space().len() as f64;
        assert!(state.probabilities().iter().all(|&p| (p - uniform).abs() < 1e-10));
        assert_eq!(trace.rows(), 5);
    }

    #[test]
    fn trace_starts_uniform_and_ends_at_state() {
        let inst = generate_instance(Family::Maxcut, SizeParams::new(8, 2), 5).unwrap();
        let land = Landscape::new(inst).unwrap();
        let params = RunParams::new(AmplifyParams::new(5, 1.0, 0.3, 0.2));
        let (state, trace, _) = prepare_amplified_state(&land, &params).unwrap();
        let n = land.space().len() as f64;
        assert!(trace.probabilities[0].iter().all(|&p| (p - 1.0 / n).abs() < 1e-15));
        for (j, &i) in trace.tracked.iter().enumerate() {
            assert_eq!(trace.probabilities[5][j], state.probability_at(i));
        }
        assert!(trace.norm_drift.iter().all(|&d| d < 1e-10));
    }

    #[test]
    fn maximize_equals_minimize_negated() {
        let space = SolutionSpace::binary(6).unwrap();
        let values: Vec<f64> = (0..64).map(|i| ((i * 37) % 11) as f64).collect();
        let negated: Vec<f64> = values.iter().map(|v| -v).collect();
        let params = AmplifyParams::new(4, 1.3, 0.4, 0.3);
        let max = Qwoa::new(MixerSpec::new(space), Sense::Maximize).unwrap();
        let min = Qwoa::new(MixerSpec::new(space), Sense::Minimize).unwrap();
        let (a, _) = max.prepare(&values, &values, 2.0, &params, &[]).unwrap();
        let (b, _) = min.prepare(&negated, &negated, 2.0, &params, &[]).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn measure_best_point_mass() {
        let space = SolutionSpace::binary(3).unwrap();
        let state = StateVector::<f64>::basis(space, 6).unwrap();
        let values: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let out = measure_best(&state, &values, Sense::Minimize, 1, 0);
        let best = out.best.unwrap();
        assert_eq!((best.index, best.value, out.preparations), (6, 6.0, 1));
        let none = measure_best(&state, &values, Sense::Minimize, 0, 0);
        assert!(none.best.is_none());
    }
}
