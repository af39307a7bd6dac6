//! Local tuning of `(gamma, t, beta)` and optionally the phase penalties
//! `lambda_T`, scored on the fixed-penalty objective.
//!
//! Searches run in unconstrained coordinates: `ln gamma`, `ln t`,
//! `logit beta` and `|u|` for each penalty, so every iterate is feasible.

use serde::{Deserialize, Serialize};

use crate::engine::{phase_sigma, AmplifyParams, Landscape, Qwoa};
use crate::error::{Error, Result};
use crate::mixers::{MixerSpec, PhaseConvention, DEFAULT_TOLERANCE};
use crate::state::{cvar_from_samples, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Expectation,
    /// Mean over the best `alpha` fraction of outcomes.
    Cvar(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Exact,
    /// Estimate from this many measurements per evaluation.
    Shots(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    NelderMead,
    /// Quasi-Newton with central finite-difference gradients.
    Bfgs,
}

/// A point in parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneParams {
    pub gamma: f64,
    pub t: f64,
    pub beta: f64,
    pub lambda_t: Vec<f64>,
}

impl TuneParams {
    /// `(1, 0.1, 1/p)` with `lambda_T = lambda_F`. A single iteration has
    /// no schedule, so `beta = 1/2` stands in for the excluded `1`.
    pub fn initial(p: usize, lambda_f: &[f64]) -> Self {
        TuneParams {
            gamma: 1.0,
            t: 0.1,
            beta: if p > 1 { 1.0 / p as f64 } else { 0.5 },
            lambda_t: lambda_f.to_vec(),
        }
    }

    pub fn amplify(&self, p: usize) -> AmplifyParams {
        AmplifyParams::new(p, self.gamma, self.t, self.beta)
    }

    fn to_coords(&self, with_lambda: bool) -> Vec<f64> {
        let mut u = vec![self.gamma.ln(), self.t.ln(), (self.beta / (1.0 - self.beta)).ln()];
        if with_lambda {
            u.extend(&self.lambda_t);
        }
        u
    }

    fn from_coords(u: &[f64], fixed_lambda: &[f64]) -> Self {
        let beta = 1.0 / (1.0 + (-u[2]).exp());
        TuneParams {
            gamma: u[0].exp(),
            t: u[1].exp(),
            // keep beta strictly inside (0, 1) after rounding
            beta: beta.clamp(f64::EPSILON, 1.0 - f64::EPSILON),
            lambda_t: if u.len() > 3 {
                u[3..].iter().map(|v| v.abs()).collect()
            } else {
                fixed_lambda.to_vec()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSpec {
    pub objective: Objective,
    /// Defaults to [`TuneParams::initial`].
    pub init: Option<TuneParams>,
    pub mode: EvalMode,
    /// Maximum number of objective evaluations.
    pub budget: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
    /// Also tune `lambda_T` (penalised families only).
    pub tune_lambda: bool,
    /// Relative spread of simplex values (or gradient norm) at convergence.
    pub tolerance: f64,
    pub mixer_tolerance: f64,
    pub convention: PhaseConvention,
}

impl Default for TuneSpec {
    fn default() -> Self {
        TuneSpec {
            objective: Objective::Expectation,
            init: None,
            mode: EvalMode::Exact,
            budget: 400,
            seed: 0,
            optimizer: Optimizer::NelderMead,
            tune_lambda: false,
            tolerance: 1e-6,
            mixer_tolerance: DEFAULT_TOLERANCE,
            convention: PhaseConvention::PhaseFree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub eval: usize,
    pub params: TuneParams,
    pub value: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub p: usize,
    pub spec: TuneSpec,
    pub best: TuneParams,
    pub best_value: f64,
    pub evaluations: usize,
    /// State preparations spent, counting each shot as one.
    pub preparations: usize,
    pub converged: bool,
    pub budget_exhausted: bool,
    pub log: Vec<EvalRecord>,
}

/// Scores parameter points against one instance, reusing the mixer.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    landscape: &'a Landscape,
    qwoa: Qwoa,
    p: usize,
    objective: Objective,
    mode: EvalMode,
}

impl<'a> Evaluator<'a> {
    pub fn new(landscape: &'a Landscape, p: usize, objective: Objective, mode: EvalMode, mixer_tolerance: f64) -> Result<Self> {
        Self::with_convention(landscape, p, objective, mode, mixer_tolerance, PhaseConvention::PhaseFree)
    }

    pub fn with_convention(
        landscape: &'a Landscape,
        p: usize,
        objective: Objective,
        mode: EvalMode,
        mixer_tolerance: f64,
        convention: PhaseConvention,
    ) -> Result<Self> {
        if let Objective::Cvar(alpha) = objective {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParameter(format!("CVaR alpha {alpha} not in (0, 1]")));
            }
        }
        if mode == EvalMode::Shots(0) {
            return Err(Error::InvalidParameter("shot mode needs at least one shot".into()));
        }
        let spec = MixerSpec::new(*landscape.space())
            .with_tolerance(mixer_tolerance)
            .with_convention(convention);
        Ok(Evaluator {
            landscape,
            qwoa: Qwoa::new(spec, landscape.sense())?,
            p,
            objective,
            mode,
        })
    }

    /// Objective value at `params`; `seed` drives shot sampling.
    pub fn evaluate(&self, params: &TuneParams, seed: u64) -> Result<f64> {
        let phase = self.landscape.phase_values(Some(&params.lambda_t))?;
        let sigma = phase_sigma(&phase);
        let eval = &self.landscape.eval_values;
        let (state, _) = self.qwoa.prepare(&phase, eval, sigma, &params.amplify(self.p), &[])?;
        let sense = self.landscape.sense();
        match (self.mode, self.objective) {
            (EvalMode::Exact, Objective::Expectation) => Ok(state.expectation(eval)),
            (EvalMode::Exact, Objective::Cvar(alpha)) => state.cvar(eval, alpha, sense),
            (EvalMode::Shots(shots), objective) => {
                let measured: Vec<f64> = state.sample(shots, seed).into_iter().map(|i| eval[i]).collect();
                match objective {
                    Objective::Expectation => Ok(measured.iter().sum::<f64>() / shots as f64),
                    Objective::Cvar(alpha) => cvar_from_samples(&measured, alpha, sense),
                }
            }
        }
    }
}

/// One-off evaluation of `params`.
pub fn evaluate_params(
    landscape: &Landscape,
    p: usize,
    params: &TuneParams,
    objective: Objective,
    mode: EvalMode,
    seed: u64,
) -> Result<f64> {
    Evaluator::new(landscape, p, objective, mode, DEFAULT_TOLERANCE)?.evaluate(params, seed)
}

/// Budget-limited, logged minimisation of the sense-adjusted objective.
struct Search<'e, 'a> {
    evaluator: &'e Evaluator<'a>,
    sense: Sense,
    fixed_lambda: Vec<f64>,
    /// Starting point, kept exact rather than round-tripped through coordinates.
    origin: (Vec<f64>, TuneParams),
    budget: usize,
    seed: u64,
    shots: usize,
    log: Vec<EvalRecord>,
    best: Option<(TuneParams, f64)>,
}

struct Exhausted;

impl Search<'_, '_> {
    /// Loss to minimise at coordinates `u`.
    fn loss(&mut self, u: &[f64]) -> std::result::Result<Result<f64>, Exhausted> {
        if self.log.len() >= self.budget {
            return Err(Exhausted);
        }
        let params = if u == self.origin.0.as_slice() {
            self.origin.1.clone()
        } else {
            TuneParams::from_coords(u, &self.fixed_lambda)
        };
        let eval = self.log.len();
        let value = match self.evaluator.evaluate(&params, self.seed.wrapping_add(eval as u64)) {
            Ok(v) => v,
            Err(e) => return Ok(Err(e)),
        };
        let improved = match &self.best {
            Some((_, b)) => self.sense.better(value, *b),
            None => true,
        };
        if improved {
            self.best = Some((params.clone(), value));
        }
        let best_so_far = self.best.as_ref().map(|b| b.1).unwrap_or(value);
        self.log.push(EvalRecord {
            eval,
            params,
            value,
            best_so_far,
        });
        // maximisation becomes minimisation of -value
        Ok(Ok(-self.sense.sign() * value))
    }
}

macro_rules! eval_or_stop {
    ($search:expr, $u:expr) => {
        match $search.loss($u) {
            Ok(r) => r?,
            Err(Exhausted) => return Ok(false),
        }
    };
}

/// Adaptive Nelder-Mead; returns whether the simplex converged.
fn nelder_mead(search: &mut Search, x0: &[f64], tol: f64) -> Result<bool> {
    let d = x0.len();
    let dn = d as f64;
    let (alpha, gamma, rho, shrink) = (1.0, 1.0 + 2.0 / dn, 0.75 - 1.0 / (2.0 * dn), 1.0 - 1.0 / dn);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let f0 = eval_or_stop!(search, x0);
    simplex.push((x0.to_vec(), f0));
    for j in 0..d {
        let mut x = x0.to_vec();
        x[j] += if x[j].abs() > 1.0 { 0.25 * x[j].abs() } else { 0.25 };
        let f = eval_or_stop!(search, &x);
        simplex.push((x, f));
    }
    loop {
        // stable sort keeps earlier vertices ahead on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (fb, fw) = (simplex[0].1, simplex[d].1);
        if fw - fb <= tol * fb.abs().max(f64::MIN_POSITIVE) || fw - fb <= f64::EPSILON * fb.abs() {
            return Ok(true);
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|v| v.0[j]).sum::<f64>() / dn)
            .collect();
        let along = |c: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(m, w)| m + c * (m - w))
                .collect()
        };
        let xr = along(alpha);
        let fr = eval_or_stop!(search, &xr);
        if fr < fb {
            let xe = along(gamma);
            let fe = eval_or_stop!(search, &xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < fw {
            let xc = along(alpha * rho);
            let fc = eval_or_stop!(search, &xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval_or_stop!(search, &xc);
            (xc, fc)
        };
        if fc < fr.min(fw) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best.iter().zip(&v.0).map(|(b, x)| b + shrink * (x - b)).collect();
            let f = eval_or_stop!(search, &x);
            *v = (x, f);
        }
    }
}

/// BFGS with central-difference gradients and a backtracking line search.
fn bfgs(search: &mut Search, x0: &[f64], tol: f64) -> Result<bool> {
    let d = x0.len();
    let step = 1e-5;
    let mut x = x0.to_vec();
    let mut fx = eval_or_stop!(search, &x);
    let mut h_inv = vec![vec![0.0; d]; d];
    (0..d).for_each(|i| h_inv[i][i] = 1.0);
    macro_rules! gradient {
        ($x:expr) => {{
            let mut g = vec![0.0; d];
            for j in 0..d {
                let mut xp = $x.clone();
                let mut xm = $x.clone();
                xp[j] += step;
                xm[j] -= step;
                let fp = eval_or_stop!(search, &xp);
                let fm = eval_or_stop!(search, &xm);
                g[j] = (fp - fm) / (2.0 * step);
            }
            g
        }};
    }
    let mut g = gradient!(x);
    loop {
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm <= tol * fx.abs().max(1.0) {
            return Ok(true);
        }
        let mut dir: Vec<f64> = (0..d).map(|i| -(0..d).map(|j| h_inv[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            // lost descent: restart from steepest descent
            for (i, row) in h_inv.iter_mut().enumerate() {
                row.iter_mut().enumerate().for_each(|(j, v)| *v = if i == j { 1.0 } else { 0.0 });
            }
            dir = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut a = 1.0;
        let (x_new, f_new) = loop {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + a * di).collect();
            let fn_ = eval_or_stop!(search, &xn);
            if fn_ <= fx + 1e-4 * a * slope {
                break (xn, fn_);
            }
            a *= 0.5;
            if a < 1e-10 {
                return Ok(true);
            }
        };
        let g_new = gradient!(x_new);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let hy: Vec<f64> = (0..d).map(|i| (0..d).map(|j| h_inv[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..d {
                for j in 0..d {
                    h_inv[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if improvement.abs() <= tol * fx.abs().max(f64::MIN_POSITIVE) {
            return Ok(true);
        }
    }
}

/// Tunes the schedule (and optionally `lambda_T`) for `p` iterations.
pub fn tune(landscape: &Landscape, p: usize, spec: &TuneSpec) -> Result<TuneReport> {
    if spec.budget == 0 {
        return Err(Error::InvalidParameter("tuning budget must be at least 1".into()));
    }
    if spec.optimizer == Optimizer::Bfgs && spec.mode != EvalMode::Exact {
        return Err(Error::InvalidParameter("finite-difference BFGS needs exact evaluation".into()));
    }
    let lambda_f = &landscape.instance.lambda_f;
    let init = spec.init.clone().unwrap_or_else(|| TuneParams::initial(p, lambda_f));
    init.amplify(p).validate()?;
    if init.lambda_t.len() != lambda_f.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} penalty coefficients, got {}",
            lambda_f.len(),
            init.lambda_t.len()
        )));
    }
    if !(init.gamma > 0.0 && init.t > 0.0) {
        return Err(Error::InvalidParameter("tuning starts from gamma > 0 and t > 0".into()));
    }
    let with_lambda = spec.tune_lambda && landscape.instance.has_penalties();
    let evaluator = Evaluator::with_convention(landscape, p, spec.objective, spec.mode, spec.mixer_tolerance, spec.convention)?;
    let x0 = init.to_coords(with_lambda);
    let mut search = Search {
        evaluator: &evaluator,
        sense: landscape.sense(),
        fixed_lambda: init.lambda_t.clone(),
        origin: (x0.clone(), init.clone()),
        budget: spec.budget,
        seed: spec.seed,
        shots: match spec.mode {
            EvalMode::Exact => 1,
            EvalMode::Shots(s) => s,
        },
        log: Vec::new(),
        best: None,
    };
    let converged = match spec.optimizer {
        Optimizer::NelderMead => nelder_mead(&mut search, &x0, spec.tolerance)?,
        Optimizer::Bfgs => bfgs(&mut search, &x0, spec.tolerance)?,
    };
    let (best, best_value) = search.best.clone().expect("at least one evaluation");
    let evaluations = search.log.len();
    Ok(TuneReport {
        p,
        spec: spec.clone(),
        best,
        best_value,
        evaluations,
        preparations: evaluations * search.shots,
        converged,
        budget_exhausted: !converged,
        log: search.log,
    })
}
