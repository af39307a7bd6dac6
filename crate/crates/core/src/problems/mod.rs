//! The five benchmark problems: objective evaluation, penalties, instance
//! generation and brute-force optima.

mod cflp;
mod document;
mod generate;
mod kmeans;
mod maxcut;
mod mis;
mod qap;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cflp::CflpData;
pub use document::{digest_hex, InstanceDocument, Payload, FORMAT_VERSION};
pub use generate::{generate_instance, size_ceiling, SizeParams};
pub use kmeans::KMeansData;
pub use maxcut::MaxcutData;
pub use mis::MisData;
pub use qap::QapData;

use crate::error::{Error, Result};
use crate::space::SolutionSpace;
use crate::state::Sense;

/// Largest space scanned exhaustively.
pub const BRUTE_FORCE_CEILING: usize = 1 << 24;

/// Fixed MIS penalty that makes every optimum an independent set.
pub const MIS_LAMBDA_F: [f64; 2] = [1.5, 0.0];
/// Fixed CFLP penalty that makes every optimum respect capacities.
pub const CFLP_LAMBDA_F: [f64; 3] = [1.0, 1.0, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Maxcut,
    Mis,
    KMeans,
    Cflp,
    Qap,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Maxcut, Family::Mis, Family::KMeans, Family::Cflp, Family::Qap];

    pub fn name(self) -> &'static str {
        match self {
            Family::Maxcut => "maxcut",
            Family::Mis => "mis",
            Family::KMeans => "kmeans",
            Family::Cflp => "cflp",
            Family::Qap => "qap",
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            Family::Maxcut | Family::Mis => Sense::Maximize,
            Family::KMeans | Family::Cflp | Family::Qap => Sense::Minimize,
        }
    }

    /// Number of penalty coefficients the family's objective takes.
    pub fn penalty_len(self) -> usize {
        match self {
            Family::Mis => 2,
            Family::Cflp => 3,
            _ => 0,
        }
    }

    pub fn default_lambda_f(self) -> Vec<f64> {
        match self {
            Family::Mis => MIS_LAMBDA_F.to_vec(),
            Family::Cflp => CFLP_LAMBDA_F.to_vec(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown problem family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemData {
    Maxcut(MaxcutData),
    Mis(MisData),
    KMeans(KMeansData),
    Cflp(CflpData),
    Qap(QapData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub family: Family,
    pub space: SolutionSpace,
    pub seed: u64,
    pub data: ProblemData,
    /// Fixed penalty coefficients defining the evaluation objective.
    pub lambda_f: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(family: Family, space: SolutionSpace, seed: u64, data: ProblemData, lambda_f: Vec<f64>) -> Result<Self> {
        if lambda_f.len() != family.penalty_len() {
            return Err(Error::InvalidParameter(format!(
                "{family} takes {} penalty coefficients, got {}",
                family.penalty_len(),
                lambda_f.len()
            )));
        }
        check_lambda(&lambda_f)?;
        Ok(ProblemInstance {
            family,
            space,
            seed,
            data,
            lambda_f,
        })
    }

    pub fn sense(&self) -> Sense {
        self.family.sense()
    }

    /// Penalty vector that switches every penalty off.
    pub fn raw_lambda(&self) -> Vec<f64> {
        vec![0.0; self.family.penalty_len()]
    }

    pub fn has_penalties(&self) -> bool {
        self.family.penalty_len() > 0
    }

    /// Objective value of `x` under penalty coefficients `lambda`.
    pub fn evaluate(&self, x: &[usize], lambda: &[f64]) -> f64 {
        match &self.data {
            ProblemData::Maxcut(d) => d.evaluate(x),
            ProblemData::Mis(d) => d.evaluate(x, lambda),
            ProblemData::KMeans(d) => d.evaluate(x),
            ProblemData::Cflp(d) => d.evaluate(x, lambda),
            ProblemData::Qap(d) => d.evaluate(x),
        }
    }

    pub fn evaluate_fixed(&self, x: &[usize]) -> f64 {
        self.evaluate(x, &self.lambda_f)
    }

    /// Whether `x` satisfies the problem's hard constraints.
    pub fn is_valid(&self, x: &[usize]) -> bool {
        match &self.data {
            ProblemData::Mis(d) => d.is_valid(x),
            ProblemData::Cflp(d) => d.is_valid(x),
            _ => true,
        }
    }

    /// Objective value of every solution, in index order.
    pub fn objective_table(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        if self.space.len() > BRUTE_FORCE_CEILING {
            return Err(Error::TooLarge {
                what: "objective table",
                size: self.space.len() as u128,
                ceiling: BRUTE_FORCE_CEILING as u128,
            });
        }
        let cflp_reference = match &self.data {
            ProblemData::Cflp(d) => Some(d.penalised_cost(&d.reference, lambda)),
            _ => None,
        };
        let mut x = vec![0; self.space.n()];
        Ok((0..self.space.len())
            .map(|i| {
                self.space.decode_into(i, &mut x);
                match (&self.data, cflp_reference) {
                    (ProblemData::Cflp(d), Some(r)) => d.evaluate_with_reference(&x, lambda, r),
                    _ => self.evaluate(&x, lambda),
                }
            })
            .collect())
    }

    /// Validity flag of every solution, in index order.
    pub fn validity_table(&self) -> Vec<bool> {
        let mut x = vec![0; self.space.n()];
        (0..self.space.len())
            .map(|i| {
                self.space.decode_into(i, &mut x);
                self.is_valid(&x)
            })
            .collect()
    }

    /// Exhaustive global optimum under `lambda`.
    pub fn brute_force_optimum(&self, lambda: &[f64]) -> Result<Optimum> {
        let values = self.objective_table(lambda)?;
        Ok(Optimum::of_table(&values, self.sense()))
    }

    /// Standard deviation of the objective under `lambda`.
    pub fn sigma_estimate(&self, lambda: &[f64], mode: SigmaMode) -> Result<f64> {
        match mode {
            SigmaMode::Exhaustive => Ok(population_std(&self.objective_table(lambda)?)),
            SigmaMode::Sampled { samples, seed } => {
                if samples < 2 {
                    return Err(Error::InvalidParameter("sigma sampling needs at least 2 samples".into()));
                }
                let mut rng = crate::rng(seed);
                let mut x = vec![0; self.space.n()];
                let values: Vec<f64> = (0..samples)
                    .map(|_| {
                        self.space.decode_into(self.space.random_index(&mut rng), &mut x);
                        self.evaluate(&x, lambda)
                    })
                    .collect();
                Ok(sample_std(&values))
            }
        }
    }
}

pub(crate) fn check_lambda(lambda: &[f64]) -> Result<()> {
    if lambda.iter().any(|&l| !(l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "penalty coefficients must be finite and non-negative: {lambda:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Optimal value and every index attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub value: f64,
    pub indices: Vec<usize>,
}

impl Optimum {
    /// Ties are resolved with a relative tolerance of `1e-9`.
    pub fn of_table(values: &[f64], sense: Sense) -> Self {
        let best = values
            .iter()
            .copied()
            .fold(None, |acc: Option<f64>, v| match acc {
                Some(b) if !sense.better(v, b) => Some(b),
                _ => Some(v),
            })
            .expect("non-empty table");
        let tol = 1e-9 * best.abs().max(1.0);
        let indices = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| (v - best).abs() <= tol)
            .map(|(i, _)| i)
            .collect();
        Optimum { value: best, indices }
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_mis() -> ProblemInstance {
        let data = MisData {
            edges: vec![(0, 1), (1, 2), (0, 2)],
        };
        ProblemInstance::new(
            Family::Mis,
            SolutionSpace::binary(3).unwrap(),
            0,
            ProblemData::Mis(data),
            MIS_LAMBDA_F.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn mis_triangle_optimum() {
        let inst = triangle_mis();
        let opt = inst.brute_force_optimum(&inst.lambda_f).unwrap();
        assert_eq!(opt.value, 1.0);
        assert_eq!(opt.indices, vec![1, 2, 4]);
    }

    #[test]
    fn maxcut_single_edge_symmetry() {
        let inst = ProblemInstance::new(
            Family::Maxcut,
            SolutionSpace::binary(2).unwrap(),
            0,
            ProblemData::Maxcut(MaxcutData {
                edges: vec![(0, 1, 0.7)],
            }),
            vec![],
        )
        .unwrap();
        let opt = inst.brute_force_optimum(&[]).unwrap();
        assert_eq!(opt.value, 0.7);
        assert_eq!(opt.indices, vec![1, 2]);
    }

    #[test]
    fn sigma_constant_is_zero() {
        let inst = ProblemInstance::new(
            Family::Maxcut,
            SolutionSpace::binary(4).unwrap(),
            0,
            ProblemData::Maxcut(MaxcutData { edges: vec![] }),
            vec![],
        )
        .unwrap();
        assert_eq!(inst.sigma_estimate(&[], SigmaMode::Exhaustive).unwrap(), 0.0);
        let s = inst
            .sigma_estimate(&[], SigmaMode::Sampled { samples: 50, seed: 1 })
            .unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn rejects_bad_lambda() {
        let data = ProblemData::Mis(MisData { edges: vec![] });
        let space = SolutionSpace::binary(2).unwrap();
        assert!(ProblemInstance::new(Family::Mis, space, 0, data.clone(), vec![1.0]).is_err());
        assert!(ProblemInstance::new(Family::Mis, space, 0, data, vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("QAP".parse::<Family>().unwrap(), Family::Qap);
        assert_eq!("kmeans".parse::<Family>().unwrap(), Family::KMeans);
        assert!("tsp".parse::<Family>().is_err());
    }
}
