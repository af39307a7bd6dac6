//! Seeded random instances.
//!
//! * maxcut: Erdős–Rényi `G(n, 0.5)` with weights uniform in `(0, 1]`.
//! * MIS: Erdős–Rényi `G(n, 0.3)`.
//! * k-means: `k` Gaussian blobs in the plane, centres on a regular polygon
//!   with unit side, coordinate spread 0.3; point `j` belongs to blob `j mod k`.
//! * CFLP: customers and locations uniform in the unit square, Euclidean
//!   transport costs, demands uniform in `1..=5`, capacities summing to about
//!   1.3x total demand, opening costs uniform in `[0.5, 1.5]` times the mean
//!   customer-location distance.
//! * QAP: locations uniform in the unit square with Euclidean distances,
//!   symmetric flows uniform in `[0, 1)` with zero diagonal.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{CflpData, Family, KMeansData, MaxcutData, MisData, Optimum, ProblemData, ProblemInstance, QapData};
use crate::error::{Error, Result};
use crate::space::SolutionSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeParams {
    pub n: usize,
    /// Alphabet size; only read for k-means and CFLP.
    pub k: usize,
}

impl SizeParams {
    pub fn new(n: usize, k: usize) -> Self {
        SizeParams { n, k }
    }
}

/// Largest `(n, k)` accepted by [`generate_instance`].
pub fn size_ceiling(family: Family) -> (usize, usize) {
    match family {
        Family::Maxcut | Family::Mis => (18, 2),
        Family::KMeans | Family::Cflp => (12, 3),
        Family::Qap => (9, 9),
    }
}

pub fn generate_instance(family: Family, size: SizeParams, seed: u64) -> Result<ProblemInstance> {
    let (max_n, max_k) = size_ceiling(family);
    let n = size.n;
    let k = match family {
        Family::Maxcut | Family::Mis => 2,
        Family::Qap => n,
        _ => size.k,
    };
    if n < 2 || n > max_n || k > max_k {
        return Err(Error::TooLarge {
            what: "generated instance size",
            size: n as u128,
            ceiling: max_n as u128,
        });
    }
    let mut rng = crate::rng(seed);
    let (space, data) = match family {
        Family::Maxcut => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < 0.5 {
                        // uniform on (0, 1]
                        edges.push((i, j, 1.0 - rng.random::<f64>()));
                    }
                }
            }
            (SolutionSpace::binary(n)?, ProblemData::Maxcut(MaxcutData { edges }))
        }
        Family::Mis => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < 0.3 {
                        edges.push((i, j));
                    }
                }
            }
            (SolutionSpace::binary(n)?, ProblemData::Mis(MisData { edges }))
        }
        Family::KMeans => {
            if k < 2 || k > n {
                return Err(Error::InvalidParameter(format!("k-means needs 2 <= k <= n, got k={k}")));
            }
            let radius = 0.5 / (std::f64::consts::PI / k as f64).sin();
            let noise = Normal::new(0.0, 0.3).expect("valid normal");
            let mut points = Vec::with_capacity(2 * n);
            for j in 0..n {
                let angle = 2.0 * std::f64::consts::PI * (j % k) as f64 / k as f64;
                points.push(radius * angle.cos() + noise.sample(&mut rng));
                points.push(radius * angle.sin() + noise.sample(&mut rng));
            }
            (SolutionSpace::integer(n, k)?, ProblemData::KMeans(KMeansData::new(points, 2, k)?))
        }
        Family::Cflp => {
            if k < 2 {
                return Err(Error::InvalidParameter(format!("CFLP needs k >= 2, got {k}")));
            }
            let space = SolutionSpace::integer(n, k)?;
            (space, ProblemData::Cflp(generate_cflp(n, k, &mut rng, &space)?))
        }
        Family::Qap => {
            let sites: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
            let mut distances = vec![0.0; n * n];
            for a in 0..n {
                for b in 0..n {
                    distances[a * n + b] = euclid(sites[a], sites[b]);
                }
            }
            let mut flows = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let f = rng.random::<f64>();
                    flows[i * n + j] = f;
                    flows[j * n + i] = f;
                }
            }
            (SolutionSpace::permutation(n)?, ProblemData::Qap(QapData { n, distances, flows }))
        }
    };
    ProblemInstance::new(family, space, seed, data, family.default_lambda_f())
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn generate_cflp<R: Rng>(n: usize, k: usize, rng: &mut R, space: &SolutionSpace) -> Result<CflpData> {
    let customers: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let sites: Vec<(f64, f64)> = (0..k).map(|_| (rng.random(), rng.random())).collect();
    let mut transport_costs = Vec::with_capacity(n * k);
    for &c in &customers {
        transport_costs.extend(sites.iter().map(|&s| euclid(c, s)));
    }
    let demands: Vec<f64> = (0..n).map(|_| rng.random_range(1..=5) as f64).collect();
    let total_demand: f64 = demands.iter().sum();

    let shares: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let share_sum: f64 = shares.iter().sum();
    let capacities: Vec<f64> = shares
        .iter()
        .map(|s| (1.3 * total_demand * s / share_sum).ceil())
        .collect();

    let mean_transport = transport_costs.iter().sum::<f64>() / (n * k) as f64;
    let opening_costs: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5) * mean_transport).collect();

    let mut data = CflpData {
        n,
        k,
        opening_costs,
        transport_costs,
        demands,
        capacities,
        reference: vec![0; n],
    };
    // uncapacitated optimum as the reference solution
    let mut x = vec![0; n];
    let costs: Vec<f64> = (0..space.len())
        .map(|i| {
            space.decode_into(i, &mut x);
            data.cost(&x)
        })
        .collect();
    let best = Optimum::of_table(&costs, crate::state::Sense::Minimize);
    data.reference = space.solution_of(best.indices[0])?.into_inner();
    Ok(data)
}
