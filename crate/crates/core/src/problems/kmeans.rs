use crate::error::{Error, Result};
use crate::space::SolutionSpace;

/// Points to be partitioned into `k` clusters.
///
/// The objective is the within-cluster sum of squared pairwise distances,
/// normalised per cluster, then shifted so that every stratum of solutions
/// with the same number of non-empty clusters has the same mean.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansData {
    dim: usize,
    k: usize,
    points: Vec<f64>,
    sq_dist: Vec<f64>,
    /// `cluster_count_means[j]`: mean raw objective over solutions with `j`
    /// non-empty clusters (index 0 unused).
    cluster_count_means: Vec<f64>,
}

impl KMeansData {
    /// `points` is row-major with `dim` coordinates per point.
    pub fn new(points: Vec<f64>, dim: usize, k: usize) -> Result<Self> {
        if dim == 0 || points.is_empty() || !points.len().is_multiple_of(dim) {
            return Err(Error::Document(format!(
                "{} coordinates do not form points of dimension {dim}",
                points.len()
            )));
        }
        let n = points.len() / dim;
        if k < 2 || n < k {
            return Err(Error::InvalidParameter(format!(
                "k-means needs 2 <= k <= n, got n={n}, k={k}"
            )));
        }
        let mut sq_dist = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                sq_dist[a * n + b] = (0..dim)
                    .map(|c| {
                        let diff = points[a * dim + c] - points[b * dim + c];
                        diff * diff
                    })
                    .sum();
            }
        }
        let mut data = KMeansData {
            dim,
            k,
            points,
            sq_dist,
            cluster_count_means: Vec::new(),
        };
        data.cluster_count_means = data.stratum_means()?;
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn cluster_count_means(&self) -> &[f64] {
        &self.cluster_count_means
    }

    /// Unadjusted objective and the number of non-empty clusters.
    pub fn raw(&self, x: &[usize]) -> (f64, usize) {
        let n = self.n();
        let mut total = 0.0;
        let mut used = 0;
        for cluster in 0..self.k {
            let mut size = 0usize;
            let mut pair_sum = 0.0;
            for a in (0..n).filter(|&a| x[a] == cluster) {
                size += 1;
                let row = &self.sq_dist[a * n..(a + 1) * n];
                for b in (0..n).filter(|&b| x[b] == cluster) {
                    pair_sum += row[b];
                }
            }
            if size > 0 {
                used += 1;
                total += pair_sum / size as f64;
            }
        }
        (total, used)
    }

    /// Adjusted objective `f(x) - (mu_{c(x)} - mu_k)`.
    pub fn evaluate(&self, x: &[usize]) -> f64 {
        let (raw, used) = self.raw(x);
        raw - (self.cluster_count_means[used] - self.cluster_count_means[self.k])
    }

    fn stratum_means(&self) -> Result<Vec<f64>> {
        let space = SolutionSpace::integer(self.n(), self.k)?;
        if space.len() > super::BRUTE_FORCE_CEILING {
            return Err(Error::TooLarge {
                what: "k-means stratum enumeration",
                size: space.len() as u128,
                ceiling: super::BRUTE_FORCE_CEILING as u128,
            });
        }
        let mut sums = vec![0.0; self.k + 1];
        let mut counts = vec![0u64; self.k + 1];
        let mut x = vec![0; self.n()];
        for i in 0..space.len() {
            space.decode_into(i, &mut x);
            let (raw, used) = self.raw(&x);
            sums[used] += raw;
            counts[used] += 1;
        }
        Ok(sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect())
    }
}
