use serde::{Deserialize, Serialize};

/// Quadratic assignment data; both matrices are `n x n`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QapData {
    pub n: usize,
    /// `L[a][b]`: distance between locations `a` and `b`.
    pub distances: Vec<f64>,
    /// `F[i][j]`: flow between facilities `i` and `j`.
    pub flows: Vec<f64>,
}

impl QapData {
    /// `sum_{i,j} F[i][j] L[x_i][x_j]` over ordered pairs.
    pub fn evaluate(&self, x: &[usize]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for i in 0..n {
            let row = &self.flows[i * n..(i + 1) * n];
            let loc = &self.distances[x[i] * n..(x[i] + 1) * n];
            for (j, &f) in row.iter().enumerate() {
                total += f * loc[x[j]];
            }
        }
        total
    }
}
