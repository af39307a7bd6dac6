use serde::{Deserialize, Serialize};

/// Unweighted graph for maximum independent set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisData {
    pub edges: Vec<(usize, usize)>,
}

impl MisData {
    /// Number of edges with both endpoints selected.
    pub fn conflicts(&self, x: &[usize]) -> usize {
        self.edges.iter().filter(|&&(i, j)| x[i] == 1 && x[j] == 1).count()
    }

    /// `|x| - lambda_1 P_1(x) - lambda_2 P_2(x)`.
    pub fn evaluate(&self, x: &[usize], lambda: &[f64]) -> f64 {
        let size = x.iter().filter(|&&v| v == 1).count() as f64;
        let p1 = self.conflicts(x) as f64;
        let p2 = if p1 > 0.0 { 1.0 } else { 0.0 };
        let l1 = lambda.first().copied().unwrap_or(0.0);
        let l2 = lambda.get(1).copied().unwrap_or(0.0);
        size - l1 * p1 - l2 * p2
    }

    pub fn is_valid(&self, x: &[usize]) -> bool {
        self.conflicts(x) == 0
    }
}
