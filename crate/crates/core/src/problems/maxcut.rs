use serde::{Deserialize, Serialize};

/// Weighted graph for maxcut; edges are `(i, j, w_ij)` with `w_ij > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxcutData {
    pub edges: Vec<(usize, usize, f64)>,
}

impl MaxcutData {
    /// Total weight of edges crossing the bipartition `x`.
    pub fn evaluate(&self, x: &[usize]) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j, w)| {
                let diff = x[i] as f64 - x[j] as f64;
                w * diff * diff
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_and_empty_cut() {
        let data = MaxcutData {
            edges: vec![(0, 1, 2.5)],
        };
        assert_eq!(data.evaluate(&[0, 1]), 2.5);
        assert_eq!(data.evaluate(&[1, 1]), 0.0);
        let tri = MaxcutData {
            edges: vec![(0, 1, 1.0), (1, 2, 2.0), (0, 2, 4.0)],
        };
        assert_eq!(tri.evaluate(&[0, 0, 0]), 0.0);
        assert_eq!(tri.evaluate(&[0, 1, 0]), 3.0);
    }
}
