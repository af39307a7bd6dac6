/// Capacitated facility location with single sourcing.
///
/// Customer `j` is served by candidate location `x_j`. Matrices are row-major
/// with one row per customer.
#[derive(Debug, Clone, PartialEq)]
pub struct CflpData {
    pub n: usize,
    pub k: usize,
    /// `F_i`, cost of opening location `i`.
    pub opening_costs: Vec<f64>,
    /// `L[j][i]`, transport cost between customer `j` and location `i`.
    pub transport_costs: Vec<f64>,
    /// `R_j`, resources required by customer `j`.
    pub demands: Vec<f64>,
    /// `C_i`, capacity of location `i`.
    pub capacities: Vec<f64>,
    /// Reference solution of the uncapacitated problem.
    pub reference: Vec<usize>,
}

impl CflpData {
    pub fn loads(&self, x: &[usize]) -> Vec<f64> {
        let mut loads = vec![0.0; self.k];
        for (j, &i) in x.iter().enumerate() {
            loads[i] += self.demands[j];
        }
        loads
    }

    pub fn is_valid(&self, x: &[usize]) -> bool {
        self.loads(x).iter().zip(&self.capacities).all(|(l, c)| l <= c)
    }

    /// Transport plus opening cost, ignoring capacities.
    pub fn cost(&self, x: &[usize]) -> f64 {
        let transport: f64 = x
            .iter()
            .enumerate()
            .map(|(j, &i)| self.demands[j] * self.transport_costs[j * self.k + i])
            .sum();
        let mut open = vec![false; self.k];
        x.iter().for_each(|&i| open[i] = true);
        let opening: f64 = open
            .iter()
            .zip(&self.opening_costs)
            .filter(|(o, _)| **o)
            .map(|(_, f)| f)
            .sum();
        transport + opening
    }

    fn mean_opening_cost(&self) -> f64 {
        self.opening_costs.iter().sum::<f64>() / self.k as f64
    }

    fn mean_transport_cost(&self) -> f64 {
        self.transport_costs.iter().sum::<f64>() / (self.n * self.k) as f64
    }

    /// Cost plus capacity penalties `lambda_1 P_{i,1} + lambda_2 P_{i,2}` for
    /// every over-capacity location.
    pub fn penalised_cost(&self, x: &[usize], lambda: &[f64]) -> f64 {
        let l1 = lambda.first().copied().unwrap_or(0.0);
        let l2 = lambda.get(1).copied().unwrap_or(0.0);
        let (mean_f, mean_l) = (self.mean_opening_cost(), self.mean_transport_cost());
        let penalty: f64 = self
            .loads(x)
            .iter()
            .zip(&self.capacities)
            .filter(|(load, cap)| load > cap)
            .map(|(load, cap)| {
                let excess = load - cap;
                l1 * mean_f * (excess / cap).ceil() + l2 * mean_l * excess
            })
            .sum();
        self.cost(x) + penalty
    }

    /// Full penalised objective, pulling invalid solutions towards the
    /// reference value by the factor `lambda_3`.
    pub fn evaluate(&self, x: &[usize], lambda: &[f64]) -> f64 {
        let reference = self.penalised_cost(&self.reference, lambda);
        self.evaluate_with_reference(x, lambda, reference)
    }

    pub(crate) fn evaluate_with_reference(&self, x: &[usize], lambda: &[f64], reference: f64) -> f64 {
        let g = self.penalised_cost(x, lambda);
        if self.is_valid(x) {
            g
        } else {
            let l3 = lambda.get(2).copied().unwrap_or(0.0);
            g - l3 * (g - reference)
        }
    }
}
