use serde::{Deserialize, Serialize};

use super::StationNetwork;

/// Net vehicle surplus rate per station: arrivals of customer-carrying
/// vehicles minus departures. Positive entries accumulate vehicles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImbalanceVector(Vec<f64>);

impl ImbalanceVector {
    pub fn new(d: Vec<f64>) -> Self {
        ImbalanceVector(d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `-sum_{i in S} D_i` for the stations selected by `members`.
    pub fn deficit_of(&self, members: impl IntoIterator<Item = usize>) -> f64 {
        -members.into_iter().map(|i| self.0[i]).sum::<f64>()
    }
}

impl std::ops::Index<usize> for ImbalanceVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `D_i = -lambda_i + sum_{j != i} lambda_j p_ji`.
pub fn compute_imbalance(net: &StationNetwork) -> ImbalanceVector {
    let n = net.n();
    let d = (0..n)
        .map(|i| {
            let inflow: f64 = (0..n).filter(|&j| j != i).map(|j| net.trip_rate(j, i)).sum();
            inflow - net.lambda()[i]
        })
        .collect();
    ImbalanceVector(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Matrix;

    fn net(lambda: Vec<f64>, p: Matrix) -> StationNetwork {
        let n = lambda.len();
        let mu = lambda.iter().map(|l| 2.0 * l + 1.0).collect();
        let t = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 });
        StationNetwork::new(lambda, mu, p, t, Matrix::filled(n, 1.0)).unwrap()
    }

    #[test]
    fn symmetric_network_is_balanced() {
        let p = Matrix::from_fn(3, |i, j| if i == j { 0.0 } else { 0.5 });
        let d = compute_imbalance(&net(vec![1.0, 1.0, 1.0], p));
        assert_eq!(d.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_station_imbalance() {
        let p = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = compute_imbalance(&net(vec![0.4, 0.1], p));
        assert!((d[0] + 0.3).abs() < 1e-15);
        assert!((d[1] - 0.3).abs() < 1e-15);
        assert!(d.total().abs() < 1e-15);
    }
}
