use serde::{Deserialize, Serialize};

use super::{GeneratorConfig, Matrix};
use crate::error::{Error, Result};
use crate::tolerance;

/// Provenance recorded alongside an instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub generator_config: Option<GeneratorConfig>,
}

/// A complete rebalancing instance: `n` stations with customer arrival
/// rates, service rates, destination probabilities, travel times and
/// taxi-willingness fractions.
///
/// Constructed only through [`StationNetwork::new`], which enforces:
/// `p_ii = 0`, rows of `p` summing to one wherever `lambda_i > 0`,
/// `T_ii = 0`, `T >= 0`, `f >= 0` and `mu_i > lambda_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationNetwork {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    p: Matrix,
    travel_time: Matrix,
    f: Matrix,
    meta: InstanceMeta,
}

impl StationNetwork {
    pub fn new(
        lambda: Vec<f64>,
        mu: Vec<f64>,
        p: Matrix,
        travel_time: Matrix,
        f: Matrix,
    ) -> Result<Self> {
        let net = StationNetwork {
            lambda,
            mu,
            p,
            travel_time,
            f,
            meta: InstanceMeta::default(),
        };
        net.validate()?;
        Ok(net)
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = meta;
        self
    }

    /// Returns a copy with every `f_ij` set to `value`.
    pub fn with_uniform_f(&self, value: f64) -> Result<Self> {
        self.with_f(Matrix::filled(self.n(), value))
    }

    pub fn with_f(&self, f: Matrix) -> Result<Self> {
        let mut net = self.clone();
        net.f = f;
        net.validate()?;
        Ok(net)
    }

    /// Returns a copy with every travel time multiplied by `factor`.
    pub fn with_scaled_travel_times(&self, factor: f64) -> Result<Self> {
        let mut net = self.clone();
        net.travel_time = self.travel_time.map(|t| t * factor);
        net.validate()?;
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn travel_time(&self) -> &Matrix {
        &self.travel_time
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    /// Customer flow rate from `i` to `j`: `lambda_i * p_ij`.
    pub fn trip_rate(&self, i: usize, j: usize) -> f64 {
        self.lambda[i] * self.p[(i, j)]
    }

    /// Upper bound on driver taxi trips from `i` to `j`: `f_ij * lambda_i * p_ij`.
    pub fn taxi_capacity(&self, i: usize, j: usize) -> f64 {
        self.f[(i, j)] * self.trip_rate(i, j)
    }

    pub fn max_travel_time(&self) -> f64 {
        self.travel_time.as_slice().iter().copied().fold(0.0, f64::max)
    }

    /// Smallest strictly positive travel time, if any.
    pub fn min_positive_travel_time(&self) -> Option<f64> {
        self.travel_time
            .as_slice()
            .iter()
            .copied()
            .filter(|&t| t > 0.0)
            .min_by(f64::total_cmp)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::validation("n", "must be positive"));
        }
        if self.mu.len() != n {
            return Err(Error::validation(
                "mu",
                format!("length {} does not match n = {n}", self.mu.len()),
            ));
        }
        for (name, m) in [("p", &self.p), ("T", &self.travel_time), ("f", &self.f)] {
            if m.dim() != n {
                return Err(Error::validation(
                    name,
                    format!("dimension {} does not match n = {n}", m.dim()),
                ));
            }
            for ((i, j), x) in m.iter() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::validation(
                        format!("{name}[{}][{}]", i + 1, j + 1),
                        format!("must be finite and nonnegative, got {x}"),
                    ));
                }
            }
        }
        for i in 0..n {
            let (lambda, mu) = (self.lambda[i], self.mu[i]);
            if !lambda.is_finite() || lambda < 0.0 {
                return Err(Error::validation(
                    format!("lambda[{}]", i + 1),
                    format!("must be finite and nonnegative, got {lambda}"),
                ));
            }
            if !mu.is_finite() || mu <= lambda {
                return Err(Error::validation(
                    format!("mu[{}]", i + 1),
                    format!("must exceed lambda ({lambda}), got {mu}"),
                ));
            }
            if self.p[(i, i)] != 0.0 {
                return Err(Error::validation(
                    format!("p[{0}][{0}]", i + 1),
                    "diagonal must be zero",
                ));
            }
            if self.travel_time[(i, i)] != 0.0 {
                return Err(Error::validation(
                    format!("T[{0}][{0}]", i + 1),
                    "diagonal must be zero",
                ));
            }
            let row: f64 = self.p.row(i).iter().sum();
            if row > 1.0 + tolerance::PROBABILITY {
                return Err(Error::validation(
                    format!("p row {}", i + 1),
                    format!("entries sum to {row}, expected 1"),
                ));
            }
            if lambda > 0.0 && (row - 1.0).abs() > tolerance::PROBABILITY {
                return Err(Error::validation(
                    format!("p row {}", i + 1),
                    format!("entries sum to {row}, expected 1"),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_station() -> (Vec<f64>, Vec<f64>, Matrix, Matrix, Matrix) {
        let p = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = Matrix::from_rows(vec![vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap();
        (vec![0.4, 0.1], vec![0.8, 0.2], p, t, Matrix::filled(2, 1.0))
    }

    #[test]
    fn accepts_valid_network() {
        let (l, m, p, t, f) = two_station();
        let net = StationNetwork::new(l, m, p, t, f).unwrap();
        assert_eq!(net.n(), 2);
        assert_eq!(net.taxi_capacity(0, 1), 0.4);
        assert_eq!(net.min_positive_travel_time(), Some(10.0));
    }

    #[test]
    fn rejects_mu_not_above_lambda() {
        let (l, _, p, t, f) = two_station();
        let err = StationNetwork::new(l, vec![0.4, 0.2], p, t, f).unwrap_err();
        assert!(err.to_string().contains("mu[1]"), "{err}");
    }

    #[test]
    fn rejects_bad_row_sum() {
        let (l, m, _, t, f) = two_station();
        let p = Matrix::from_rows(vec![vec![0.0, 0.9], vec![1.0, 0.0]]).unwrap();
        let err = StationNetwork::new(l, m, p, t, f).unwrap_err();
        assert!(err.to_string().contains("p row 1"), "{err}");
    }

    #[test]
    fn rejects_nonzero_diagonal_and_negative_entries() {
        let (l, m, p, _, f) = two_station();
        let t = Matrix::from_rows(vec![vec![1.0, 10.0], vec![10.0, 0.0]]).unwrap();
        assert!(StationNetwork::new(l.clone(), m.clone(), p.clone(), t, f.clone()).is_err());
        let t = Matrix::from_rows(vec![vec![0.0, -1.0], vec![10.0, 0.0]]).unwrap();
        assert!(StationNetwork::new(l, m, p, t, f).is_err());
    }

    #[test]
    fn zero_rate_station_may_have_empty_row() {
        let p = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let t = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let net = StationNetwork::new(vec![0.3, 0.0], vec![1.0, 1.0], p, t, Matrix::filled(2, 1.0));
        assert!(net.is_ok());
    }
}
