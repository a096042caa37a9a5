use serde::{Deserialize, Serialize};

use super::{ImbalanceVector, Matrix, StationNetwork};
use crate::error::{Error, Result};
use crate::tolerance;

/// Vehicle rebalancing rates `alpha`, driver taxi-trip rates `beta`, and
/// the in-transit vehicle and driver masses they imply at equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RebalanceAssignment {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub v_alpha: f64,
    pub r_alpha_beta: f64,
}

impl RebalanceAssignment {
    pub fn new(net: &StationNetwork, alpha: Matrix, beta: Matrix) -> Result<Self> {
        let (v_alpha, r_alpha_beta) = fleet_sizes(net, &alpha, &beta)?;
        Ok(RebalanceAssignment {
            alpha,
            beta,
            v_alpha,
            r_alpha_beta,
        })
    }

    /// `max_i |sum_j (alpha_ij - alpha_ji) - D_i|`.
    pub fn alpha_residual(&self, d: &ImbalanceVector) -> f64 {
        (0..d.len())
            .map(|i| (self.alpha.net_outflow(i) - d[i]).abs())
            .fold(0.0, f64::max)
    }

    /// `max_i |sum_j (beta_ij - beta_ji) + D_i|`.
    pub fn beta_residual(&self, d: &ImbalanceVector) -> f64 {
        (0..d.len())
            .map(|i| (self.beta.net_outflow(i) + d[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Largest amount by which any `beta_ij` exceeds `f_ij lambda_i p_ij`.
    pub fn capacity_excess(&self, net: &StationNetwork) -> f64 {
        self.beta
            .iter()
            .map(|((i, j), b)| b - net.taxi_capacity(i, j))
            .fold(0.0, f64::max)
    }

    /// Checks membership in the balanced assignment set and the taxi
    /// capacity bound.
    pub fn check(&self, net: &StationNetwork, d: &ImbalanceVector) -> Result<()> {
        let r = self.alpha_residual(d);
        if r > tolerance::EQUALITY {
            return Err(Error::validation("alpha", format!("flow balance residual {r:e}")));
        }
        let r = self.beta_residual(d);
        if r > tolerance::EQUALITY {
            return Err(Error::validation("beta", format!("flow balance residual {r:e}")));
        }
        let excess = self.capacity_excess(net);
        if excess > tolerance::CAPACITY {
            return Err(Error::validation(
                "beta",
                format!("exceeds taxi capacity by {excess:e}"),
            ));
        }
        Ok(())
    }
}

/// Minimum in-transit vehicle and driver masses:
///
/// `V_alpha = sum T_ij (p_ij lambda_i + alpha_ij)` and
/// `R_alpha_beta = sum T_ij (alpha_ij + beta_ij)`.
pub fn fleet_sizes(net: &StationNetwork, alpha: &Matrix, beta: &Matrix) -> Result<(f64, f64)> {
    let n = net.n();
    for (name, m) in [("alpha", alpha), ("beta", beta)] {
        if m.dim() != n {
            return Err(Error::InvalidInput(format!(
                "{name} is {0}x{0} but the network has {n} stations",
                m.dim()
            )));
        }
        for ((i, j), x) in m.iter() {
            if !x.is_finite() || x < 0.0 || (i == j && x != 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name}[{}][{}] = {x} must be finite, nonnegative and zero on the diagonal",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let t = net.travel_time();
    let customer: f64 = t.iter().map(|((i, j), tij)| tij * net.trip_rate(i, j)).sum();
    let rebalancing = t.dot(alpha);
    let taxi = t.dot(beta);
    Ok((customer + rebalancing, rebalancing + taxi))
}
