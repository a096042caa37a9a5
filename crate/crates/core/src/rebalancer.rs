//! The two decoupled rebalancing programs.
//!
//! Vehicles: minimise `sum T_ij alpha_ij` subject to
//! `sum_j (alpha_ij - alpha_ji) = D_i`, `alpha >= 0`.
//!
//! Drivers: minimise `sum T_ij beta_ij` subject to
//! `sum_j (beta_ij - beta_ji) = -D_i`, `0 <= beta_ij <= f_ij lambda_i p_ij`.
//!
//! The programs share no variables, so solving them separately minimises
//! both the rebalancing-vehicle mass and the driver mass `R_alpha_beta`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{feasibility_diagnosis, solve_mcf, Arc, FlowProblem};
use crate::model::{compute_imbalance, ImbalanceVector, Matrix, RebalanceAssignment, StationNetwork};

/// Why the driver program has no solution: the taxi capacity leaving
/// `stations` is below their combined driver deficit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaInfeasibility {
    pub required: f64,
    pub max_flow: f64,
    /// Source side of a minimum cut (0-based station indices).
    pub stations: Vec<usize>,
}

impl fmt::Display for BetaInfeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.stations.iter().map(|i| (i + 1).to_string()).collect();
        write!(
            f,
            "only {:.6} of {:.6} driver flow can be routed; violating cut S={{{}}}",
            self.max_flow,
            self.required,
            labels.join(",")
        )
    }
}

/// Optimal rebalancing for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RebalanceSolution {
    pub assignment: RebalanceAssignment,
    pub objective_alpha: f64,
    pub objective_beta: f64,
}

impl RebalanceSolution {
    /// `R / V`: drivers needed per vehicle.
    pub fn driver_vehicle_ratio(&self) -> f64 {
        self.assignment.r_alpha_beta / self.assignment.v_alpha
    }

    /// Share of drivers that are moving empty vehicles.
    pub fn rebalancing_fraction(&self) -> f64 {
        if self.assignment.r_alpha_beta > 0.0 {
            self.objective_alpha / self.assignment.r_alpha_beta
        } else {
            0.0
        }
    }
}

fn check_imbalance(net: &StationNetwork, d: &ImbalanceVector) -> Result<()> {
    if d.len() != net.n() {
        return Err(Error::InvalidInput(format!(
            "imbalance has {} entries for {} stations",
            d.len(),
            net.n()
        )));
    }
    Ok(())
}

fn matrix_from_flow(n: usize, problem: &FlowProblem, flow: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(n);
    for (arc, &x) in problem.arcs.iter().zip(flow) {
        m[(arc.from, arc.to)] += x;
    }
    m.cancel_two_cycles();
    m
}

/// The vehicle program as a flow problem: supplies `D_i`, uncapacitated
/// arcs for every ordered station pair.
pub fn alpha_problem(net: &StationNetwork, d: &ImbalanceVector) -> FlowProblem {
    let n = net.n();
    let t = net.travel_time();
    let arcs = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| Arc::uncapacitated(i, j, t[(i, j)]))
        .collect();
    FlowProblem::new(d.as_slice().to_vec(), arcs)
}

/// The driver program as a flow problem: supplies `-D_i`, arc capacities
/// `f_ij lambda_i p_ij`.
pub fn beta_problem(net: &StationNetwork, d: &ImbalanceVector) -> FlowProblem {
    let n = net.n();
    let t = net.travel_time();
    let arcs = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| Arc::new(i, j, t[(i, j)], net.taxi_capacity(i, j)))
        .collect();
    FlowProblem::new(d.as_slice().iter().map(|x| -x).collect(), arcs)
}

/// Optimal vehicle rebalancing rates and `sum T_ij alpha_ij`.
pub fn solve_alpha(net: &StationNetwork, d: &ImbalanceVector) -> Result<(Matrix, f64)> {
    check_imbalance(net, d)?;
    let problem = alpha_problem(net, d);
    let solution = solve_mcf(&problem)?;
    if !solution.is_optimal() {
        // Uncapacitated on a complete graph, so this only happens if the
        // supplies are inconsistent.
        return Err(Error::InvalidInput(
            "vehicle rebalancing program could not route all imbalance".into(),
        ));
    }
    let alpha = matrix_from_flow(net.n(), &problem, &solution.flow);
    let objective = net.travel_time().dot(&alpha);
    Ok((alpha, objective))
}

/// Optimal driver taxi-trip rates and `sum T_ij beta_ij`, or
/// [`Error::BetaInfeasible`] when the taxi capacities cannot carry the
/// driver imbalance.
pub fn solve_beta(net: &StationNetwork, d: &ImbalanceVector) -> Result<(Matrix, f64)> {
    check_imbalance(net, d)?;
    let problem = beta_problem(net, d);
    let solution = solve_mcf(&problem)?;
    if !solution.is_optimal() {
        let diag = feasibility_diagnosis(&problem)?;
        return Err(Error::BetaInfeasible(Box::new(BetaInfeasibility {
            required: diag.required,
            max_flow: diag.max_flow,
            stations: diag.source_side,
        })));
    }
    let beta = matrix_from_flow(net.n(), &problem, &solution.flow);
    let objective = net.travel_time().dot(&beta);
    Ok((beta, objective))
}

/// Imbalance, both programs, and the resulting minimum fleet sizes.
pub fn solve_rebalancing(net: &StationNetwork) -> Result<RebalanceSolution> {
    let d = compute_imbalance(net);
    let (alpha, objective_alpha) = solve_alpha(net, &d)?;
    let (beta, objective_beta) = solve_beta(net, &d)?;
    let assignment = RebalanceAssignment::new(net, alpha, beta)?;
    Ok(RebalanceSolution {
        assignment,
        objective_alpha,
        objective_beta,
    })
}
