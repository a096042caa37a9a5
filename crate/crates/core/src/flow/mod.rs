//! Single-commodity capacitated minimum-cost flow on real-valued data.

mod maxflow;
mod oracle;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

pub use maxflow::{check_flow_feasibility, feasibility_diagnosis, FeasibilityDiagnosis};
pub use oracle::{brute_force_mcf, has_negative_residual_cycle, ORACLE_MAX_ARCS, ORACLE_MAX_NODES};
pub use simplex::solve_mcf;

/// Capacity sentinel for arcs without an upper bound.
///
/// Any capacity `>= UNBOUNDED` (including `f64::INFINITY`) is treated as
/// unbounded. It is the largest finite `f64`, so it survives JSON.
pub const UNBOUNDED: f64 = f64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cost: f64,
    pub capacity: f64,
}

impl Arc {
    pub fn new(from: usize, to: usize, cost: f64, capacity: f64) -> Self {
        Arc {
            from,
            to,
            cost,
            capacity,
        }
    }

    pub fn uncapacitated(from: usize, to: usize, cost: f64) -> Self {
        Arc::new(from, to, cost, UNBOUNDED)
    }

    pub fn is_unbounded(&self) -> bool {
        self.capacity >= UNBOUNDED
    }
}

/// Node supplies (positive = source, negative = sink) and arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowProblem {
    pub node_count: usize,
    pub supply: Vec<f64>,
    pub arcs: Vec<Arc>,
}

impl FlowProblem {
    pub fn new(supply: Vec<f64>, arcs: Vec<Arc>) -> Self {
        FlowProblem {
            node_count: supply.len(),
            supply,
            arcs,
        }
    }

    /// Total positive supply.
    pub fn total_supply(&self) -> f64 {
        self.supply.iter().filter(|&&b| b > 0.0).sum()
    }

    /// Total negative supply, as a positive number.
    pub fn total_demand(&self) -> f64 {
        -self.supply.iter().filter(|&&b| b < 0.0).sum::<f64>()
    }

    /// Returns the same problem with supplies and finite capacities
    /// multiplied by `k`.
    pub fn scaled(&self, k: f64) -> FlowProblem {
        FlowProblem {
            node_count: self.node_count,
            supply: self.supply.iter().map(|b| b * k).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    capacity: if a.is_unbounded() { UNBOUNDED } else { a.capacity * k },
                    ..*a
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(Error::InvalidInput("flow problem has no nodes".into()));
        }
        if self.supply.len() != self.node_count {
            return Err(Error::InvalidInput(format!(
                "{} supplies for {} nodes",
                self.supply.len(),
                self.node_count
            )));
        }
        if let Some(i) = self.supply.iter().position(|b| !b.is_finite()) {
            return Err(Error::InvalidInput(format!("supply of node {i} is not finite")));
        }
        let imbalance: f64 = self.supply.iter().sum();
        let scale = self.supply.iter().map(|b| b.abs()).sum::<f64>().max(1.0);
        if imbalance.abs() > tolerance::CAPACITY * scale {
            return Err(Error::InvalidInput(format!(
                "supplies are unbalanced: they sum to {imbalance:e}"
            )));
        }
        for (k, arc) in self.arcs.iter().enumerate() {
            if arc.from >= self.node_count || arc.to >= self.node_count {
                return Err(Error::InvalidInput(format!("arc {k} has an endpoint out of range")));
            }
            if !arc.cost.is_finite() || arc.cost < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "arc {k} cost {} must be finite and nonnegative",
                    arc.cost
                )));
            }
            if arc.capacity.is_nan() || arc.capacity < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "arc {k} capacity {} must be nonnegative",
                    arc.capacity
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Optimal,
    Infeasible,
}

/// Per-arc flow and total cost. For infeasible problems the flow is the
/// largest routable flow the solver found, at minimum cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub flow: Vec<f64>,
    pub objective: f64,
    pub status: FlowStatus,
}

impl FlowSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == FlowStatus::Optimal
    }

    /// `max_v |outflow(v) - inflow(v) - supply(v)|`.
    pub fn balance_residual(&self, problem: &FlowProblem) -> f64 {
        let mut net = problem.supply.iter().map(|b| -b).collect::<Vec<_>>();
        for (arc, x) in problem.arcs.iter().zip(&self.flow) {
            net[arc.from] += x;
            net[arc.to] -= x;
        }
        net.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Largest capacity violation or negative flow.
    pub fn capacity_violation(&self, problem: &FlowProblem) -> f64 {
        problem
            .arcs
            .iter()
            .zip(&self.flow)
            .map(|(arc, &x)| {
                let over = if arc.is_unbounded() { 0.0 } else { x - arc.capacity };
                over.max(-x)
            })
            .fold(0.0, f64::max)
    }
}

/// Problem and solution together, for debugging dumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowDump {
    #[serde(flatten)]
    pub problem: FlowProblem,
    #[serde(flatten)]
    pub solution: FlowSolution,
}
