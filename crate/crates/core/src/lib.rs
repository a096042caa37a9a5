//! Optimal rebalancing of vehicles and drivers in a mobility-on-demand
//! system modelled as a fluid network of stations.
//!
//! The pipeline is:
//!
//! 1. [`model`]: station networks, imbalance rates, fleet-size formulas,
//!    instance generation and JSON file formats.
//! 2. [`flow`]: a real-valued capacitated minimum-cost-flow solver, a
//!    max-flow feasibility check and small brute-force oracles.
//! 3. [`rebalancer`]: the decoupled vehicle (`alpha`) and driver (`beta`)
//!    programs and the resulting minimum fleet and driver counts.
//! 4. [`fluidsim`]: a fixed-step integrator for the time-delayed,
//!    Heaviside-gated fluid dynamics, used to check conservation and
//!    stability of the computed assignments.
//! 5. [`experiments`]: seeded station-count and taxi-willingness sweeps.

pub mod error;
pub mod experiments;
pub mod flow;
pub mod fluidsim;
pub mod model;
pub mod rebalancer;
pub mod tolerance;

pub use error::{Error, Result};
pub use flow::{solve_mcf, Arc, FlowProblem, FlowSolution, FlowStatus};
pub use model::{
    compute_imbalance, fleet_sizes, generate_instance, GeneratorConfig, ImbalanceVector, Matrix,
    RebalanceAssignment, StationNetwork,
};
pub use rebalancer::{solve_alpha, solve_beta, solve_rebalancing, BetaInfeasibility, RebalanceSolution};
pub use fluidsim::{
    simulate, stability_probe, FluidModel, FluidState, History, ProbeConfig, SimConfig, SimTrace,
    StabilityReport,
};
