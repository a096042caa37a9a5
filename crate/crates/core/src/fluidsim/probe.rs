//! Empirical local-stability check around an equilibrium of the fluid model.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{default_step, FluidModel, FluidState, History, RunMetadata, SimTrace};
use crate::error::{Error, Result};
use crate::model::{compute_imbalance, fleet_sizes, RebalanceAssignment, StationNetwork};
use crate::rebalancer::RebalanceSolution;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    /// Vehicles are `V_alpha * (1 + slack_v)`.
    pub slack_v: f64,
    /// Drivers are `R_alpha_beta * (1 + slack_r)`.
    pub slack_r: f64,
    /// Relative size of the initial displacement, in `[0, 0.5)`.
    pub perturbation: f64,
    /// Step size; defaults to a quarter of the shortest travel time, capped at `max_step`.
    pub h: Option<f64>,
    pub max_step: f64,
    /// Defaults to the drain bound plus `5h` plus twice the longest travel time.
    pub horizon: Option<f64>,
    pub seed: u64,
    pub tol_c: f64,
    pub tol_pos: f64,
    /// Upper bound on the number of recorded samples.
    pub max_samples: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            slack_v: 0.2,
            slack_r: 0.2,
            perturbation: 0.1,
            h: None,
            max_step: 0.25,
            horizon: None,
            seed: 0,
            tol_c: 1e-4,
            tol_pos: 1e-6,
            max_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub vehicles: f64,
    pub drivers: f64,
    pub v_alpha: f64,
    pub r_alpha_beta: f64,
    pub h: f64,
    pub horizon: f64,
    pub seed: u64,
    pub initial: FluidState,
    /// `max_i c_i(0) / (mu_i - lambda_i)`.
    pub drain_bound: f64,
    /// Time from which every `c_i` stays at or below `tol_c`; `None` if that
    /// never happens before the horizon.
    pub drain_time: Option<f64>,
    pub customers_cleared: bool,
    pub min_idle_vehicles: f64,
    /// Minimum over stations with nonzero imbalance; stations with zero
    /// imbalance only need `r_i >= 0`.
    pub min_idle_drivers: f64,
    pub vehicles_positive: bool,
    pub drivers_positive: bool,
    pub vehicle_drift: f64,
    pub driver_drift: f64,
    pub vehicle_drift_bound: f64,
    pub driver_drift_bound: f64,
    pub conserved: bool,
    pub pass: bool,
    pub trace: SimTrace,
}

impl StabilityReport {
    pub fn metadata(&self, scenario: &str) -> RunMetadata {
        RunMetadata {
            scenario: scenario.to_string(),
            n: self.initial.c.len(),
            h: self.h,
            horizon: self.horizon,
            seed: Some(self.seed),
            vehicles: self.vehicles,
            drivers: self.drivers,
            history: History::Equilibrium,
            flags: BTreeMap::new(),
        }
    }
}

/// Sizes the fleet from the slacks in `config` and runs [`probe_with_fleet`].
pub fn stability_probe(
    net: &StationNetwork,
    solution: &RebalanceSolution,
    config: &ProbeConfig,
) -> Result<StabilityReport> {
    let a = &solution.assignment;
    let (v_alpha, r_alpha_beta) = fleet_sizes(net, &a.alpha, &a.beta)?;
    probe_with_fleet(
        net,
        a,
        v_alpha * (1.0 + config.slack_v),
        r_alpha_beta * (1.0 + config.slack_r),
        config,
    )
}

/// Starts near an equilibrium with `vehicles` and `drivers` in total and
/// reports whether the customers drain while idle stock stays positive.
///
/// Rejects, without simulating, totals at or below the minimum in-transit
/// masses, and assignments that do not balance the network.
pub fn probe_with_fleet(
    net: &StationNetwork,
    assignment: &RebalanceAssignment,
    vehicles: f64,
    drivers: f64,
    config: &ProbeConfig,
) -> Result<StabilityReport> {
    let (v_alpha, r_alpha_beta) = fleet_sizes(net, &assignment.alpha, &assignment.beta)?;
    if !(vehicles > v_alpha && drivers > r_alpha_beta) {
        return Err(Error::InsufficientFleet {
            vehicles,
            v_alpha,
            drivers,
            r_alpha_beta,
        });
    }
    let d = compute_imbalance(net);
    assignment.check(net, &d)?;
    if !(0.0..0.5).contains(&config.perturbation) {
        return Err(Error::InvalidInput(format!(
            "perturbation {} must lie in [0, 0.5)",
            config.perturbation
        )));
    }

    let n = net.n();
    let h = config.h.unwrap_or_else(|| default_step(net, config.max_step));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let v_eq = (vehicles - v_alpha) / n as f64;
    let r_eq = (drivers - r_alpha_beta) / n as f64;
    let v0 = perturbed(v_eq, config.perturbation, n, &mut rng);
    let r0 = perturbed(r_eq, config.perturbation, n, &mut rng);
    let c0: Vec<f64> = v0
        .iter()
        .map(|&v| config.perturbation * v * rng.random::<f64>())
        .collect();
    let (lambda, mu) = (net.lambda(), net.mu());
    let drain_bound = (0..n)
        .map(|i| c0[i] / (mu[i] - lambda[i]))
        .fold(0.0, f64::max);
    let horizon = config
        .horizon
        .unwrap_or(drain_bound + 5.0 * h + 2.0 * net.max_travel_time());

    let initial = FluidState::new(c0, v0, r0);
    let mut model = FluidModel::new(
        net,
        &assignment.alpha,
        &assignment.beta,
        initial.clone(),
        h,
        History::Equilibrium,
    )?;

    let needs_drivers: Vec<bool> = d
        .as_slice()
        .iter()
        .map(|x| x.abs() > tolerance::EQUALITY)
        .collect();
    let steps = (horizon / h).ceil() as usize;
    let sample_every = steps.div_ceil(config.max_samples.max(1)).max(1);
    let mut trace = SimTrace::start(&model);
    let mut min_v = f64::INFINITY;
    let mut min_r = f64::INFINITY;
    let over = |st: &FluidState| st.c.iter().any(|&c| c > config.tol_c);
    let mut drain_time = if over(model.state()) { None } else { Some(0.0) };
    for s in 1..=steps {
        let before = model.state().clone();
        model.step();
        let st = model.state();
        trace.note_crossings(&before, st);
        min_v = st.v.iter().copied().fold(min_v, f64::min);
        for (&r, &needs) in st.r.iter().zip(&needs_drivers) {
            if needs {
                min_r = min_r.min(r);
            }
        }
        if over(st) {
            drain_time = None;
        } else if drain_time.is_none() {
            drain_time = Some(st.time);
        }
        if s % sample_every == 0 || s == steps {
            trace.record(&model);
        }
    }

    let sum_lambda: f64 = lambda.iter().sum();
    let sum_rates = assignment.alpha.sum() + assignment.beta.sum();
    let vehicle_drift = trace.max_vehicle_drift();
    let driver_drift = trace.max_driver_drift();
    let vehicle_drift_bound = 10.0 * h * sum_lambda;
    let driver_drift_bound = 10.0 * h * sum_rates;
    let conserved = vehicle_drift <= vehicle_drift_bound && driver_drift <= driver_drift_bound;
    let customers_cleared = drain_time.is_some();
    let vehicles_positive = min_v >= config.tol_pos;
    let drivers_positive = min_r >= config.tol_pos;
    Ok(StabilityReport {
        vehicles,
        drivers,
        v_alpha,
        r_alpha_beta,
        h,
        horizon,
        seed: config.seed,
        initial,
        drain_bound,
        drain_time,
        customers_cleared,
        min_idle_vehicles: min_v,
        min_idle_drivers: min_r,
        vehicles_positive,
        drivers_positive,
        vehicle_drift,
        driver_drift,
        vehicle_drift_bound,
        driver_drift_bound,
        conserved,
        pass: customers_cleared && vehicles_positive && drivers_positive && conserved,
        trace,
    })
}

/// `base * (1 + size * z_i)` with `z` uniform, centred to zero mean so the
/// total is unchanged.
fn perturbed(base: f64, size: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = u.iter().sum::<f64>() / n as f64;
    u.iter().map(|x| base * (1.0 + size * (x - mean))).collect()
}
