//! Time-delayed fluid model of customers, idle vehicles and idle drivers
//! under a fixed rebalancing assignment.
//!
//! Integration is explicit Euler with step `h`. Each directed pair of
//! stations carrying any flow owns a delay line of `max(1, round(T/h))`
//! slots; a slot holds the mass that departed during one step and is
//! delivered exactly that many steps later. Departures that would overdraw
//! a queue are scaled down before they are written, so vehicles and drivers
//! are conserved up to roundoff.

mod probe;
mod trace;

pub use probe::{probe_with_fleet, stability_probe, ProbeConfig, StabilityReport};
pub use trace::{Crossing, Quantity, RunMetadata, Sample, SimTrace, ZeroCrossing, MAX_EVENTS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Matrix, StationNetwork};

/// Idle stock at each station plus the simulation clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidState {
    pub c: Vec<f64>,
    pub v: Vec<f64>,
    pub r: Vec<f64>,
    pub time: f64,
}

impl FluidState {
    pub fn new(c: Vec<f64>, v: Vec<f64>, r: Vec<f64>) -> Self {
        FluidState { c, v, r, time: 0.0 }
    }

    fn check(&self, n: usize) -> Result<()> {
        for (name, xs) in [("c", &self.c), ("v", &self.v), ("r", &self.r)] {
            if xs.len() != n {
                return Err(Error::InvalidState(format!(
                    "{name} has length {}, expected {n}",
                    xs.len()
                )));
            }
            if let Some(i) = xs.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidState(format!(
                    "{name}[{}] = {} is not a nonnegative number",
                    i + 1,
                    xs[i]
                )));
            }
        }
        if !self.time.is_finite() || self.time < 0.0 {
            return Err(Error::InvalidState(format!("time = {}", self.time)));
        }
        Ok(())
    }
}

/// What the delay lines hold before time zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum History {
    /// Nothing in transit.
    #[default]
    Empty,
    /// Every line carries the equilibrium rates: customers `λ_i p_ij`,
    /// rebalancing vehicles `α_ij`, riding drivers `β_ij`.
    Equilibrium,
}

/// Mass that left a station along one lane during one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Transit {
    customer: f64,
    rebalancing: f64,
    taxi: f64,
}

#[derive(Debug, Clone)]
struct Lane {
    to: usize,
    slots: Vec<Transit>,
}

/// The fluid model bound to a network and assignment, advanced one step at a time.
#[derive(Debug, Clone)]
pub struct FluidModel<'a> {
    net: &'a StationNetwork,
    alpha: &'a Matrix,
    beta: &'a Matrix,
    h: f64,
    lanes: Vec<Lane>,
    /// Lane ids leaving each station.
    outgoing: Vec<Vec<usize>>,
    /// Sum of each row of `p`.
    p_row: Vec<f64>,
    state: FluidState,
    steps: usize,
}

impl<'a> FluidModel<'a> {
    pub fn new(
        net: &'a StationNetwork,
        alpha: &'a Matrix,
        beta: &'a Matrix,
        init: FluidState,
        h: f64,
        history: History,
    ) -> Result<Self> {
        let n = net.n();
        check_rates("alpha", alpha, n)?;
        check_rates("beta", beta, n)?;
        init.check(n)?;
        check_step(net, h)?;

        let mut lanes = Vec::new();
        let mut outgoing = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let p = net.p()[(i, j)];
                let (a, b) = (alpha[(i, j)], beta[(i, j)]);
                if p == 0.0 && a == 0.0 && b == 0.0 {
                    continue;
                }
                let delay = delay_steps(net.travel_time()[(i, j)], h);
                let fill = match history {
                    History::Empty => Transit::default(),
                    History::Equilibrium => {
                        let lam = net.lambda()[i];
                        Transit {
                            customer: lam * p * h,
                            rebalancing: a * h,
                            taxi: b.min(net.f()[(i, j)] * p * lam) * h,
                        }
                    }
                };
                outgoing[i].push(lanes.len());
                lanes.push(Lane {
                    to: j,
                    slots: vec![fill; delay],
                });
            }
        }
        let p_row = (0..n).map(|i| net.p().row(i).iter().sum()).collect();
        Ok(FluidModel {
            net,
            alpha,
            beta,
            h,
            lanes,
            outgoing,
            p_row,
            state: init,
            steps: 0,
        })
    }

    pub fn state(&self) -> &FluidState {
        &self.state
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    /// Vehicle mass in the delay lines (customer-carrying and rebalancing).
    pub fn vehicles_in_transit(&self) -> f64 {
        self.lanes
            .iter()
            .flat_map(|l| &l.slots)
            .map(|s| s.customer + s.rebalancing)
            .sum()
    }

    /// Driver mass in the delay lines (on rebalancing vehicles and riding along).
    pub fn drivers_in_transit(&self) -> f64 {
        self.lanes
            .iter()
            .flat_map(|l| &l.slots)
            .map(|s| s.rebalancing + s.taxi)
            .sum()
    }

    pub fn total_vehicles(&self) -> f64 {
        self.state.v.iter().sum::<f64>() + self.vehicles_in_transit()
    }

    pub fn total_drivers(&self) -> f64 {
        self.state.r.iter().sum::<f64>() + self.drivers_in_transit()
    }

    /// Advances the state by one step of length `h`.
    pub fn step(&mut self) {
        let n = self.net.n();
        let h = self.h;
        let lambda = self.net.lambda();
        let mu = self.net.mu();

        let mut in_v = vec![0.0; n];
        let mut in_r = vec![0.0; n];
        let mut arriving = Vec::with_capacity(self.lanes.len());
        for lane in &self.lanes {
            let slot = self.steps % lane.slots.len();
            let t = lane.slots[slot];
            in_v[lane.to] += t.customer + t.rebalancing;
            in_r[lane.to] += t.rebalancing + t.taxi;
            arriving.push(slot);
        }

        let st = &mut self.state;
        for i in 0..n {
            let (c, v, r) = (st.c[i], st.v[i], st.r[i]);
            let has_v = v > 0.0;
            let has_r = r > 0.0;

            let mut served = if !has_v || self.p_row[i] <= 0.0 {
                0.0
            } else if c > 0.0 {
                mu[i] * h
            } else {
                lambda[i] * h
            };
            served = served.min(c + lambda[i] * h);

            let gamma: f64 = if has_v && has_r {
                self.outgoing[i]
                    .iter()
                    .map(|&l| self.alpha[(i, self.lanes[l].to)] * h)
                    .sum()
            } else {
                0.0
            };
            let v_avail = v + in_v[i];
            let v_out = served + gamma;
            let s_v = if v_out > v_avail { v_avail / v_out } else { 1.0 };
            served *= s_v;

            let trips = |j: usize| {
                if served > 0.0 {
                    served * self.net.p()[(i, j)] / self.p_row[i]
                } else {
                    0.0
                }
            };
            let mut taxi_total = 0.0;
            if has_v && has_r {
                for &l in &self.outgoing[i] {
                    let j = self.lanes[l].to;
                    taxi_total += (self.beta[(i, j)] * h).min(self.net.f()[(i, j)] * trips(j));
                }
            }
            let r_avail = r + in_r[i];
            let r_out = gamma * s_v + taxi_total;
            let s_r = if r_out > r_avail { r_avail / r_out } else { 1.0 };

            let mut reb_total = 0.0;
            let mut taxi_sent = 0.0;
            for &l in &self.outgoing[i] {
                let j = self.lanes[l].to;
                let trips = trips(j);
                let (reb, taxi) = if has_v && has_r {
                    (
                        self.alpha[(i, j)] * h * s_v * s_r,
                        (self.beta[(i, j)] * h).min(self.net.f()[(i, j)] * trips) * s_r,
                    )
                } else {
                    (0.0, 0.0)
                };
                reb_total += reb;
                taxi_sent += taxi;
                let lane = &mut self.lanes[l];
                lane.slots[arriving[l]] = Transit {
                    customer: trips,
                    rebalancing: reb,
                    taxi,
                };
            }

            st.c[i] = (c + lambda[i] * h - served).max(0.0);
            st.v[i] = (v_avail - served - reb_total).max(0.0);
            st.r[i] = (r_avail - reb_total - taxi_sent).max(0.0);
        }
        self.steps += 1;
        st.time = self.steps as f64 * h;
    }
}

/// Number of steps a trip of duration `t` spends in transit; never below one.
pub fn delay_steps(t: f64, h: f64) -> usize {
    ((t / h).round() as usize).max(1)
}

fn check_rates(name: &str, m: &Matrix, n: usize) -> Result<()> {
    if m.dim() != n {
        return Err(Error::InvalidInput(format!(
            "{name} is {0}x{0}, network has {n} stations",
            m.dim()
        )));
    }
    for ((i, j), x) in m.iter() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidInput(format!(
                "{name}[{}][{}] = {x} is not a nonnegative rate",
                i + 1,
                j + 1
            )));
        }
    }
    Ok(())
}

/// Rejects step sizes that are not positive or exceed a quarter of the
/// shortest positive travel time.
pub fn check_step(net: &StationNetwork, h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidInput(format!("step h = {h} must be positive")));
    }
    if let Some(t_min) = net.min_positive_travel_time() {
        if h > t_min / 4.0 {
            return Err(Error::InvalidInput(format!(
                "step h = {h} exceeds a quarter of the shortest travel time {t_min}"
            )));
        }
    }
    Ok(())
}

/// Largest admissible step for `net`, capped at `cap`.
pub fn default_step(net: &StationNetwork, cap: f64) -> f64 {
    net.min_positive_travel_time()
        .map_or(cap, |t| (t / 4.0).min(cap))
}

/// Settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub h: f64,
    pub horizon: f64,
    /// Record a sample every this many steps (the final state is always recorded).
    pub sample_every: usize,
    pub history: History,
}

impl SimConfig {
    pub fn new(h: f64, horizon: f64) -> Self {
        SimConfig {
            h,
            horizon,
            sample_every: 1,
            history: History::Empty,
        }
    }
}

/// Runs the model from `init` for `config.horizon` time units.
pub fn simulate(
    net: &StationNetwork,
    alpha: &Matrix,
    beta: &Matrix,
    init: FluidState,
    config: &SimConfig,
) -> Result<SimTrace> {
    let min_horizon = 2.0 * net.max_travel_time();
    if !(config.horizon >= min_horizon) {
        return Err(Error::InvalidInput(format!(
            "horizon {} is shorter than twice the longest travel time ({min_horizon})",
            config.horizon
        )));
    }
    if config.sample_every == 0 {
        return Err(Error::InvalidInput("sample_every must be at least 1".into()));
    }
    let mut model = FluidModel::new(net, alpha, beta, init, config.h, config.history)?;
    let steps = (config.horizon / config.h).ceil() as usize;
    let mut trace = SimTrace::start(&model);
    for s in 1..=steps {
        let before = model.state().clone();
        model.step();
        trace.note_crossings(&before, model.state());
        if s % config.sample_every == 0 || s == steps {
            trace.record(&model);
        }
    }
    Ok(trace)
}
