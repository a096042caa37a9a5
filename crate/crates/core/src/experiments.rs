//! Seeded sweeps over station counts and taxi-willingness values.
//!
//! Trial seeds follow `base_seed * 10000 + n * 100 + trial`, so a sweep is
//! reproducible from its config alone and the f-sweep reuses the same
//! instances for every `f`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{compute_imbalance, generate_instance, GeneratorConfig, StationNetwork};
use crate::rebalancer::solve_rebalancing;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub trials_per_size: usize,
    pub base_seed: u64,
    pub f_values: Vec<f64>,
    pub generator: GeneratorConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: vec![10, 25, 50, 100, 200],
            trials_per_size: 20,
            base_seed: 0,
            f_values: vec![1.0, 2.0, 3.0, 4.0],
            generator: GeneratorConfig::default(),
        }
    }
}

impl SweepConfig {
    fn check(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidInput(format!(
                "sweep sizes must be nonempty and at least 2, got {:?}",
                self.sizes
            )));
        }
        if self.trials_per_size == 0 {
            return Err(Error::InvalidInput("trials_per_size must be at least 1".into()));
        }
        if self.trials_per_size > 100 {
            return Err(Error::InvalidInput(
                "trials_per_size above 100 would collide in the seed schedule".into(),
            ));
        }
        Ok(())
    }

    pub fn trial_seed(&self, n: usize, trial: usize) -> u64 {
        self.base_seed
            .wrapping_mul(10_000)
            .wrapping_add(n as u64 * 100)
            .wrapping_add(trial as u64)
    }
}

/// One solved instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub group_key: String,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub f: f64,
    pub v_alpha: f64,
    pub r_alpha_beta: f64,
    /// `r_alpha_beta / v_alpha`.
    pub ratio: f64,
    /// `objective_alpha / r_alpha_beta`.
    pub reb_fraction: f64,
    pub objective_alpha: f64,
    pub objective_beta: f64,
    /// In-transit mass of customer-carrying vehicles, `sum T_ij lambda_i p_ij`.
    pub customer_mass: f64,
    pub alpha_residual: f64,
    pub beta_residual: f64,
    pub capacity_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    VAlpha,
    RAlphaBeta,
    Ratio,
    RebFraction,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::VAlpha, Metric::RAlphaBeta, Metric::Ratio, Metric::RebFraction];

    pub fn name(self) -> &'static str {
        match self {
            Metric::VAlpha => "v_alpha",
            Metric::RAlphaBeta => "r_alpha_beta",
            Metric::Ratio => "ratio",
            Metric::RebFraction => "reb_fraction",
        }
    }

    pub fn of(self, row: &TrialRecord) -> f64 {
        match self {
            Metric::VAlpha => row.v_alpha,
            Metric::RAlphaBeta => row.r_alpha_beta,
            Metric::Ratio => row.ratio,
            Metric::RebFraction => row.reb_fraction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Trials ordered by group, then trial index.
    pub rows: Vec<TrialRecord>,
    /// Group keys in sweep order.
    pub groups: Vec<String>,
}

impl SweepReport {
    pub fn group(&self, key: &str) -> impl Iterator<Item = &TrialRecord> {
        let key = key.to_owned();
        self.rows.iter().filter(move |r| r.group_key == key)
    }

    pub fn stats(&self, key: &str, metric: Metric) -> Option<Stats> {
        let values: Vec<f64> = self.group(key).map(|r| metric.of(r)).collect();
        if values.is_empty() {
            return None;
        }
        Some(Stats {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Per-group means of `metric`, in sweep order.
    pub fn means(&self, metric: Metric) -> Vec<f64> {
        self.groups
            .iter()
            .filter_map(|g| self.stats(g, metric).map(|s| s.mean))
            .collect()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "group_key", "trial", "seed", "n", "f", "v_alpha", "r_alpha_beta", "ratio", "reb_fraction",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.group_key.clone(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.n.to_string(),
                r.f.to_string(),
                r.v_alpha.to_string(),
                r.r_alpha_beta.to_string(),
                r.ratio.to_string(),
                r.reb_fraction.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["group_key", "metric", "mean", "min", "max"])?;
        for g in &self.groups {
            for metric in Metric::ALL {
                if let Some(s) = self.stats(g, metric) {
                    w.write_record([
                        g.clone(),
                        metric.name().to_string(),
                        s.mean.to_string(),
                        s.min.to_string(),
                        s.max.to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Whitespace-separated columns for plotting: the group's `x` value
    /// followed by mean/min/max of each metric.
    pub fn write_gnuplot(&self, mut out: impl Write, x_label: &str) -> Result<()> {
        write!(out, "# {x_label}")?;
        for metric in Metric::ALL {
            let m = metric.name();
            write!(out, " {m}_mean {m}_min {m}_max")?;
        }
        writeln!(out)?;
        for g in &self.groups {
            let x = g.rsplit('=').next().unwrap_or(g);
            write!(out, "{x}")?;
            for metric in Metric::ALL {
                if let Some(s) = self.stats(g, metric) {
                    write!(out, " {} {} {}", s.mean, s.min, s.max)?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Writes `<prefix>_trials.csv`, `<prefix>_summary.csv` and
    /// `<prefix>.dat` into `dir`.
    pub fn write_all(&self, dir: &Path, prefix: &str, x_label: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(File::create(dir.join(format!("{prefix}_trials.csv")))?)?;
        self.write_summary_csv(File::create(dir.join(format!("{prefix}_summary.csv")))?)?;
        self.write_gnuplot(File::create(dir.join(format!("{prefix}.dat")))?, x_label)?;
        Ok(())
    }
}

fn solve_trial(net: &StationNetwork, group_key: String, trial: usize, seed: u64, f: f64) -> Result<TrialRecord> {
    let d = compute_imbalance(net);
    let sol = solve_rebalancing(net)?;
    let a = &sol.assignment;
    let customer_mass = a.v_alpha - sol.objective_alpha;
    Ok(TrialRecord {
        group_key,
        trial,
        seed,
        n: net.n(),
        f,
        v_alpha: a.v_alpha,
        r_alpha_beta: a.r_alpha_beta,
        ratio: sol.driver_vehicle_ratio(),
        reb_fraction: sol.rebalancing_fraction(),
        objective_alpha: sol.objective_alpha,
        objective_beta: sol.objective_beta,
        customer_mass,
        alpha_residual: a.alpha_residual(&d),
        beta_residual: a.beta_residual(&d),
        capacity_excess: a.capacity_excess(net),
    })
}

fn collect_ordered(results: Vec<Result<TrialRecord>>, groups: Vec<String>) -> Result<SweepReport> {
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { rows, groups })
}

/// Station-count sweep on generated instances.
pub fn run_station_sweep(config: &SweepConfig) -> Result<SweepReport> {
    run_station_sweep_with(config, |n, seed| generate_instance(n, seed, &config.generator))
}

/// Station-count sweep with a custom instance source, called as
/// `make(n, seed)`.
pub fn run_station_sweep_with<F>(config: &SweepConfig, make: F) -> Result<SweepReport>
where
    F: Fn(usize, u64) -> Result<StationNetwork> + Sync,
{
    config.check()?;
    let keys: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.trials_per_size).map(move |t| (n, t)))
        .collect();
    let results = keys
        .par_iter()
        .map(|&(n, trial)| {
            let seed = config.trial_seed(n, trial);
            let net = make(n, seed)?;
            let f = uniform_f(&net);
            solve_trial(&net, format!("n={n}"), trial, seed, f)
        })
        .collect();
    let groups = dedup(config.sizes.iter().map(|n| format!("n={n}")));
    collect_ordered(results, groups)
}

/// Taxi-willingness sweep: the same instances solved for every `f` in
/// `config.f_values`. Requires exactly one station count.
pub fn run_f_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.check()?;
    let [n] = config.sizes[..] else {
        return Err(Error::InvalidInput(format!(
            "f-sweep takes exactly one station count, got {:?}",
            config.sizes
        )));
    };
    if config.f_values.is_empty() || config.f_values.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::InvalidInput(format!(
            "f values must be nonempty, finite and nonnegative, got {:?}",
            config.f_values
        )));
    }
    let instances = (0..config.trials_per_size)
        .into_par_iter()
        .map(|trial| generate_instance(n, config.trial_seed(n, trial), &config.generator))
        .collect::<Result<Vec<_>>>()?;
    let keys: Vec<(f64, usize)> = config
        .f_values
        .iter()
        .flat_map(|&f| (0..config.trials_per_size).map(move |t| (f, t)))
        .collect();
    let results = keys
        .par_iter()
        .map(|&(f, trial)| {
            let net = instances[trial].with_uniform_f(f)?;
            solve_trial(&net, format!("f={f}"), trial, config.trial_seed(n, trial), f)
        })
        .collect();
    let groups = dedup(config.f_values.iter().map(|f| format!("f={f}")));
    collect_ordered(results, groups)
}

fn uniform_f(net: &StationNetwork) -> f64 {
    let f = net.f().as_slice();
    if f.iter().all(|&x| x == f[0]) {
        f[0]
    } else {
        f64::NAN
    }
}

fn dedup(keys: impl Iterator<Item = String>) -> Vec<String> {
    let mut seen = BTreeMap::new();
    keys.filter(|k| seen.insert(k.clone(), ()).is_none()).collect()
}
