use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modrebal::experiments::{run_f_sweep, run_station_sweep, Metric, SweepConfig, SweepReport};
use modrebal::fluidsim::probe_with_fleet;
use modrebal::model::io::{load_assignment, load_instance, save_assignment, save_instance, AssignmentFile};
use modrebal::model::{check_feasibility_bruteforce, CutFeasibility, BRUTE_FORCE_MAX_STATIONS};
use modrebal::{compute_imbalance, generate_instance, solve_rebalancing, Error, GeneratorConfig, ProbeConfig};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "modrebal", version, about = "Vehicle and driver rebalancing for station networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random Euclidean instance
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        env_size: f64,
        #[arg(long, default_value_t = 0.05)]
        lambda_max: f64,
        /// Taxi willingness applied to every pair
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        /// Service rate as a multiple of the arrival rate
        #[arg(long, default_value_t = 2.0)]
        mu_factor: f64,
    },
    /// Solve the vehicle and driver rebalancing programs
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate the fluid model near equilibrium and report stability
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        /// Total vehicles
        #[arg(long = "V")]
        vehicles: f64,
        /// Total drivers
        #[arg(long = "R")]
        drivers: f64,
        /// Step size (default: a quarter of the shortest trip, at most 0.25)
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        trace_out: PathBuf,
        /// Run metadata (default: trace path with a .meta.json extension)
        #[arg(long)]
        meta_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        perturbation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Station-count sweep
    Sweep {
        /// JSON sweep configuration; defaults apply to missing fields
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Taxi-willingness sweep on one station count
    Fsweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BetaInfeasible(_) => 3,
        Error::InsufficientFleet { .. } => 4,
        _ => 2,
    }
}

fn run_gen(
    n: usize,
    seed: u64,
    out: &Path,
    env_size: f64,
    lambda_max: f64,
    f: f64,
    mu_factor: f64,
) -> modrebal::Result<()> {
    let config = GeneratorConfig {
        env_size,
        lambda_max,
        f,
        mu_factor,
        ..GeneratorConfig::default()
    };
    let net = generate_instance(n, seed, &config)?;
    save_instance(&net, out)?;
    println!("wrote {} stations to {}", n, out.display());
    Ok(())
}

fn run_solve(instance: &Path, out: &Path) -> modrebal::Result<()> {
    let net = load_instance(instance)?;
    let sol = match solve_rebalancing(&net) {
        Ok(sol) => sol,
        Err(err) => {
            if matches!(err, Error::BetaInfeasible(_)) && net.n() <= BRUTE_FORCE_MAX_STATIONS {
                let d = compute_imbalance(&net);
                if let Ok(CutFeasibility::Violated {
                    stations,
                    deficit,
                    cut_capacity,
                }) = check_feasibility_bruteforce(&net, &d)
                {
                    let labels: Vec<String> = stations.iter().map(|s| (s + 1).to_string()).collect();
                    eprintln!(
                        "witness: S={{{}}} needs {deficit} drivers per unit time but taxi capacity out of S is {cut_capacity}",
                        labels.join(",")
                    );
                }
            }
            return Err(err);
        }
    };
    save_assignment(&AssignmentFile::from_solution(&sol, net.meta().clone()), out)?;
    println!(
        "V_alpha={:.6} R={:.6} ratio={:.6} reb_fraction={:.6}",
        sol.assignment.v_alpha,
        sol.assignment.r_alpha_beta,
        sol.driver_vehicle_ratio(),
        sol.rebalancing_fraction()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    instance: &Path,
    assignment: &Path,
    vehicles: f64,
    drivers: f64,
    h: Option<f64>,
    horizon: Option<f64>,
    trace_out: &Path,
    meta_out: Option<&Path>,
    perturbation: f64,
    seed: u64,
) -> modrebal::Result<()> {
    let net = load_instance(instance)?;
    let file = load_assignment(assignment)?;
    if file.alpha.dim() != net.n() {
        return Err(Error::InvalidInput(format!(
            "assignment has {} stations, instance has {}",
            file.alpha.dim(),
            net.n()
        )));
    }
    let config = ProbeConfig {
        perturbation,
        h,
        horizon,
        seed,
        ..ProbeConfig::default()
    };
    let report = probe_with_fleet(&net, &file.assignment(), vehicles, drivers, &config)?;
    report.trace.save_csv(trace_out)?;

    let mut meta = report.metadata("stability probe");
    meta.flags = [
        ("instance", json!(instance.display().to_string())),
        ("assignment", json!(assignment.display().to_string())),
        ("V", json!(vehicles)),
        ("R", json!(drivers)),
        ("h", json!(h)),
        ("horizon", json!(horizon)),
        ("perturbation", json!(perturbation)),
        ("seed", json!(seed)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let meta_path = meta_out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| trace_out.with_extension("meta.json"));
    meta.save(&meta_path)?;

    println!(
        "stability: {} (customers cleared {} at t={}, bound {:.6}; min idle vehicles {:.6}, drivers {:.6}; \
         drift V {:.3e} of {:.3e}, R {:.3e} of {:.3e})",
        if report.pass { "PASS" } else { "FAIL" },
        report.customers_cleared,
        report.drain_time.map_or("never".into(), |t| format!("{t:.6}")),
        report.drain_bound + 5.0 * report.h,
        report.min_idle_vehicles,
        report.min_idle_drivers,
        report.vehicle_drift,
        report.vehicle_drift_bound,
        report.driver_drift,
        report.driver_drift_bound,
    );
    Ok(())
}

/// Reads a sweep configuration; `default_sizes` fills in a missing `sizes` field.
fn read_config(path: Option<&Path>, default_sizes: &[usize]) -> modrebal::Result<SweepConfig> {
    let mut value: Value = match path {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => json!({}),
    };
    let Some(obj) = value.as_object_mut() else {
        return Err(Error::InvalidInput("sweep configuration must be a JSON object".into()));
    };
    obj.entry("sizes").or_insert_with(|| json!(default_sizes));
    Ok(serde_json::from_value(value)?)
}

fn write_sweep(
    report: &SweepReport,
    config: &SweepConfig,
    out_dir: &Path,
    prefix: &str,
    x_label: &str,
    config_path: Option<&Path>,
) -> modrebal::Result<()> {
    report.write_all(out_dir, prefix, x_label)?;
    let run = json!({
        "command": prefix,
        "config": config,
        "flags": {
            "config": config_path.map(|p| p.display().to_string()),
            "out_dir": out_dir.display().to_string(),
        },
    });
    std::fs::write(
        out_dir.join(format!("{prefix}_run.json")),
        serde_json::to_string_pretty(&run)?,
    )?;
    for group in &report.groups {
        let stats = |m| report.stats(group, m).map_or(f64::NAN, |s| s.mean);
        println!(
            "{group}: V_alpha={:.4} R={:.4} ratio={:.4} reb_fraction={:.4}",
            stats(Metric::VAlpha),
            stats(Metric::RAlphaBeta),
            stats(Metric::Ratio),
            stats(Metric::RebFraction),
        );
    }
    Ok(())
}

fn run(cli: Cli) -> modrebal::Result<()> {
    match cli.command {
        Command::Gen {
            n,
            seed,
            out,
            env_size,
            lambda_max,
            f,
            mu_factor,
        } => run_gen(n, seed, &out, env_size, lambda_max, f, mu_factor),
        Command::Solve { instance, out } => run_solve(&instance, &out),
        Command::Simulate {
            instance,
            assignment,
            vehicles,
            drivers,
            h,
            horizon,
            trace_out,
            meta_out,
            perturbation,
            seed,
        } => run_simulate(
            &instance,
            &assignment,
            vehicles,
            drivers,
            h,
            horizon,
            &trace_out,
            meta_out.as_deref(),
            perturbation,
            seed,
        ),
        Command::Sweep { config, out_dir } => {
            let cfg = read_config(config.as_deref(), &SweepConfig::default().sizes)?;
            let report = run_station_sweep(&cfg)?;
            write_sweep(&report, &cfg, &out_dir, "sweep", "n", config.as_deref())
        }
        Command::Fsweep { config, out_dir } => {
            let cfg = read_config(config.as_deref(), &[100])?;
            let report = run_f_sweep(&cfg)?;
            write_sweep(&report, &cfg, &out_dir, "fsweep", "f", config.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
