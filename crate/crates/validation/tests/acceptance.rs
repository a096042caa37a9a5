//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use modrebal_validation::{random_flow_problem, random_willingness_network};
use modrebal::experiments::{run_f_sweep, run_station_sweep, Metric, SweepConfig, SweepReport};
use modrebal::flow::{brute_force_mcf, check_flow_feasibility, has_negative_residual_cycle};
use modrebal::fluidsim::default_step;
use modrebal::model::check_feasibility_bruteforce;
use modrebal::rebalancer::beta_problem;
use modrebal::{
    compute_imbalance, generate_instance, simulate, solve_mcf, solve_rebalancing, stability_probe,
    Error, FlowStatus, FluidState, GeneratorConfig, Matrix, ProbeConfig, SimConfig,
    StabilityReport, StationNetwork,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn fmt(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn ratio_reproduction(sweep: &SweepReport) -> Outcome {
    let means = sweep.means(Metric::Ratio);
    let in_band = means.iter().all(|m| (0.22..=0.42).contains(m));
    let trend = means.windows(2).all(|w| w[1] <= w[0] + 0.05);
    Outcome::new(
        in_band && trend,
        format!(
            "mean R/V per n {} for n={:?}; in [0.22,0.42]: {in_band}; non-increasing within 0.05: {trend}",
            fmt(&means),
            SweepConfig::default().sizes
        ),
    )
}

fn rebalancing_fraction(sweep: &SweepReport) -> Outcome {
    let at = |key: &str| sweep.stats(key, Metric::RebFraction).unwrap().mean;
    let (small, large) = (at("n=10"), at("n=200"));
    let in_band = (0.12..=0.30).contains(&large);
    let below = large <= small;
    Outcome::new(
        in_band && below,
        format!("mean fraction n=200 {large:.4} (in [0.12,0.30]: {in_band}), n=10 {small:.4} (n=200 <= n=10: {below})"),
    )
}

fn willingness_sweep(sweep: &SweepReport) -> Outcome {
    let drivers = sweep.means(Metric::RAlphaBeta);
    let fraction = sweep.means(Metric::RebFraction);
    let decreasing = drivers.windows(2).all(|w| w[1] < w[0]);
    let f1_band = (55.0..=110.0).contains(&drivers[0]);
    let f4_band = (35.0..=75.0).contains(&drivers[3]);
    let rising = fraction.windows(2).all(|w| w[1] > w[0]);
    let lift = fraction[3] >= 1.3 * fraction[0];
    Outcome::new(
        decreasing && f1_band && f4_band && rising && lift,
        format!(
            "mean R for f=1..4 {} (strictly decreasing: {decreasing}; f=1 in [55,110]: {f1_band}; f=4 in [35,75]: {f4_band}); \
             mean fraction {} (increasing: {rising}; f=4 >= 1.3 f=1: {lift})",
            fmt(&drivers),
            fmt(&fraction)
        ),
    )
}

fn solver_correctness() -> Outcome {
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for seed in 0..200u64 {
        let p = random_flow_problem(seed);
        let sol = solve_mcf(&p).unwrap();
        let oracle = brute_force_mcf(&p).unwrap();
        if sol.status != oracle.status {
            failures.push(format!("seed {seed}: status {:?} vs {:?}", sol.status, oracle.status));
            continue;
        }
        if oracle.status == FlowStatus::Optimal {
            compared += 1;
            let gap = (sol.objective - oracle.objective).abs() / (1.0 + oracle.objective.abs());
            worst = worst.max(gap);
            if gap > 1e-3 {
                failures.push(format!("seed {seed}: objective gap {gap:e}"));
            }
        }
        if has_negative_residual_cycle(&p, &sol.flow) {
            failures.push(format!("seed {seed}: negative residual cycle"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "200 problems, {compared} feasible compared, worst relative gap {worst:.2e}; failures: {failures:?}"
        ),
    )
}

fn feasibility_equivalence() -> Outcome {
    let mut disagreements = Vec::new();
    let mut feasible = 0;
    for seed in 0..500u64 {
        let net = random_willingness_network(seed);
        let d = compute_imbalance(&net);
        let by_flow = check_flow_feasibility(&beta_problem(&net, &d)).unwrap();
        let by_cuts = check_feasibility_bruteforce(&net, &d).unwrap().is_feasible();
        feasible += by_flow as usize;
        if by_flow != by_cuts {
            disagreements.push(seed);
        }
    }
    let mut unit_infeasible = Vec::new();
    for seed in 0..500u64 {
        let net = random_willingness_network(seed).with_uniform_f(1.0).unwrap();
        let d = compute_imbalance(&net);
        let by_flow = check_flow_feasibility(&beta_problem(&net, &d)).unwrap();
        let by_cuts = check_feasibility_bruteforce(&net, &d).unwrap().is_feasible();
        if !(by_flow && by_cuts) {
            unit_infeasible.push(seed);
        }
    }
    Outcome::new(
        disagreements.is_empty() && unit_infeasible.is_empty(),
        format!(
            "random f: 500 networks, {feasible} feasible, disagreements {disagreements:?}; f=1: infeasible {unit_infeasible:?}"
        ),
    )
}

fn constraint_residuals(reports: &[&SweepReport]) -> Outcome {
    let rows: Vec<_> = reports.iter().flat_map(|r| &r.rows).collect();
    let alpha = rows.iter().map(|r| r.alpha_residual).fold(0.0, f64::max);
    let beta = rows.iter().map(|r| r.beta_residual).fold(0.0, f64::max);
    let excess = rows.iter().map(|r| r.capacity_excess).fold(0.0, f64::max);
    Outcome::new(
        alpha <= 1e-7 && beta <= 1e-7 && excess <= 1e-9,
        format!(
            "{} solved instances; max alpha residual {alpha:.2e}, beta residual {beta:.2e}, capacity excess {excess:.2e}",
            rows.len()
        ),
    )
}

struct DriftRun {
    h: f64,
    vehicles: f64,
    drivers: f64,
    bound: f64,
    scale: f64,
}

fn drift_run(net: &StationNetwork, alpha: &Matrix, beta: &Matrix, init: &FluidState, h: f64) -> DriftRun {
    let config = SimConfig {
        sample_every: 1,
        ..SimConfig::new(h, 10.0 * net.max_travel_time())
    };
    let trace = simulate(net, alpha, beta, init.clone(), &config).unwrap();
    let rates = net.lambda().iter().sum::<f64>() + alpha.sum() + beta.sum();
    let first = &trace.samples[0];
    DriftRun {
        h,
        vehicles: trace.max_vehicle_drift(),
        drivers: trace.max_driver_drift(),
        bound: 10.0 * h * rates,
        scale: first.vehicles_total.max(first.drivers_total),
    }
}

/// Drift at or below this multiple of the conserved total is accumulated
/// floating-point rounding.
const ROUNDOFF_FLOOR: f64 = 1e-12;

fn halving_ok(coarse: f64, fine: f64, scale: f64) -> bool {
    let floor = ROUNDOFF_FLOOR * scale;
    if coarse <= floor && fine <= floor {
        return true;
    }
    let r = fine / coarse;
    (0.375..=0.625).contains(&r)
}

fn conservation() -> Outcome {
    let pair = StationNetwork::new(
        vec![1.0, 1.0],
        vec![2.0, 2.0],
        Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        Matrix::filled(2, 1.0),
    )
    .unwrap();
    let zero = Matrix::zeros(2);
    let pair_init = FluidState::new(vec![0.0; 2], vec![2.0; 2], vec![0.0; 2]);

    let net = generate_instance(10, 2024, &GeneratorConfig::default()).unwrap();
    let sol = solve_rebalancing(&net).unwrap();
    let a = &sol.assignment;
    let v = 1.2 * a.v_alpha / 10.0;
    let r = 1.2 * a.r_alpha_beta / 10.0;
    let init = FluidState::new(vec![0.0; 10], vec![v; 10], vec![r; 10]);
    let h = default_step(&net, 0.5);

    let mut pass = true;
    let mut parts = Vec::new();
    let scenarios = [
        ("pair", drift_run(&pair, &zero, &zero, &pair_init, 0.01), drift_run(&pair, &zero, &zero, &pair_init, 0.005)),
        ("n=10", drift_run(&net, &a.alpha, &a.beta, &init, h), drift_run(&net, &a.alpha, &a.beta, &init, h / 2.0)),
    ];
    for (name, coarse, fine) in scenarios {
        let bounded = [&coarse, &fine]
            .iter()
            .all(|d| d.vehicles <= d.bound && d.drivers <= d.bound);
        let halves = halving_ok(coarse.vehicles, fine.vehicles, coarse.scale)
            && halving_ok(coarse.drivers, fine.drivers, coarse.scale);
        pass &= bounded && halves;
        parts.push(format!(
            "{name}: h={:.4} drift V {:.1e} R {:.1e} (bound {:.1e}), h/2 drift V {:.1e} R {:.1e} (bound {:.1e}); \
             within bound: {bounded}; halves or at rounding floor ({ROUNDOFF_FLOOR:e} x total): {halves}",
            coarse.h, coarse.vehicles, coarse.drivers, coarse.bound, fine.vehicles, fine.drivers, fine.bound
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn stability_instances() -> Vec<(u64, StationNetwork, Result<StabilityReport, Error>)> {
    (0..10u64)
        .map(|k| {
            let seed = 7000 + k;
            let net = generate_instance(10, seed, &GeneratorConfig::default()).unwrap();
            let sol = solve_rebalancing(&net).unwrap();
            let config = ProbeConfig {
                slack_v: 0.2,
                slack_r: 0.2,
                perturbation: 0.1,
                seed: k,
                ..ProbeConfig::default()
            };
            let report = stability_probe(&net, &sol, &config);
            (seed, net, report)
        })
        .collect()
}

fn stability(runs: &[(u64, StationNetwork, Result<StabilityReport, Error>)]) -> Outcome {
    let mut failures = Vec::new();
    for (seed, _, report) in runs {
        match report {
            Ok(r) if r.pass => {}
            Ok(r) => failures.push(format!(
                "seed {seed}: cleared {} min v {:.2e} min r {:.2e} conserved {}",
                r.customers_cleared, r.min_idle_vehicles, r.min_idle_drivers, r.conserved
            )),
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }

    let mut rejections = 0;
    let net = &runs[0].1;
    let sol = solve_rebalancing(net).unwrap();
    for (slack_v, slack_r) in [(-0.5, 0.2), (0.0, 0.2), (0.2, 0.0)] {
        let config = ProbeConfig {
            slack_v,
            slack_r,
            ..ProbeConfig::default()
        };
        if matches!(
            stability_probe(net, &sol, &config),
            Err(Error::InsufficientFleet { .. })
        ) {
            rejections += 1;
        }
    }
    let min_v = runs
        .iter()
        .filter_map(|r| r.2.as_ref().ok())
        .map(|r| r.min_idle_vehicles)
        .fold(f64::INFINITY, f64::min);
    let min_r = runs
        .iter()
        .filter_map(|r| r.2.as_ref().ok())
        .map(|r| r.min_idle_drivers)
        .fold(f64::INFINITY, f64::min);
    Outcome::new(
        failures.is_empty() && rejections == 3,
        format!(
            "10 instances n=10, {} passed (min idle v {min_v:.3e}, min idle r {min_r:.3e}); \
             undersized scenarios rejected {rejections}/3; failures: {failures:?}",
            10 - failures.len()
        ),
    )
}

fn drain_timing(runs: &[(u64, StationNetwork, Result<StabilityReport, Error>)]) -> Outcome {
    let mut late = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for (seed, _, report) in runs {
        let Ok(r) = report else {
            late.push(format!("seed {seed}: no report"));
            continue;
        };
        let limit = r.drain_bound + 5.0 * r.h;
        match r.drain_time {
            Some(t) if t <= limit => worst_margin = worst_margin.min(limit - t),
            Some(t) => late.push(format!("seed {seed}: drained at {t:.4} > {limit:.4}")),
            None => late.push(format!("seed {seed}: never drained")),
        }
    }
    Outcome::new(
        late.is_empty(),
        format!("smallest margin to bound + 5h: {worst_margin:.4}; late: {late:?}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let station = run_station_sweep(&SweepConfig::default()).expect("station sweep");
    let f_sweep = run_f_sweep(&SweepConfig {
        sizes: vec![100],
        ..SweepConfig::default()
    })
    .expect("f sweep");
    let probes = stability_instances();

    let outcomes = [
        ("C1 ratio reproduction", ratio_reproduction(&station)),
        ("C2 rebalancing-driver fraction", rebalancing_fraction(&station)),
        ("C3 willingness sweep", willingness_sweep(&f_sweep)),
        ("C4 solver correctness", solver_correctness()),
        ("C5 feasibility equivalence", feasibility_equivalence()),
        ("C6 constraint residuals", constraint_residuals(&[&station, &f_sweep])),
        ("C7 conservation", conservation()),
        ("C8 stability", stability(&probes)),
        ("C9 customer drain timing", drain_timing(&probes)),
    ];

    let mut failed = 0;
    for (name, outcome) in &outcomes {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", outcome.detail);
        failed += (!outcome.pass) as usize;
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1?}",
        outcomes.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
