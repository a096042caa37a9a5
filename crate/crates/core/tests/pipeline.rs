mod common;

use common::hand_pair;
use modrebal::experiments::{run_f_sweep, run_station_sweep, SweepConfig};
use modrebal::model::io::{
    load_assignment, load_instance, save_assignment, save_instance, AssignmentFile,
};
use modrebal::model::{check_feasibility_bruteforce, CutFeasibility};
use modrebal::{
    compute_imbalance, generate_instance, solve_rebalancing, Error, GeneratorConfig,
};

#[test]
fn generated_instance_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = GeneratorConfig::default();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    save_instance(&generate_instance(10, 7, &cfg).unwrap(), &a).unwrap();
    save_instance(&generate_instance(10, 7, &cfg).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let net = load_instance(&a).unwrap();
    assert_eq!(net.meta().seed, Some(7));
    assert_eq!(net.meta().generator_config.as_ref(), Some(&cfg));
}

#[test]
fn hand_pair_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("pair.json");
    save_instance(&hand_pair(1.0), &inst).unwrap();
    let net = load_instance(&inst).unwrap();

    let d = compute_imbalance(&net);
    assert!((d[0] + 0.3).abs() < 1e-15 && (d[1] - 0.3).abs() < 1e-15);

    let sol = solve_rebalancing(&net).unwrap();
    let out = dir.path().join("assignment.json");
    save_assignment(&AssignmentFile::from_solution(&sol, net.meta().clone()), &out).unwrap();
    let file = load_assignment(&out).unwrap();
    assert!((file.v_alpha - 8.0).abs() < 1e-12);
    assert!((file.r_alpha_beta - 6.0).abs() < 1e-12);
    assert!((file.alpha[(1, 0)] - 0.3).abs() < 1e-15);
    assert!((file.beta[(0, 1)] - 0.3).abs() < 1e-15);
    file.assignment().check(&net, &d).unwrap();
}

#[test]
fn half_willingness_reports_the_violated_cut() {
    let net = hand_pair(0.5);
    let err = solve_rebalancing(&net).unwrap_err();
    let Error::BetaInfeasible(info) = &err else {
        panic!("expected infeasibility, got {err}");
    };
    assert_eq!(info.stations, vec![0]);
    assert!((info.required - 0.3).abs() < 1e-12);
    assert!((info.max_flow - 0.2).abs() < 1e-12);
    assert!(err.to_string().contains("S={1}"), "{err}");

    match check_feasibility_bruteforce(&net, &compute_imbalance(&net)).unwrap() {
        CutFeasibility::Violated { stations, .. } => assert_eq!(stations, vec![0]),
        CutFeasibility::Feasible => panic!("brute force missed the cut"),
    }
}

#[test]
fn sweep_reports_are_reproducible() {
    let config = SweepConfig {
        sizes: vec![5, 8],
        trials_per_size: 3,
        base_seed: 4,
        ..SweepConfig::default()
    };
    let render = || {
        let mut buf = Vec::new();
        run_station_sweep(&config).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    let first = render();
    assert_eq!(first, render());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("group_key,trial,seed,n,f,v_alpha,r_alpha_beta,ratio,reb_fraction"));
    assert_eq!(text.lines().count(), 1 + 6);
}

#[test]
fn f_sweep_writes_all_reports() {
    let config = SweepConfig {
        sizes: vec![12],
        trials_per_size: 2,
        ..SweepConfig::default()
    };
    let report = run_f_sweep(&config).unwrap();
    assert_eq!(report.groups, vec!["f=1", "f=2", "f=3", "f=4"]);
    for trial in 0..2 {
        let per_f: Vec<_> = report.rows.iter().filter(|r| r.trial == trial).collect();
        assert!(per_f.windows(2).all(|w| w[1].r_alpha_beta <= w[0].r_alpha_beta + 1e-9));
        assert!(per_f.iter().all(|r| r.seed == per_f[0].seed));
    }

    let dir = tempfile::tempdir().unwrap();
    report.write_all(dir.path(), "fsweep", "f").unwrap();
    for name in ["fsweep_trials.csv", "fsweep_summary.csv", "fsweep.dat"] {
        assert!(dir.path().join(name).metadata().unwrap().len() > 0, "{name}");
    }
    let summary = std::fs::read_to_string(dir.path().join("fsweep_summary.csv")).unwrap();
    assert!(summary.starts_with("group_key,metric,mean,min,max"));
}
