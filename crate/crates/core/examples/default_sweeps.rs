//! Runs the default station-count and f sweeps and prints group means.

use std::time::Instant;

use modrebal::experiments::{run_f_sweep, run_station_sweep, Metric, SweepConfig};

fn main() -> modrebal::Result<()> {
    let start = Instant::now();
    let config = SweepConfig::default();
    let report = run_station_sweep(&config)?;
    for g in &report.groups {
        let r = report.stats(g, Metric::Ratio).unwrap();
        let fr = report.stats(g, Metric::RebFraction).unwrap();
        let v = report.stats(g, Metric::VAlpha).unwrap();
        let d = report.stats(g, Metric::RAlphaBeta).unwrap();
        println!(
            "{g:>6}  V={:8.2} R={:8.2} ratio={:.3} [{:.3},{:.3}] reb={:.3}",
            v.mean, d.mean, r.mean, r.min, r.max, fr.mean
        );
    }
    println!("station sweep: {:.1?}", start.elapsed());

    let start = Instant::now();
    let config = SweepConfig {
        sizes: vec![100],
        ..SweepConfig::default()
    };
    let report = run_f_sweep(&config)?;
    for g in &report.groups {
        let d = report.stats(g, Metric::RAlphaBeta).unwrap();
        let fr = report.stats(g, Metric::RebFraction).unwrap();
        println!("{g:>6}  R={:8.2} reb={:.3}", d.mean, fr.mean);
    }
    println!("f sweep: {:.1?}", start.elapsed());
    Ok(())
}
