//! Sampled simulation output and its CSV / JSON forms.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FluidModel, FluidState, History};
use crate::error::Result;

/// Zero-crossings beyond this count are dropped and the trace marked truncated.
pub const MAX_EVENTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub c: Vec<f64>,
    pub v: Vec<f64>,
    pub r: Vec<f64>,
    /// Idle plus in-transit vehicles.
    pub vehicles_total: f64,
    /// Idle plus in-transit drivers.
    pub drivers_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Customers,
    Vehicles,
    Drivers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    ReachedZero,
    LeftZero,
}

/// A queue switching between empty and nonempty during a step ending at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossing {
    pub t: f64,
    /// Zero-based station index.
    pub station: usize,
    pub quantity: Quantity,
    pub crossing: Crossing,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimTrace {
    pub samples: Vec<Sample>,
    pub events: Vec<ZeroCrossing>,
    pub events_truncated: bool,
}

impl SimTrace {
    pub(crate) fn start(model: &FluidModel<'_>) -> Self {
        let mut trace = SimTrace::default();
        trace.record(model);
        trace
    }

    pub(crate) fn record(&mut self, model: &FluidModel<'_>) {
        let st = model.state();
        self.samples.push(Sample {
            t: st.time,
            c: st.c.clone(),
            v: st.v.clone(),
            r: st.r.clone(),
            vehicles_total: model.total_vehicles(),
            drivers_total: model.total_drivers(),
        });
    }

    pub(crate) fn note_crossings(&mut self, before: &FluidState, after: &FluidState) {
        let pairs = [
            (Quantity::Customers, &before.c, &after.c),
            (Quantity::Vehicles, &before.v, &after.v),
            (Quantity::Drivers, &before.r, &after.r),
        ];
        for (quantity, old, new) in pairs {
            for (station, (&a, &b)) in old.iter().zip(new.iter()).enumerate() {
                let crossing = match (a > 0.0, b > 0.0) {
                    (true, false) => Crossing::ReachedZero,
                    (false, true) => Crossing::LeftZero,
                    _ => continue,
                };
                if self.events.len() >= MAX_EVENTS {
                    self.events_truncated = true;
                    return;
                }
                self.events.push(ZeroCrossing {
                    t: after.time,
                    station,
                    quantity,
                    crossing,
                });
            }
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Largest deviation of total vehicles from the first sample.
    pub fn max_vehicle_drift(&self) -> f64 {
        max_drift(self.samples.iter().map(|s| s.vehicles_total))
    }

    /// Largest deviation of total drivers from the first sample.
    pub fn max_driver_drift(&self) -> f64 {
        max_drift(self.samples.iter().map(|s| s.drivers_total))
    }

    /// Writes `t, c_1..c_n, v_1..v_n, r_1..r_n, V_total, R_total`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.samples.first().map_or(0, |s| s.c.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        for prefix in ["c", "v", "r"] {
            header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
        }
        header.push("V_total".into());
        header.push("R_total".into());
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![s.t.to_string()];
            for xs in [&s.c, &s.v, &s.r] {
                row.extend(xs.iter().map(f64::to_string));
            }
            row.push(s.vehicles_total.to_string());
            row.push(s.drivers_total.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn max_drift(totals: impl Iterator<Item = f64>) -> f64 {
    let mut first = None;
    let mut worst: f64 = 0.0;
    for x in totals {
        let x0 = *first.get_or_insert(x);
        worst = worst.max((x - x0).abs());
    }
    worst
}

/// Settings and flags of one run, written next to the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub scenario: String,
    pub n: usize,
    pub h: f64,
    pub horizon: f64,
    pub seed: Option<u64>,
    pub vehicles: f64,
    pub drivers: f64,
    pub history: History,
    /// Command-line or caller flags, echoed verbatim.
    #[serde(default)]
    pub flags: BTreeMap<String, serde_json::Value>,
}

impl RunMetadata {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
