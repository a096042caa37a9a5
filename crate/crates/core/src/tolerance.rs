//! Numeric tolerances shared across modules.

/// Absolute tolerance for flow-balance equality constraints.
pub const EQUALITY: f64 = 1e-7;

/// Absolute tolerance for probability normalisation and rate sums.
pub const PROBABILITY: f64 = 1e-9;

/// Slack allowed on arc capacities and supply totals.
pub const CAPACITY: f64 = 1e-9;
