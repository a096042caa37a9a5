use thiserror::Error;

use crate::rebalancer::BetaInfeasibility;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A field of a network or assignment violates its invariants.
    #[error("validation error in {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("driver rebalancing program is infeasible: {0}")]
    BetaInfeasible(Box<BetaInfeasibility>),

    /// No equilibrium exists for the requested fleet and driver totals.
    #[error(
        "insufficient fleet: vehicles {vehicles} (need > {v_alpha}), drivers {drivers} (need > {r_alpha_beta})"
    )]
    InsufficientFleet {
        vehicles: f64,
        v_alpha: f64,
        drivers: f64,
        r_alpha_beta: f64,
    },

    #[error("invalid simulation state: {0}")]
    InvalidState(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
