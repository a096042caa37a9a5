//! Station networks and the quantities derived from them.

mod feasibility;
mod fleet;
mod generator;
mod imbalance;
pub mod io;
mod matrix;
mod network;

pub use feasibility::{check_feasibility_bruteforce, CutFeasibility, BRUTE_FORCE_MAX_STATIONS};
pub use fleet::{fleet_sizes, RebalanceAssignment};
pub use generator::{generate_instance, GeneratorConfig};
pub use imbalance::{compute_imbalance, ImbalanceVector};
pub use matrix::Matrix;
pub use network::{InstanceMeta, StationNetwork};
