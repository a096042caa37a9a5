//! Random problem generators shared with the core crate's integration tests.

#[path = "../../core/tests/common/mod.rs"]
mod generators;

pub use generators::*;
