//! Command-line front end: TOML configs, parameter sweeps with CSV output and the
//! built-in validation suite.

pub mod config;
pub mod edr;
pub mod sweep;
pub mod validation;

pub use config::{Axis, Config, ConfigError, Output};
pub use sweep::{run_serial, run_sweep, write_csv, Row, Status, Sweep, Value};
