//! Scan driver for charge-resolved entanglement of SSH chains: configuration,
//! parallel interval scans, constrained-state and AKLT reports, and
//! deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod reports;
pub mod scan;
pub mod selftest;

pub use config::{Mode, Outputs, Overrides, ScanConfig, StatmechConfig};
pub use error::CliError;
pub use reports::{run_aklt, run_statmech, AkltRow, StatmechRow};
pub use scan::{run_scan, ScanOutput, ScanRow, Source};
