//! Scenario runner for `wvdeflect-core`: resolves a parameter file, checks
//! the operating regime, computes a scenario and writes CSV datasets plus a
//! JSON manifest with their checksums.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod manifest;
pub mod scenario;

pub use dataset::{export_dataset, parse_csv, Cell, Dataset};
pub use error::{CliError, Result};
pub use manifest::{FileRecord, RunManifest, RunStatus, MANIFEST_FILE};
pub use scenario::{run_scenario, Context, Output, RunOptions, Scenario};
