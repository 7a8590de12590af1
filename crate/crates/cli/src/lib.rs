//! Command-line front-end for the defaultable bond pricer: TOML scenarios,
//! figure sweeps as CSV and three-way validation reports.

pub mod curve;
pub mod error;
pub mod presets;
pub mod price;
pub mod scenario;
pub mod validate;

pub use error::{CliError, Result};
