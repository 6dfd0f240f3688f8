//! Command-line front end for the ncrelay models: single points, alpha
//! optimization, parameter sweeps, named figures and simulations, all
//! written as CSV rows with a fixed header.

pub mod error;
pub mod figures;
pub mod point;
pub mod row;
pub mod sweep;

pub use error::{CliError, Result};
