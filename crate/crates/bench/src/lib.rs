//! Shared inputs for the benchmarks.

use ncrelay_core::{ChannelParams, EnergyParams};

/// The reference channel used throughout the benchmarks.
pub fn channel() -> ChannelParams {
    ChannelParams::new(0.5, 0.8, 0.8).expect("valid probabilities")
}

pub fn energy() -> EnergyParams {
    EnergyParams::unit()
}
