//! Random linear network coding over a three-node packet erasure relay
//! channel: a source, a relay and a sink sharing one medium.
//!
//! The source holds `n` packets and transmits in a fraction `alpha` of the
//! slots; the relay uses the rest. Three coding placements are modelled:
//!
//! * [`Scheme::CodeBoth`]: source and relay both code, analysed as a fluid
//!   flow in [`fluidflow`];
//! * [`Scheme::CodeRelayOnly`]: the source sends uncoded packets and the
//!   relay mixes what it heard;
//! * [`Scheme::CodeSourceOnly`]: the source sends mixtures and the relay
//!   forwards them from a buffer of size `x`.
//!
//! The last two are absorbing Markov chains over degree-of-freedom states
//! ([`chain`]). [`solve`] computes exact expected completion times, from
//! which throughput and energy follow, [`optimize`] picks `alpha`, and
//! [`simulate`] provides Monte Carlo cross-checks.

pub mod chain;
pub mod error;
pub mod fluidflow;
pub mod model;
pub mod optimize;
pub mod search;
pub mod simulate;
pub mod solve;

pub use chain::{
    build_relay_chain, build_source_chain, state_count_relay, state_count_source, AbsorbingChain, TERMINAL,
};
pub use error::{Error, Result};
pub use fluidflow::{flow_rate, min_delivery_energy, min_energy_per_rate, optimal_rate, FlowSolution};
pub use model::{energy_rate, is_valid_state, ChannelParams, DofState, EnergyParams, Scheme, SchemeConfig};
pub use optimize::{objective_at, optimize_alpha, AlphaOptimum, ObjectiveKind, DEFAULT_GRID_POINTS, MIN_GRID_POINTS};
pub use simulate::{simulate_chain, simulate_packets, SimConfig, SimEstimate};
pub use solve::{build_chain, evaluate, evaluate_chain, first_passage, EvalResult, PassageTimes, SolverPath};
