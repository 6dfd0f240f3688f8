//! Monte Carlo oracles for the analytical models.
//!
//! [`simulate_chain`] samples trajectories of a built chain and checks the
//! linear solve. [`simulate_packets`] ignores the chains entirely: it moves
//! actual coefficient vectors over a prime field, tracks the sink's rank,
//! and so measures what the relay-only model's innovation assumption hides.
//!
//! Each trial draws from its own ChaCha stream selected by the trial index
//! under the master seed, and results are reduced in trial order, so
//! estimates do not depend on the thread count.

mod field;
mod packets;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

pub use field::{is_prime, PrimeField, RankTracker};
pub use packets::simulate_packets;

use crate::chain::AbsorbingChain;
use crate::error::{Error, Result};
use crate::model::{energy_rate, EnergyParams};

pub const DEFAULT_FIELD_SIZE: u64 = 65521;
pub const DEFAULT_MAX_SLOTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: usize,
    pub master_seed: u64,
    /// Prime field order for packet-level runs.
    pub field_size: u64,
    /// Per-trial cap on slots.
    pub max_slots: u64,
    /// When false, capped trials are dropped from the estimate and counted
    /// instead of failing the run.
    pub fail_on_truncation: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            master_seed: 0,
            field_size: DEFAULT_FIELD_SIZE,
            max_slots: DEFAULT_MAX_SLOTS,
            fail_on_truncation: true,
        }
    }
}

impl SimConfig {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "at least one trial is required"));
        }
        if PrimeField::new(self.field_size).is_none() {
            return Err(Error::invalid(
                "field_size",
                format!("{} is not a prime below 2^32", self.field_size),
            ));
        }
        if self.max_slots < n as u64 {
            return Err(Error::invalid(
                "max_slots",
                format!("{} is below n = {n}", self.max_slots),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean_t: f64,
    pub std_err_t: f64,
    pub mean_e: f64,
    pub std_err_e: f64,
    /// Trials counted in the means.
    pub trials: usize,
    pub truncated_trials: usize,
}

impl SimEstimate {
    /// Whether `value` lies within `k` standard errors of the mean slot count.
    pub fn time_within(&self, value: f64, k: f64) -> bool {
        (self.mean_t - value).abs() <= k * self.std_err_t
    }
}

/// Outcome of one trial: `(slots, energy)`, or `None` if capped.
pub(crate) type Trial = Option<(f64, f64)>;

pub(crate) fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

pub(crate) fn run_trials<F>(sim: &SimConfig, trial: F) -> Result<SimEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Trial + Sync,
{
    let outcomes: Vec<Trial> = (0..sim.trials)
        .into_par_iter()
        .map(|i| trial(&mut trial_rng(sim.master_seed, i)))
        .collect();
    let truncated = outcomes.iter().filter(|o| o.is_none()).count();
    if truncated > 0 && (sim.fail_on_truncation || truncated == outcomes.len()) {
        return Err(Error::Truncated {
            trials: truncated,
            max_slots: sim.max_slots,
        });
    }
    let done: Vec<(f64, f64)> = outcomes.into_iter().flatten().collect();
    let (mean_t, std_err_t) = mean_and_std_err(done.iter().map(|o| o.0));
    let (mean_e, std_err_e) = mean_and_std_err(done.iter().map(|o| o.1));
    Ok(SimEstimate {
        mean_t,
        std_err_t,
        mean_e,
        std_err_e,
        trials: done.len(),
        truncated_trials: truncated,
    })
}

fn mean_and_std_err(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Samples trajectories from the start state until a completed state is
/// reached. Energy per trial is `slots * E_use + E_ack`.
pub fn simulate_chain(chain: &AbsorbingChain, en: &EnergyParams, sim: &SimConfig) -> Result<SimEstimate> {
    sim.validate(chain.n())?;
    let e_use = energy_rate(chain.scheme(), chain.alpha(), en);
    run_trials(sim, |rng| {
        let mut state = chain.start_index();
        let mut slots: u64 = 0;
        while !chain.is_absorbing(state) {
            let row = chain.row(state);
            let leave: f64 = row.iter().filter(|&&(j, _)| j != state).map(|&(_, p)| p).sum();
            if leave <= 0.0 {
                return None;
            }
            // Slots spent here, including the one that leaves.
            let hold = if leave >= 1.0 {
                1
            } else {
                1 + Geometric::new(leave).expect("probability in (0,1)").sample(rng)
            };
            slots = slots.saturating_add(hold);
            if slots > sim.max_slots {
                return None;
            }
            let mut u = rng.random::<f64>() * leave;
            let mut next = state;
            for &(j, p) in row {
                if j == state {
                    continue;
                }
                next = j;
                if u < p {
                    break;
                }
                u -= p;
            }
            state = next;
        }
        let slots = slots as f64;
        Some((slots, slots * e_use + en.e_ack()))
    })
}
