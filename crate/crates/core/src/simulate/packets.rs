//! Slot-by-slot packet simulation over a prime field.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::field::{PrimeField, RankTracker};
use super::{run_trials, SimConfig, SimEstimate, Trial};
use crate::error::Result;
use crate::model::{ChannelParams, EnergyParams, Scheme, SchemeConfig};

/// What the relay holds between slots.
enum RelayStore {
    /// Relay-only coding: which uncoded packets have been heard.
    Packets(Vec<bool>),
    /// Source-only coding: up to `x` mixtures, dropped once forwarded.
    Queue(Vec<Vec<u64>>),
    /// Both coding: the span of everything heard.
    Span(RankTracker),
}

/// Simulates the three schemes with real coefficient vectors.
///
/// Each slot the source transmits with probability `alpha`, otherwise the
/// relay does; erasures are independent per link. The trial ends when the
/// sink's rank reaches `n`.
///
/// Energy is booked per event: every slot costs one transmission, the
/// relay pays reception for each source slot while it participates
/// (`alpha < 1`), and coding is charged to every slot owned by a coding
/// node, wasted ones included. One acknowledgement closes each trial.
pub fn simulate_packets(
    cfg: &SchemeConfig,
    ch: &ChannelParams,
    en: &EnergyParams,
    sim: &SimConfig,
) -> Result<SimEstimate> {
    sim.validate(cfg.n())?;
    let field = PrimeField::new(sim.field_size).expect("validated");
    run_trials(sim, |rng| run_trial(cfg, ch, en, sim.max_slots, field, rng))
}

fn run_trial(
    cfg: &SchemeConfig,
    ch: &ChannelParams,
    en: &EnergyParams,
    max_slots: u64,
    field: PrimeField,
    rng: &mut ChaCha8Rng,
) -> Trial {
    let n = cfg.n();
    let alpha = cfg.alpha();
    let relay_listens = alpha < 1.0;
    let mut sink = RankTracker::new(field, n);
    let mut relay = match cfg.scheme() {
        Scheme::CodeRelayOnly => RelayStore::Packets(vec![false; n]),
        Scheme::CodeSourceOnly => RelayStore::Queue(Vec::with_capacity(cfg.x())),
        Scheme::CodeBoth => RelayStore::Span(RankTracker::new(field, n)),
    };
    let (source_codes, relay_codes) = match cfg.scheme() {
        Scheme::CodeRelayOnly => (false, true),
        Scheme::CodeSourceOnly => (true, false),
        Scheme::CodeBoth => (true, true),
    };

    let mut slots: u64 = 0;
    let mut energy = 0.0;
    while !sink.is_full() {
        if slots == max_slots {
            return None;
        }
        slots += 1;
        energy += en.e_tx();

        if rng.random::<f64>() < alpha {
            if relay_listens {
                energy += en.e_rx();
            }
            if source_codes {
                energy += en.e_nc();
            }
            let relay_hears = rng.random::<f64>() < ch.p_sr();
            let sink_hears = rng.random::<f64>() < ch.p_sd();
            match &mut relay {
                RelayStore::Packets(held) => {
                    let pkt = rng.random_range(0..n);
                    if relay_hears {
                        held[pkt] = true;
                    }
                    if sink_hears {
                        let mut v = vec![0; n];
                        v[pkt] = 1;
                        sink.insert(v);
                    }
                }
                RelayStore::Queue(queue) => {
                    let v = field.random_vector(n, rng);
                    if relay_hears && queue.len() < cfg.x() {
                        queue.push(v.clone());
                    }
                    if sink_hears {
                        sink.insert(v);
                    }
                }
                RelayStore::Span(span) => {
                    let v = field.random_vector(n, rng);
                    if relay_hears {
                        span.insert(v.clone());
                    }
                    if sink_hears {
                        sink.insert(v);
                    }
                }
            }
        } else {
            if relay_codes {
                energy += en.e_nc();
            }
            let outgoing = match &mut relay {
                RelayStore::Packets(held) => held.iter().any(|&h| h).then(|| {
                    held.iter()
                        .map(|&h| if h { field.random(rng) } else { 0 })
                        .collect::<Vec<u64>>()
                }),
                RelayStore::Queue(queue) => (!queue.is_empty()).then(|| {
                    let pick = rng.random_range(0..queue.len());
                    queue.swap_remove(pick)
                }),
                RelayStore::Span(span) => (span.rank() > 0).then(|| span.random_combination(rng)),
            };
            if let Some(v) = outgoing {
                if rng.random::<f64>() < ch.p_rd() {
                    sink.insert(v);
                }
            }
        }
    }
    Some((slots as f64, energy + en.e_ack()))
}
