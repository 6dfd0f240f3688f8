//! Chain for coding at the source only.
//!
//! Every source mixture is innovative to whoever receives it. The relay keeps
//! up to `x` received mixtures in a queue, drops arrivals while full, and
//! forwards one uniformly chosen queued mixture per relay slot, discarding it
//! afterwards. Relay-to-sink retransmissions let the chain cycle, so it has
//! no topological order.

use std::cmp::Reverse;

use super::{AbsorbingChain, RowBuilder};
use crate::error::{Error, Result};
use crate::model::{ChannelParams, DofState, Scheme};

/// Sort key `(m+k, -k, l)`. Only the relay's failed forward of a unique
/// mixture decreases it, and then only to the adjacent state, which makes
/// `I - P` lower Hessenberg in index order.
pub fn source_order_key(s: DofState) -> (usize, Reverse<usize>, usize) {
    (s.m + s.k, Reverse(s.k), s.l)
}

/// Triples with `m + k <= n` and `k + l <= x`, plus the terminal.
pub fn state_count_source(n: usize, x: usize) -> usize {
    let x = x.min(n);
    (0..=x).map(|k| (n - k + 1) * (x - k + 1)).sum::<usize>() + 1
}

pub fn build_source_chain(n: usize, x: usize, alpha: f64, ch: &ChannelParams) -> Result<AbsorbingChain> {
    if n == 0 {
        return Err(Error::invalid("n", "at least one packet is required"));
    }
    if x == 0 || x > n {
        return Err(Error::invalid("x", format!("relay memory {x} must lie in [1, n={n}]")));
    }
    if alpha.is_nan() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(
            "alpha",
            format!("{alpha} is not a time share in [0, 1]"),
        ));
    }

    let mut states = Vec::with_capacity(state_count_source(n, x) - 1);
    for m in 0..=n {
        for k in 0..=(n - m).min(x) {
            for l in 0..=x - k {
                states.push(DofState::new(m, k, l));
            }
        }
    }
    states.sort_by_key(|&s| Reverse(source_order_key(s)));

    let (p_sd, p_sr, p_rd) = (ch.p_sd(), ch.p_sr(), ch.p_rd());
    Ok(AbsorbingChain::assemble(
        Scheme::CodeSourceOnly,
        n,
        x,
        alpha,
        states,
        false,
        |s, row: &mut RowBuilder<'_>| {
            let DofState { m, k, l } = s;
            let full = k + l == x;

            row.add(DofState::new(m + 1, k, l), alpha * p_sd * (1.0 - p_sr));
            let both = alpha * p_sd * p_sr;
            let relay_only = alpha * p_sr * (1.0 - p_sd);
            if full {
                row.add(DofState::new(m + 1, k, l), both);
                row.add(s, relay_only);
            } else {
                row.add(DofState::new(m, k + 1, l), both);
                row.add(DofState::new(m, k, l + 1), relay_only);
            }
            row.add(s, alpha * (1.0 - p_sr) * (1.0 - p_sd));

            let relay = 1.0 - alpha;
            if k + l == 0 {
                row.add(s, relay);
            } else {
                let queued = (k + l) as f64;
                if k > 0 {
                    row.add(DofState::new(m + 1, k - 1, l), relay * k as f64 / queued);
                }
                if l > 0 {
                    let unique = relay * l as f64 / queued;
                    row.add(DofState::new(m + 1, k, l - 1), unique * p_rd);
                    row.add(DofState::new(m, k, l - 1), unique * (1.0 - p_rd));
                }
            }
        },
    ))
}
