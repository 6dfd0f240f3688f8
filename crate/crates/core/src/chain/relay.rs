//! Chain for coding at the relay only.
//!
//! The source repeats uniformly chosen uncoded packets; the relay stores
//! every distinct packet it hears and sends random mixtures of them. While
//! the relay holds a packet the sink lacks, every relay mixture reaching the
//! sink counts as innovative and marks one such packet as shared. That
//! bookkeeping is exact for `n = 1`. For larger `n` it also treats a later
//! uncoded repeat of a packet folded into a received mixture as redundant,
//! so it is not a bound in either direction.

use super::{AbsorbingChain, RowBuilder};
use crate::error::{Error, Result};
use crate::model::{ChannelParams, DofState, Scheme};

/// Sort key `(m+k+l, m+k, k)`. Every non-self transition strictly increases it.
pub fn relay_order_key(s: DofState) -> (usize, usize, usize) {
    (s.m + s.k + s.l, s.m + s.k, s.k)
}

/// All triples with `m + k + l <= n`, plus the terminal.
pub fn state_count_relay(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) / 6 + 1
}

pub fn build_relay_chain(n: usize, alpha: f64, ch: &ChannelParams) -> Result<AbsorbingChain> {
    if n == 0 {
        return Err(Error::invalid("n", "at least one packet is required"));
    }
    if alpha.is_nan() || !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(
            "alpha",
            format!("{alpha} is not a time share in [0, 1]"),
        ));
    }

    let mut states = Vec::with_capacity(state_count_relay(n) - 1);
    for m in 0..=n {
        for k in 0..=n - m {
            for l in 0..=n - m - k {
                states.push(DofState::new(m, k, l));
            }
        }
    }
    states.sort_by_key(|&s| std::cmp::Reverse(relay_order_key(s)));

    let (p_sd, p_sr, p_rd) = (ch.p_sd(), ch.p_sr(), ch.p_rd());
    let nf = n as f64;
    Ok(AbsorbingChain::assemble(
        Scheme::CodeRelayOnly,
        n,
        n,
        alpha,
        states,
        true,
        |s, row: &mut RowBuilder<'_>| {
            let DofState { m, k, l } = s;
            let fresh = (n - m - k - l) as f64 / nf;
            let at_sink = m as f64 / nf;
            let at_relay = l as f64 / nf;
            let shared = k as f64 / nf;
            let relay_has_unique = if l > 0 { 1.0 } else { 0.0 };

            row.add(DofState::new(m + 1, k, l), fresh * p_sd * (1.0 - p_sr) * alpha);
            row.add(DofState::new(m, k + 1, l), fresh * p_sd * p_sr * alpha);
            row.add(DofState::new(m, k, l + 1), fresh * p_sr * (1.0 - p_sd) * alpha);
            if m > 0 {
                row.add(DofState::new(m - 1, k + 1, l), at_sink * p_sr * alpha);
            }
            if l > 0 {
                row.add(
                    DofState::new(m, k + 1, l - 1),
                    at_relay * p_sd * alpha + relay_has_unique * p_rd * (1.0 - alpha),
                );
            }
            let stay =
                (at_sink * (1.0 - p_sr) + at_relay * (1.0 - p_sd) + shared + fresh * (1.0 - p_sd) * (1.0 - p_sr))
                    * alpha
                    + (1.0 - relay_has_unique * p_rd) * (1.0 - alpha);
            row.add(s, stay);
        },
    ))
}
