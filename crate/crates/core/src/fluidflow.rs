//! Fluid-flow model for coding at both the source and the relay.
//!
//! With both nodes mixing, every successful reception carries a new degree
//! of freedom, so the achievable rate `R` at time share `alpha` is bounded by
//! the source's broadcast cut and by the cut into the sink:
//!
//! ```text
//! R <= alpha * (p_sr + p_sd - p_sr * p_sd)
//! R <= alpha * p_sd + (1 - alpha) * p_rd
//! ```
//!
//! All three objectives decrease in `R`, so `R` is pinned to the smaller
//! bound and only `alpha` is optimized.

use crate::model::{ChannelParams, EnergyParams};
use crate::search::golden_section_min;

const COARSE_GRID: usize = 1000;
const REFINE_TOL: f64 = 1e-10;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSolution {
    pub rate: f64,
    pub alpha: f64,
    pub objective: f64,
    pub relay_used: bool,
}

impl FlowSolution {
    fn at(ch: &ChannelParams, alpha: f64, objective: f64) -> Self {
        Self {
            rate: flow_rate(ch, alpha),
            alpha,
            objective,
            relay_used: alpha < 1.0,
        }
    }
}

/// Largest rate satisfying both cut constraints at `alpha`.
pub fn flow_rate(ch: &ChannelParams, alpha: f64) -> f64 {
    let broadcast = alpha * (ch.p_sr() + ch.p_sd() - ch.p_sr() * ch.p_sd());
    let into_sink = alpha * ch.p_sd() + (1.0 - alpha) * ch.p_rd();
    broadcast.min(into_sink)
}

/// Closed-form capacity optimum.
pub fn optimal_rate(ch: &ChannelParams) -> FlowSolution {
    let (p_sd, p_sr, p_rd) = (ch.p_sd(), ch.p_sr(), ch.p_rd());
    let denom = p_rd + p_sr * (1.0 - p_sd);
    let (rate, alpha) = if p_sd > p_rd || p_rd == 0.0 {
        // Relay idle. p_rd == 0 forces p_sd == 0 here: nothing gets through.
        (p_sd, 1.0)
    } else {
        (p_rd * (p_sr + p_sd - p_sd * p_sr) / denom, p_rd / denom)
    };
    FlowSolution {
        rate,
        alpha,
        objective: if rate > 0.0 { 1.0 / rate } else { f64::INFINITY },
        relay_used: alpha < 1.0,
    }
}

/// Energy per delivered packet, `[E_tx + E_nc + alpha (1 - I{alpha=1}) E_rx] / R`.
pub fn delivery_energy(ch: &ChannelParams, en: &EnergyParams, alpha: f64) -> f64 {
    energy_objective(ch, en, alpha, 1, alpha < 1.0)
}

/// Energy per delivered packet per unit throughput, the previous cost over `R`.
pub fn energy_per_rate(ch: &ChannelParams, en: &EnergyParams, alpha: f64) -> f64 {
    energy_objective(ch, en, alpha, 2, alpha < 1.0)
}

pub fn min_delivery_energy(ch: &ChannelParams, en: &EnergyParams) -> FlowSolution {
    minimize_energy(ch, en, 1)
}

pub fn min_energy_per_rate(ch: &ChannelParams, en: &EnergyParams) -> FlowSolution {
    minimize_energy(ch, en, 2)
}

fn energy_objective(ch: &ChannelParams, en: &EnergyParams, alpha: f64, power: i32, listening: bool) -> f64 {
    let rate = flow_rate(ch, alpha);
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let mut per_slot = en.e_tx() + en.e_nc();
    if listening {
        per_slot += alpha * en.e_rx();
    }
    per_slot / rate.powi(power)
}

fn minimize_energy(ch: &ChannelParams, en: &EnergyParams, power: i32) -> FlowSolution {
    // Smooth branch with the relay listening; its value at alpha = 1 is the
    // left limit, not the true cost there.
    let listening = |a: f64| energy_objective(ch, en, a, power, true);

    let grid: Vec<f64> = (1..=COARSE_GRID)
        .map(|i| listening(i as f64 / COARSE_GRID as f64))
        .collect();
    let best = grid
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < grid[b] { i } else { b });
    let lo = best as f64 / COARSE_GRID as f64;
    let hi = ((best + 2) as f64 / COARSE_GRID as f64).min(1.0);
    let (refined, refined_value) = golden_section_min(listening, lo, hi, REFINE_TOL);

    let mut interior = vec![
        ((best + 1) as f64 / COARSE_GRID as f64, grid[best]),
        (refined, refined_value),
    ];
    let throughput_alpha = optimal_rate(ch).alpha;
    if throughput_alpha > 0.0 && throughput_alpha < 1.0 {
        interior.push((throughput_alpha, listening(throughput_alpha)));
    }
    let (alpha, value) = interior
        .into_iter()
        .filter(|&(a, _)| a > 0.0 && a < 1.0)
        .fold((f64::NAN, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });

    let corner = energy_objective(ch, en, 1.0, power, false);
    if alpha.is_nan() || corner <= value + TIE_TOL {
        FlowSolution::at(ch, 1.0, corner)
    } else {
        FlowSolution::at(ch, alpha, value)
    }
}
