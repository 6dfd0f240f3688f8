//! Choosing the source's share of the medium.
//!
//! The objective is not guaranteed unimodal in `alpha` and the energy cost
//! jumps at `alpha = 1`, where the relay stops listening. The search
//! therefore samples a uniform grid over `[0, 1]` (both ends included) and
//! only then refines around the best grid point with golden-section search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fluidflow::{min_delivery_energy, optimal_rate};
use crate::model::{ChannelParams, EnergyParams, Scheme, SchemeConfig};
use crate::search::{argmin_prefer_last, golden_section_min};
use crate::solve::evaluate;

pub const DEFAULT_GRID_POINTS: usize = 201;
pub const MIN_GRID_POINTS: usize = 11;
const REFINE_WIDTH: f64 = 1e-5;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Expected completion time `T`.
    Time,
    /// Expected completion energy `E`.
    Energy,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Time => "time",
            ObjectiveKind::Energy => "energy",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "time" | "throughput" => Ok(ObjectiveKind::Time),
            "energy" => Ok(ObjectiveKind::Energy),
            other => Err(Error::invalid(
                "objective",
                format!("unknown objective {other:?} (expected time or energy)"),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlphaOptimum {
    pub alpha_star: f64,
    pub objective: f64,
    pub objective_kind: ObjectiveKind,
    /// The sampled `(alpha, objective)` grid, `+inf` where completion is
    /// not certain.
    pub curve: Vec<(f64, f64)>,
}

/// Objective value at one time share; chains that cannot complete score `+inf`.
pub fn objective_at(
    base: &SchemeConfig,
    ch: &ChannelParams,
    en: &EnergyParams,
    kind: ObjectiveKind,
    alpha: f64,
) -> Result<f64> {
    let cfg = match base.with_alpha(alpha) {
        Ok(cfg) => cfg,
        // alpha = 0 is outside the fluid-flow model's domain
        Err(_) if base.scheme() == Scheme::CodeBoth && alpha == 0.0 => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    match evaluate(&cfg, ch, en) {
        Ok(r) => Ok(match kind {
            ObjectiveKind::Time => r.t_total,
            ObjectiveKind::Energy => r.e_total,
        }),
        Err(e) if e.is_numerical() => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Minimizes completion time or energy over `alpha`. The time share carried
/// by `base` is ignored.
///
/// For coding at both nodes the fluid-flow optima are returned directly
/// (per-packet objectives scaled by `n`) and the grid only fills `curve`.
pub fn optimize_alpha(
    base: &SchemeConfig,
    ch: &ChannelParams,
    en: &EnergyParams,
    kind: ObjectiveKind,
    grid_points: usize,
) -> Result<AlphaOptimum> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::invalid(
            "grid_points",
            format!("{grid_points} < {MIN_GRID_POINTS}"),
        ));
    }
    let grid: Vec<f64> = (0..grid_points).map(|i| i as f64 / (grid_points - 1) as f64).collect();
    let values = grid
        .par_iter()
        .map(|&a| objective_at(base, ch, en, kind, a))
        .collect::<Result<Vec<f64>>>()?;
    let curve: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();

    if base.scheme() == Scheme::CodeBoth {
        let n = base.n() as f64;
        let sol = match kind {
            ObjectiveKind::Time => optimal_rate(ch),
            ObjectiveKind::Energy => min_delivery_energy(ch, en),
        };
        if sol.rate <= 0.0 {
            return Err(Error::NonAbsorbing {
                state: Default::default(),
            });
        }
        return Ok(AlphaOptimum {
            alpha_star: sol.alpha,
            objective: n * sol.objective,
            objective_kind: kind,
            curve,
        });
    }

    let best = argmin_prefer_last(&values, TIE_TOL).expect("grid is non-empty");
    if values[best].is_infinite() {
        return Err(Error::NonAbsorbing {
            state: Default::default(),
        });
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid_points - 1)];
    let (refined, refined_value) = golden_section_min(
        |a| objective_at(base, ch, en, kind, a).unwrap_or(f64::INFINITY),
        lo,
        hi,
        REFINE_WIDTH,
    );

    let grid_best = (grid[best], values[best]);
    let (alpha_star, objective) =
        if refined_value < grid_best.1 - TIE_TOL || (refined_value <= grid_best.1 + TIE_TOL && refined > grid_best.0) {
            (refined, refined_value)
        } else {
            grid_best
        };
    Ok(AlphaOptimum {
        alpha_star,
        objective,
        objective_kind: kind,
        curve,
    })
}
