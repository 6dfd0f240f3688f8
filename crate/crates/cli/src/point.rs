//! Evaluating a single parameter point into a [`Row`].

use std::fmt;
use std::str::FromStr;

use ncrelay_core::{
    build_chain, evaluate, optimize_alpha, simulate_chain, simulate_packets, state_count_relay, state_count_source,
    ChannelParams, EnergyParams, ObjectiveKind, Scheme, SchemeConfig, SimConfig,
};

use crate::error::{CliError, Result};
use crate::row::Row;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    Fixed(f64),
    /// Minimize the given objective over `alpha`.
    Optimal(ObjectiveKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Slot-level simulation with coefficient vectors over a prime field.
    Packets,
    /// Trajectory sampling on the analytical chain.
    Chain,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::Packets => "packets",
            SimMode::Chain => "chain",
        }
    }
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SimMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "packets" => Ok(SimMode::Packets),
            "chain" => Ok(SimMode::Chain),
            other => Err(format!("unknown simulation mode {other:?} (expected packets or chain)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub mode: SimMode,
    pub config: SimConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub scheme: Scheme,
    pub n: usize,
    /// Relay memory; `None` means `n`.
    pub x: Option<usize>,
    pub alpha: AlphaChoice,
    pub channel: ChannelParams,
    pub energy: EnergyParams,
    pub label: String,
}

impl Point {
    fn memory(&self) -> usize {
        match self.scheme {
            Scheme::CodeSourceOnly => self.x.unwrap_or(self.n),
            _ => self.n,
        }
    }

    fn state_count(&self) -> Option<usize> {
        match self.scheme {
            Scheme::CodeRelayOnly => Some(state_count_relay(self.n)),
            Scheme::CodeSourceOnly => Some(state_count_source(self.n, self.memory())),
            Scheme::CodeBoth => None,
        }
    }

    fn unsolved(&self, alpha: f64) -> Row {
        Row::unsolved(
            self.scheme,
            self.n,
            self.memory(),
            alpha,
            self.channel,
            self.energy,
            self.state_count(),
            &self.label,
        )
    }

    /// Evaluates the point; failures to complete are errors.
    pub fn compute(&self, grid_points: usize, sim: Option<&SimSettings>) -> Result<Row> {
        let base = SchemeConfig::new(self.scheme, self.n, self.memory(), 1.0)?;
        let cfg = match self.alpha {
            AlphaChoice::Fixed(a) => base.with_alpha(a)?,
            AlphaChoice::Optimal(kind) => {
                let opt = optimize_alpha(&base, &self.channel, &self.energy, kind, grid_points)?;
                base.with_alpha(opt.alpha_star)?
            }
        };
        let r = evaluate(&cfg, &self.channel, &self.energy)?;
        let mut row = Row::solved(
            self.scheme,
            self.n,
            cfg.x(),
            cfg.alpha(),
            self.channel,
            self.energy,
            &r,
            &self.label,
        );
        if let Some(sim) = sim {
            row.sim = Some(match sim.mode {
                SimMode::Packets => simulate_packets(&cfg, &self.channel, &self.energy, &sim.config)?,
                SimMode::Chain => {
                    if !self.scheme.uses_chain() {
                        return Err(CliError::Usage(format!(
                            "chain simulation is unavailable for scheme {}",
                            self.scheme
                        )));
                    }
                    simulate_chain(&build_chain(&cfg, &self.channel)?, &self.energy, &sim.config)?
                }
            });
        }
        Ok(row)
    }

    /// Like [`Point::compute`], but a point that cannot complete becomes a
    /// row with infinite time instead of an error. Used for grids, where
    /// such points are part of the curve.
    pub fn compute_or_unsolved(&self, grid_points: usize, sim: Option<&SimSettings>) -> Result<Row> {
        match self.compute(grid_points, sim) {
            Err(CliError::Core(e)) if e.is_numerical() => Ok(self.unsolved(self.fixed_alpha())),
            // No rate at alpha = 0 when both nodes code.
            Err(CliError::Core(ncrelay_core::Error::InvalidParameter { field: "alpha", .. }))
                if self.scheme == Scheme::CodeBoth && self.alpha == AlphaChoice::Fixed(0.0) =>
            {
                Ok(self.unsolved(0.0))
            }
            other => other,
        }
    }

    fn fixed_alpha(&self) -> f64 {
        match self.alpha {
            AlphaChoice::Fixed(a) => a,
            AlphaChoice::Optimal(_) => f64::NAN,
        }
    }
}
