//! Named point sets that reproduce the standard curves.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use ncrelay_core::{ChannelParams, EnergyParams, ObjectiveKind, Scheme};

use crate::error::{CliError, Result};
use crate::point::{AlphaChoice, Point, SimSettings};
use crate::row::Row;
use crate::sweep::tidy;

pub const DEFAULT_PSD_STEP: f64 = 0.05;
const ALPHA_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Relay-only `T/n` against `alpha` for several generation sizes.
    RelayTime,
    /// Source-only `T/n` against `alpha` for several memory sizes.
    SourceTime,
    /// Source-only `T/n` against `alpha` over several relay channels.
    SourceChannels,
    /// Throughput at the time-optimal `alpha` against `p_sd`.
    Rates,
    /// The time-optimal `alpha` against `p_sd`.
    Alpha,
    /// Energy per packet at the time-optimal `alpha` against `p_sd`.
    Energy,
    /// Energy per packet over throughput at the time-optimal `alpha`.
    EnergyPerRate,
    /// Energy per packet at the energy-optimal `alpha` against `p_sd`.
    EnergyOptimal,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::RelayTime,
        FigureId::SourceTime,
        FigureId::SourceChannels,
        FigureId::Rates,
        FigureId::Alpha,
        FigureId::Energy,
        FigureId::EnergyPerRate,
        FigureId::EnergyOptimal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::RelayTime => "fig3-relay-T",
            FigureId::SourceTime => "fig4-source-T",
            FigureId::SourceChannels => "fig5-source-channels",
            FigureId::Rates => "fig6-rates",
            FigureId::Alpha => "fig7-alpha",
            FigureId::Energy => "fig8-energy",
            FigureId::EnergyPerRate => "fig9-energy-per-rate",
            FigureId::EnergyOptimal => "fig10-11-energy-opt",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| {
                let known: Vec<&str> = FigureId::ALL.iter().map(|id| id.as_str()).collect();
                format!("unknown figure {s:?} (expected one of {})", known.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    pub psd_step: f64,
    pub grid_points: usize,
    pub energy: EnergyParams,
}

fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| tidy(start + i as f64 * step)).collect()
}

fn channel(p_sd: f64, p_sr: f64, p_rd: f64) -> Result<ChannelParams> {
    Ok(ChannelParams::new(p_sd, p_sr, p_rd)?)
}

struct Builder {
    energy: EnergyParams,
    points: Vec<Point>,
}

impl Builder {
    fn push(&mut self, scheme: Scheme, n: usize, x: usize, alpha: AlphaChoice, channel: ChannelParams, label: String) {
        self.points.push(Point {
            scheme,
            n,
            x: Some(x),
            alpha,
            channel,
            energy: self.energy,
            label,
        });
    }

    /// One curve over the alpha grid followed by its optimum.
    fn alpha_curve(&mut self, scheme: Scheme, n: usize, x: usize, channel: ChannelParams, label: &str) {
        for a in steps(0.0, 1.0, ALPHA_STEP) {
            self.push(scheme, n, x, AlphaChoice::Fixed(a), channel, label.to_string());
        }
        self.push(
            scheme,
            n,
            x,
            AlphaChoice::Optimal(ObjectiveKind::Time),
            channel,
            format!("{label} optimum"),
        );
    }

    /// The four rate curves over `p_sd` at the optimal alpha.
    fn psd_curves(&mut self, step: f64, objective: ObjectiveKind) -> Result<()> {
        let curves = [
            (Scheme::CodeRelayOnly, 1, 1, "r, n=1"),
            (Scheme::CodeRelayOnly, 2, 2, "r, n=2, x=2"),
            (Scheme::CodeSourceOnly, 10, 10, "s, n=10, x=10"),
            (Scheme::CodeBoth, 1, 1, "s and r"),
        ];
        for (scheme, n, x, label) in curves {
            for p_sd in steps(step, 1.0, step) {
                self.push(
                    scheme,
                    n,
                    x,
                    AlphaChoice::Optimal(objective),
                    channel(p_sd, 0.8, 0.8)?,
                    label.to_string(),
                );
            }
        }
        Ok(())
    }
}

pub fn figure_points(id: FigureId, opts: &FigureOptions) -> Result<Vec<Point>> {
    if !(opts.psd_step > 0.0 && opts.psd_step <= 1.0) {
        return Err(CliError::Usage(format!(
            "--psd-step must be in (0, 1], got {}",
            opts.psd_step
        )));
    }
    let mut b = Builder {
        energy: opts.energy,
        points: Vec::new(),
    };
    match id {
        FigureId::RelayTime => {
            let ch = channel(0.5, 0.8, 0.8)?;
            for n in [1, 2, 5, 10, 20] {
                b.alpha_curve(Scheme::CodeRelayOnly, n, n, ch, &format!("n={n}"));
            }
        }
        FigureId::SourceTime => {
            let ch = channel(0.25, 0.8, 0.8)?;
            for (n, x) in [(1, 1), (2, 2), (5, 5), (10, 1), (10, 2), (10, 3), (10, 10)] {
                b.alpha_curve(Scheme::CodeSourceOnly, n, x, ch, &format!("n={n}, x={x}"));
            }
        }
        FigureId::SourceChannels => {
            let cases = [(0.5, 0.5), (0.9, 0.6), (0.9, 0.3), (0.9, 0.9), (0.7, 0.7)];
            for (tag, (p_sr, p_rd)) in ('a'..).zip(cases) {
                let label = format!("({tag}) p_sr={p_sr}, p_rd={p_rd}");
                b.alpha_curve(Scheme::CodeSourceOnly, 10, 10, channel(0.5, p_sr, p_rd)?, &label);
            }
        }
        FigureId::Rates | FigureId::Alpha | FigureId::Energy | FigureId::EnergyPerRate => {
            b.psd_curves(opts.psd_step, ObjectiveKind::Time)?;
        }
        FigureId::EnergyOptimal => b.psd_curves(opts.psd_step, ObjectiveKind::Energy)?,
    }
    Ok(b.points)
}

pub fn run_figure(id: FigureId, opts: &FigureOptions, sim: Option<&SimSettings>) -> Result<Vec<Row>> {
    figure_points(id, opts)?
        .par_iter()
        .map(|p| p.compute_or_unsolved(opts.grid_points, sim))
        .collect()
}
