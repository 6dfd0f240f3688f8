//! The CSV row schema shared by every subcommand.

use std::io::Write;

use ncrelay_core::{ChannelParams, EnergyParams, EvalResult, Scheme, SimEstimate};

use crate::error::Result;

pub const HEADER: [&str; 23] = [
    "scheme",
    "n",
    "x",
    "alpha",
    "p_sd",
    "p_sr",
    "p_rd",
    "e_tx",
    "e_rx",
    "e_nc",
    "e_ack",
    "t_total",
    "t_per_packet",
    "throughput",
    "e_total",
    "e_per_packet",
    "sim_mean_T",
    "sim_stderr_T",
    "sim_mean_E",
    "sim_stderr_E",
    "state_count",
    "solver_path",
    "curve_label",
];

/// Solver label for points where completion is not certain.
pub const NO_SOLUTION: &str = "none";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub scheme: Scheme,
    pub n: usize,
    pub x: usize,
    pub alpha: f64,
    pub channel: ChannelParams,
    pub energy: EnergyParams,
    pub t_total: f64,
    pub t_per_packet: f64,
    pub throughput: f64,
    pub e_total: f64,
    pub e_per_packet: f64,
    pub sim: Option<SimEstimate>,
    pub state_count: Option<usize>,
    pub solver_path: String,
    pub curve_label: String,
}

impl Row {
    #[allow(clippy::too_many_arguments)]
    pub fn solved(
        scheme: Scheme,
        n: usize,
        x: usize,
        alpha: f64,
        channel: ChannelParams,
        energy: EnergyParams,
        r: &EvalResult,
        label: &str,
    ) -> Self {
        Self {
            scheme,
            n,
            x,
            alpha,
            channel,
            energy,
            t_total: r.t_total,
            t_per_packet: r.t_per_packet,
            throughput: r.throughput,
            e_total: r.e_total,
            e_per_packet: r.e_per_packet,
            sim: None,
            state_count: r.state_count,
            solver_path: r.solver_path.to_string(),
            curve_label: label.to_string(),
        }
    }

    /// A point that may never complete: infinite time and energy, zero rate.
    #[allow(clippy::too_many_arguments)]
    pub fn unsolved(
        scheme: Scheme,
        n: usize,
        x: usize,
        alpha: f64,
        channel: ChannelParams,
        energy: EnergyParams,
        state_count: Option<usize>,
        label: &str,
    ) -> Self {
        Self {
            scheme,
            n,
            x,
            alpha,
            channel,
            energy,
            t_total: f64::INFINITY,
            t_per_packet: f64::INFINITY,
            throughput: 0.0,
            e_total: f64::INFINITY,
            e_per_packet: f64::INFINITY,
            sim: None,
            state_count,
            solver_path: NO_SOLUTION.to_string(),
            curve_label: label.to_string(),
        }
    }

    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let ch = &self.channel;
        let en = &self.energy;
        vec![
            self.scheme.to_string(),
            self.n.to_string(),
            self.x.to_string(),
            self.alpha.to_string(),
            ch.p_sd().to_string(),
            ch.p_sr().to_string(),
            ch.p_rd().to_string(),
            en.e_tx().to_string(),
            en.e_rx().to_string(),
            en.e_nc().to_string(),
            en.e_ack().to_string(),
            self.t_total.to_string(),
            self.t_per_packet.to_string(),
            self.throughput.to_string(),
            self.e_total.to_string(),
            self.e_per_packet.to_string(),
            opt(self.sim.map(|s| s.mean_t)),
            opt(self.sim.map(|s| s.std_err_t)),
            opt(self.sim.map(|s| s.mean_e)),
            opt(self.sim.map(|s| s.std_err_e)),
            self.state_count.map(|c| c.to_string()).unwrap_or_default(),
            self.solver_path.clone(),
            self.curve_label.clone(),
        ]
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}
