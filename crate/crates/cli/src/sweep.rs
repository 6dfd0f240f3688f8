//! Parameter sweeps described by a flat `key = value` file.
//!
//! Keys mirror the command-line flags. A value is a single item, a comma
//! separated list, or an inclusive numeric range `start:stop:step`. Lines
//! starting with `#` are comments.
//!
//! ```text
//! scheme = relay-only, source-only
//! n = 1, 2, 5, 10
//! x = 1:3:1
//! alpha = 0:1:0.05
//! psd = 0.5
//! psr = 0.8
//! prd = 0.8
//! ```
//!
//! Points are enumerated with `scheme` outermost, then `n`, `x`, `alpha`,
//! `psd`, `psr`, `prd`, `etx`, `erx`, `enc`, `eack`, each in the order
//! written. `x` only applies to the source-only scheme, and points with
//! `x > n` are skipped. Without `alpha` the time share is optimized for
//! `objective` (default `time`).

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use ncrelay_core::{
    ChannelParams, EnergyParams, ObjectiveKind, Scheme, SimConfig, DEFAULT_GRID_POINTS, MIN_GRID_POINTS,
};

use crate::error::{CliError, Result};
use crate::point::{AlphaChoice, Point, SimMode, SimSettings};
use crate::row::Row;

pub const DEFAULT_MAX_POINTS: usize = 100_000;

const KEYS: [&str; 22] = [
    "scheme",
    "n",
    "x",
    "alpha",
    "objective",
    "psd",
    "psr",
    "prd",
    "etx",
    "erx",
    "enc",
    "eack",
    "grid-points",
    "simulate",
    "sim-mode",
    "trials",
    "seed",
    "field-size",
    "max-slots",
    "allow-truncation",
    "max-points",
    "label",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    pub n: Vec<usize>,
    pub x: Option<Vec<usize>>,
    pub alpha: Option<Vec<f64>>,
    pub objective: ObjectiveKind,
    pub p_sd: Vec<f64>,
    pub p_sr: Vec<f64>,
    pub p_rd: Vec<f64>,
    pub e_tx: Vec<f64>,
    pub e_rx: Vec<f64>,
    pub e_nc: Vec<f64>,
    pub e_ack: Vec<f64>,
    pub grid_points: usize,
    pub sim: Option<SimSettings>,
    pub max_points: usize,
    pub label: String,
}

/// Rounds away binary noise from `start + i * step`.
pub(crate) fn tidy(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

fn parse_item<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim()
        .parse::<T>()
        .map_err(|_| format!("cannot parse {:?}", s.trim()))
}

fn parse_f64_values(raw: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(parse_item(single)?),
            [start, stop, step] => {
                let (start, stop, step): (f64, f64, f64) = (parse_item(start)?, parse_item(stop)?, parse_item(step)?);
                if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
                    return Err(format!("bad range {:?}: need start <= stop and step > 0", part.trim()));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                out.extend((0..count).map(|i| tidy(start + i as f64 * step)));
            }
            _ => {
                return Err(format!(
                    "bad value {:?}: expected v, a,b,c or start:stop:step",
                    part.trim()
                ))
            }
        }
    }
    Ok(out)
}

fn parse_usize_values(raw: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(parse_item(single)?),
            [start, stop, step] => {
                let (start, stop, step): (usize, usize, usize) =
                    (parse_item(start)?, parse_item(stop)?, parse_item(step)?);
                if step == 0 || stop < start {
                    return Err(format!("bad range {:?}: need start <= stop and step > 0", part.trim()));
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => {
                return Err(format!(
                    "bad value {:?}: expected v, a,b,c or start:stop:step",
                    part.trim()
                ))
            }
        }
    }
    Ok(out)
}

fn parse_bool(raw: &str) -> std::result::Result<bool, String> {
    match raw.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("cannot parse {other:?} as a boolean")),
    }
}

impl SweepSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        let mut problems: Vec<String> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {}: expected `key = value`", lineno + 1));
                continue;
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                problems.push(format!("unknown key `{key}`"));
            } else if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                problems.push(format!("duplicate key `{key}`"));
            }
        }

        let objective_given = entries.contains_key("objective");
        let mut take = |key: &str| entries.remove(key);
        let mut fail = |key: &str, msg: String| problems.push(format!("`{key}`: {msg}"));

        macro_rules! field {
            ($key:literal, $parse:expr, $default:expr) => {
                match take($key) {
                    None => $default,
                    Some(raw) => match $parse(raw.as_str()) {
                        Ok(v) => v,
                        Err(msg) => {
                            fail($key, msg);
                            $default
                        }
                    },
                }
            };
        }

        let schemes: Vec<Scheme> = field!(
            "scheme",
            |raw: &str| raw
                .split(',')
                .map(|s| s.parse::<Scheme>().map_err(|e| e.to_string()))
                .collect(),
            Vec::new()
        );
        let n = field!("n", parse_usize_values, vec![1]);
        let x = field!("x", |r: &str| parse_usize_values(r).map(Some), None);
        let alpha = field!("alpha", |r: &str| parse_f64_values(r).map(Some), None);
        let objective = field!(
            "objective",
            |r: &str| r.parse::<ObjectiveKind>().map_err(|e| e.to_string()),
            ObjectiveKind::Time
        );
        let p_sd = field!("psd", parse_f64_values, Vec::new());
        let p_sr = field!("psr", parse_f64_values, Vec::new());
        let p_rd = field!("prd", parse_f64_values, Vec::new());
        let e_tx = field!("etx", parse_f64_values, vec![1.0]);
        let e_rx = field!("erx", parse_f64_values, vec![1.0]);
        let e_nc = field!("enc", parse_f64_values, vec![1.0]);
        let e_ack = field!("eack", parse_f64_values, vec![1.0]);
        let grid_points = field!("grid-points", parse_item::<usize>, DEFAULT_GRID_POINTS);
        let simulate = field!("simulate", parse_bool, false);
        let mode = field!("sim-mode", parse_item::<SimMode>, SimMode::Packets);
        let defaults = SimConfig::default();
        let trials = field!("trials", parse_item::<usize>, defaults.trials);
        let seed = field!("seed", parse_item::<u64>, defaults.master_seed);
        let field_size = field!("field-size", parse_item::<u64>, defaults.field_size);
        let max_slots = field!("max-slots", parse_item::<u64>, defaults.max_slots);
        let allow_truncation = field!("allow-truncation", parse_bool, false);
        let max_points = field!("max-points", parse_item::<usize>, DEFAULT_MAX_POINTS);
        let label = field!("label", |r: &str| Ok::<_, String>(r.to_string()), String::new());

        for (key, values) in [
            ("scheme", schemes.len()),
            ("psd", p_sd.len()),
            ("psr", p_sr.len()),
            ("prd", p_rd.len()),
        ] {
            if values == 0 && !problems.iter().any(|p| p.starts_with(&format!("`{key}`"))) {
                problems.push(format!("`{key}`: required"));
            }
        }
        if alpha.is_some() && objective_given {
            problems.push("`alpha`, `objective`: give a time share or an objective, not both".to_string());
        }
        if grid_points < MIN_GRID_POINTS {
            problems.push(format!("`grid-points`: must be at least {MIN_GRID_POINTS}"));
        }
        if !problems.is_empty() {
            return Err(CliError::Usage(format!(
                "invalid sweep spec:\n  {}",
                problems.join("\n  ")
            )));
        }

        let sim = simulate.then_some(SimSettings {
            mode,
            config: SimConfig {
                trials,
                master_seed: seed,
                field_size,
                max_slots,
                fail_on_truncation: !allow_truncation,
            },
        });
        Ok(Self {
            schemes,
            n,
            x,
            alpha,
            objective,
            p_sd,
            p_sr,
            p_rd,
            e_tx,
            e_rx,
            e_nc,
            e_ack,
            grid_points,
            sim,
            max_points,
            label,
        })
    }

    /// Enumerates the cross product in output order.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut channels = Vec::new();
        for &p_sd in &self.p_sd {
            for &p_sr in &self.p_sr {
                for &p_rd in &self.p_rd {
                    channels.push(ChannelParams::new(p_sd, p_sr, p_rd)?);
                }
            }
        }
        let mut energies = Vec::new();
        for &e_tx in &self.e_tx {
            for &e_rx in &self.e_rx {
                for &e_nc in &self.e_nc {
                    for &e_ack in &self.e_ack {
                        energies.push(EnergyParams::new(e_tx, e_rx, e_nc, e_ack)?);
                    }
                }
            }
        }
        let alphas: Vec<AlphaChoice> = match &self.alpha {
            Some(list) => list.iter().map(|&a| AlphaChoice::Fixed(a)).collect(),
            None => vec![AlphaChoice::Optimal(self.objective)],
        };

        let mut points = Vec::new();
        for &scheme in &self.schemes {
            for &n in &self.n {
                let memories: Vec<Option<usize>> = match (&self.x, scheme) {
                    (Some(xs), Scheme::CodeSourceOnly) => xs.iter().filter(|&&x| x <= n).map(|&x| Some(x)).collect(),
                    _ => vec![None],
                };
                for &x in &memories {
                    for &alpha in &alphas {
                        for &channel in &channels {
                            for &energy in &energies {
                                points.push(Point {
                                    scheme,
                                    n,
                                    x,
                                    alpha,
                                    channel,
                                    energy,
                                    label: self.label.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(points)
    }

    /// Evaluates all points in parallel, returning rows in point order.
    pub fn run(&self) -> Result<Vec<Row>> {
        let points = self.points()?;
        if points.len() > self.max_points {
            return Err(CliError::Usage(format!(
                "sweep has {} points, above the cap of {} (raise `max-points`)",
                points.len(),
                self.max_points
            )));
        }
        points
            .par_iter()
            .map(|p| p.compute_or_unsolved(self.grid_points, self.sim.as_ref()))
            .collect()
    }
}

pub fn spec_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Flat `key = value` run manifest written next to the sweep output.
pub fn manifest(spec: &SweepSpec, spec_text: &str, spec_path: &str, points: usize, timestamp: u64) -> String {
    let seed = spec
        .sim
        .map(|s| s.config.master_seed.to_string())
        .unwrap_or_else(|| "none".to_string());
    format!(
        "version = {}\ntimestamp = {timestamp}\nseed = {seed}\nspec_sha256 = {}\nspec_path = {spec_path}\npoints = {points}\n",
        env!("CARGO_PKG_VERSION"),
        spec_hash(spec_text),
    )
}
