//! Expected completion time and energy from an absorbing chain.
//!
//! With `T_i` the expected number of slots from state `i` until the sink
//! holds `n` degrees of freedom, `T = 1 + P T` on transient states and
//! `T = 0` on completed ones. The hop into the virtual terminal is not a
//! transmission and is not counted.
//!
//! Two solvers are provided. Forward substitution walks the indices upward
//! and needs every non-self transition to point at a smaller index. The
//! sparse LU path factors `I - P` restricted to the transient states and
//! works for any chain, including the cyclic source-only chain.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;

use crate::chain::{build_relay_chain, build_source_chain, AbsorbingChain, TERMINAL};
use crate::error::{Error, Result};
use crate::fluidflow::flow_rate;
use crate::model::{energy_rate, ChannelParams, DofState, EnergyParams, Scheme, SchemeConfig};

/// Residual above which a solve is reported as failed, relative to `max(1, |T|)`.
const RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverPath {
    ForwardSubstitution,
    SparseLu,
    /// Closed-form fluid-flow evaluation (coding at both nodes).
    FluidFlow,
}

impl SolverPath {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverPath::ForwardSubstitution => "forward-substitution",
            SolverPath::SparseLu => "sparse-lu",
            SolverPath::FluidFlow => "fluid-flow",
        }
    }
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct PassageTimes {
    /// Expected slots to completion, indexed like the chain. Zero on the
    /// terminal and completed states, `+inf` on states that may never finish.
    pub times: Vec<f64>,
    pub path: SolverPath,
    /// `max_i |((I - P) T - 1)_i|` over the solved states.
    pub residual: f64,
}

/// Solves with forward substitution when the chain has a topological
/// order, otherwise with sparse LU.
pub fn first_passage(chain: &AbsorbingChain) -> Result<PassageTimes> {
    let path = if chain.has_topological_order() {
        SolverPath::ForwardSubstitution
    } else {
        SolverPath::SparseLu
    };
    first_passage_with(chain, path)
}

pub fn first_passage_with(chain: &AbsorbingChain, path: SolverPath) -> Result<PassageTimes> {
    let live = live_states(chain)?;
    let times = match path {
        SolverPath::ForwardSubstitution => forward_substitution(chain, &live)?,
        SolverPath::SparseLu => sparse_lu(chain, &live)?,
        SolverPath::FluidFlow => return Err(Error::invalid("solver", "fluid flow does not apply to chains")),
    };
    let residual = residual(chain, &live, &times);
    let scale = times
        .iter()
        .filter(|t| t.is_finite())
        .fold(1.0f64, |a, &t| a.max(t.abs()));
    if residual.is_nan() || residual > RESIDUAL_LIMIT * scale {
        return Err(Error::SingularSystem { residual });
    }
    Ok(PassageTimes { times, path, residual })
}

/// Marks transient states from which completion is certain. Fails if the
/// start state can get stuck with positive probability.
fn live_states(chain: &AbsorbingChain) -> Result<Vec<bool>> {
    let len = chain.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); len];
    for (i, row) in chain.rows().iter().enumerate() {
        for &(j, p) in row {
            if j != i && p > 0.0 {
                preds[j].push(i);
            }
        }
    }
    let reverse_reach = |seeds: &mut dyn Iterator<Item = usize>| {
        let mut seen = vec![false; len];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in seeds {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(j) = queue.pop_front() {
            for &i in &preds[j] {
                if !seen[i] {
                    seen[i] = true;
                    queue.push_back(i);
                }
            }
        }
        seen
    };

    let finishes = reverse_reach(&mut std::iter::once(TERMINAL));
    let doomed = reverse_reach(&mut (0..len).filter(|&i| !finishes[i]));
    let start = chain.start_index();
    if doomed[start] {
        return Err(Error::NonAbsorbing {
            state: first_stuck_state(chain, &finishes),
        });
    }
    Ok((0..len).map(|i| !doomed[i] && !chain.is_absorbing(i)).collect())
}

fn first_stuck_state(chain: &AbsorbingChain, finishes: &[bool]) -> DofState {
    let mut seen = vec![false; chain.len()];
    let mut queue = VecDeque::from([chain.start_index()]);
    seen[chain.start_index()] = true;
    while let Some(i) = queue.pop_front() {
        if !finishes[i] {
            return chain.state(i).unwrap_or_default();
        }
        for &(j, p) in chain.row(i) {
            if p > 0.0 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    chain.state(chain.start_index()).unwrap_or_default()
}

fn initial_times(chain: &AbsorbingChain, live: &[bool]) -> Vec<f64> {
    (0..chain.len())
        .map(|i| {
            if live[i] || chain.is_absorbing(i) {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn forward_substitution(chain: &AbsorbingChain, live: &[bool]) -> Result<Vec<f64>> {
    let mut t = initial_times(chain, live);
    for i in 1..chain.len() {
        if !live[i] {
            continue;
        }
        let mut stay = 0.0;
        let mut acc = 1.0;
        for &(j, p) in chain.row(i) {
            if j == i {
                stay = p;
            } else if j < i {
                acc += p * t[j];
            } else {
                return Err(Error::NotTopological);
            }
        }
        t[i] = acc / (1.0 - stay);
    }
    Ok(t)
}

fn sparse_lu(chain: &AbsorbingChain, live: &[bool]) -> Result<Vec<f64>> {
    let unknowns: Vec<usize> = (0..chain.len()).filter(|&i| live[i]).collect();
    let mut position = vec![usize::MAX; chain.len()];
    for (p, &i) in unknowns.iter().enumerate() {
        position[i] = p;
    }
    // Live states only lead to live or completed states, so every retained
    // column is an unknown.
    let rows: Vec<Vec<(usize, f64)>> = unknowns
        .iter()
        .enumerate()
        .map(|(p, &i)| {
            let mut row: Vec<(usize, f64)> = vec![(p, 1.0)];
            for &(j, prob) in chain.row(i) {
                if !live[j] {
                    continue;
                }
                let q = position[j];
                match row.iter_mut().find(|e| e.0 == q) {
                    Some(e) => e.1 -= prob,
                    None => row.push((q, -prob)),
                }
            }
            row
        })
        .collect();

    let lu = SparseLu::factor(&rows)?;
    let solution = lu.solve(vec![1.0; unknowns.len()]);

    let mut t = initial_times(chain, live);
    for (p, &i) in unknowns.iter().enumerate() {
        t[i] = solution[p];
    }
    Ok(t)
}

fn residual(chain: &AbsorbingChain, live: &[bool], t: &[f64]) -> f64 {
    (0..chain.len())
        .filter(|&i| live[i])
        .map(|i| {
            let pt: f64 = chain.row(i).iter().map(|&(j, p)| p * t[j]).sum();
            (t[i] - pt - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Row-oriented sparse LU without pivoting.
///
/// `I - P` on transient states is a nonsingular M-matrix once completion is
/// certain, so the diagonal pivots stay positive.
struct SparseLu {
    /// Strictly lower part, unit diagonal implied.
    lower: Vec<Vec<(usize, f64)>>,
    /// Upper part; the diagonal entry comes first.
    upper: Vec<Vec<(usize, f64)>>,
}

impl SparseLu {
    fn factor(rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let n = rows.len();
        let mut lower = Vec::with_capacity(n);
        let mut upper: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut work = vec![0.0; n];
        let mut touched_flag = vec![false; n];
        let mut touched = Vec::new();
        let mut pending = BinaryHeap::new();

        for (i, row) in rows.iter().enumerate() {
            for &(j, v) in row {
                work[j] += v;
                if !touched_flag[j] {
                    touched_flag[j] = true;
                    touched.push(j);
                    if j < i {
                        pending.push(Reverse(j));
                    }
                }
            }
            let mut l_row = Vec::new();
            while let Some(Reverse(k)) = pending.pop() {
                let factor = work[k] / upper[k][0].1;
                work[k] = 0.0;
                if factor == 0.0 {
                    continue;
                }
                l_row.push((k, factor));
                for &(j, u) in &upper[k][1..] {
                    if !touched_flag[j] {
                        touched_flag[j] = true;
                        touched.push(j);
                        if j < i {
                            pending.push(Reverse(j));
                        }
                    }
                    work[j] -= factor * u;
                }
            }

            let diag = work[i];
            if !diag.is_finite() || diag.abs() < f64::EPSILON {
                return Err(Error::SingularSystem {
                    residual: f64::INFINITY,
                });
            }
            let mut u_row = vec![(i, diag)];
            touched.sort_unstable();
            for &j in &touched {
                if j > i && work[j] != 0.0 {
                    u_row.push((j, work[j]));
                }
                work[j] = 0.0;
                touched_flag[j] = false;
            }
            touched.clear();
            lower.push(l_row);
            upper.push(u_row);
        }
        Ok(Self { lower, upper })
    }

    fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        for i in 0..b.len() {
            let s: f64 = self.lower[i].iter().map(|&(k, l)| l * b[k]).sum();
            b[i] -= s;
        }
        for i in (0..b.len()).rev() {
            let row = &self.upper[i];
            let s: f64 = row[1..].iter().map(|&(j, u)| u * b[j]).sum();
            b[i] = (b[i] - s) / row[0].1;
        }
        b
    }
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    /// Expected slots to deliver all `n` packets.
    pub t_total: f64,
    pub t_per_packet: f64,
    /// Packets per slot, `n / t_total`.
    pub throughput: f64,
    /// `t_total * E_use + E_ack` for the chain schemes.
    pub e_total: f64,
    pub e_per_packet: f64,
    /// Per-state expected slots; empty for the fluid-flow scheme.
    pub passage_times: Vec<f64>,
    /// Chain size including the terminal, `None` for the fluid-flow scheme.
    pub state_count: Option<usize>,
    pub solver_path: SolverPath,
    pub residual: f64,
}

pub fn build_chain(cfg: &SchemeConfig, ch: &ChannelParams) -> Result<AbsorbingChain> {
    match cfg.scheme() {
        Scheme::CodeRelayOnly => build_relay_chain(cfg.n(), cfg.alpha(), ch),
        Scheme::CodeSourceOnly => build_source_chain(cfg.n(), cfg.x(), cfg.alpha(), ch),
        Scheme::CodeBoth => Err(Error::invalid("scheme", "coding at both nodes has no chain model")),
    }
}

pub fn evaluate(cfg: &SchemeConfig, ch: &ChannelParams, en: &EnergyParams) -> Result<EvalResult> {
    let n = cfg.n() as f64;
    let e_use = energy_rate(cfg.scheme(), cfg.alpha(), en);
    if cfg.scheme() == Scheme::CodeBoth {
        let rate = flow_rate(ch, cfg.alpha());
        if rate <= 0.0 {
            return Err(Error::NonAbsorbing {
                state: DofState::default(),
            });
        }
        // Rateless in the limit: no acknowledgement term.
        return Ok(EvalResult {
            t_total: n / rate,
            t_per_packet: 1.0 / rate,
            throughput: rate,
            e_total: n * e_use / rate,
            e_per_packet: e_use / rate,
            passage_times: Vec::new(),
            state_count: None,
            solver_path: SolverPath::FluidFlow,
            residual: 0.0,
        });
    }

    let chain = build_chain(cfg, ch)?;
    evaluate_chain(&chain, en)
}

pub fn evaluate_chain(chain: &AbsorbingChain, en: &EnergyParams) -> Result<EvalResult> {
    let solution = first_passage(chain)?;
    let n = chain.n() as f64;
    let t_total = solution.times[chain.start_index()];
    let e_total = t_total * energy_rate(chain.scheme(), chain.alpha(), en) + en.e_ack();
    Ok(EvalResult {
        t_total,
        t_per_packet: t_total / n,
        throughput: n / t_total,
        e_total,
        e_per_packet: e_total / n,
        state_count: Some(chain.len()),
        solver_path: solution.path,
        residual: solution.residual,
        passage_times: solution.times,
    })
}
