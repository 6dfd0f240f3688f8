//! Shared parameters of the three-node relay channel.
//!
//! A source `s` holds `n` packets for a sink `d`; a half-duplex relay `r`
//! overhears the source and forwards. The medium is time-shared: each slot
//! belongs to the source with probability `alpha` and to the relay otherwise.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Where random linear network coding is performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Source and relay both code; analysed with the fluid-flow model.
    CodeBoth,
    /// Source sends uncoded packets, relay mixes everything it has stored.
    CodeRelayOnly,
    /// Source sends random mixtures, relay queues and forwards them.
    CodeSourceOnly,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::CodeBoth, Scheme::CodeRelayOnly, Scheme::CodeSourceOnly];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::CodeBoth => "both",
            Scheme::CodeRelayOnly => "relay-only",
            Scheme::CodeSourceOnly => "source-only",
        }
    }

    /// Schemes analysed through an absorbing Markov chain.
    pub fn uses_chain(self) -> bool {
        !matches!(self, Scheme::CodeBoth)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "both" | "code-both" => Ok(Scheme::CodeBoth),
            "relay-only" | "relay" => Ok(Scheme::CodeRelayOnly),
            "source-only" | "source" => Ok(Scheme::CodeSourceOnly),
            other => Err(Error::invalid(
                "scheme",
                format!("unknown scheme {other:?} (expected both, relay-only or source-only)"),
            )),
        }
    }
}

fn check_probability(field: &'static str, p: f64) -> Result<f64> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(field, format!("{p} is not a probability in [0, 1]")));
    }
    Ok(p)
}

/// Per-slot packet success probabilities on the three links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    p_sd: f64,
    p_sr: f64,
    p_rd: f64,
}

impl ChannelParams {
    pub fn new(p_sd: f64, p_sr: f64, p_rd: f64) -> Result<Self> {
        Ok(Self {
            p_sd: check_probability("p_sd", p_sd)?,
            p_sr: check_probability("p_sr", p_sr)?,
            p_rd: check_probability("p_rd", p_rd)?,
        })
    }

    /// Source to sink.
    pub fn p_sd(&self) -> f64 {
        self.p_sd
    }

    /// Source to relay.
    pub fn p_sr(&self) -> f64 {
        self.p_sr
    }

    /// Relay to sink.
    pub fn p_rd(&self) -> f64 {
        self.p_rd
    }
}

/// Energy spent per packet transmitted, received at the relay, or coded,
/// plus the one-off cost for the source to hear the final acknowledgement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    e_tx: f64,
    e_rx: f64,
    e_nc: f64,
    e_ack: f64,
}

impl EnergyParams {
    pub fn new(e_tx: f64, e_rx: f64, e_nc: f64, e_ack: f64) -> Result<Self> {
        for (field, v) in [("e_tx", e_tx), ("e_rx", e_rx), ("e_nc", e_nc), ("e_ack", e_ack)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(field, format!("{v} is not a finite nonnegative energy")));
            }
        }
        Ok(Self {
            e_tx,
            e_rx,
            e_nc,
            e_ack,
        })
    }

    /// All four terms equal to one.
    pub fn unit() -> Self {
        Self {
            e_tx: 1.0,
            e_rx: 1.0,
            e_nc: 1.0,
            e_ack: 1.0,
        }
    }

    pub fn e_tx(&self) -> f64 {
        self.e_tx
    }

    pub fn e_rx(&self) -> f64 {
        self.e_rx
    }

    pub fn e_nc(&self) -> f64 {
        self.e_nc
    }

    pub fn e_ack(&self) -> f64 {
        self.e_ack
    }
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Degrees of freedom held by the sink and relay.
///
/// `m` are known only to the sink, `k` are shared by relay and sink, `l`
/// are known only to the relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DofState {
    pub m: usize,
    pub k: usize,
    pub l: usize,
}

impl DofState {
    pub const fn new(m: usize, k: usize, l: usize) -> Self {
        Self { m, k, l }
    }

    /// Rank at the sink.
    pub fn sink_rank(&self) -> usize {
        self.m + self.k
    }

    pub fn is_absorbing(&self, n: usize) -> bool {
        self.m + self.k == n
    }
}

impl fmt::Display for DofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.m, self.k, self.l)
    }
}

/// Scheme-specific state validity. The fluid-flow scheme has no chain; it
/// shares the relay-only predicate.
pub fn is_valid_state(s: DofState, scheme: Scheme, n: usize, x: usize) -> bool {
    match scheme {
        Scheme::CodeSourceOnly => s.m + s.k <= n && s.k + s.l <= x,
        Scheme::CodeRelayOnly | Scheme::CodeBoth => s.m + s.k + s.l <= n,
    }
}

/// Expected energy consumed per slot, `E_use`.
///
/// Every slot pays one transmission. While the relay participates
/// (`alpha < 1`) it listens to each source slot. Coding is charged to the
/// slots owned by the coding node(s).
pub fn energy_rate(scheme: Scheme, alpha: f64, energy: &EnergyParams) -> f64 {
    let listen = if alpha < 1.0 { alpha * energy.e_rx } else { 0.0 };
    let coding = match scheme {
        Scheme::CodeBoth => energy.e_nc,
        Scheme::CodeRelayOnly => (1.0 - alpha) * energy.e_nc,
        Scheme::CodeSourceOnly => alpha * energy.e_nc,
    };
    energy.e_tx + listen + coding
}

/// A scheme together with its packet count, relay memory and time share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    scheme: Scheme,
    n: usize,
    x: usize,
    alpha: f64,
}

impl SchemeConfig {
    /// Validates the configuration. Relay memory is forced to `n` for the
    /// relay-only and both-coding schemes, where the relay keeps everything.
    pub fn new(scheme: Scheme, n: usize, x: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "at least one packet is required"));
        }
        let x = match scheme {
            Scheme::CodeSourceOnly => {
                if x == 0 || x > n {
                    return Err(Error::invalid("x", format!("relay memory {x} must lie in [1, n={n}]")));
                }
                x
            }
            _ => n,
        };
        if alpha.is_nan() || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(
                "alpha",
                format!("{alpha} is not a time share in [0, 1]"),
            ));
        }
        if scheme == Scheme::CodeBoth && alpha == 0.0 {
            return Err(Error::invalid("alpha", "coding at both nodes requires alpha > 0"));
        }
        Ok(Self { scheme, n, x, alpha })
    }

    pub fn relay_only(n: usize, alpha: f64) -> Result<Self> {
        Self::new(Scheme::CodeRelayOnly, n, n, alpha)
    }

    pub fn source_only(n: usize, x: usize, alpha: f64) -> Result<Self> {
        Self::new(Scheme::CodeSourceOnly, n, x, alpha)
    }

    pub fn both(n: usize, alpha: f64) -> Result<Self> {
        Self::new(Scheme::CodeBoth, n, n, alpha)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.scheme, self.n, self.x, alpha)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}
