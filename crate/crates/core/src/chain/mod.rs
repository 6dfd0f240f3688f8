//! Absorbing Markov chains over degree-of-freedom states.
//!
//! Index 0 is the virtual terminal state; every state whose sink rank has
//! reached `n` moves there with probability one. The start state `(0,0,0)`
//! always carries the largest index.

mod relay;
mod source;

use std::collections::HashMap;

pub use relay::{build_relay_chain, relay_order_key, state_count_relay};
pub use source::{build_source_chain, source_order_key, state_count_source};

use crate::model::{DofState, Scheme};

/// Index of the virtual terminal state.
pub const TERMINAL: usize = 0;

/// One sparse row: `(target, probability)` sorted by target, zero masses omitted.
pub type Row = Vec<(usize, f64)>;

#[derive(Debug, Clone)]
pub struct AbsorbingChain {
    scheme: Scheme,
    n: usize,
    x: usize,
    alpha: f64,
    /// `states[i - 1]` is the state at chain index `i`.
    states: Vec<DofState>,
    index_of: HashMap<DofState, usize>,
    rows: Vec<Row>,
    topological: bool,
}

impl AbsorbingChain {
    /// Assembles a chain from states already sorted by decreasing order key.
    /// `transitions` yields the non-terminal row for a non-absorbing state.
    fn assemble<F>(
        scheme: Scheme,
        n: usize,
        x: usize,
        alpha: f64,
        states: Vec<DofState>,
        topological: bool,
        transitions: F,
    ) -> Self
    where
        F: Fn(DofState, &mut RowBuilder<'_>),
    {
        let index_of: HashMap<DofState, usize> = states.iter().enumerate().map(|(i, &s)| (s, i + 1)).collect();
        let mut rows = Vec::with_capacity(states.len() + 1);
        rows.push(vec![(TERMINAL, 1.0)]);
        for &s in &states {
            if s.is_absorbing(n) {
                rows.push(vec![(TERMINAL, 1.0)]);
                continue;
            }
            let mut builder = RowBuilder {
                index_of: &index_of,
                entries: Vec::with_capacity(8),
            };
            transitions(s, &mut builder);
            rows.push(builder.finish());
        }
        Self {
            scheme,
            n,
            x,
            alpha,
            states,
            index_of,
            rows,
            topological,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Relay memory.
    pub fn x(&self) -> usize {
        self.x
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of chain states including the terminal.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start_index(&self) -> usize {
        self.states.len()
    }

    /// The degree-of-freedom state at `index`, `None` for the terminal.
    pub fn state(&self, index: usize) -> Option<DofState> {
        index.checked_sub(1).and_then(|i| self.states.get(i).copied())
    }

    pub fn states(&self) -> &[DofState] {
        &self.states
    }

    pub fn index_of(&self, s: DofState) -> Option<usize> {
        self.index_of.get(&s).copied()
    }

    pub fn row(&self, index: usize) -> &[(usize, f64)] {
        &self.rows[index]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        let row = &self.rows[from];
        row.binary_search_by_key(&to, |&(j, _)| j)
            .map(|pos| row[pos].1)
            .unwrap_or(0.0)
    }

    /// True for states that step to the terminal (and for the terminal itself).
    pub fn is_absorbing(&self, index: usize) -> bool {
        self.state(index).is_none_or(|s| s.is_absorbing(self.n))
    }

    /// Whether the builder claims a topological order, i.e. forward
    /// substitution applies. Checked by [`AbsorbingChain::verify_topological_order`].
    pub fn has_topological_order(&self) -> bool {
        self.topological
    }

    /// The ordering key the builder sorted by, if this chain is acyclic apart
    /// from self-loops.
    pub fn topo_key(&self, s: DofState) -> Option<(usize, usize, usize)> {
        self.topological.then(|| relay_order_key(s))
    }

    /// Checks that every non-self transition out of a substantive state
    /// strictly increases the order key and lands on a smaller index.
    pub fn verify_topological_order(&self) -> bool {
        (1..self.len()).all(|i| {
            let from = self.state(i).expect("substantive state");
            self.rows[i].iter().filter(|&&(j, _)| j != i).all(|&(j, _)| {
                j < i
                    && self
                        .state(j)
                        .is_none_or(|to| relay_order_key(to) > relay_order_key(from))
            })
        })
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Accumulates probability mass by target state, merging duplicates.
pub(crate) struct RowBuilder<'a> {
    index_of: &'a HashMap<DofState, usize>,
    entries: Vec<(usize, f64)>,
}

impl RowBuilder<'_> {
    pub(crate) fn add(&mut self, to: DofState, mass: f64) {
        if mass == 0.0 {
            return;
        }
        let j = *self
            .index_of
            .get(&to)
            .unwrap_or_else(|| panic!("transition to invalid state {to}"));
        match self.entries.iter_mut().find(|(t, _)| *t == j) {
            Some(e) => e.1 += mass,
            None => self.entries.push((j, mass)),
        }
    }

    fn finish(mut self) -> Row {
        self.entries.retain(|&(_, p)| p != 0.0);
        self.entries.sort_by_key(|&(j, _)| j);
        self.entries
    }
}
