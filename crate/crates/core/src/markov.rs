//! The smoothed adaptive k-th order Markov conditional.
//!
//! For a query `(context window, next symbol)` the whole ladder of
//! conditionals `B(next | window, k)` for `k = -1..=kmax` is computed bottom
//! up: order `-1` is uniform `1/D`, and each higher order divides
//! `occ(context_k·next) + B(next | ·, k-1)` by `ext(context_k) + 1`, where
//! `context_k` is the length-`k` suffix of the window. Counting the
//! lower-order value as a fractional observation keeps every conditional
//! strictly positive and exactly normalized without Laplace-style mass
//! spreading.

use crate::counts::CountStore;
use crate::{Error, Result};

/// Smoothing rule for the conditional ladder.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Smoothing {
    /// Add the order-(k-1) conditional in the numerator and 1 in the
    /// denominator (the default).
    #[default]
    LowerOrder,
    /// Additive rule: add `beta` per symbol in the numerator and `beta·D`
    /// in the denominator (`beta = 1` Laplace, `beta = 1/2`
    /// Krichevsky-Trofimov). Kept for A/B experiments.
    Additive(f64),
}

impl Smoothing {
    pub fn label(&self) -> String {
        match self {
            Smoothing::LowerOrder => "lower-order".into(),
            Smoothing::Additive(b) => format!("additive:{b}"),
        }
    }
}

/// Conditional probabilities of one next symbol at orders `-1..=max_order`.
#[derive(Debug, Clone)]
pub struct ConditionalLadder {
    /// `values[k + 1]` is the order-`k` conditional.
    values: Vec<f64>,
}

impl ConditionalLadder {
    /// Highest order in the ladder, `min(window length, s)`.
    pub fn max_order(&self) -> usize {
        self.values.len() - 2
    }

    /// Order-`k` conditional for `k in -1..=max_order`.
    pub fn value(&self, k: isize) -> f64 {
        self.values[(k + 1) as usize]
    }
}

/// Evaluate the conditional ladder for `next` after `window`, using counts
/// from `store`. The window is given oldest-first; orders above the window
/// length are truncated (they carry no switch mass at that point anyway).
pub fn conditional(
    store: &CountStore,
    window: &[u8],
    next: u8,
    d: u16,
    smoothing: Smoothing,
) -> Result<ConditionalLadder> {
    if d < 2 {
        return Err(Error::Config(format!("alphabet size {d} < 2")));
    }
    let df = f64::from(d);
    let kmax = window.len().min(store.depth_cap());
    let mut values = Vec::with_capacity(kmax + 2);
    values.push(1.0 / df);
    let mut node = Some(0usize);
    for k in 0..=kmax {
        let (occ, ext) = match node {
            Some(id) => store.node_stats(id, next),
            None => (0, 0),
        };
        let prev = *values.last().unwrap();
        let v = match smoothing {
            Smoothing::LowerOrder => (occ as f64 + prev) / (ext as f64 + 1.0),
            Smoothing::Additive(beta) => (occ as f64 + beta) / (ext as f64 + beta * df),
        };
        debug_assert!(v > 0.0 && v <= 1.0, "conditional out of range: {v}");
        values.push(v);
        if k < kmax {
            let back = window[window.len() - 1 - k];
            node = node.and_then(|id| store.descend(id, back));
        }
    }
    Ok(ConditionalLadder { values })
}
