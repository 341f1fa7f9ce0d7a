//! Seeded synthetic sources with known entropy rates.
//!
//! Everything is driven by ChaCha8 with an explicit seed, so any sequence
//! can be regenerated from its recorded seed on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// Independent draws from a fixed distribution.
    Iid { probs: Vec<f64> },
    /// Order-1 chain; `transition[i][j]` is P(next = j | current = i).
    /// The first symbol is drawn from the stationary distribution.
    Markov { transition: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub d: u16,
    pub seed: u64,
}

const ROW_SUM_TOL: f64 = 1e-12;

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.len() > 256 {
        return Err(Error::Stochastic(format!(
            "distribution over {} symbols",
            p.len()
        )));
    }
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::Stochastic("negative or non-finite entry".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::Stochastic(format!("row sums to {sum}")));
    }
    Ok(())
}

impl SourceSpec {
    pub fn iid(probs: Vec<f64>, seed: u64) -> Result<Self> {
        check_distribution(&probs)?;
        let d = probs.len() as u16;
        Ok(SourceSpec {
            kind: SourceKind::Iid { probs },
            d,
            seed,
        })
    }

    pub fn iid_uniform(d: u16, seed: u64) -> Result<Self> {
        if !(2..=256).contains(&d) {
            return Err(Error::Stochastic(format!("alphabet size {d}")));
        }
        Self::iid(vec![1.0 / f64::from(d); usize::from(d)], seed)
    }

    pub fn markov(transition: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let d = transition.len();
        if !(2..=256).contains(&d) {
            return Err(Error::Stochastic(format!("{d} states")));
        }
        for row in &transition {
            if row.len() != d {
                return Err(Error::Stochastic("table is not square".into()));
            }
            check_distribution(row)?;
        }
        Ok(SourceSpec {
            kind: SourceKind::Markov { transition },
            d: d as u16,
            seed,
        })
    }

    /// Analytic entropy rate in bits per symbol: `-Σ p log2 p` for IID,
    /// the stationary conditional entropy for the chain.
    pub fn entropy_rate(&self) -> f64 {
        match &self.kind {
            SourceKind::Iid { probs } => entropy_bits(probs),
            SourceKind::Markov { transition } => {
                let pi = stationary(transition);
                pi.iter()
                    .zip(transition)
                    .map(|(&w, row)| w * entropy_bits(row))
                    .sum()
            }
        }
    }

    /// Deterministic sample of length `n` given the spec's seed.
    pub fn generate(&self, n: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(n);
        match &self.kind {
            SourceKind::Iid { probs } => {
                for _ in 0..n {
                    out.push(draw(&mut rng, probs));
                }
            }
            SourceKind::Markov { transition } => {
                if n == 0 {
                    return out;
                }
                let pi = stationary(transition);
                let mut state = draw(&mut rng, &pi);
                out.push(state);
                for _ in 1..n {
                    state = draw(&mut rng, &transition[state as usize]);
                    out.push(state);
                }
            }
        }
        out
    }
}

fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

/// Stationary distribution by damped power iteration; the damping kills
/// oscillation on periodic chains.
fn stationary(t: &[Vec<f64>]) -> Vec<f64> {
    let d = t.len();
    let mut pi = vec![1.0 / d as f64; d];
    let mut next = vec![0.0; d];
    for _ in 0..100_000 {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for (i, row) in t.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                next[j] += pi[i] * p;
            }
        }
        let mut delta = 0.0;
        for j in 0..d {
            let blended = 0.5 * pi[j] + 0.5 * next[j];
            delta += (blended - pi[j]).abs();
            pi[j] = blended;
        }
        if delta < 1e-15 {
            break;
        }
    }
    let norm: f64 = pi.iter().sum();
    for v in pi.iter_mut() {
        *v /= norm;
    }
    pi
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> u8 {
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if r < acc {
            return i as u8;
        }
    }
    (probs.len() - 1) as u8
}
