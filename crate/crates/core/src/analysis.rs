//! Code-length series, mutual-information tables, and power-law fits.
//!
//! Block lengths always run through the powers of two `2, 4, ..., 2^⌊log2 N⌋`.
//! Code lengths for the switch models come from a single sequential pass
//! with checkpoints at each power; the second half of every
//! mutual-information block is evaluated as a fresh sequence from the
//! mode's initial (or trained) state, matching the marginal in
//! `I(X;Y) = H(X) + H(Y) - H(X,Y)`.

use std::sync::Arc;

use crate::counts::{CountStore, Mode};
use crate::lz::lz_code_length;
use crate::switch::{ModelConfig, SwitchState};
use crate::{Error, Result};

/// Which code to run.
#[derive(Debug, Clone)]
pub enum ModelChoice {
    Switch(ModelConfig),
    Lz { d: u16 },
}

impl ModelChoice {
    pub fn label(&self) -> &'static str {
        match self {
            ModelChoice::Switch(cfg) => cfg.mode.label(),
            ModelChoice::Lz { .. } => "lz",
        }
    }

    pub fn d(&self) -> u16 {
        match self {
            ModelChoice::Switch(cfg) => cfg.d,
            ModelChoice::Lz { d } => *d,
        }
    }
}

/// `(n, -log2 P(x_1^n))` at doubling block lengths.
#[derive(Debug, Clone)]
pub struct CodeLengthSeries {
    pub model: String,
    pub source: String,
    pub points: Vec<(usize, f64)>,
}

impl CodeLengthSeries {
    /// CSV rows `n,model,bits,rate_bpc`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,model,bits,rate_bpc\n");
        for &(n, bits) in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                n,
                self.model,
                bits,
                bits / n as f64
            ));
        }
        out
    }
}

/// `(n, mi)` where `mi = bits(first half) + bits(second half) - bits(block)`.
#[derive(Debug, Clone)]
pub struct MiSeries {
    pub model: String,
    pub source: String,
    pub points: Vec<(usize, f64)>,
}

impl MiSeries {
    /// CSV rows `n,model,mi_bits`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,model,mi_bits\n");
        for &(n, mi) in &self.points {
            out.push_str(&format!("{},{},{}\n", n, self.model, mi));
        }
        out
    }
}

/// Least-squares fit of `y = c · n^gamma`.
#[derive(Debug, Clone)]
pub struct PowerLawFit {
    pub c: f64,
    pub gamma: f64,
    /// Smallest and largest block length actually fitted.
    pub n_range: (usize, usize),
    /// RMS residual of `log2 y` against the fitted line.
    pub residual: f64,
    pub points_fitted: usize,
}

impl PowerLawFit {
    /// CSV rows `model,c,gamma,residual,n_min,n_max`.
    pub fn to_csv(&self, model: &str) -> String {
        format!(
            "model,c,gamma,residual,n_min,n_max\n{},{},{},{},{},{}\n",
            model, self.c, self.gamma, self.residual, self.n_range.0, self.n_range.1
        )
    }
}

fn doubling_lengths(max_n: usize) -> Vec<usize> {
    let mut ns = Vec::new();
    let mut n = 2usize;
    while n <= max_n {
        ns.push(n);
        n *= 2;
    }
    ns
}

fn check_series_pre(corpus: &[u8], max_n: usize) -> Result<()> {
    if max_n < 2 {
        return Err(Error::CorpusTooShort {
            need: 2,
            have: max_n,
        });
    }
    if corpus.len() < max_n {
        return Err(Error::CorpusTooShort {
            need: max_n,
            have: corpus.len(),
        });
    }
    Ok(())
}

fn build_state(cfg: &ModelConfig, training: Option<&Arc<CountStore>>) -> Result<SwitchState> {
    match cfg.mode {
        Mode::Plain => SwitchState::new(cfg),
        Mode::Fixed | Mode::Preadapted => {
            let store = training.ok_or(Error::MissingTraining(cfg.mode.label()))?;
            SwitchState::with_trained(cfg, store)
        }
    }
}

/// Code length of one block evaluated from a fresh state.
pub fn block_bits(
    model: &ModelChoice,
    training: Option<&Arc<CountStore>>,
    block: &[u8],
) -> Result<f64> {
    if block.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    match model {
        ModelChoice::Lz { d } => lz_code_length(block, *d),
        ModelChoice::Switch(cfg) => {
            let mut state = build_state(cfg, training)?;
            for &b in block {
                state.step(b)?;
            }
            state.code_length_bits()
        }
    }
}

/// Code lengths at doubling prefixes of `corpus`, up to `max_n`.
///
/// Switch models run one sequential pass with checkpoints at each power of
/// two; the LZ code is re-parsed per prefix because its trailing-phrase
/// charge depends on where the block ends.
pub fn code_length_series(
    model: &ModelChoice,
    training: Option<&Arc<CountStore>>,
    corpus: &[u8],
    max_n: usize,
    source: &str,
) -> Result<CodeLengthSeries> {
    check_series_pre(corpus, max_n)?;
    let ns = doubling_lengths(max_n);
    let top = *ns.last().unwrap();
    let mut points = Vec::with_capacity(ns.len());
    match model {
        ModelChoice::Lz { d } => {
            for &n in &ns {
                points.push((n, lz_code_length(&corpus[..n], *d)?));
            }
        }
        ModelChoice::Switch(cfg) => {
            let mut state = build_state(cfg, training)?;
            let mut next_checkpoint = 0usize;
            for (i, &b) in corpus[..top].iter().enumerate() {
                state.step(b)?;
                if i + 1 == ns[next_checkpoint] {
                    points.push((i + 1, state.code_length_bits()?));
                    next_checkpoint += 1;
                }
            }
        }
    }
    Ok(CodeLengthSeries {
        model: model.label().to_string(),
        source: source.to_string(),
        points,
    })
}

/// Pointwise mutual information between block halves at doubling lengths.
///
/// The first-half and whole-block terms come from the checkpointed pass;
/// the second half is priced as a fresh sequence (state and counts reset to
/// the mode's initial or trained configuration).
pub fn mi_series(
    model: &ModelChoice,
    training: Option<&Arc<CountStore>>,
    corpus: &[u8],
    max_n: usize,
    source: &str,
) -> Result<MiSeries> {
    let series = code_length_series(model, training, corpus, max_n, source)?;
    let whole: std::collections::HashMap<usize, f64> = series.points.iter().copied().collect();
    let bits_one = block_bits(model, training, &corpus[..1])?;
    let mut points = Vec::with_capacity(series.points.len());
    for &(n, whole_bits) in &series.points {
        let half = n / 2;
        let first = if half == 1 { bits_one } else { whole[&half] };
        let second = block_bits(model, training, &corpus[half..n])?;
        points.push((n, first + second - whole_bits));
    }
    Ok(MiSeries {
        model: series.model,
        source: series.source,
        points,
    })
}

/// Least squares of `y = c · n^gamma` over the points with `y > 0` inside
/// `n_range` (default: all `n >= 8`). The exponent is found by a coarse
/// grid over `[-4, 4]` refined by golden-section search; the coefficient
/// has a closed form given the exponent.
pub fn fit_power_law(
    points: &[(usize, f64)],
    n_range: Option<(usize, usize)>,
) -> Result<PowerLawFit> {
    let (lo, hi) = n_range.unwrap_or((8, usize::MAX));
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, y)| y > 0.0 && n >= lo && n <= hi)
        .map(|&(n, y)| (n as f64, y))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    // scale block lengths into (0, 1] so n^gamma stays in a tame range
    let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, y)| (n / n_max, y)).collect();
    let c_opt = |g: f64| -> f64 {
        let num: f64 = scaled.iter().map(|&(x, y)| y * x.powf(g)).sum();
        let den: f64 = scaled.iter().map(|&(x, _)| x.powf(2.0 * g)).sum();
        num / den
    };
    let sse = |g: f64| -> f64 {
        let c = c_opt(g);
        scaled
            .iter()
            .map(|&(x, y)| {
                let e = y - c * x.powf(g);
                e * e
            })
            .sum()
    };
    let mut best_g = -4.0;
    let mut best_sse = f64::INFINITY;
    let step = 1.0 / 256.0;
    let mut g = -4.0;
    while g <= 4.0 {
        let s = sse(g);
        if s < best_sse {
            best_sse = s;
            best_g = g;
        }
        g += step;
    }
    let (mut a, mut b) = (best_g - step, best_g + step);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if sse(c1) < sse(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    let gamma = 0.5 * (a + b);
    let c = c_opt(gamma) / n_max.powf(gamma);
    let residual = {
        let ss: f64 = pts
            .iter()
            .map(|&(n, y)| {
                let e = y.log2() - (c.log2() + gamma * n.log2());
                e * e
            })
            .sum();
        (ss / pts.len() as f64).sqrt()
    };
    let n_min_fit = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok(PowerLawFit {
        c,
        gamma,
        n_range: (n_min_fit as usize, n_max as usize),
        residual,
        points_fitted: pts.len(),
    })
}
