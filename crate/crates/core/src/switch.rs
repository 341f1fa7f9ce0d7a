//! The depth-capped switch recursion.
//!
//! A [`SwitchState`] carries log-domain partial masses `P(x_1^n, k)` for
//! orders `k = -1..=s` plus one aggregate bucket for all orders above the
//! cap, and advances them one symbol at a time. At step `n` a fraction
//! `q_n` of each order's mass migrates up to the next order before both are
//! multiplied by the order's conditional, so early symbols are coded by low
//! orders and long-context orders take over smoothly as their statistics
//! fill in. All arithmetic is in natural-log domain; direct products
//! underflow long before interesting block lengths.

use std::sync::Arc;

use crate::counts::{train, CountStore, Mode};
use crate::markov::{conditional, ConditionalLadder, Smoothing};
use crate::math::{logsumexp, logsumexp2};
use crate::{Error, Result};

/// Model parameters shared by every run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Alphabet size; symbols are bytes `0..D`.
    pub d: u16,
    /// Transition-weight exponent; must exceed 1 or the weight product
    /// vanishes and the universality guarantee is void.
    pub alpha: f64,
    /// Order cap `s`; contexts up to `s` symbols are used.
    pub s: usize,
    pub mode: Mode,
    pub smoothing: Smoothing,
}

impl ModelConfig {
    pub fn new(d: u16, alpha: f64, s: usize, mode: Mode) -> Self {
        ModelConfig {
            d,
            alpha,
            s,
            mode,
            smoothing: Smoothing::LowerOrder,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("alphabet size {} < 2", self.d)));
        }
        if self.d > 256 {
            return Err(Error::Config(format!(
                "alphabet size {} exceeds byte symbols",
                self.d
            )));
        }
        if !self.alpha.is_finite() || self.alpha <= 1.0 {
            return Err(Error::Config(format!(
                "alpha = {} must be > 1 for the transition weights to keep positive mass",
                self.alpha
            )));
        }
        if let Smoothing::Additive(beta) = self.smoothing {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::Config(format!(
                    "additive smoothing weight {beta} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Transition weight `p_n = exp(-(n+1)^{-alpha})`; the mass fraction that
/// stays at its current order at step `n`.
pub fn transition_weight(n: u64, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(Error::Config(format!("alpha = {alpha} must be > 1")));
    }
    Ok(ln_p(n, alpha).exp())
}

#[inline]
fn ln_p(n: u64, alpha: f64) -> f64 {
    -((n as f64 + 1.0).powf(-alpha))
}

#[inline]
fn ln_q(n: u64, alpha: f64) -> f64 {
    // q_n = 1 - p_n = -expm1(-(n+1)^{-alpha})
    (-f64::exp_m1(ln_p(n, alpha))).ln()
}

#[derive(Debug, Clone)]
enum StoreSlot {
    Owned(CountStore),
    Shared(Arc<CountStore>),
}

impl StoreSlot {
    fn get(&self) -> &CountStore {
        match self {
            StoreSlot::Owned(s) => s,
            StoreSlot::Shared(s) => s,
        }
    }
}

/// One sequential consumer of a symbol stream, accumulating
/// `log P(x_1^n, k)` per order plus the above-cap bucket.
#[derive(Debug, Clone)]
pub struct SwitchState {
    cfg: ModelConfig,
    store: StoreSlot,
    /// Last `min(n, s)` stream symbols, oldest first.
    window: Vec<u8>,
    /// `logmass[k + 1] = ln P(x_1^n, k)` for `k = -1..=s`.
    logmass: Vec<f64>,
    /// `ln P(x_1^n, •)`: aggregate of orders above `s`.
    bullet: f64,
    n: u64,
}

impl SwitchState {
    /// Fresh plain-mode state with empty counts.
    pub fn new(cfg: &ModelConfig) -> Result<Self> {
        cfg.validate()?;
        match cfg.mode {
            Mode::Plain => Ok(Self::from_slot(
                cfg.clone(),
                StoreSlot::Owned(CountStore::new(cfg.s, Mode::Plain)),
            )),
            Mode::Fixed => Err(Error::MissingTraining("fixed")),
            Mode::Preadapted => Err(Error::MissingTraining("preadapted")),
        }
    }

    /// State backed by a trained store. Fixed mode shares the store
    /// read-only; preadapted mode clones it so on-line appends stay local
    /// to this stream.
    pub fn with_trained(cfg: &ModelConfig, trained: &Arc<CountStore>) -> Result<Self> {
        cfg.validate()?;
        if trained.depth_cap() != cfg.s {
            return Err(Error::Config(format!(
                "trained store has depth {} but config wants {}",
                trained.depth_cap(),
                cfg.s
            )));
        }
        if trained.mode() != cfg.mode {
            return Err(Error::Config(format!(
                "trained store is {} but config wants {}",
                trained.mode().label(),
                cfg.mode.label()
            )));
        }
        let slot = match cfg.mode {
            Mode::Fixed => StoreSlot::Shared(Arc::clone(trained)),
            Mode::Preadapted => StoreSlot::Owned(trained.as_ref().clone()),
            Mode::Plain => return Err(Error::Config("plain mode takes no training store".into())),
        };
        Ok(Self::from_slot(cfg.clone(), slot))
    }

    /// Convenience constructor that trains a store when the mode needs one.
    pub fn init(cfg: &ModelConfig, training: Option<&[u8]>) -> Result<Self> {
        cfg.validate()?;
        match cfg.mode {
            Mode::Plain => Self::new(cfg),
            Mode::Fixed | Mode::Preadapted => {
                let corpus = training.ok_or(Error::MissingTraining(cfg.mode.label()))?;
                let store = train(corpus, cfg.s, cfg.mode)?;
                Ok(Self::from_slot(cfg.clone(), StoreSlot::Owned(store)))
            }
        }
    }

    fn from_slot(cfg: ModelConfig, store: StoreSlot) -> Self {
        let s = cfg.s;
        SwitchState {
            cfg,
            store,
            window: Vec::with_capacity((s + 1).min(1 << 20)),
            logmass: vec![f64::NEG_INFINITY; s + 2],
            bullet: f64::NEG_INFINITY,
            n: 0,
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    /// Symbols consumed so far.
    pub fn consumed(&self) -> u64 {
        self.n
    }

    pub fn store(&self) -> &CountStore {
        self.store.get()
    }

    fn ladder_for(&self, next: u8) -> Result<ConditionalLadder> {
        conditional(
            self.store.get(),
            &self.window,
            next,
            self.cfg.d,
            self.cfg.smoothing,
        )
    }

    /// Advance the per-order masses for one symbol without committing.
    /// Returns the new `(logmass, bullet)`.
    fn advanced(&self, ladder: &ConditionalLadder) -> (Vec<f64>, f64) {
        let s = self.cfg.s;
        let mut new = vec![f64::NEG_INFINITY; s + 2];
        let mut bullet = self.bullet;
        if self.n == 0 {
            let lp0 = ln_p(0, self.cfg.alpha);
            let lq0 = ln_q(0, self.cfg.alpha);
            new[0] = lp0 - f64::from(self.cfg.d).ln();
            new[1] = lq0 + ladder.value(0).ln();
        } else {
            let n = self.n;
            let lp = ln_p(n, self.cfg.alpha);
            let lq = ln_q(n, self.cfg.alpha);
            let kmax = (n as usize).min(s);
            for (idx, slot) in new.iter_mut().enumerate().take(kmax + 2) {
                let stay = lp + self.logmass[idx];
                let climb = if idx >= 1 {
                    lq + self.logmass[idx - 1]
                } else {
                    f64::NEG_INFINITY
                };
                let k = idx as isize - 1;
                *slot = logsumexp2(stay, climb) + ladder.value(k).ln();
            }
            if n as usize > s {
                bullet = logsumexp2(self.bullet, lq + self.logmass[s + 1])
                    + ladder.value(s as isize).ln();
            }
        }
        (new, bullet)
    }

    /// Consume one symbol: update the switch masses from the current
    /// conditionals, then record the symbol in the counts (plain and
    /// preadapted modes) and in the context window.
    pub fn step(&mut self, next: u8) -> Result<()> {
        if u16::from(next) >= self.cfg.d {
            return Err(Error::SymbolRange {
                symbol: u32::from(next),
                d: u32::from(self.cfg.d),
            });
        }
        let ladder = self.ladder_for(next)?;
        let (new, bullet) = self.advanced(&ladder);
        self.logmass = new;
        self.bullet = bullet;
        if self.cfg.mode != Mode::Fixed {
            match &mut self.store {
                StoreSlot::Owned(store) => store.append(next)?,
                StoreSlot::Shared(_) => unreachable!("non-fixed stores are owned"),
            }
        }
        if self.cfg.s > 0 {
            self.window.push(next);
            if self.window.len() > self.cfg.s {
                self.window.remove(0);
            }
        }
        self.n += 1;
        Ok(())
    }

    /// `ln P(x_1^n)`: log-sum over all order masses and the above-cap
    /// bucket.
    pub fn total_logprob(&self) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::NoSymbols);
        }
        Ok(logsumexp2(logsumexp(&self.logmass), self.bullet))
    }

    /// Code length `-log2 P(x_1^n)` in bits.
    pub fn code_length_bits(&self) -> Result<f64> {
        Ok(-self.total_logprob()? / std::f64::consts::LN_2)
    }

    /// One-step lookahead: `ln P(x_1^n · a)` for every symbol `a`, without
    /// mutating the state. Log-sum-exp over the result equals
    /// [`total_logprob`](Self::total_logprob) (the recursion preserves
    /// mass), which is the marginal-consistency check.
    pub fn logprob_extensions(&self) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(usize::from(self.cfg.d));
        for a in 0..self.cfg.d {
            let ladder = self.ladder_for(a as u8)?;
            let (new, bullet) = self.advanced(&ladder);
            out.push(logsumexp2(logsumexp(&new), bullet));
        }
        Ok(out)
    }

    /// Fraction of total probability sitting at each order, `k = -1..=s`
    /// followed by the above-cap bucket.
    pub fn order_mass_fractions(&self) -> Result<Vec<f64>> {
        let total = self.total_logprob()?;
        let mut out: Vec<f64> = self.logmass.iter().map(|&m| (m - total).exp()).collect();
        out.push((self.bullet - total).exp());
        Ok(out)
    }
}
