//! Universal coding with switch distributions.
//!
//! A switch distribution is a mixture of adaptive Markov models of orders
//! `-1..=s` in which, at every symbol, a small fraction of probability mass
//! migrates from order `k-1` to order `k`. Low orders carry the mass early
//! on and hand it over as longer contexts accumulate statistics, which keeps
//! the code universal while compressing far better than a fixed-order model.
//!
//! Three variants are provided:
//!
//! * **plain** — counts start empty and adapt to the input alone;
//! * **fixed** — counts come from a training corpus and never change
//!   (not universal; useful as a control);
//! * **preadapted** — counts start from a training corpus and keep adapting
//!   to the input.
//!
//! On top of the coder sit an LZ78 code-length estimator, seeded synthetic
//! sources, and analysis routines that turn code lengths into compression
//! rates, pointwise mutual information at doubling block lengths, and
//! power-law fits of the mutual-information growth exponent.

pub mod analysis;
pub mod counts;
pub mod lz;
pub mod manifest;
pub mod markov;
pub mod math;
pub mod repeats;
pub mod sources;
pub mod switch;
pub mod text;

pub use analysis::{fit_power_law, CodeLengthSeries, MiSeries, ModelChoice, PowerLawFit};
pub use counts::{count, train, CountStore, Mode};
pub use markov::{conditional, ConditionalLadder, Smoothing};
pub use repeats::{max_repeat_length, DepthResult};
pub use switch::{transition_weight, ModelConfig, SwitchState};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("count store is frozen; training counts are immutable")]
    FrozenStore,
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("symbol {symbol} outside alphabet of size {d}")]
    SymbolRange { symbol: u32, d: u32 },
    #[error("no symbols consumed")]
    NoSymbols,
    #[error("training data required for {0} mode")]
    MissingTraining(&'static str),
    #[error("power-law fit needs at least 3 positive points in range, got {0}")]
    TooFewPoints(usize),
    #[error("corpus too short: need at least {need} bytes, have {have}")]
    CorpusTooShort { need: usize, have: usize },
    #[error("invalid count-store cache: {0}")]
    Cache(String),
    #[error("not a stochastic table: {0}")]
    Stochastic(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
