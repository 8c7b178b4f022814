//! PM-HLL: a streaming time-domain tracker for the fundamental frequency and
//! harmonic-to-noise ratio of periodic components in a sampled signal, plus
//! deterministic test-signal synthesis, multi-instance banks sharing one
//! delay line, run scoring, and a command-line front end.

// negated float comparisons in the validators are deliberate: `!(x > 0.0)`
// rejects NaN where `x <= 0.0` would wave it through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bank;
pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod presets;
pub mod signals;

pub use engine::{catch_range, DelayLine, Engine, EngineConfig, TickOutput};
pub use error::{Error, Result};
