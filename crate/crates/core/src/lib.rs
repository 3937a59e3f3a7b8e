//! Colorful subgraph counting and the machinery around it: exact counters,
//! a worst-case to average-case reduction, a logarithmic-round interactive
//! proof, instance checkers, selectors and hardness-amplification decoders.

pub mod error;
pub mod ffield;
pub mod rng;
pub mod graphs;
pub mod counting;
pub mod oracle;
pub mod reductions;
pub mod wta;
pub mod ip;
pub mod amplify;
pub mod experiment;

pub use error::{Error, Result};
