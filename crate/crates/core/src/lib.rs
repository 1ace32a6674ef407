//! Agent-based Monte Carlo simulator of household lighting adoption in the
//! EU, 2006-2025, under counterfactual policy scenarios.
//!
//! A population of consumer agents replaces broken lamps according to a
//! four-strategy cognitive model driven by satisfaction and certainty. The
//! lamp market evolves monthly: LED lamps get cheaper and better every
//! year, while policy scenarios inflate incandescent prices, ban them
//! outright, or shift consumer preferences. Ensembles of seeded runs
//! produce adoption curves, behavior-frequency dynamics and a sensitivity
//! report over the run-level random factors.

pub mod agents;
pub mod behavior;
pub mod config;
pub mod engine;
pub mod error;
pub mod export;
pub mod market;
pub mod metrics;
pub mod rng;
pub mod scenarios;

pub use error::{Error, Result};
