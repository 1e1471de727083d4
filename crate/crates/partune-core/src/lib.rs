//! Automated algorithm configuration framework and competition harness.
//!
//! The crate models parameter configuration spaces, executes target
//! algorithms under wall-clock and memory limits, aggregates run outcomes
//! into PAR-k objectives, and implements three independent configurators
//! (iterated local search, a gender-based genetic algorithm, and a
//! model-based optimizer) together with the campaign pipeline that selects
//! among their incumbents on training data and evaluates on a held-out test
//! set. Synthetic target algorithms with analytically known optima provide
//! the verification substrate.

pub mod analysis;
pub mod error;
pub mod gga;
pub mod harness;
pub mod paramils;
pub mod paramspace;
pub mod runhistory;
pub mod runner;
pub mod scenario;
pub mod scoring;
pub mod smac;
pub mod synthetic;
pub mod trajectory;

pub use error::{Error, Result};
pub use paramspace::{Configuration, ParameterSpace};
pub use runner::{RunOutcome, RunSpec, RunStatus};
pub use scenario::Scenario;
pub use scoring::{AggregateScore, CostMetric};
