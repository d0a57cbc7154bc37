// Guards are written `!(x > 0.0)` on purpose: the negation rejects NaN,
// which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Bottom-up Monte Carlo estimation of LLM inference energy.
//!
//! The pipeline: a measured token-throughput benchmark table trains a
//! per-model log-linear TPS model; per-query energy follows from node power,
//! PUE, and output-length draws; scenarios compose those pieces into energy
//! distributions, efficiency-lever comparisons, and fleet-scale daily totals.

pub mod benchmark_data;
pub mod distributions;
pub mod energy_model;
pub mod error;
pub mod fleet;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod tps_model;

pub use error::{Error, Result};
