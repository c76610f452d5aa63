//! Benchmark harness for the variable-order time-fractional PDE solver:
//! problem definitions with closed-form solutions, error metrics, CSV table
//! reproduction and an independent finite-difference cross-check.

pub mod examples;
pub mod metrics;
pub mod problem;
pub mod runner;
pub mod tables;
