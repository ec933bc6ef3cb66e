//! Experiment runner and file formats for subordinated option pricing.
//!
//! Builds on [`subdiff_core`]: sweeps of price against the stability index,
//! relation checks, path simulation and PDE exports, each written as CSV or
//! JSON. The `subdiff` binary is a thin command-line layer over this crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod config;
pub mod experiment;
pub mod output;
pub mod pde_export;
pub mod simulate;

pub use config::{ExperimentConfig, Format, Method, Preset};
pub use experiment::{run_experiment, ExperimentOutcome};
