//! Experiment driver for the `bosegas` library: configuration, initial
//! data, paired many-body/NLS runs, sweeps, the rough-datum pipeline and
//! the verification suites behind the `bosegas-lab` binary.

pub mod config;
pub mod datum;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod runner;
pub mod suites;
pub mod theorem_l;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
