//! Experiment harness around the cosine-expansion pricer.
//!
//! The binary prices options, compares the two window rules, and renders
//! the comparison tables and figure data as CSV. Everything the binary can
//! do is exposed as a library so tests can drive the same code paths.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod report;
pub mod search;

pub use config::{load, Config, ConfigError, Experiment};
pub use experiments::{bench_row, run, BenchRow, RunError, RunOutput, BENCH_HEADER, TERM_STEP};
pub use search::{cumulant_window, markov_window, minimal_terms, SearchOutcome};
