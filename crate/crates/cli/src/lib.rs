//! Experiment runner: training runs, loss comparisons and chart export.

pub mod commands;
pub mod config;
pub mod export;
pub mod svg;
