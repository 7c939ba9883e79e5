//! Benchmark harness: instance generation, solver matrices, paper-style
//! result tables, convergence traces, and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod run;
pub mod table;
