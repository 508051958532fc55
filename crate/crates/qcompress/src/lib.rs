//! Batch runner for `qcompress-core`: configuration, run execution,
//! checkpoints and CSV output.

pub mod analyze;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod io;

pub use analyze::{cmd_analyze, AnalyzeRequest, Which};
pub use commands::{cmd_evaluate, cmd_optimize, cmd_report, cmd_stack};
pub use config::{Overrides, Plan, RunConfig};
pub use error::{Result, RunError};
pub use exec::Pool;
pub use io::Checkpoint;
