//! File formats and command implementations behind the `stratgen` binary.

pub mod theory;
pub mod strategy_file;
pub mod commands;
