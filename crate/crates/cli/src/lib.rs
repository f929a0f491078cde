//! Command implementations behind the `rupert-kit` binary.

pub mod commands;
pub mod report;
pub mod svg;
