//! Library side of the `gframemod` binary: family generators, command
//! drivers and report plumbing.

pub mod commands;
pub mod generate;
pub mod report;
