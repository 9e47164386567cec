//! Library half of the `thhforge` binary: configuration, the Adem cache,
//! subcommand implementations, JSON envelopes and the acceptance suite.

pub mod cache;
pub mod commands;
pub mod config;
pub mod fixtures;
pub mod output;
pub mod verify;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    /// `verify` asked to run with a degree bound too small for the suite.
    pub const INSUFFICIENT_RANGE: i32 = 3;
}
