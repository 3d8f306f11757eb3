//! Library side of the `ringburst` command: config and manifest handling,
//! the subcommands, and the verification presets.

pub mod commands;
pub mod config;
pub mod verify;
