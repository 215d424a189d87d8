//! Library half of the torusflats binary: the JSON job schemas and the
//! command implementations, kept importable so tests can drive them
//! without spawning a process.

pub mod dto;
pub mod ops;
