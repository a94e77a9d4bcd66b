//! Configuration, command dispatch and serialization for the `phasepole`
//! binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;
