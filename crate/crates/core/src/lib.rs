//! Reversible billiard-gas laboratory.
//!
//! Two engines drive a gas of disks on a walled table: an event-driven
//! hard-disk engine in floating point, and an integer leapfrog engine whose
//! momentum reversal retraces any number of steps exactly. On top of them sit
//! coarse-grained entropy observables, perturbation and information-annihilation
//! operators, and the scenarios that compare forward, reversed and disturbed
//! runs.

pub mod cli;
pub mod engine;
pub mod error;
pub mod io;
pub mod lab;
pub mod observables;
pub mod rng;
pub mod stats;
pub mod vec2;

pub use error::{Error, Result};
pub use vec2::Vec2;
