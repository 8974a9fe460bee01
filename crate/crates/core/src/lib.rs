//! Synthesis and simulation of shortcut drives for a three-level Λ system
//! driven off resonance.
//!
//! The crate builds the dressed drive whose 1-2 and 2-3 legs alone (no
//! direct 1-3 coupling) steer the system exactly along a chosen moving
//! eigenbasis, then simulates the resulting unitary and dissipative
//! dynamics and the figures of merit attached to them.
//!
//! Units: ħ = 1 throughout; times are in units of the window length `T`
//! and every frequency or rate is in units of `1/T`.
//!
//! The `parallel` feature (on by default) backs Monte Carlo runs and
//! parameter sweeps with a rayon thread pool; without it the same entry
//! points run sequentially.

pub mod dynamics;
pub mod framework;
pub mod lambda3;
pub mod metrics;
pub mod noise;
pub mod numkit;
pub mod par;
pub mod pulses;
pub mod shortcut;
pub mod tda;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
