//! Simulation of a flying charge qubit carried by a surface-acoustic-wave
//! moving quantum dot.
//!
//! The pipeline runs bottom-up:
//!
//! * [`params`]: device configuration, physical constants and natural units.
//! * [`potential`]: gate, SAW, drive and inter-channel Coulomb potentials.
//! * [`eigensolver`]: finite-difference instantaneous spectrum, bound-state
//!   classification and overlap-based level tracking across the SAW period.
//! * [`adiabatic`]: the adiabaticity parameter of the tracked qubit levels.
//! * [`dynamics`]: microwave-driven two-level amplitude equations.
//! * [`twoqubit`]: Coulomb Pauli coefficients, interaction-picture and RWA
//!   propagators, iSWAP synthesis.
//! * [`analysis`]: the single-qubit pipeline at the representative time.
//! * [`validation`]: the built-in oracle suite.
//!
//! Internal computation is done in a dimensionless system (ħ = 1, length unit
//! `a`, energy unit ħ²/(2m*a²)); SI values appear only at the boundaries.

pub mod adiabatic;
pub mod analysis;
pub mod dynamics;
pub mod eigensolver;
mod error;
pub mod exec;
pub mod params;
pub mod potential;
pub mod twoqubit;
pub mod validation;

pub use error::{Error, Result};
pub use exec::Execution;
