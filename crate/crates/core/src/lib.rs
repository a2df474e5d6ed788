//! Relativistic perfect-fluid dynamics in Godunov variables.
//!
//! The crate is organised bottom-up:
//!
//! * [`spacetime`] - Minkowski 4-vectors, signature (-,+,+,+), c = 1.
//! * [`eos`] - barotropic, isentropic, product-form and ideal-gas closures.
//! * [`index`] - the Lichnerowicz index `f`, its inverse `pi`, the conserved
//!   density `nu` and the generating function `X_hat`.
//! * [`godunov`] - Godunov variables, 4-potentials, fluxes, symmetrizers and
//!   the additional currents for the four- and five-field systems.
//! * [`shock`] - Rankine-Hugoniot analysis, Lax admissibility and production.
//! * [`fvsim`] - a 1D HLL finite-volume solver for the four-field system.
//! * [`config`], [`report`], [`cli`] - plumbing for the command-line tool.

pub mod error;
pub mod numerics;
pub mod spacetime;
pub mod eos;
pub mod index;
pub mod godunov;
pub mod shock;
pub mod fvsim;
pub mod verify;
pub mod config;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
