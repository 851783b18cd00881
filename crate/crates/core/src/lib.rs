//! Individual addressing of trapped ions through rf micromotion.
//!
//! One ground rod of a linear Paul trap is split into independently biased
//! sections. Choosing the section voltages so that exactly one ion (or a
//! chosen set) is pushed off the rf node line gives that ion micromotion,
//! and with it a micromotion sideband whose Rabi frequency scales as
//! `J1(kappa)`. All other ions stay on the node and do not couple.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense LU and minimum-norm solves with condition
//!   estimates, and the Bessel function `J1`.
//! - [`model`]: validated scenario types and the key/value config format.
//! - [`fields`]: the sphere-electrode field model and distance factors.
//! - [`addressing`]: the compensation-voltage solve and conditioning sweeps.
//! - [`micromotion`]: displacement, micromotion amplitude, modulation index
//!   and sideband Rabi ratio.
//! - [`equilibrium`]: exact ion-string positions in a harmonic well.
//! - [`report`]: CSV and JSON serialisation of every result type.
//! - [`cli`]: the `ionaddr` command-line front end.
//!
//! ```
//! use ionaddr::{addressing, model::Scenario};
//!
//! let scenario = Scenario::reference_three_ion();
//! let solution = addressing::solve_addressing(&scenario).unwrap();
//! assert!((solution.scaled_voltages[1] - 0.266713).abs() < 1e-5);
//! ```

pub mod addressing;
pub mod cli;
pub mod equilibrium;
mod error;
pub mod fields;
pub mod micromotion;
pub mod model;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
