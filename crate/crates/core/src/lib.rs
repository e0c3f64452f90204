//! Quantum Fisher information of a two-mode Mach-Zehnder interferometer on
//! truncated Fock spaces.
//!
//! The crate computes the QFI of the phase `theta` in `exp(i theta G)` both
//! numerically, from the spectral decomposition of the input state, and from
//! closed-form expressions valid when one input port carries a state of
//! definite photon-number parity. It also models equal photon loss in both
//! arms.
//!
//! - [`fock`]: single-mode states and ladder operators
//! - [`two_mode`]: product space, Schwinger operators, partial traces
//! - [`interferometer`]: generators and evolution
//! - [`qfi`]: numerical QFI and the symmetric logarithmic derivative
//! - [`analytic`]: closed forms and the phase-matching condition
//! - [`loss`]: amplitude-damping channel and its ancilla construction
//! - [`cli`]: command-line scans and reports

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod linalg;
pub mod loss;
pub mod qfi;
pub mod two_mode;

pub use error::{Error, Result};
