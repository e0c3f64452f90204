//! Mach-Zehnder transformation `exp(i theta G)` with generator
//! `G = J_z cos(tau) - J_y sin(tau)`.
//!
//! `tau` is the beam-splitter angle. At `tau = pi/2` (50:50 splitters) the
//! generator is `-J_y` and the interferometer is `exp(-i theta J_y)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::linalg::{c, BlockEigen, BlockUnitary};
use crate::two_mode::{schwinger, Dims, TwoModeOperator, TwoModeState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferometerSpec {
    tau: f64,
    pub theta: f64,
}

impl InterferometerSpec {
    pub fn new(tau: f64, theta: f64) -> Self {
        Self {
            tau: tau.rem_euclid(2.0 * PI),
            theta,
        }
    }

    /// Two 50:50 beam splitters.
    pub fn balanced(theta: f64) -> Self {
        Self::new(FRAC_PI_2, theta)
    }

    /// Beam-splitter angle in `[0, 2 pi)`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }
}

pub fn generator(spec: &InterferometerSpec, dims: Dims) -> Result<TwoModeOperator> {
    let j = schwinger(dims.a, dims.b)?;
    let (s, co) = spec.tau.sin_cos();
    Ok(j.jz
        .scale(c(co, 0.0))
        .add_scaled(&j.jy, c(-s, 0.0))
        .with_label(format!("Jz cos({0}) - Jy sin({0})", spec.tau)))
}

/// `exp(i theta G)` for the generator of `spec`.
pub fn mz_unitary(spec: &InterferometerSpec, dims: Dims) -> Result<BlockUnitary> {
    let g = generator(spec, dims)?;
    Ok(BlockEigen::new(&g.matrix)?.exp_i(spec.theta))
}

/// Sends a state through the interferometer.
pub fn evolve(state: &TwoModeState, spec: &InterferometerSpec) -> Result<TwoModeState> {
    let u = mz_unitary(spec, state.dims())?;
    Ok(apply_unitary(state, &u))
}

pub fn apply_unitary(state: &TwoModeState, u: &BlockUnitary) -> TwoModeState {
    match state {
        TwoModeState::Pure { dims, vector } => TwoModeState::Pure {
            dims: *dims,
            vector: u.apply(vector),
        },
        TwoModeState::Density { dims, matrix } => TwoModeState::Density {
            dims: *dims,
            matrix: u.conjugate(matrix),
        },
    }
}
