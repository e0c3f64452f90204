//! Single-mode states on a truncated Fock basis `|0>, ..., |dim-1>`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, SparseMatrix, C64};

/// Maximum weight allowed on the top two Fock levels of a constructed state.
pub const LEAKAGE_THRESHOLD: f64 = 1e-8;

/// Leakage target used when picking a dimension automatically. Tighter than
/// [`LEAKAGE_THRESHOLD`] so that moments are converged under dim doubling.
pub const AUTO_LEAKAGE_TARGET: f64 = 1e-14;

const MAX_AUTO_DIM: usize = 4096;

/// Dimension heuristic from a target mean photon number:
/// `ceil(n + 8 sqrt(n + 1) + 10)`.
pub fn auto_dim(mean_photons: f64) -> usize {
    let n = mean_photons.max(0.0);
    (n + 8.0 * (n + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Low-order moments of a single mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMoments {
    /// `<a^dagger a>`
    pub mean_n: f64,
    /// `Var(a^dagger a)`
    pub var_n: f64,
    /// `<a>`
    pub a: C64,
    /// `<a^2>`
    pub a2: C64,
}

impl ModeMoments {
    pub fn from_density(rho: &CMatrix) -> Self {
        let d = rho.nrows();
        let mut mean_n = 0.0;
        let mut mean_n2 = 0.0;
        let mut a = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        for n in 0..d {
            let p = rho[(n, n)].re;
            let nf = n as f64;
            mean_n += nf * p;
            mean_n2 += nf * nf * p;
            // Tr(rho a) = sum_n rho_{n, n-1} sqrt(n)
            if n >= 1 {
                a += rho[(n, n - 1)] * nf.sqrt();
            }
            if n >= 2 {
                a2 += rho[(n, n - 2)] * (nf * (nf - 1.0)).sqrt();
            }
        }
        Self {
            mean_n,
            var_n: mean_n2 - mean_n * mean_n,
            a,
            a2,
        }
    }
}

/// Normalized pure state of one bosonic mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    amplitudes: CVector,
}

impl ModeState {
    /// Normalizes the given amplitudes. No leakage check is applied; use
    /// [`ModeState::parity`] to validate even/odd inputs.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "a mode needs at least one level",
            });
        }
        let v = CVector::from_vec(amplitudes);
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    fn checked(amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::from_amplitudes(amplitudes)?;
        let leakage = s.leakage();
        if leakage >= LEAKAGE_THRESHOLD {
            return Err(Error::Leakage {
                leakage,
                dim: s.dim(),
                threshold: LEAKAGE_THRESHOLD,
            });
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Weight on the top two levels.
    pub fn leakage(&self) -> f64 {
        let d = self.dim();
        self.amplitudes
            .iter()
            .skip(d.saturating_sub(2))
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// `Some` when the support is restricted to even or odd levels (exact zeros).
    pub fn parity(&self) -> Option<Parity> {
        let zero = C64::new(0.0, 0.0);
        let odd_empty = self
            .amplitudes
            .iter()
            .skip(1)
            .step_by(2)
            .all(|&z| z == zero);
        let even_empty = self.amplitudes.iter().step_by(2).all(|&z| z == zero);
        match (odd_empty, even_empty) {
            (true, _) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn density(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn moments(&self) -> ModeMoments {
        ModeMoments::from_density(&self.density())
    }

    /// Same state on a larger (or equal) cutoff, padded with zeros.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad a dim {} state down to {dim}",
                self.dim()
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[..self.dim()].copy_from_slice(self.amplitudes.as_slice());
        Ok(Self {
            amplitudes: CVector::from_vec(amps),
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "truncated modes need at least two levels",
        });
    }
    Ok(())
}

fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(dim);
    let mut cur = c((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            cur = cur * alpha / (n as f64).sqrt();
        }
        amps.push(cur);
    }
    amps
}

/// Coherent state `|alpha>`.
pub fn coherent(alpha: C64, dim: usize) -> Result<ModeState> {
    check_dim(dim)?;
    ModeState::checked(coherent_amplitudes(alpha, dim))
}

fn cat(alpha: C64, dim: usize, parity: Parity) -> Result<ModeState> {
    check_dim(dim)?;
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    // |alpha> +/- |-alpha> doubles the amplitudes of one parity and cancels the other
    let amps = coherent_amplitudes(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, z)| {
            if n % 2 == keep {
                z * 2.0
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    ModeState::checked(amps)
}

/// Even cat `N(|alpha> + |-alpha>)`.
pub fn even_cat(alpha: C64, dim: usize) -> Result<ModeState> {
    cat(alpha, dim, Parity::Even)
}

/// Odd cat `N(|alpha> - |-alpha>)`, undefined at `alpha = 0`.
pub fn odd_cat(alpha: C64, dim: usize) -> Result<ModeState> {
    if alpha.norm() == 0.0 {
        return Err(Error::Domain(
            "odd cat state is undefined at alpha = 0".into(),
        ));
    }
    cat(alpha, dim, Parity::Odd)
}

/// Squeezed vacuum `S(xi)|0>` with `S(xi) = exp(xi* b^2 / 2 - xi b^dagger^2 / 2)`.
pub fn squeezed_vacuum(xi: C64, dim: usize) -> Result<ModeState> {
    check_dim(dim)?;
    let (r, phase) = xi.to_polar();
    let ratio = -C64::from_polar(r.tanh(), phase);
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let mut cur = c(1.0 / r.cosh().sqrt(), 0.0);
    for m in 0.. {
        let n = 2 * m;
        if n >= dim {
            break;
        }
        if m > 0 {
            let nf = n as f64;
            cur = cur * ratio * ((nf - 1.0) / nf).sqrt();
        }
        amps[n] = cur;
    }
    ModeState::checked(amps)
}

/// Fock state `|n>`; requires `n < dim - 1`.
pub fn fock_state(n: usize, dim: usize) -> Result<ModeState> {
    check_dim(dim)?;
    if n + 1 >= dim {
        return Err(Error::FockIndex { n, dim });
    }
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[n] = c(1.0, 0.0);
    ModeState::from_amplitudes(amps)
}

/// A named single-mode input, sized automatically or at a fixed cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeSpec {
    Coherent(C64),
    EvenCat(C64),
    OddCat(C64),
    Squeezed(C64),
    Fock(usize),
}

impl ModeSpec {
    /// Nominal mean photon number used by the dimension heuristic.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            ModeSpec::Coherent(a) => a.norm_sqr(),
            ModeSpec::EvenCat(a) => {
                let x = a.norm_sqr();
                x * x.tanh()
            }
            ModeSpec::OddCat(a) => {
                let x = a.norm_sqr();
                if x == 0.0 {
                    0.0
                } else {
                    x / x.tanh()
                }
            }
            ModeSpec::Squeezed(xi) => xi.norm().sinh().powi(2),
            ModeSpec::Fock(n) => n as f64,
        }
    }

    pub fn build(&self, dim: usize) -> Result<ModeState> {
        match *self {
            ModeSpec::Coherent(a) => coherent(a, dim),
            ModeSpec::EvenCat(a) => even_cat(a, dim),
            ModeSpec::OddCat(a) => odd_cat(a, dim),
            ModeSpec::Squeezed(xi) => squeezed_vacuum(xi, dim),
            ModeSpec::Fock(n) => fock_state(n, dim),
        }
    }

    /// Smallest even dimension at or above [`auto_dim`] whose top-two-level
    /// weight is below [`AUTO_LEAKAGE_TARGET`].
    pub fn auto_dim(&self) -> Result<usize> {
        if let ModeSpec::Fock(n) = *self {
            return Ok(auto_dim(n as f64).max(n + 2));
        }
        let mut dim = auto_dim(self.mean_photons());
        dim += dim % 2;
        loop {
            match self.build(dim) {
                Ok(s) if s.leakage() < AUTO_LEAKAGE_TARGET => return Ok(dim),
                Err(e @ Error::Domain(_)) => return Err(e),
                _ if dim >= MAX_AUTO_DIM => {
                    return Err(Error::Leakage {
                        leakage: self.build(dim).map(|s| s.leakage()).unwrap_or(1.0),
                        dim,
                        threshold: AUTO_LEAKAGE_TARGET,
                    })
                }
                _ => dim += 2,
            }
        }
    }

    pub fn build_auto(&self) -> Result<ModeState> {
        self.build(self.auto_dim()?)
    }

    /// Parity of the state, known from the kind alone.
    pub fn parity(&self) -> Option<Parity> {
        match *self {
            ModeSpec::Coherent(a) if a.norm() == 0.0 => Some(Parity::Even),
            ModeSpec::Coherent(_) => None,
            ModeSpec::EvenCat(_) | ModeSpec::Squeezed(_) => Some(Parity::Even),
            ModeSpec::OddCat(_) => Some(Parity::Odd),
            ModeSpec::Fock(n) if n % 2 == 0 => Some(Parity::Even),
            ModeSpec::Fock(_) => Some(Parity::Odd),
        }
    }

    /// Same kind with the complex parameter rotated to `|param| e^{i phase}`.
    /// Fock states are returned unchanged.
    pub fn with_phase(&self, phase: f64) -> Self {
        let rot = |z: C64| C64::from_polar(z.norm(), phase);
        match *self {
            ModeSpec::Coherent(a) => ModeSpec::Coherent(rot(a)),
            ModeSpec::EvenCat(a) => ModeSpec::EvenCat(rot(a)),
            ModeSpec::OddCat(a) => ModeSpec::OddCat(rot(a)),
            ModeSpec::Squeezed(a) => ModeSpec::Squeezed(rot(a)),
            ModeSpec::Fock(n) => ModeSpec::Fock(n),
        }
    }
}

/// Annihilation and creation operators on one truncated mode.
pub fn ladder(dim: usize) -> Result<(SparseMatrix, SparseMatrix)> {
    check_dim(dim)?;
    let a =
        SparseMatrix::from_triplets(dim, (1..dim).map(|n| (n - 1, n, c((n as f64).sqrt(), 0.0))));
    let ad = a.adjoint();
    Ok((a, ad))
}

pub fn number_op(dim: usize) -> Result<SparseMatrix> {
    check_dim(dim)?;
    Ok(SparseMatrix::from_triplets(
        dim,
        (0..dim).map(|n| (n, n, c(n as f64, 0.0))),
    ))
}
