//! Closed-form QFI expressions for a Mach-Zehnder interferometer fed with an
//! arbitrary state in port A and a parity-definite (even or odd) state in
//! port B.
//!
//! All functions take scalars. Moments of concrete states come from
//! [`crate::fock::ModeMoments`].

use std::f64::consts::PI;

use crate::fock::{wrap_angle, ModeMoments};
use crate::linalg::C64;

/// Default tolerance, in radians, for phase matching on exact inputs.
pub const PMC_TOL: f64 = 1e-9;

/// Magnitudes below this make the phase-matching condition vacuous.
pub const VACUOUS_MAGNITUDE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticInputs {
    pub nbar_a: f64,
    pub nbar_b: f64,
    /// `<a^2>`
    pub a2: C64,
    /// `<b^2>`
    pub b2: C64,
    pub var_na: Option<f64>,
    pub var_nb: Option<f64>,
}

impl AnalyticInputs {
    pub fn new(nbar_a: f64, nbar_b: f64, a2: C64, b2: C64) -> Self {
        Self {
            nbar_a,
            nbar_b,
            a2,
            b2,
            var_na: None,
            var_nb: None,
        }
    }

    pub fn from_moments(a: &ModeMoments, b: &ModeMoments) -> Self {
        Self {
            nbar_a: a.mean_n,
            nbar_b: b.mean_n,
            a2: a.a2,
            b2: b.a2,
            var_na: Some(a.var_n),
            var_nb: Some(b.var_n),
        }
    }

    pub fn total_photons(&self) -> f64 {
        self.nbar_a + self.nbar_b
    }

    /// Flags second moments larger than `nbar (nbar + 1)`. Not an error.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let slack = 1e-9;
        if self.a2.norm() > self.nbar_a * (self.nbar_a + 1.0) + slack {
            out.push(format!(
                "|<a^2>| = {} exceeds nbar_A (nbar_A + 1) = {}",
                self.a2.norm(),
                self.nbar_a * (self.nbar_a + 1.0)
            ));
        }
        if self.b2.norm() > self.nbar_b * (self.nbar_b + 1.0) + slack {
            out.push(format!(
                "|<b^2>| = {} exceeds nbar_B (nbar_B + 1) = {}",
                self.b2.norm(),
                self.nbar_b * (self.nbar_b + 1.0)
            ));
        }
        out
    }
}

/// `F = 2 nA nB + nA + nB - 2 Re(<a^dag 2><b^2>)`.
pub fn f_general(inp: &AnalyticInputs) -> f64 {
    let (na, nb) = (inp.nbar_a, inp.nbar_b);
    2.0 * na * nb + na + nb - 2.0 * (inp.a2.conj() * inp.b2).re
}

/// Value of [`f_general`] once the phases are matched:
/// `F_m = 2 nA nB + nA + nB + 2 |<a^2>| |<b^2>|`.
pub fn f_max(inp: &AnalyticInputs) -> f64 {
    let (na, nb) = (inp.nbar_a, inp.nbar_b);
    2.0 * na * nb + na + nb + 2.0 * inp.a2.norm() * inp.b2.norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PmcVerdict {
    /// Both second moments are nonzero; the residual is meaningful.
    Checked { satisfied: bool, residual: f64 },
    /// `|<a^2>| |<b^2>| = 0`, any phase is optimal.
    Vacuous,
}

impl PmcVerdict {
    pub fn is_satisfied(&self) -> bool {
        match self {
            PmcVerdict::Checked { satisfied, .. } => *satisfied,
            PmcVerdict::Vacuous => true,
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            PmcVerdict::Checked { residual, .. } => Some(*residual),
            PmcVerdict::Vacuous => None,
        }
    }
}

/// Minimal angular distance between two phases, in `[0, pi]`.
pub fn phase_distance(x: f64, y: f64) -> f64 {
    wrap_angle(x - y).abs()
}

/// Checks `|Arg<a^2> - Arg<b^2>| = pi` (mod 2 pi).
pub fn pmc_satisfied(a2: C64, b2: C64, tol: f64) -> PmcVerdict {
    if a2.norm() < VACUOUS_MAGNITUDE || b2.norm() < VACUOUS_MAGNITUDE {
        return PmcVerdict::Vacuous;
    }
    let residual = PI - phase_distance(a2.arg(), b2.arg());
    PmcVerdict::Checked {
        satisfied: residual <= tol,
        residual,
    }
}

/// `F = 4 cos^2(tau) Var(J_z) + 4 sin^2(tau) Var(J_y)`, valid for a pure
/// port A and a parity-definite port B.
pub fn f_unbalanced(tau: f64, var_jz: f64, var_jy: f64) -> f64 {
    let (s, c) = tau.sin_cos();
    4.0 * c * c * var_jz + 4.0 * s * s * var_jy
}

/// `Var(J_z) = (Var(n_A) + Var(n_B)) / 4` for product inputs.
pub fn var_jz_product(var_na: f64, var_nb: f64) -> f64 {
    0.25 * (var_na + var_nb)
}

/// Unbalanced-splitter QFI assembled from port moments, using
/// `4 Var(J_y) = f_general` (since `<J_y> = 0` for parity-definite port B).
pub fn f_unbalanced_from_moments(tau: f64, inp: &AnalyticInputs) -> Option<f64> {
    let var_jz = var_jz_product(inp.var_na?, inp.var_nb?);
    Some(f_unbalanced(tau, var_jz, f_general(inp) / 4.0))
}

/// Coherent state in A and even cat `|alpha>_+` in B, phases matched:
/// `F_m = 2 nA nB + nA + nB + 2 nA |alpha|^2` with `nB = |alpha|^2 tanh|alpha|^2`.
pub fn example_cat_f_max(nbar_a: f64, alpha_abs: f64) -> f64 {
    let x = alpha_abs * alpha_abs;
    let nb = x * x.tanh();
    2.0 * nbar_a * nb + nbar_a + nb + 2.0 * nbar_a * x
}

/// Cat example with `tanh|alpha|^2` replaced by 1, so `|alpha|^2 = nB`:
/// `F_m = 4 nA nB + nA + nB`, bounded by `N^2 + N`.
pub fn example_cat_f_max_saturated(nbar_a: f64, nbar_b: f64) -> f64 {
    4.0 * nbar_a * nbar_b + nbar_a + nbar_b
}

/// Coherent state in A and squeezed vacuum in B, phases matched:
/// `F_m = 2 nA nB + nA + nB + 2 nA sqrt(nB^2 + nB)`.
pub fn example_squeezed_f_max(nbar_a: f64, nbar_b: f64) -> f64 {
    2.0 * nbar_a * nbar_b + nbar_a + nbar_b + 2.0 * nbar_a * (nbar_b * nbar_b + nbar_b).sqrt()
}

/// Loss scenario: port A `|i alpha e^{i phi}>`, port B `|alpha>_+`, both arms
/// with transmission `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParams {
    pub alpha: C64,
    /// Relative phase in `[0, pi)`.
    pub phi: f64,
    pub t: f64,
}

impl LossParams {
    pub fn new(alpha: C64, phi: f64, t: f64) -> Self {
        Self { alpha, phi, t }
    }

    pub fn r(&self) -> f64 {
        1.0 - self.t
    }

    fn x(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `exp(-2 |alpha|^2 R)`
    pub fn p_r(&self) -> f64 {
        (-2.0 * self.x() * self.r()).exp()
    }

    /// `exp(-2 |alpha|^2 T)`
    pub fn p_t(&self) -> f64 {
        (-2.0 * self.x() * self.t).exp()
    }

    /// Squared even-cat normalization `1 / (2 + 2 e^{-2|alpha|^2})`.
    pub fn n_alpha_sq(&self) -> f64 {
        cat_norm_sq(self.alpha.norm())
    }

    /// `1 - 4 N_alpha^4 (1 - p_r^2)`
    pub fn g_script(&self) -> f64 {
        let n2 = self.n_alpha_sq();
        1.0 - 4.0 * n2 * n2 * (1.0 - self.p_r().powi(2))
    }

    /// Input mean photon number in port A, `|alpha|^2`.
    pub fn nbar_a(&self) -> f64 {
        self.x()
    }

    /// Input total photon number `|alpha|^2 (1 + tanh|alpha|^2) = 4 N_alpha^2 |alpha|^2`.
    pub fn total_photons(&self) -> f64 {
        4.0 * self.n_alpha_sq() * self.x()
    }
}

pub fn cat_norm_sq(alpha_abs: f64) -> f64 {
    1.0 / (2.0 + 2.0 * (-2.0 * alpha_abs * alpha_abs).exp())
}

/// Lossy QFI as a function of the relative phase `phi`.
pub fn f_loss(p: &LossParams) -> f64 {
    let x = p.x();
    let t = p.t;
    let n2 = p.n_alpha_sq();
    let pr2 = p.p_r().powi(2);
    let pt2 = p.p_t().powi(2);
    let (s, c) = p.phi.sin_cos();
    4.0 * t * x * (n2 + t * x * (2.0 * n2 - 1.0)) + 4.0 * t * t * x * x * p.g_script() * c * c
        - 16.0 * t * t * n2 * n2 * x * x * (1.0 - pr2) * pt2 * s * s
}

/// Lossy QFI at `phi = 0`:
/// `F_m = 4 T N_a^2 |alpha|^2 + 8 T^2 N_a^2 |alpha|^4 [1 - 2 N_a^2 (1 - p_r^2)]`.
pub fn f_loss_matched(p: &LossParams) -> f64 {
    let x = p.x();
    let t = p.t;
    let n2 = p.n_alpha_sq();
    let pr2 = p.p_r().powi(2);
    4.0 * t * n2 * x + 8.0 * t * t * n2 * x * x * (1.0 - 2.0 * n2 * (1.0 - pr2))
}

/// [`f_loss_matched`] written with the input photon numbers:
/// `T N + 2 T^2 N nA [1 - 2 N_a^2 (1 - p_r^2)]`.
pub fn f_loss_matched_photons(p: &LossParams) -> f64 {
    let (t, n, na) = (p.t, p.total_photons(), p.nbar_a());
    let n2 = p.n_alpha_sq();
    t * n + 2.0 * t * t * n * na * (1.0 - 2.0 * n2 * (1.0 - p.p_r().powi(2)))
}

/// First order in `R` of the matched lossy QFI:
/// `N + 2 N nA - [1 + 4 nA (N + 1)] N R`.
pub fn f_loss_small_r(nbar_a: f64, n_total: f64, r: f64) -> f64 {
    n_total + 2.0 * n_total * nbar_a - (1.0 + 4.0 * nbar_a * (n_total + 1.0)) * n_total * r
}

/// Reflection below which the first-order QFI stays above the shot-noise
/// value `N`: `R_c = 2 nA / [1 + 4 nA (N + 1)]`.
pub fn r_critical(nbar_a: f64, n_total: f64) -> f64 {
    2.0 * nbar_a / (1.0 + 4.0 * nbar_a * (n_total + 1.0))
}
