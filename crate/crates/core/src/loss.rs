//! Photon loss with equal transmission `T` in both arms.
//!
//! The production path applies the bosonic amplitude-damping channel to each
//! mode, with Kraus operators
//! `K_k = sqrt(R^k / k!) T^{n/2} a^k`, i.e.
//! `<n-k|K_k|n> = sqrt(C(n, k) R^k T^(n-k))`.
//!
//! [`apply_loss_ancilla_oracle`] rebuilds the same channel from two fictitious
//! beam splitters coupling the input modes to vacuum ancillas `C` and `D`,
//! `Gamma_C = exp[i sqrt2 acos(sqrt T) (Jx^AC + Jy^BC)]` and
//! `Gamma_D = exp[i sqrt2 acos(sqrt T) (Jx^BD + Jy^AD)]`, followed by a trace
//! over the ancillas. It is exponentially more expensive and exists to check
//! the Kraus path.

use crate::error::{Error, Result};
use crate::fock::ModeSpec;
use crate::interferometer::{generator, InterferometerSpec};
use crate::linalg::{c, BlockEigen, BlockUnitary, CMatrix, CVector, SparseMatrix, C64, I};
use crate::qfi::{qfi_product, QfiResult, SpectralDecomposition};
use crate::two_mode::{Dims, Subsystem, TwoModeState};

/// Largest trace deficit tolerated from a truncated Kraus sum.
pub const KRAUS_TRACE_TOL: f64 = 1e-9;
/// Target discarded weight when the cutoff is picked automatically.
pub const KRAUS_TAIL_TARGET: f64 = 1e-12;
/// Basis-size guard for the four-mode oracle.
pub const ORACLE_MAX_STATES: usize = 300_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossSpec {
    transmission: f64,
    /// Maximum photons lost per mode; `None` picks the smallest adequate value.
    pub kraus_cutoff: Option<usize>,
}

impl LossSpec {
    pub fn new(transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::InvalidParameter(format!(
                "transmission {transmission} outside [0, 1]"
            )));
        }
        Ok(Self {
            transmission,
            kraus_cutoff: None,
        })
    }

    pub fn with_kraus_cutoff(self, cutoff: usize) -> Self {
        Self {
            kraus_cutoff: Some(cutoff),
            ..self
        }
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn reflection(&self) -> f64 {
        1.0 - self.transmission
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that exactly `k` of `n` photons are lost.
fn loss_weight(n: usize, k: usize, t: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    binomial(n, k) * (1.0 - t).powi(k as i32) * t.powi((n - k) as i32)
}

/// Single-mode Kraus operators `K_0 ... K_cutoff` on a `dim`-level mode.
pub fn kraus_operators(t: f64, dim: usize, cutoff: usize) -> Vec<CMatrix> {
    (0..=cutoff.min(dim - 1))
        .map(|k| {
            let mut m = CMatrix::zeros(dim, dim);
            for n in k..dim {
                m[(n - k, n)] = c(loss_weight(n, k, t).sqrt(), 0.0);
            }
            m
        })
        .collect()
}

/// `max |sum_k K_k^dag K_k - 1|` over columns below the top `edge` levels.
pub fn kraus_completeness_error(ops: &[CMatrix], edge: usize) -> f64 {
    let dim = ops.first().map(|k| k.nrows()).unwrap_or(0);
    let mut sum = CMatrix::zeros(dim, dim);
    for k in ops {
        sum += k.adjoint() * k;
    }
    let diff = sum - CMatrix::identity(dim, dim);
    let keep = dim.saturating_sub(edge);
    (0..dim)
        .flat_map(|i| (0..keep).map(move |j| (i, j)))
        .map(|(i, j)| diff[(i, j)].norm())
        .fold(0.0, f64::max)
}

/// Smallest number of lost photons `k*` such that losing more than `k*`
/// happens with probability below [`KRAUS_TAIL_TARGET`].
pub fn auto_kraus_cutoff(populations: &[f64], t: f64) -> usize {
    let nmax = populations.len().saturating_sub(1);
    (0..=nmax)
        .find(|&kstar| discarded_weight(populations, t, kstar) < KRAUS_TAIL_TARGET)
        .unwrap_or(nmax)
}

fn discarded_weight(populations: &[f64], t: f64, kstar: usize) -> f64 {
    populations
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let kept: f64 = (0..=kstar.min(n)).map(|k| loss_weight(n, k, t)).sum();
            p * (1.0 - kept).max(0.0)
        })
        .sum()
}

fn cutoff_for(spec: &LossSpec, populations: &[f64]) -> usize {
    spec.kraus_cutoff
        .unwrap_or_else(|| auto_kraus_cutoff(populations, spec.transmission))
}

fn sqrt_weights(t: f64, dim: usize, cutoff: usize) -> Vec<Vec<f64>> {
    // w[k][n] = <n-k|K_k|n>
    (0..=cutoff.min(dim - 1))
        .map(|k| (0..dim).map(|n| loss_weight(n, k, t).sqrt()).collect())
        .collect()
}

/// Amplitude damping of a single-mode density matrix.
pub fn apply_loss_mode(rho: &CMatrix, spec: &LossSpec) -> Result<CMatrix> {
    let dim = rho.nrows();
    let pops: Vec<f64> = (0..dim).map(|n| rho[(n, n)].re).collect();
    let w = sqrt_weights(spec.transmission, dim, cutoff_for(spec, &pops));
    let mut out = CMatrix::zeros(dim, dim);
    for (k, wk) in w.iter().enumerate() {
        for n in 0..dim - k {
            for m in 0..dim - k {
                out[(n, m)] += rho[(n + k, m + k)] * (wk[n + k] * wk[m + k]);
            }
        }
    }
    check_trace(rho.trace().re, out.trace().re)?;
    Ok(out)
}

fn check_trace(before: f64, after: f64) -> Result<()> {
    let deficit = (before - after).abs();
    if deficit > KRAUS_TRACE_TOL {
        return Err(Error::KrausTruncation(deficit));
    }
    Ok(())
}

/// Loss on both modes of a two-mode state. Returns a density matrix.
pub fn apply_loss(state: &TwoModeState, spec: &LossSpec) -> Result<TwoModeState> {
    let dims = state.dims();
    let rho = state.to_density();
    let pops_a: Vec<f64> = state
        .partial_trace(Subsystem::A)
        .diagonal()
        .iter()
        .map(|z| z.re)
        .collect();
    let pops_b: Vec<f64> = state
        .partial_trace(Subsystem::B)
        .diagonal()
        .iter()
        .map(|z| z.re)
        .collect();
    let wa = sqrt_weights(spec.transmission, dims.a, cutoff_for(spec, &pops_a));
    let wb = sqrt_weights(spec.transmission, dims.b, cutoff_for(spec, &pops_b));

    let n = dims.total();
    let mut mid = CMatrix::zeros(n, n);
    for (k, wk) in wa.iter().enumerate() {
        for na in 0..dims.a - k {
            for ma in 0..dims.a - k {
                let f = wk[na + k] * wk[ma + k];
                if f == 0.0 {
                    continue;
                }
                for nb in 0..dims.b {
                    for mb in 0..dims.b {
                        mid[(dims.index(na, nb), dims.index(ma, mb))] +=
                            rho[(dims.index(na + k, nb), dims.index(ma + k, mb))] * f;
                    }
                }
            }
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for (k, wk) in wb.iter().enumerate() {
        for nb in 0..dims.b - k {
            for mb in 0..dims.b - k {
                let f = wk[nb + k] * wk[mb + k];
                if f == 0.0 {
                    continue;
                }
                for na in 0..dims.a {
                    for ma in 0..dims.a {
                        out[(dims.index(na, nb), dims.index(ma, mb))] +=
                            mid[(dims.index(na, nb + k), dims.index(ma, mb + k))] * f;
                    }
                }
            }
        }
    }
    check_trace(rho.trace().re, out.trace().re)?;
    TwoModeState::density_unchecked(dims, out)
}

/// Three-mode basis `(n_A, n_B, n_X)` restricted to `n_A + n_B + n_X <= max_total`.
struct AncillaBasis {
    max_total: usize,
    states: Vec<(usize, usize, usize)>,
    index: Vec<Option<usize>>,
}

impl AncillaBasis {
    fn new(max_total: usize) -> Self {
        let d = max_total + 1;
        let mut states = Vec::new();
        let mut index = vec![None; d * d * d];
        for na in 0..d {
            for nb in 0..d - na {
                for nx in 0..d - na - nb {
                    index[(na * d + nb) * d + nx] = Some(states.len());
                    states.push((na, nb, nx));
                }
            }
        }
        Self {
            max_total,
            states,
            index,
        }
    }

    fn find(&self, na: usize, nb: usize, nx: usize) -> Option<usize> {
        let d = self.max_total + 1;
        if na + nb + nx > self.max_total {
            return None;
        }
        self.index[(na * d + nb) * d + nx]
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    /// `sum_p (u_p p^dag x + conj(u_p) x^dag p)` for `p in {A, B}`.
    fn coupling(&self, u_a: C64, u_b: C64) -> SparseMatrix {
        let mut trip = Vec::new();
        for (col, &(na, nb, nx)) in self.states.iter().enumerate() {
            if nx > 0 {
                let s = (nx as f64).sqrt();
                // a^dag x
                if let Some(row) = self.find(na + 1, nb, nx - 1) {
                    trip.push((row, col, u_a * s * ((na + 1) as f64).sqrt()));
                }
                if let Some(row) = self.find(na, nb + 1, nx - 1) {
                    trip.push((row, col, u_b * s * ((nb + 1) as f64).sqrt()));
                }
            }
            let s = ((nx + 1) as f64).sqrt();
            // x^dag a
            if na > 0 {
                if let Some(row) = self.find(na - 1, nb, nx + 1) {
                    trip.push((row, col, u_a.conj() * s * (na as f64).sqrt()));
                }
            }
            if nb > 0 {
                if let Some(row) = self.find(na, nb - 1, nx + 1) {
                    trip.push((row, col, u_b.conj() * s * (nb as f64).sqrt()));
                }
            }
        }
        SparseMatrix::from_triplets(self.len(), trip)
    }
}

/// Splits a three-mode vector into its ancilla-number branches, each a vector
/// on the padded `(d x d)` two-mode space.
fn branches(basis: &AncillaBasis, v: &CVector) -> Vec<CVector> {
    let d = basis.max_total + 1;
    let mut out = vec![CVector::zeros(d * d); d];
    for (k, &(na, nb, nx)) in basis.states.iter().enumerate() {
        out[nx][na * d + nb] = v[k];
    }
    out
}

fn embed(basis: &AncillaBasis, psi: &CVector) -> CVector {
    let d = basis.max_total + 1;
    let mut v = CVector::zeros(basis.len());
    for (k, &(na, nb, nx)) in basis.states.iter().enumerate() {
        if nx == 0 {
            v[k] = psi[na * d + nb];
        }
    }
    v
}

/// Ground-truth loss channel from explicit ancilla modes. Intended for
/// small cutoffs only.
pub fn apply_loss_ancilla_oracle(state: &TwoModeState, spec: &LossSpec) -> Result<TwoModeState> {
    let dims = state.dims();
    // every mode must hold all photons that can be present at once
    let max_total = dims.a + dims.b - 2;
    let d = max_total + 1;
    let four_mode = d.pow(4);
    if four_mode > ORACLE_MAX_STATES {
        return Err(Error::TooLarge(four_mode, ORACLE_MAX_STATES));
    }
    let basis = AncillaBasis::new(max_total);
    let angle = 2f64.sqrt() * spec.transmission.sqrt().acos();
    let half = c(0.5, 0.0);
    let minus_half_i = c(0.0, -0.5);
    // Gamma_C couples (A, B) to C through Jx^AC + Jy^BC
    let gamma_c: BlockUnitary = BlockEigen::new(&basis.coupling(half, minus_half_i))?.exp_i(angle);
    // Gamma_D couples (A, B) to D through Jx^BD + Jy^AD
    let gamma_d: BlockUnitary = BlockEigen::new(&basis.coupling(minus_half_i, half))?.exp_i(angle);

    let decomp = match state {
        TwoModeState::Pure { vector, .. } => SpectralDecomposition::of_pure(vector),
        TwoModeState::Density { matrix, .. } => SpectralDecomposition::of_density(matrix)?,
    };
    let padded = Dims::new(d, d);
    let mut rho = CMatrix::zeros(d * d, d * d);
    for (p, v) in decomp.eigenvalues.iter().zip(&decomp.eigenvectors) {
        let mut psi = CVector::zeros(d * d);
        for na in 0..dims.a {
            for nb in 0..dims.b {
                psi[padded.index(na, nb)] = v[dims.index(na, nb)];
            }
        }
        for chi in branches(&basis, &gamma_c.apply(&embed(&basis, &psi))) {
            if chi.norm_squared() == 0.0 {
                continue;
            }
            for omega in branches(&basis, &gamma_d.apply(&embed(&basis, &chi))) {
                rho += (&omega * omega.adjoint()) * c(*p, 0.0);
            }
        }
    }
    let cropped = CMatrix::from_fn(dims.total(), dims.total(), |i, j| {
        let (na, nb) = dims.split(i);
        let (ma, mb) = dims.split(j);
        rho[(padded.index(na, nb), padded.index(ma, mb))]
    });
    check_trace(rho.trace().re, cropped.trace().re)?;
    TwoModeState::density_unchecked(dims, cropped)
}

#[derive(Clone, Copy, Debug)]
pub struct LossyQfi {
    pub result: QfiResult,
    pub dims: Dims,
}

/// Numerical QFI of the lossy scheme: port A `|i alpha e^{i phi}>`, port B the
/// even cat `|alpha>_+`, loss `t` on both modes, then a balanced
/// interferometer.
pub fn lossy_qfi(alpha: C64, phi: f64, t: f64) -> Result<LossyQfi> {
    lossy_qfi_with_dims(alpha, phi, t, None)
}

pub fn lossy_qfi_with_dims(alpha: C64, phi: f64, t: f64, dims: Option<Dims>) -> Result<LossyQfi> {
    let spec = LossSpec::new(t)?;
    let a_spec = ModeSpec::Coherent(I * alpha * C64::from_polar(1.0, phi));
    let b_spec = ModeSpec::EvenCat(alpha);
    let dims = match dims {
        Some(d) => d,
        None => Dims::new(a_spec.auto_dim()?, b_spec.auto_dim()?),
    };
    let rho_a = apply_loss_mode(&a_spec.build(dims.a)?.density(), &spec)?;
    let rho_b = apply_loss_mode(&b_spec.build(dims.b)?.density(), &spec)?;
    let g = generator(&InterferometerSpec::balanced(0.0), dims)?;
    Ok(LossyQfi {
        result: qfi_product(&rho_a, &rho_b, &g)?,
        dims,
    })
}
