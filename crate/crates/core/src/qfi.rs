//! Quantum Fisher information of unitary families `rho(theta) = U rho U^dag`
//! with `U = exp(i theta G)`.
//!
//! For a spectral decomposition `rho = sum_j p_j |phi_j><phi_j|`,
//!
//! ```text
//! F = sum_j 4 p_j <phi_j|G^2|phi_j> - sum_{j,k} 8 p_j p_k / (p_j + p_k) |<phi_j|G|phi_k>|^2
//! ```
//!
//! where both sums run over the support of `rho`. The first sum is `term1`,
//! the second `term2` in [`QfiResult`].

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigen, kron_vec, CMatrix, CVector, SparseMatrix, C64};
use crate::two_mode::{Dims, TwoModeOperator, TwoModeState};

/// Eigenvalues below `SUPPORT_CUTOFF * p_max` are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Pairs with `p_j + p_k` below this are dropped from the coherence sum.
pub const PAIR_CUTOFF: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Supported eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvectors.
    pub eigenvectors: Vec<CVector>,
    /// Cutoff relative to the largest eigenvalue used to define the support.
    pub cutoff: f64,
}

impl SpectralDecomposition {
    /// Eigendecomposition of a density matrix, truncated to its support.
    pub fn of_density(rho: &CMatrix) -> Result<Self> {
        let eig = hermitian_eigen(rho)?;
        let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        let pairs = (0..eig.values.len())
            .map(|k| (eig.values[k], eig.vectors.column(k).into_owned()))
            .collect();
        Ok(Self::from_pairs(pairs))
    }

    pub fn of_pure(psi: &CVector) -> Self {
        Self::from_pairs(vec![(1.0, psi.clone())])
    }

    /// Decomposition of `rho_a (x) rho_b` from the factors' decompositions:
    /// eigenvalues multiply and eigenvectors tensor.
    pub fn of_product(a: &Self, b: &Self) -> Self {
        let mut pairs = Vec::with_capacity(a.rank() * b.rank());
        for (pa, va) in a.eigenvalues.iter().zip(&a.eigenvectors) {
            for (pb, vb) in b.eigenvalues.iter().zip(&b.eigenvectors) {
                pairs.push((pa * pb, kron_vec(va, vb)));
            }
        }
        Self::from_pairs(pairs)
    }

    fn from_pairs(mut pairs: Vec<(f64, CVector)>) -> Self {
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let pmax = pairs.first().map(|p| p.0).unwrap_or(0.0);
        pairs.retain(|(p, _)| *p > SUPPORT_CUTOFF * pmax);
        let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
        Self {
            eigenvalues,
            eigenvectors,
            cutoff: SUPPORT_CUTOFF,
        }
    }

    /// Support rank `M`.
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    pub support_rank: usize,
    pub support_cutoff: f64,
    pub term1: f64,
    pub term2: f64,
}

fn check_generator(g: &TwoModeOperator, dims: Dims) -> Result<()> {
    if g.dims != dims {
        return Err(Error::DimensionMismatch(format!(
            "generator dims {:?} vs state dims {:?}",
            g.dims, dims
        )));
    }
    let err = g.hermiticity_error();
    if err > HERMITIAN_TOL * g.matrix.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// `F = 4 Var(G)` for a pure state.
pub fn qfi_pure(state: &TwoModeState, g: &TwoModeOperator) -> Result<QfiResult> {
    let TwoModeState::Pure { dims, vector } = state else {
        return Err(Error::InvalidParameter(
            "qfi_pure needs a pure state".into(),
        ));
    };
    check_generator(g, *dims)?;
    let norm = vector.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let gpsi = g.apply(vector);
    let mean = vector.dotc(&gpsi).re;
    let mean_sq = gpsi.norm_squared();
    let term1 = 4.0 * mean_sq;
    let term2 = 4.0 * mean * mean;
    Ok(QfiResult {
        value: term1 - term2,
        support_rank: 1,
        support_cutoff: SUPPORT_CUTOFF,
        term1,
        term2,
    })
}

/// QFI from an explicit spectral decomposition.
pub fn qfi_spectral(decomp: &SpectralDecomposition, g: &SparseMatrix) -> QfiResult {
    let gphi: Vec<CVector> = decomp.eigenvectors.iter().map(|v| g.mul_vec(v)).collect();
    let p = &decomp.eigenvalues;
    let term1: f64 = p
        .iter()
        .zip(&gphi)
        .map(|(pj, gv)| 4.0 * pj * gv.norm_squared())
        .sum();
    let mut term2 = 0.0;
    for (j, phi_j) in decomp.eigenvectors.iter().enumerate() {
        for (k, gv_k) in gphi.iter().enumerate() {
            let s = p[j] + p[k];
            if s < PAIR_CUTOFF {
                continue;
            }
            term2 += 8.0 * p[j] * p[k] / s * phi_j.dotc(gv_k).norm_sqr();
        }
    }
    QfiResult {
        value: term1 - term2,
        support_rank: decomp.rank(),
        support_cutoff: decomp.cutoff,
        term1,
        term2,
    }
}

/// QFI of an arbitrary state, through the spectral formula.
pub fn qfi_mixed(state: &TwoModeState, g: &TwoModeOperator) -> Result<QfiResult> {
    check_generator(g, state.dims())?;
    let decomp = match state {
        TwoModeState::Pure { vector, .. } => SpectralDecomposition::of_pure(vector),
        TwoModeState::Density { matrix, .. } => SpectralDecomposition::of_density(matrix)?,
    };
    Ok(qfi_spectral(&decomp, &g.matrix))
}

/// QFI of `rho_a (x) rho_b` without forming the joint density matrix.
pub fn qfi_product(rho_a: &CMatrix, rho_b: &CMatrix, g: &TwoModeOperator) -> Result<QfiResult> {
    check_generator(g, Dims::new(rho_a.nrows(), rho_b.nrows()))?;
    let da = SpectralDecomposition::of_density(rho_a)?;
    let db = SpectralDecomposition::of_density(rho_b)?;
    Ok(qfi_spectral(
        &SpectralDecomposition::of_product(&da, &db),
        &g.matrix,
    ))
}

/// `d rho / d theta = i [G, rho]` at the given point of the family.
pub fn derivative(rho: &CMatrix, g: &TwoModeOperator) -> CMatrix {
    let g_rho = g.matrix.mul_dense(rho);
    let rho_g = g.matrix.left_mul_dense(rho);
    (g_rho - rho_g) * c(0.0, 1.0)
}

/// Symmetric logarithmic derivative `L` solving `d rho = (rho L + L rho) / 2`,
/// zero outside the support pairs.
pub fn sld(state: &TwoModeState, g: &TwoModeOperator) -> Result<TwoModeOperator> {
    check_generator(g, state.dims())?;
    let rho = state.to_density();
    let n = rho.nrows();
    let eig = hermitian_eigen(&rho)?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {min:.3e}"
        )));
    }
    let pmax = eig.values.iter().copied().fold(0.0, f64::max);
    let p: DVector<f64> = eig
        .values
        .map(|x| if x > SUPPORT_CUTOFF * pmax { x } else { 0.0 });
    let v = &eig.vectors;
    let d_eig = v.adjoint() * derivative(&rho, g) * v;
    let l_eig = CMatrix::from_fn(n, n, |j, k| {
        let s = p[j] + p[k];
        if s < PAIR_CUTOFF || (p[j] == 0.0 && p[k] == 0.0) {
            C64::new(0.0, 0.0)
        } else {
            d_eig[(j, k)] * (2.0 / s)
        }
    });
    let l = v * l_eig * v.adjoint();
    let l = (&l + l.adjoint()) * c(0.5, 0.0);
    TwoModeOperator::new(state.dims(), SparseMatrix::from_dense(&l), "L")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, even_cat, fock_state, ModeState};
    use crate::interferometer::{evolve, generator, InterferometerSpec};
    use crate::linalg::max_abs_diff;
    use crate::two_mode::{schwinger, tensor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pure(rng: &mut ChaCha8Rng, dim: usize, support: usize) -> ModeState {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for z in amps.iter_mut().take(support) {
            *z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        ModeState::from_amplitudes(amps).unwrap()
    }

    fn random_two_mode_pure(rng: &mut ChaCha8Rng, dims: Dims, support: usize) -> TwoModeState {
        let mut v = CVector::zeros(dims.total());
        for na in 0..support {
            for nb in 0..support {
                v[dims.index(na, nb)] =
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let n = v.norm();
        TwoModeState::pure(dims, v.unscale(n)).unwrap()
    }

    fn random_mixed(rng: &mut ChaCha8Rng, dims: Dims, rank: usize) -> TwoModeState {
        let mut rho = CMatrix::zeros(dims.total(), dims.total());
        let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            let TwoModeState::Pure { vector, .. } = random_two_mode_pure(rng, dims, 4) else {
                unreachable!()
            };
            rho += (&vector * vector.adjoint()) * c(w / total, 0.0);
        }
        TwoModeState::density(dims, rho).unwrap()
    }

    #[test]
    fn vacuum_has_zero_qfi() {
        let vac = fock_state(0, 5).unwrap();
        let j = schwinger(5, 5).unwrap();
        let r = qfi_pure(&tensor(&vac, &vac), &j.jy).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn coherent_with_fock() {
        let beta = C64::new(0.0, 1.5);
        let a = coherent(beta, 30).unwrap();
        let b = fock_state(2, 12).unwrap();
        let j = schwinger(30, 12).unwrap();
        let r = qfi_pure(&tensor(&a, &b), &j.jy).unwrap();
        let na = beta.norm_sqr();
        let expected = 2.0 * na * 2.0 + na + 2.0;
        assert!((r.value - expected).abs() < 1e-8 * expected);
        assert!((r.value - (r.term1 - r.term2)).abs() < 1e-10);
    }

    #[test]
    fn rank_one_mixed_matches_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dims = Dims::new(7, 6);
        let g = generator(&InterferometerSpec::new(0.7, 0.0), dims).unwrap();
        for _ in 0..20 {
            let s = random_two_mode_pure(&mut rng, dims, 5);
            let pure = qfi_pure(&s, &g).unwrap().value;
            let mixed = qfi_mixed(&s.clone().into_density(), &g).unwrap();
            assert_eq!(mixed.support_rank, 1);
            assert!((pure - mixed.value).abs() <= 1e-9 * pure.abs().max(1.0));
        }
    }

    #[test]
    fn maximally_mixed_has_zero_qfi() {
        let dims = Dims::new(4, 4);
        let rho = CMatrix::identity(16, 16) * c(1.0 / 16.0, 0.0);
        let s = TwoModeState::density(dims, rho).unwrap();
        let j = schwinger(4, 4).unwrap();
        let r = qfi_mixed(&s, &j.jy).unwrap();
        assert_eq!(r.support_rank, 16);
        assert!(r.value.abs() < 1e-12);
        let l = sld(&s, &j.jy).unwrap();
        let trl2 = l.matrix.matmul(&l.matrix).trace_with(&s.to_density());
        assert!(trl2.norm() < 1e-12);
    }

    #[test]
    fn product_path_matches_full_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a1 = random_pure(&mut rng, 6, 5);
        let a2 = random_pure(&mut rng, 6, 5);
        let rho_a = a1.density() * c(0.7, 0.0) + a2.density() * c(0.3, 0.0);
        let b = even_cat(C64::new(0.6, 0.3), 12).unwrap();
        let rho_b = b.density();
        let j = schwinger(6, 12).unwrap();
        let fast = qfi_product(&rho_a, &rho_b, &j.jy).unwrap();
        let full = qfi_mixed(
            &TwoModeState::product_density(&rho_a, &rho_b).unwrap(),
            &j.jy,
        )
        .unwrap();
        assert_eq!(fast.support_rank, 2);
        assert!((fast.value - full.value).abs() < 1e-10 * full.value);
    }

    #[test]
    fn sld_pure_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dims = Dims::new(5, 5);
        let s = random_two_mode_pure(&mut rng, dims, 4);
        let j = schwinger(5, 5).unwrap();
        let rho = s.to_density();
        let l = sld(&s, &j.jy).unwrap();
        // L = 2 d rho = 2i [G, rho] for pure states
        let expected = derivative(&rho, &j.jy) * c(2.0, 0.0);
        assert!(max_abs_diff(&l.to_dense(), &expected) < 1e-10);
        let f = qfi_pure(&s, &j.jy).unwrap().value;
        let trl2 = l.matrix.matmul(&l.matrix).trace_with(&rho).re;
        assert!((trl2 - f).abs() < 1e-8 * f);
    }

    #[test]
    fn sld_rank_three_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dims = Dims::new(5, 5);
        let s = random_mixed(&mut rng, dims, 3);
        let g = generator(&InterferometerSpec::new(0.4, 0.0), dims).unwrap();
        let rho = s.to_density();
        let l = sld(&s, &g).unwrap();
        assert!(l.is_hermitian(1e-12));
        let f = qfi_mixed(&s, &g).unwrap();
        assert_eq!(f.support_rank, 3);
        let trl2 = l.matrix.matmul(&l.matrix).trace_with(&rho).re;
        assert!((trl2 - f.value).abs() < 1e-8 * f.value);
        assert!(l.matrix.trace_with(&rho).norm() < 1e-9);
        // (rho L + L rho)/2 reproduces the derivative
        let ld = l.to_dense();
        let lhs = (&rho * &ld + &ld * &rho) * c(0.5, 0.0);
        assert!(max_abs_diff(&lhs, &derivative(&rho, &g)) < 1e-9);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = Dims::new(5, 4);
        let s = random_mixed(&mut rng, dims, 2);
        let spec = InterferometerSpec::new(1.1, 0.0);
        let g = generator(&spec, dims).unwrap();
        let h = 1e-5;
        let plus = evolve(&s, &spec.with_theta(h)).unwrap().to_density();
        let minus = evolve(&s, &spec.with_theta(-h)).unwrap().to_density();
        let fd = (plus - minus) / c(2.0 * h, 0.0);
        assert!(max_abs_diff(&fd, &derivative(&s.to_density(), &g)) < 1e-8);
    }

    #[test]
    fn theta_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let dims = Dims::new(6, 6);
        let s = random_mixed(&mut rng, dims, 3);
        let spec = InterferometerSpec::balanced(0.0);
        let g = generator(&spec, dims).unwrap();
        let f0 = qfi_mixed(&s, &g).unwrap().value;
        for theta in [0.3, 1.7] {
            let st = evolve(&s, &spec.with_theta(theta)).unwrap();
            let f = qfi_mixed(&st, &g).unwrap().value;
            assert!((f - f0).abs() < 1e-8 * f0);
        }
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let dims = Dims::new(3, 3);
        let s = tensor(&fock_state(0, 3).unwrap(), &fock_state(0, 3).unwrap());
        let (a, _) = crate::two_mode::mode_annihilators(dims).unwrap();
        assert!(matches!(qfi_pure(&s, &a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_violation_rejected() {
        let dims = Dims::new(2, 2);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.1, 0.0);
        m[(1, 1)] = c(-0.1, 0.0);
        let s = TwoModeState::density_unchecked(dims, m).unwrap();
        let j = schwinger(2, 2).unwrap();
        assert!(matches!(
            qfi_mixed(&s, &j.jy),
            Err(Error::InvalidDensity(_))
        ));
    }
}
