//! Two-mode states and operators over `|n_A> (x) |n_B>`, indexed by
//! `k = n_A * d_B + n_B`.

use crate::error::{Error, Result};
use crate::fock::{ladder, ModeState};
use crate::linalg::{
    c, hermitian_eigen, kron, kron_vec, sparse_kron, CMatrix, CVector, SparseMatrix, C64,
};

pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub a: usize,
    pub b: usize,
}

impl Dims {
    pub fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }

    pub fn total(&self) -> usize {
        self.a * self.b
    }

    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * self.b + n_b
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.b, k % self.b)
    }
}

#[derive(Clone, Debug)]
pub enum TwoModeState {
    Pure { dims: Dims, vector: CVector },
    Density { dims: Dims, matrix: CMatrix },
}

impl TwoModeState {
    pub fn pure(dims: Dims, vector: CVector) -> Result<Self> {
        if vector.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for dims {}x{}",
                vector.len(),
                dims.a,
                dims.b
            )));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::Pure { dims, vector })
    }

    /// Validated density matrix: Hermitian, unit trace and positive
    /// semidefinite, all within `1e-10`.
    pub fn density(dims: Dims, matrix: CMatrix) -> Result<Self> {
        let s = Self::density_unchecked(dims, matrix)?;
        s.validate()?;
        Ok(s)
    }

    /// Only the shape is checked.
    pub fn density_unchecked(dims: Dims, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dims.total() || matrix.ncols() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                dims.a,
                dims.b
            )));
        }
        Ok(Self::Density { dims, matrix })
    }

    pub fn product(a: &ModeState, b: &ModeState) -> Self {
        Self::Pure {
            dims: Dims::new(a.dim(), b.dim()),
            vector: kron_vec(a.amplitudes(), b.amplitudes()),
        }
    }

    /// `rho_a (x) rho_b` from single-mode density matrices.
    pub fn product_density(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<Self> {
        Self::density_unchecked(Dims::new(rho_a.nrows(), rho_b.nrows()), kron(rho_a, rho_b))
    }

    pub fn dims(&self) -> Dims {
        match self {
            Self::Pure { dims, .. } | Self::Density { dims, .. } => *dims,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure { .. })
    }

    pub fn to_density(&self) -> CMatrix {
        match self {
            Self::Pure { vector, .. } => vector * vector.adjoint(),
            Self::Density { matrix, .. } => matrix.clone(),
        }
    }

    pub fn into_density(self) -> Self {
        match self {
            Self::Pure { dims, vector } => Self::Density {
                dims,
                matrix: &vector * vector.adjoint(),
            },
            d => d,
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            Self::Pure { vector, .. } => vector.norm_squared(),
            Self::Density { matrix, .. } => matrix.trace().re,
        }
    }

    /// Checks the invariants of the variant: unit norm, or Hermitian with
    /// unit trace and no eigenvalue below `-1e-10`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pure { vector, .. } => {
                let norm = vector.norm();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(Error::NotNormalized(norm));
                }
            }
            Self::Density { matrix, .. } => {
                let herm = (matrix - matrix.adjoint())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                if herm > STATE_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "Hermiticity violated by {herm:.3e}"
                    )));
                }
                let tr = matrix.trace();
                if (tr - c(1.0, 0.0)).norm() > STATE_TOL {
                    return Err(Error::InvalidDensity(format!("trace {tr}")));
                }
                let eig = hermitian_eigen(matrix)?;
                let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
                if min < -STATE_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "negative eigenvalue {min:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reduced density matrix of one mode.
    pub fn partial_trace(&self, keep: Subsystem) -> CMatrix {
        let dims = self.dims();
        match (self, keep) {
            (Self::Pure { vector, .. }, Subsystem::A) => {
                CMatrix::from_fn(dims.a, dims.a, |n, m| {
                    (0..dims.b)
                        .map(|k| vector[dims.index(n, k)] * vector[dims.index(m, k)].conj())
                        .sum()
                })
            }
            (Self::Pure { vector, .. }, Subsystem::B) => {
                CMatrix::from_fn(dims.b, dims.b, |n, m| {
                    (0..dims.a)
                        .map(|k| vector[dims.index(k, n)] * vector[dims.index(k, m)].conj())
                        .sum()
                })
            }
            (Self::Density { matrix, .. }, Subsystem::A) => {
                CMatrix::from_fn(dims.a, dims.a, |n, m| {
                    (0..dims.b)
                        .map(|k| matrix[(dims.index(n, k), dims.index(m, k))])
                        .sum()
                })
            }
            (Self::Density { matrix, .. }, Subsystem::B) => {
                CMatrix::from_fn(dims.b, dims.b, |n, m| {
                    (0..dims.a)
                        .map(|k| matrix[(dims.index(k, n), dims.index(k, m))])
                        .sum()
                })
            }
        }
    }

    pub fn expect(&self, op: &TwoModeOperator) -> Result<C64> {
        expect(op, self)
    }
}

pub fn tensor(a: &ModeState, b: &ModeState) -> TwoModeState {
    TwoModeState::product(a, b)
}

pub fn partial_trace(state: &TwoModeState, keep: Subsystem) -> CMatrix {
    state.partial_trace(keep)
}

/// `<op>` in the given state: `<psi|op|psi>` or `Tr(op rho)`.
pub fn expect(op: &TwoModeOperator, state: &TwoModeState) -> Result<C64> {
    if op.dims != state.dims() {
        return Err(Error::DimensionMismatch(format!(
            "operator dims {:?} vs state dims {:?}",
            op.dims,
            state.dims()
        )));
    }
    Ok(match state {
        TwoModeState::Pure { vector, .. } => op.matrix.quadratic_form(vector),
        TwoModeState::Density { matrix, .. } => op.matrix.trace_with(matrix),
    })
}

/// Sparse operator on the two-mode space.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeOperator {
    pub dims: Dims,
    pub matrix: SparseMatrix,
    pub label: String,
}

impl TwoModeOperator {
    pub fn new(dims: Dims, matrix: SparseMatrix, label: impl Into<String>) -> Result<Self> {
        if matrix.dim() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{0}x{0} operator for dims {1}x{2}",
                matrix.dim(),
                dims.a,
                dims.b
            )));
        }
        Ok(Self {
            dims,
            matrix,
            label: label.into(),
        })
    }

    pub fn identity(dims: Dims) -> Self {
        Self {
            dims,
            matrix: SparseMatrix::identity(dims.total()),
            label: "I".into(),
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        self.matrix.mul_vec(v)
    }

    /// `self + s * other`, keeping this operator's label.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.dims, other.dims);
        Self {
            dims: self.dims,
            matrix: self.matrix.add_scaled(&other.matrix, s),
            label: self.label.clone(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dims: self.dims,
            matrix: self.matrix.scale(s),
            label: self.label.clone(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims);
        Self {
            dims: self.dims,
            matrix: self.matrix.matmul(&other.matrix),
            label: format!("{} {}", self.label, other.label),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            dims: self.dims,
            matrix: self.matrix.commutator(&other.matrix),
            label: format!("[{}, {}]", self.label, other.label),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_dense(&self) -> CMatrix {
        self.matrix.to_dense()
    }
}

/// `a (x) 1` and `1 (x) b`.
pub fn mode_annihilators(dims: Dims) -> Result<(TwoModeOperator, TwoModeOperator)> {
    let (a, _) = ladder(dims.a)?;
    let (b, _) = ladder(dims.b)?;
    let a2 = sparse_kron(&a, &SparseMatrix::identity(dims.b));
    let b2 = sparse_kron(&SparseMatrix::identity(dims.a), &b);
    Ok((
        TwoModeOperator::new(dims, a2, "a")?,
        TwoModeOperator::new(dims, b2, "b")?,
    ))
}

/// Schwinger angular-momentum operators of two bosonic modes.
#[derive(Clone, Debug)]
pub struct Schwinger {
    pub jx: TwoModeOperator,
    pub jy: TwoModeOperator,
    pub jz: TwoModeOperator,
}

/// `J_x = (a^dag b + b^dag a)/2`, `J_y = (a^dag b - b^dag a)/(2i)`,
/// `J_z = (a^dag a - b^dag b)/2`.
pub fn schwinger(d_a: usize, d_b: usize) -> Result<Schwinger> {
    let dims = Dims::new(d_a, d_b);
    let (a, b) = mode_annihilators(dims)?;
    let ad_b = a.matrix.adjoint().matmul(&b.matrix);
    let bd_a = b.matrix.adjoint().matmul(&a.matrix);
    let na = a.matrix.adjoint().matmul(&a.matrix);
    let nb = b.matrix.adjoint().matmul(&b.matrix);
    let half = c(0.5, 0.0);
    let jx = ad_b.add_scaled(&bd_a, c(1.0, 0.0)).scale(half);
    let jy = ad_b.add_scaled(&bd_a, c(-1.0, 0.0)).scale(c(0.0, -0.5));
    let jz = na.add_scaled(&nb, c(-1.0, 0.0)).scale(half);
    Ok(Schwinger {
        jx: TwoModeOperator::new(dims, jx, "Jx")?,
        jy: TwoModeOperator::new(dims, jy, "Jy")?,
        jz: TwoModeOperator::new(dims, jz, "Jz")?,
    })
}

impl Schwinger {
    pub fn dims(&self) -> Dims {
        self.jx.dims
    }

    /// Largest entry of `([J_i, J_j] - i eps_ijk J_k) P`, where `P` projects
    /// out the top `edge` Fock levels of each mode.
    pub fn commutator_error(&self, edge: usize) -> f64 {
        let dims = self.dims();
        let interior = |k: usize| {
            let (na, nb) = dims.split(k);
            na + edge < dims.a && nb + edge < dims.b
        };
        let i = c(0.0, 1.0);
        [
            (&self.jx, &self.jy, &self.jz),
            (&self.jy, &self.jz, &self.jx),
            (&self.jz, &self.jx, &self.jy),
        ]
        .iter()
        .map(|(p, q, r)| {
            let m = p.commutator(q).add_scaled(r, -i).matrix;
            m.iter()
                .filter(|&(_, col, _)| interior(col))
                .map(|(_, _, v)| v.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
    }
}
