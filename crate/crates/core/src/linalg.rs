//! Complex linear algebra used throughout the crate.
//!
//! Dense matrices come from `nalgebra`. Operators on Fock spaces are very
//! sparse (a handful of entries per row) and number conserving, so they are
//! kept in a row-compressed [`SparseMatrix`] and exponentiated block by block
//! through [`BlockEigen`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square sparse matrix, one sorted `(column, value)` list per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, c(1.0, 0.0))))
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets<It>(n: usize, triplets: It) -> Self
    where
        It: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            rows[i].push((j, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for &(j, v) in row.iter() {
                match merged.last_mut() {
                    Some((lj, lv)) if *lj == j => *lv += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.retain(|&(_, v)| v != C64::new(0.0, 0.0));
            *row = merged;
        }
        Self { n, rows }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let n = m.nrows();
        Self::from_triplets(
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j, m[(i, j)]))),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(col, _)| col)
            .map(|k| self.rows[i][k].1)
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        assert_eq!(x.len(), self.n);
        CVector::from_iterator(
            self.n,
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(j, v)| v * x[j]).sum::<C64>()),
        )
    }

    /// `self * m` for a dense right-hand side.
    pub fn mul_dense(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.nrows(), self.n);
        let mut out = CMatrix::zeros(self.n, m.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                for j in 0..m.ncols() {
                    out[(i, j)] += v * m[(k, j)];
                }
            }
        }
        out
    }

    /// `m * self` for a dense left-hand side.
    pub fn left_mul_dense(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.ncols(), self.n);
        let mut out = CMatrix::zeros(m.nrows(), self.n);
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                for i in 0..m.nrows() {
                    out[(i, j)] += m[(i, k)] * v;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.n, self.iter().map(|(i, j, v)| (i, j, s * v)))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_triplets(
            self.n,
            self.iter()
                .chain(other.iter().map(|(i, j, v)| (i, j, s * v))),
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                for &(j, w) in &other.rows[k] {
                    triplets.push((i, j, v * w));
                }
            }
        }
        Self::from_triplets(self.n, triplets)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other)
            .add_scaled(&other.matmul(self), c(-1.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.iter()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `<x|A|x>` without normalization.
    pub fn quadratic_form(&self, x: &CVector) -> C64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| x[i].conj() * row.iter().map(|&(j, v)| v * x[j]).sum::<C64>())
            .sum()
    }

    /// `Tr(A rho)`.
    pub fn trace_with(&self, rho: &CMatrix) -> C64 {
        assert_eq!(rho.nrows(), self.n);
        self.iter().map(|(i, j, v)| v * rho[(j, i)]).sum()
    }

    /// Groups indices into the connected components of the sparsity graph.
    /// A number-conserving operator splits into one component per sector.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, j, _) in self.iter() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.n {
            let r = find(&mut parent, i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: DVector::zeros(0),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(Error::EigenFailure(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

#[derive(Clone, Debug)]
struct EigenBlock {
    indices: Vec<usize>,
    values: DVector<f64>,
    vectors: CMatrix,
}

/// Eigendecomposition of a sparse Hermitian matrix computed independently on
/// each connected component of its sparsity pattern.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    n: usize,
    blocks: Vec<EigenBlock>,
}

impl BlockEigen {
    pub fn new(h: &SparseMatrix) -> Result<Self> {
        let err = h.hermiticity_error();
        if err > 1e-12 * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian(err));
        }
        let blocks = h
            .connected_components()
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let sub = CMatrix::from_fn(k, k, |r, s| h.get(indices[r], indices[s]));
                let eig = hermitian_eigen(&sub)?;
                Ok(EigenBlock {
                    indices,
                    values: eig.values,
                    vectors: eig.vectors,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: h.dim(), blocks })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn largest_block(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.indices.len())
            .max()
            .unwrap_or(0)
    }

    /// `exp(i t H)`.
    pub fn exp_i(&self, t: f64) -> BlockUnitary {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let phases = DVector::from_iterator(
                    b.values.len(),
                    b.values.iter().map(|&e| C64::from_polar(1.0, t * e)),
                );
                let scaled = CMatrix::from_fn(b.vectors.nrows(), b.vectors.ncols(), |r, s| {
                    b.vectors[(r, s)] * phases[s]
                });
                UnitaryBlock {
                    indices: b.indices.clone(),
                    matrix: scaled * b.vectors.adjoint(),
                }
            })
            .collect();
        BlockUnitary { n: self.n, blocks }
    }
}

#[derive(Clone, Debug)]
struct UnitaryBlock {
    indices: Vec<usize>,
    matrix: CMatrix,
}

/// Block-diagonal unitary (up to a permutation of the basis).
#[derive(Clone, Debug)]
pub struct BlockUnitary {
    n: usize,
    blocks: Vec<UnitaryBlock>,
}

impl BlockUnitary {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        assert_eq!(x.len(), self.n);
        let mut out = CVector::zeros(self.n);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                out[i] = b
                    .indices
                    .iter()
                    .enumerate()
                    .map(|(s, &j)| b.matrix[(r, s)] * x[j])
                    .sum();
            }
        }
        out
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, rho: &CMatrix) -> CMatrix {
        assert_eq!(rho.nrows(), self.n);
        let ncols = rho.ncols();
        // rows: X = U rho
        let mut x = CMatrix::zeros(self.n, ncols);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                for (s, &j) in b.indices.iter().enumerate() {
                    let u = b.matrix[(r, s)];
                    if u == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for col in 0..ncols {
                        x[(i, col)] += u * rho[(j, col)];
                    }
                }
            }
        }
        // columns: Y = X U^dagger, i.e. Y[:, i] = sum_j X[:, j] conj(U_ij)
        let mut y = CMatrix::zeros(self.n, ncols);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                for (s, &j) in b.indices.iter().enumerate() {
                    let u = b.matrix[(r, s)].conj();
                    if u == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for row in 0..self.n {
                        y[(row, i)] += x[(row, j)] * u;
                    }
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for b in &self.blocks {
            for (r, &i) in b.indices.iter().enumerate() {
                for (s, &j) in b.indices.iter().enumerate() {
                    m[(i, j)] = b.matrix[(r, s)];
                }
            }
        }
        m
    }

    /// `max |U U^dagger - 1|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let k = b.indices.len();
                let prod = &b.matrix * b.matrix.adjoint() - CMatrix::identity(k, k);
                prod.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_vec(a: &CVector, b: &CVector) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Kronecker product with the left factor as the slow index.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let db = b.len();
    CVector::from_fn(a.len() * db, |k, _| a[k / db] * b[k % db])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn sparse_kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let db = b.dim();
    SparseMatrix::from_triplets(
        a.dim() * db,
        a.iter().flat_map(|(i, j, v)| {
            b.iter()
                .map(move |(k, l, w)| (i * db + k, j * db + l, v * w))
        }),
    )
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    let eig = hermitian_eigen(m)?;
    Ok(eig.values.iter().copied().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        // small LCG keeps this module free of dev-only RNG plumbing
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = CMatrix::from_fn(n, n, |_, _| c(next(), next()));
        (&m + m.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn eigen_reconstructs_and_sorts() {
        let m = random_hermitian(7, 3);
        let eig = hermitian_eigen(&m).unwrap();
        for k in 1..7 {
            assert!(eig.values[k - 1] >= eig.values[k]);
        }
        let d = CMatrix::from_diagonal(&eig.values.map(|v| c(v, 0.0)));
        let back = &eig.vectors * d * eig.vectors.adjoint();
        assert!(max_abs_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn block_exp_matches_dense_exp() {
        // two disconnected blocks: {0, 2} and {1, 3, 4}
        let h = SparseMatrix::from_triplets(
            5,
            vec![
                (0, 2, c(0.3, 0.4)),
                (2, 0, c(0.3, -0.4)),
                (0, 0, c(1.0, 0.0)),
                (1, 3, c(0.0, 1.0)),
                (3, 1, c(0.0, -1.0)),
                (3, 4, c(2.0, 0.0)),
                (4, 3, c(2.0, 0.0)),
            ],
        );
        assert_eq!(h.connected_components(), vec![vec![0, 2], vec![1, 3, 4]]);
        let be = BlockEigen::new(&h).unwrap();
        let u = be.exp_i(0.7);
        let eig = hermitian_eigen(&h.to_dense()).unwrap();
        let d = CMatrix::from_diagonal(&eig.values.map(|v| C64::from_polar(1.0, 0.7 * v)));
        let dense = &eig.vectors * d * eig.vectors.adjoint();
        assert!(max_abs_diff(&u.to_dense(), &dense) < 1e-12);
        assert!(u.unitarity_error() < 1e-12);
    }

    #[test]
    fn conjugate_matches_dense_product() {
        let h = SparseMatrix::from_dense(&random_hermitian(6, 11));
        let u = BlockEigen::new(&h).unwrap().exp_i(1.3);
        let rho = random_hermitian(6, 5);
        let ud = u.to_dense();
        let expected = &ud * &rho * ud.adjoint();
        assert!(max_abs_diff(&u.conjugate(&rho), &expected) < 1e-12);
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = SparseMatrix::from_dense(&random_hermitian(5, 1));
        let b = SparseMatrix::from_dense(&random_hermitian(5, 2));
        let (ad, bd) = (a.to_dense(), b.to_dense());
        assert!(max_abs_diff(&a.matmul(&b).to_dense(), &(&ad * &bd)) < 1e-12);
        assert!(max_abs_diff(&a.mul_dense(&bd), &(&ad * &bd)) < 1e-12);
        assert!(max_abs_diff(&b.left_mul_dense(&ad), &(&ad * &bd)) < 1e-12);
        assert!(max_abs_diff(&sparse_kron(&a, &b).to_dense(), &kron(&ad, &bd)) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = SparseMatrix::from_triplets(2, vec![(0, 1, c(1.0, 0.0))]);
        assert!(matches!(BlockEigen::new(&h), Err(Error::NotHermitian(_))));
    }
}
