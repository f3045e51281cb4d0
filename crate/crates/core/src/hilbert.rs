//! Dense complex linear algebra and entropy primitives on small Hilbert spaces.
//!
//! Every space handled here has total dimension at most 64, so everything is
//! stored densely. Multipartite objects carry an ordered list of subsystem
//! dimensions; the first factor is the most significant index of the flat
//! basis (Kronecker convention).
//!
//! All logarithms are base 2, so entropies are in bits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance for Hermiticity, trace and positivity of states.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros inside entropies.
pub const SPECTRUM_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("entries length {len} does not match {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subsystem dims {dims:?} do not multiply to {dim}")]
    BadDims { dims: Vec<usize>, dim: usize },
    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("subsystem index {index} out of range for {count} factors")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("direction is not traceless (trace {0:e})")]
    NotTraceless(f64),
    #[error("entropy derivative diverges: direction has support on the kernel of the state")]
    Divergent,
}

pub type Result<T> = std::result::Result<T, HilbertError>;

// ---------------------------------------------------------------------------
// ComplexMatrix
// ---------------------------------------------------------------------------

/// Dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(HilbertError::BadShape { rows, cols, len: entries.len() });
        }
        Ok(Self { inner: DMatrix::from_row_slice(rows, cols, &entries) })
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut inner = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            inner[(i, i)] = C64::new(d, 0.0);
        }
        Self { inner }
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        let inner = DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj());
        Self { inner }
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.inner[(row, col)] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<C64> {
        self.inner.transpose().as_slice().to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(HilbertError::DimensionMismatch { expected: self.cols(), got: other.rows() });
        }
        Ok(Self { inner: &self.inner * &other.inner })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { inner: &self.inner + &other.inner })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self { inner: &self.inner - &other.inner })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { inner: &self.inner * C64::new(factor, 0.0) }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self { inner: &self.inner * factor }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// Matrix-vector product.
    pub fn apply_to(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(HilbertError::DimensionMismatch { expected: self.cols(), got: v.len() });
        }
        Ok((0..self.rows()).map(|i| (0..self.cols()).map(|j| self.inner[(i, j)] * v[j]).sum()).collect())
    }

    /// Largest absolute entrywise difference; `inf` for mismatched shapes.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && (&self.inner.adjoint() * &self.inner).iter().enumerate().all(|(k, z)| {
                let (i, j) = (k % self.rows(), k / self.rows());
                let target = if i == j { 1.0 } else { 0.0 };
                (z - C64::new(target, 0.0)).norm() <= tol
            })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(HilbertError::DimensionMismatch {
                expected: self.rows() * self.cols(),
                got: other.rows() * other.cols(),
            });
        }
        Ok(())
    }
}

/// Kronecker product, `a` indices major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix { inner: a.inner.kronecker(&b.inner) }
}

/// Kronecker product of a list of factors, left to right.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = (*iter.next().expect("at least one factor")).clone();
    iter.fold(first, |acc, m| tensor(&acc, m))
}

/// Kronecker product of state vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Pauli matrix `sigma_i` with `0 = I, 1 = X, 2 = Y, 3 = Z`.
pub fn pauli(i: usize) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let entries = match i {
        0 => vec![l, o, o, l],
        1 => vec![o, l, l, o],
        2 => vec![o, -im, im, o],
        3 => vec![l, o, o, -l],
        _ => panic!("pauli index {i} out of range"),
    };
    ComplexMatrix::new(2, 2, entries).expect("2x2")
}

/// Computational basis ket `|index>` in dimension `dim`.
pub fn ket(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// Projector `|index><index|`.
pub fn basis_projector(dim: usize, index: usize) -> ComplexMatrix {
    let k = ket(dim, index);
    ComplexMatrix::outer(&k, &k)
}

fn check_dims(dims: &[usize], dim: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != dim {
        return Err(HilbertError::BadDims { dims: dims.to_vec(), dim });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Normalized state vector with subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(HilbertError::NotNormalized(norm));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales `amplitudes` to unit norm before validating.
    pub fn normalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HilbertError::NotNormalized(norm));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect(), dims)
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Self {
        let dim = dims.iter().product();
        Self { amplitudes: ket(dim, index), dims }
    }

    /// `(|00> + |11>)/sqrt(2)`.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        Self { amplitudes: vec![C64::new(s, 0.0), z, z, C64::new(s, 0.0)], dims: vec![2, 2] }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { amplitudes: tensor_vec(&self.amplitudes, &other.amplitudes), dims }
    }

    /// Applies a unitary (not checked) and keeps the subsystem structure.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<PureState> {
        let amplitudes = u.apply_to(&self.amplitudes)?;
        PureState::normalized(amplitudes, self.dims.clone())
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes), dims: self.dims.clone() }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(HilbertError::NotSquare(matrix.rows(), matrix.cols()));
        }
        check_dims(&dims, matrix.rows())?;
        let dev = matrix.hermiticity_deviation();
        if dev > STATE_TOL {
            return Err(HilbertError::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(HilbertError::BadTrace(tr.re));
        }
        let min = hermitian_eigenvalues_unchecked(&matrix).last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(HilbertError::NotPositive(min));
        }
        Ok(Self { matrix, dims })
    }

    /// Wraps a matrix that is a state by construction (channel outputs,
    /// partial traces). Only the shape is checked.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert!(matrix.is_square());
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self { matrix, dims }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let dim: usize = dims.iter().product();
        Self { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64), dims }
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Self {
        PureState::basis(dims, index).density()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityOperator { matrix: tensor(&self.matrix, &other.matrix), dims }
    }

    /// Convex combination `sum_k w_k rho_k`; all states must share dims.
    pub fn mixture(weights: &[f64], states: &[DensityOperator]) -> Result<DensityOperator> {
        validate_distribution(weights)?;
        let first = states.first().ok_or_else(|| HilbertError::InvalidDistribution("empty state list".into()))?;
        if weights.len() != states.len() {
            return Err(HilbertError::DimensionMismatch { expected: weights.len(), got: states.len() });
        }
        let mut acc = DMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.dims != first.dims {
                return Err(HilbertError::DimensionMismatch { expected: first.dim(), got: s.dim() });
            }
            acc += s.matrix.as_nalgebra() * C64::new(*w, 0.0);
        }
        Ok(DensityOperator::from_trusted(ComplexMatrix::from_nalgebra(acc), first.dims.clone()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues_unchecked(&self.matrix)
    }
}

// ---------------------------------------------------------------------------
// Subsystem bookkeeping
// ---------------------------------------------------------------------------

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// For each flat index of the permuted space, the flat index of the original.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&k| dims[k]).collect();
    let old_strides = strides(dims);
    let total: usize = dims.iter().product();
    let mut map = vec![0; total];
    let mut digits = vec![0usize; dims.len()];
    for slot in map.iter_mut() {
        *slot = digits.iter().zip(perm).map(|(&d, &old)| d * old_strides[old]).sum();
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

fn check_permutation(perm: &[usize], count: usize) -> Result<()> {
    let mut seen = vec![false; count];
    if perm.len() != count {
        return Err(HilbertError::InvalidPermutation(perm.to_vec()));
    }
    for &k in perm {
        if k >= count || seen[k] {
            return Err(HilbertError::InvalidPermutation(perm.to_vec()));
        }
        seen[k] = true;
    }
    Ok(())
}

/// Reorders the tensor factors of a square matrix. Position `k` of the
/// result holds original factor `perm[k]`.
pub fn permute_matrix(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    check_dims(dims, m.rows())?;
    check_permutation(perm, dims.len())?;
    let map = permutation_map(dims, perm);
    let n = m.rows();
    let src = m.as_nalgebra();
    let inner = DMatrix::from_fn(n, n, |i, j| src[(map[i], map[j])]);
    Ok(ComplexMatrix::from_nalgebra(inner))
}

/// Reorders state-vector factors; same convention as [`permute_matrix`].
pub fn permute_vector(v: &[C64], dims: &[usize], perm: &[usize]) -> Result<Vec<C64>> {
    check_dims(dims, v.len())?;
    check_permutation(perm, dims.len())?;
    Ok(permutation_map(dims, perm).into_iter().map(|k| v[k]).collect())
}

pub fn permute_systems(rho: &DensityOperator, perm: &[usize]) -> Result<DensityOperator> {
    let matrix = permute_matrix(&rho.matrix, &rho.dims, perm)?;
    let dims = perm.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityOperator::from_trusted(matrix, dims))
}

/// Partial trace of a square matrix over all factors not in `keep`.
/// Kept factors stay in their original relative order.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<(ComplexMatrix, Vec<usize>)> {
    check_dims(dims, m.rows())?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(HilbertError::IndexOutOfRange { index: bad, count: dims.len() });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let perm: Vec<usize> = kept.iter().chain(traced.iter()).copied().collect();
    let permuted = permute_matrix(m, dims, &perm)?;
    let d_keep: usize = kept.iter().map(|&k| dims[k]).product();
    let d_trace: usize = traced.iter().map(|&k| dims[k]).product();
    let src = permuted.as_nalgebra();
    let inner =
        DMatrix::from_fn(d_keep, d_keep, |i, j| (0..d_trace).map(|t| src[(i * d_trace + t, j * d_trace + t)]).sum());
    let kept_dims = if kept.is_empty() { vec![1] } else { kept.iter().map(|&k| dims[k]).collect() };
    Ok((ComplexMatrix::from_nalgebra(inner), kept_dims))
}

pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let (matrix, dims) = partial_trace_matrix(&rho.matrix, &rho.dims, keep)?;
    Ok(DensityOperator::from_trusted(matrix, dims))
}

// ---------------------------------------------------------------------------
// Spectra and entropies
// ---------------------------------------------------------------------------

fn hermitian_eigenvalues_unchecked(m: &ComplexMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = m.as_nalgebra().clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Real spectrum of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(HilbertError::NotSquare(m.rows(), m.cols()));
    }
    let dev = m.hermiticity_deviation();
    if dev > STATE_TOL {
        return Err(HilbertError::NotHermitian(dev));
    }
    Ok(hermitian_eigenvalues_unchecked(m))
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues (descending) and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(HilbertError::NotSquare(m.rows(), m.cols()));
    }
    let dev = m.hermiticity_deviation();
    if dev > STATE_TOL {
        return Err(HilbertError::NotHermitian(dev));
    }
    let eig = m.as_nalgebra().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((vals, ComplexMatrix::from_nalgebra(vecs)))
}

/// Entropy of a spectrum, clipping floating-point dust.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &l in eigenvalues {
        if l < -STATE_TOL {
            return Err(HilbertError::NotPositive(l));
        }
        if l > SPECTRUM_CUTOFF {
            h -= l * l.log2();
        }
    }
    Ok(h.max(0.0))
}

/// `S(rho) = -Tr rho log2 rho`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let dim = rho.dim() as f64;
    Ok(spectrum_entropy(&rho.eigenvalues())?.min(dim.log2()))
}

pub fn validate_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(HilbertError::InvalidDistribution("empty".into()));
    }
    if let Some(bad) = p.iter().find(|&&x| x.is_nan() || x < -1e-12 || !x.is_finite()) {
        return Err(HilbertError::InvalidDistribution(format!("entry {bad}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(HilbertError::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    validate_distribution(p)?;
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum())
}

/// `dS(rho + a delta)/da` at `a = 0`, which equals `-Tr[delta log2 rho]`
/// for traceless `delta`.
pub fn entropy_directional_derivative(rho: &DensityOperator, delta: &ComplexMatrix) -> Result<f64> {
    if delta.rows() != rho.dim() || delta.cols() != rho.dim() {
        return Err(HilbertError::DimensionMismatch { expected: rho.dim(), got: delta.rows() });
    }
    let dev = delta.hermiticity_deviation();
    if dev > STATE_TOL {
        return Err(HilbertError::NotHermitian(dev));
    }
    let tr = delta.trace();
    if tr.norm() > STATE_TOL {
        return Err(HilbertError::NotTraceless(tr.norm()));
    }
    let (vals, vecs) = hermitian_eigen(rho.matrix())?;
    // delta in the eigenbasis of rho; only the diagonal enters the trace.
    let rotated = vecs.adjoint().matmul(delta)?.matmul(&vecs)?;
    let scale = delta.as_nalgebra().iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut acc = 0.0;
    for (k, &l) in vals.iter().enumerate() {
        let weight = rotated.get(k, k).re;
        if l <= SPECTRUM_CUTOFF {
            // any coupling into the kernel makes the one-sided derivative infinite
            let coupled = (0..vals.len()).any(|j| rotated.get(k, j).norm() > 1e-9 * scale);
            if coupled {
                return Err(HilbertError::Divergent);
            }
            continue;
        }
        acc -= weight * l.log2();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2).max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
    }

    #[test]
    fn tensor_block_layout() {
        let m = tensor(&pauli(1), &basis_projector(2, 0));
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(2, 0, c(1.0));
        expected.set(0, 2, c(1.0));
        assert_eq!(m.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn row_major_entries() {
        let m = ComplexMatrix::from_real(2, 3, &[1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(m.get(0, 2), c(3.0));
        assert_eq!(m.get(1, 0), c(4.0));
        assert_eq!(m.entries()[4], c(5.0));
        assert!(ComplexMatrix::from_real(2, 2, &[1.0]).is_err());
    }

    #[test]
    fn bell_reduction_is_maximally_mixed() {
        let bell = PureState::bell_phi_plus().density();
        for keep in [0, 1] {
            let r = partial_trace(&bell, &[keep]).unwrap();
            assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
            assert_eq!(r.dims(), &[2]);
        }
    }

    #[test]
    fn product_reduction() {
        let e1 = DensityOperator::basis(vec![4], 1);
        let b = DensityOperator::new(
            ComplexMatrix::new(2, 2, vec![c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]).unwrap(),
            vec![2],
        )
        .unwrap();
        let r = partial_trace(&e1.tensor(&b), &[0]).unwrap();
        assert!(r.matrix().max_abs_diff(e1.matrix()) < 1e-15);
        let r = partial_trace(&e1.tensor(&b), &[1]).unwrap();
        assert!(r.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let bell = PureState::bell_phi_plus().density();
        assert!(matches!(partial_trace(&bell, &[2]), Err(HilbertError::IndexOutOfRange { index: 2, count: 2 })));
    }

    #[test]
    fn swap_product_state() {
        let s = PureState::basis(vec![2, 2], 1).density(); // |0>|1>
        let swapped = permute_systems(&s, &[1, 0]).unwrap();
        let expected = PureState::basis(vec![2, 2], 2).density(); // |1>|0>
        assert_eq!(swapped.matrix().max_abs_diff(expected.matrix()), 0.0);
        let same = permute_systems(&s, &[0, 1]).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn permutation_validation() {
        let s = DensityOperator::maximally_mixed(vec![2, 3]);
        assert!(permute_systems(&s, &[0, 0]).is_err());
        assert!(permute_systems(&s, &[0]).is_err());
        assert!(permute_systems(&s, &[1, 2]).is_err());
        assert_eq!(permute_systems(&s, &[1, 0]).unwrap().dims(), &[3, 2]);
    }

    #[test]
    fn spectra() {
        assert_eq!(hermitian_eigenvalues(&ComplexMatrix::identity(4)).unwrap(), vec![1.0; 4]);
        let z = hermitian_eigenvalues(&pauli(3)).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] + 1.0).abs() < 1e-15);
        let not_herm = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&not_herm), Err(HilbertError::NotHermitian(_))));
    }

    #[test]
    fn eigenvectors_reconstruct() {
        let m = tensor(&pauli(2), &pauli(1)).add(&tensor(&pauli(3), &ComplexMatrix::identity(2)).scale(0.3)).unwrap();
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let d = ComplexMatrix::from_diagonal(&vals);
        let back = vecs.matmul(&d).unwrap().matmul(&vecs.adjoint()).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn entropies() {
        assert!(von_neumann_entropy(&PureState::bell_phi_plus().density()).unwrap().abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityOperator::maximally_mixed(vec![2])).unwrap() - 1.0).abs() < 1e-15);
        // I/4 (x) I/4 (x) uniform average of the four Bell states = I/64
        let bells: Vec<DensityOperator> = (0..4)
            .map(|k| {
                let u = tensor(&pauli(k), &ComplexMatrix::identity(2));
                PureState::bell_phi_plus().evolve(&u).unwrap().density()
            })
            .collect();
        let avg = DensityOperator::mixture(&[0.25; 4], &bells).unwrap();
        let big =
            DensityOperator::maximally_mixed(vec![4]).tensor(&DensityOperator::maximally_mixed(vec![4])).tensor(&avg);
        assert!((von_neumann_entropy(&big).unwrap() - 6.0).abs() < 1e-10);
    }

    #[test]
    fn shannon() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.125; 8]).unwrap() - 3.0).abs() < 1e-15);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn derivative_at_maximally_mixed_vanishes() {
        let rho = DensityOperator::maximally_mixed(vec![2]);
        let delta = ComplexMatrix::new(2, 2, vec![c(0.3), C64::new(0.2, -0.5), C64::new(0.2, 0.5), c(-0.3)]).unwrap();
        assert!(entropy_directional_derivative(&rho, &delta).unwrap().abs() < 1e-14);
    }

    #[test]
    fn derivative_diag_quarter() {
        // oracle: central difference of S(rho + a delta) with step 1e-6
        let rho = DensityOperator::new(ComplexMatrix::from_diagonal(&[0.25, 0.75]), vec![2]).unwrap();
        let delta = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        let h = 1e-6;
        let s = |a: f64| shannon_entropy(&[0.25 + a, 0.75 - a]).unwrap();
        let fd = (s(h) - s(-h)) / (2.0 * h);
        let d = entropy_directional_derivative(&rho, &delta).unwrap();
        assert!(((d - fd) / fd).abs() < 1e-5);
        assert!((d - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn derivative_errors() {
        let rho = DensityOperator::maximally_mixed(vec![2]);
        assert!(matches!(
            entropy_directional_derivative(&rho, &ComplexMatrix::identity(2)),
            Err(HilbertError::NotTraceless(_))
        ));
        let pure = DensityOperator::basis(vec![2], 0);
        assert!(matches!(entropy_directional_derivative(&pure, &pauli(3)), Err(HilbertError::Divergent)));
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::identity(2);
        assert!(matches!(DensityOperator::new(bad_trace, vec![2]), Err(HilbertError::BadTrace(_))));
        let negative = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityOperator::new(negative, vec![2]), Err(HilbertError::NotPositive(_))));
        let dims = ComplexMatrix::identity(4).scale(0.25);
        assert!(matches!(DensityOperator::new(dims, vec![3]), Err(HilbertError::BadDims { .. })));
        assert!(PureState::new(vec![c(1.0), c(1.0)], vec![2]).is_err());
    }
}
