//! Dense complex matrices and the handful of linear-algebra primitives the
//! rest of the crate is built on.
//!
//! Everything here is value-semantic: operations take references and return
//! fresh matrices. Storage is an `nalgebra::DMatrix<Complex64>` that is always
//! square and finite.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute entrywise tolerance for matrix equality.
    pub eq_tol: f64,
    /// Allowed magnitude of a negative eigenvalue for PSD checks.
    pub psd_tol: f64,
    /// Allowed entrywise deviation from Hermiticity.
    pub herm_tol: f64,
    /// Allowed deviation of a trace from its target.
    pub trace_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-10,
            psd_tol: 1e-10,
            herm_tol: 1e-9,
            trace_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub const MAX: f64 = 1e-6;

    pub fn new(eq_tol: f64, psd_tol: f64, herm_tol: f64, trace_tol: f64) -> Result<Self> {
        let cfg = Self {
            eq_tol,
            psd_tol,
            herm_tol,
            trace_tol,
        };
        for (name, value) in [
            ("eq_tol", eq_tol),
            ("psd_tol", psd_tol),
            ("herm_tol", herm_tol),
            ("trace_tol", trace_tol),
        ] {
            if !(value > 0.0 && value <= Self::MAX) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(cfg)
    }

    /// Default tolerances with `eq_tol` replaced.
    pub fn with_eq_tol(eq_tol: f64) -> Result<Self> {
        let d = Self::default();
        Self::new(eq_tol, d.psd_tol, d.herm_tol, d.trace_tol)
    }
}

/// Square dense matrix of finite complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape {
                dim,
                entries: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(dim, dim, &entries),
        })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, entries)
    }

    /// Panics if `dim == 0`. `f` must return finite values.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let inner = DMatrix::from_fn(dim, dim, f);
        debug_assert!(inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { inner }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|row⟩⟨col|` in a `dim`-dimensional computational basis.
    pub fn ket_bra(dim: usize, row: usize, col: usize) -> Self {
        assert!(row < dim && col < dim, "basis index out of range");
        Self::from_fn(dim, |i, j| if i == row && j == col { ONE } else { ZERO })
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of unequal lengths");
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    /// Sub-block `[start, start + dim)` on both axes.
    pub fn principal_block(&self, start: usize, dim: usize) -> Self {
        Self {
            inner: self.inner.view((start, start), (dim, dim)).into_owned(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self, other)?;
        Ok(self
            .inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    /// `Σ |m_ij|²`.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.inner[(i, j)] == ZERO))
    }

    /// `M v`.
    pub fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length mismatch");
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.inner[(i, j)] * v[j]).sum())
            .collect()
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

// Operator impls panic on dimension mismatch, like nalgebra's. Use the checked
// free functions when dimensions come from untrusted input.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, b)?;
    Ok(a * b)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// True iff every entry of `a - b` has modulus at most `tol.eq_tol`.
pub fn approx_equal(a: &ComplexMatrix, b: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    Ok(a.max_abs_diff(b)? <= tol.eq_tol)
}

/// Spectral decomposition of a Hermitian matrix.
///
/// `values` are sorted descending and `vectors[k]` is the unit eigenvector for
/// `values[k]`, with its largest-magnitude component (first one on ties) made
/// real and positive. Inside a degenerate cluster the vectors are just some
/// orthonormal basis of the eigenspace.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl HermitianEigen {
    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors[0].len();
        let mut acc = ComplexMatrix::zeros(n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            acc = &acc + &ComplexMatrix::outer(v, v).scale_real(*lambda);
        }
        acc
    }
}

// (stopping threshold in units of machine epsilon, shift relative to max |entry|)
const EIG_RETRIES: [(f64, f64); 5] = [(1.0, 0.0), (16.0, 0.0), (1.0, 0.3), (16.0, -0.6), (256.0, 1.3)];
const EIG_MAX_ITER: usize = 10_000;

pub fn hermitian_eig(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol.herm_tol {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim();
    let h = m.hermitian_part();

    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if h.is_diagonal() {
        // Exact path: diagonal input keeps its computational basis untouched.
        let values = (0..n).map(|i| h.get(i, i).re).collect();
        let vectors = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect())
            .collect();
        (values, vectors)
    } else {
        // Large, highly degenerate inputs (Choi matrices) occasionally make the
        // QR iteration stall or return NaN. Retrying with a looser threshold or a diagonal
        // shift, which changes the iteration but not the eigenvectors, fixes it.
        let scale = h.max_abs().max(1.0);
        let (eig, shift) = EIG_RETRIES
            .iter()
            .find_map(|&(k, c)| {
                let shift = c * scale;
                let shifted = &h.inner + DMatrix::<Complex64>::identity(n, n) * Complex64::new(shift, 0.0);
                shifted
                    .try_symmetric_eigen(k * f64::EPSILON, EIG_MAX_ITER)
                    .filter(|e| e.eigenvalues.iter().all(|v| v.is_finite()) && e.eigenvectors.iter().all(|z| z.is_finite()))
                    .map(|e| (e, shift))
            })
            .ok_or(Error::ConvergenceFailure { dim: n })?;
        let values = eig.eigenvalues.iter().map(|v| v - shift).collect();
        let vectors = eig
            .eigenvectors
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        (values, vectors)
    };

    if values.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::ConvergenceFailure { dim: n });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    Ok(HermitianEigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| normalize_phase(&vectors[k]))
            .collect(),
    })
}

/// Rescales `v` to unit norm with its dominant component real and positive.
fn normalize_phase(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap_or(ONE);
    let phase = pivot.conj() / (pivot.norm() * norm);
    v.iter()
        .map(|&z| {
            let w = z * phase;
            // Keep exact zeros/ones exact for basis vectors.
            if w.im.abs() < 1e-300 {
                Complex64::new(w.re, 0.0)
            } else {
                w
            }
        })
        .collect()
}

/// Groups sorted-descending eigenvalues into clusters separated by at least
/// `gap`. Returns `(representative value, member indices)` per cluster.
pub fn cluster_eigenvalues(values: &[f64], gap: f64) -> Vec<(f64, Vec<usize>)> {
    let mut clusters: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some((_, members)) if values[*members.last().unwrap()] - v < gap => members.push(k),
            _ => clusters.push((v, vec![k])),
        }
    }
    for (rep, members) in &mut clusters {
        *rep = members.iter().map(|&k| values[k]).sum::<f64>() / members.len() as f64;
    }
    clusters
}
