//! The vacuum-extended space `ℋ¹ ⊕ ℋ⁰`, states on it, observables that
//! annihilate the vacuum, and spectral projectors `Π_Ω`.
//!
//! Basis convention: indices `0..d` are the qudit computational basis and
//! index `d` is `|vac⟩`.

use crate::error::{Error, Result, StateViolation};
use crate::numerics::{
    cluster_eigenvalues, hermitian_eig, Complex64, ComplexMatrix, HermitianEigen,
    ToleranceConfig, ONE, ZERO,
};

/// Eigenvalues of the qudit block closer than this are one degenerate level.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Default tolerance for matching an Ω selector against the spectrum.
pub const DEFAULT_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtendedSpace {
    qudit_dim: usize,
}

impl ExtendedSpace {
    pub fn new(qudit_dim: usize) -> Result<Self> {
        if qudit_dim < 2 {
            return Err(Error::InvalidDimension(qudit_dim));
        }
        Ok(Self { qudit_dim })
    }

    pub fn qudit_dim(&self) -> usize {
        self.qudit_dim
    }

    pub fn total_dim(&self) -> usize {
        self.qudit_dim + 1
    }

    pub fn vac_index(&self) -> usize {
        self.qudit_dim
    }

    /// Standard basis vector `|i⟩` of the extended space.
    pub fn basis_vector(&self, i: usize) -> Vec<Complex64> {
        (0..self.total_dim()).map(|k| if k == i { ONE } else { ZERO }).collect()
    }

    /// Zero-pads a `d × d` qudit-sector matrix into the extended space.
    pub fn embed_block(&self, block: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(block.dim(), self.qudit_dim)?;
        let d = self.qudit_dim;
        Ok(ComplexMatrix::from_fn(self.total_dim(), |i, j| {
            if i < d && j < d {
                block.get(i, j)
            } else {
                ZERO
            }
        }))
    }

    pub(crate) fn check_dim(&self, found: usize, expected: usize) -> Result<()> {
        if found != expected {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }

    pub(crate) fn check_total(&self, m: &ComplexMatrix) -> Result<()> {
        self.check_dim(m.dim(), self.total_dim())
    }
}

pub fn make_space(d: usize) -> Result<ExtendedSpace> {
    ExtendedSpace::new(d)
}

/// A validated density operator on the extended space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: ExtendedSpace,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// For results that are valid by construction (outputs of trace-preserving
    /// maps applied to valid states).
    pub(crate) fn from_trusted(space: ExtendedSpace, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), space.total_dim());
        Self { space, matrix }
    }

    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `⟨vac|ρ|vac⟩`.
    pub fn vacuum_population(&self) -> f64 {
        let v = self.space.vac_index();
        self.matrix.get(v, v).re
    }
}

pub fn vacuum_state(space: ExtendedSpace) -> DensityOperator {
    let v = space.vac_index();
    DensityOperator::from_trusted(space, ComplexMatrix::ket_bra(space.total_dim(), v, v))
}

/// Checks Hermiticity, positivity and unit trace, in that order. Never
/// normalizes.
fn check_state(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol.herm_tol {
        return Err(Error::InvalidState(StateViolation::NotHermitian(deviation)));
    }
    let min = hermitian_eig(m, tol)?.min_value();
    if min < -tol.psd_tol {
        return Err(Error::InvalidState(StateViolation::NotPositive(min)));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol.trace_tol || tr.im.abs() > tol.trace_tol {
        return Err(Error::InvalidState(StateViolation::BadTrace(tr.re)));
    }
    Ok(())
}

pub fn validate_density(
    space: ExtendedSpace,
    m: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<DensityOperator> {
    space.check_total(m)?;
    check_state(m, tol)?;
    Ok(DensityOperator::from_trusted(space, m.clone()))
}

/// Places a qudit density matrix in the top-left block; the vacuum row and
/// column stay zero.
pub fn embed_qudit_state(space: ExtendedSpace, qudit_matrix: &ComplexMatrix) -> Result<DensityOperator> {
    embed_qudit_state_with(space, qudit_matrix, &ToleranceConfig::default())
}

pub fn embed_qudit_state_with(
    space: ExtendedSpace,
    qudit_matrix: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<DensityOperator> {
    space.check_dim(qudit_matrix.dim(), space.qudit_dim())?;
    check_state(qudit_matrix, tol)?;
    Ok(DensityOperator::from_trusted(space, space.embed_block(qudit_matrix)?))
}

/// An observable `Λ̂` on `ℋ¹`, extended by `Λ̂|vac⟩ = 0`.
#[derive(Debug, Clone)]
pub struct Observable {
    space: ExtendedSpace,
    matrix: ComplexMatrix,
    spectrum: Vec<(f64, usize)>,
    // Eigendecomposition of the qudit block and its clustering into levels.
    eigen: HermitianEigen,
    levels: Vec<Vec<usize>>,
}

impl Observable {
    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    /// The full `(d+1) × (d+1)` matrix with zero vacuum row and column.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Distinct eigenvalues of the qudit block (descending) with multiplicities.
    pub fn spectrum(&self) -> &[(f64, usize)] {
        &self.spectrum
    }

    /// Accepts an already-extended matrix, checking that it annihilates the
    /// vacuum exactly.
    pub fn from_extended(space: ExtendedSpace, m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        space.check_total(m)?;
        let v = space.vac_index();
        for k in 0..space.total_dim() {
            if m.get(v, k) != ZERO {
                return Err(Error::VacuumNotAnnihilated { row: v, col: k });
            }
            if m.get(k, v) != ZERO {
                return Err(Error::VacuumNotAnnihilated { row: k, col: v });
            }
        }
        make_observable_with(space, &m.principal_block(0, space.qudit_dim()), tol)
    }

    /// Index of the spectrum level matching `value` within `match_tol`.
    fn level_for(&self, value: f64, match_tol: f64) -> Result<usize> {
        let mut nearest = f64::NAN;
        let mut best = f64::INFINITY;
        for (idx, &(lambda, _)) in self.spectrum.iter().enumerate() {
            let gap = (lambda - value).abs();
            if gap <= match_tol {
                return Ok(idx);
            }
            if gap < best {
                best = gap;
                nearest = lambda;
            }
        }
        Err(Error::UnknownEigenvalue { value, nearest })
    }

    /// Orthonormal eigenvectors (embedded into the extended space) spanning the
    /// eigenspaces selected by `omega`, in spectrum order.
    pub(crate) fn selected_vectors(&self, omega: &OmegaSet) -> Result<Vec<Vec<Complex64>>> {
        let mut picked = vec![false; self.levels.len()];
        for &value in omega.values() {
            picked[self.level_for(value, omega.match_tol())?] = true;
        }
        Ok(self
            .levels
            .iter()
            .zip(picked)
            .filter(|(_, p)| *p)
            .flat_map(|(members, _)| members.iter())
            .map(|&k| {
                let mut v = self.eigen.vectors[k].clone();
                v.push(ZERO);
                v
            })
            .collect())
    }
}

pub fn make_observable(space: ExtendedSpace, qudit_matrix: &ComplexMatrix) -> Result<Observable> {
    make_observable_with(space, qudit_matrix, &ToleranceConfig::default())
}

pub fn make_observable_with(
    space: ExtendedSpace,
    qudit_matrix: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Observable> {
    space.check_dim(qudit_matrix.dim(), space.qudit_dim())?;
    let eigen = hermitian_eig(qudit_matrix, tol)?;
    let clusters = cluster_eigenvalues(&eigen.values, DEGENERACY_GAP);
    let spectrum = clusters.iter().map(|(v, m)| (*v, m.len())).collect();
    let levels = clusters.into_iter().map(|(_, m)| m).collect();
    Ok(Observable {
        space,
        matrix: space.embed_block(&qudit_matrix.hermitian_part())?,
        spectrum,
        eigen,
        levels,
    })
}

/// A set Ω of eigenvalue selectors, matched against the spectrum by value.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSet {
    values: Vec<f64>,
    match_tol: f64,
}

impl OmegaSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_match_tol(values, DEFAULT_MATCH_TOL)
    }

    pub fn with_match_tol(values: Vec<f64>, match_tol: f64) -> Result<Self> {
        for (i, a) in values.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::UnknownEigenvalue {
                    value: *a,
                    nearest: f64::NAN,
                });
            }
            if values[..i].iter().any(|b| (a - b).abs() <= match_tol) {
                return Err(Error::DuplicateSelector(*a));
            }
        }
        Ok(Self { values, match_tol })
    }

    pub fn empty() -> Self {
        Self {
            values: Vec::new(),
            match_tol: DEFAULT_MATCH_TOL,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn match_tol(&self) -> f64 {
        self.match_tol
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// An orthogonal projector on the extended space.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    space: ExtendedSpace,
    matrix: ComplexMatrix,
    rank: usize,
    support: Option<Vec<usize>>,
}

impl Projector {
    fn assemble(space: ExtendedSpace, matrix: ComplexMatrix, rank: usize) -> Self {
        let support = matrix.is_diagonal().then(|| {
            (0..matrix.dim())
                .filter(|&i| matrix.get(i, i) != ZERO)
                .collect()
        });
        Self {
            space,
            matrix,
            rank,
            support,
        }
    }

    /// Validates an arbitrary matrix as a Hermitian idempotent.
    pub fn from_matrix(space: ExtendedSpace, m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        space.check_total(m)?;
        let deviation = m.hermiticity_deviation();
        let idem = (m * m).max_abs_diff(m)?;
        if deviation > tol.herm_tol || idem > tol.eq_tol {
            return Err(Error::NotProjector {
                deviation: deviation.max(idem),
            });
        }
        let rank = m.trace().re.round().max(0.0) as usize;
        Ok(Self::assemble(space, m.clone(), rank))
    }

    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Basis indices of the range when the projector is diagonal.
    pub fn support(&self) -> Option<&[usize]> {
        self.support.as_deref()
    }

    /// True when the vacuum row and column are exactly zero.
    pub fn annihilates_vacuum(&self) -> bool {
        let v = self.space.vac_index();
        (0..self.space.total_dim()).all(|k| self.matrix.get(v, k) == ZERO && self.matrix.get(k, v) == ZERO)
    }

    /// `id_ℋ − Π`.
    pub fn complement(&self) -> Projector {
        let n = self.space.total_dim();
        Self::assemble(
            self.space,
            &ComplexMatrix::identity(n) - &self.matrix,
            n - self.rank,
        )
    }
}

/// `Π_Ω`: the sum of eigenprojectors of `obs` for every eigenvalue in `omega`.
/// The vacuum is never in the range.
pub fn build_projector(obs: &Observable, omega: &OmegaSet) -> Result<Projector> {
    let vectors = obs.selected_vectors(omega)?;
    Ok(projector_from_vectors(obs.space(), &vectors))
}

pub(crate) fn projector_from_vectors(space: ExtendedSpace, vectors: &[Vec<Complex64>]) -> Projector {
    let n = space.total_dim();
    let matrix = vectors.iter().fold(ComplexMatrix::zeros(n), |acc, v| {
        &acc + &ComplexMatrix::outer(v, v)
    });
    Projector::assemble(space, matrix, vectors.len())
}

pub fn complement(space: ExtendedSpace, p: &Projector) -> Projector {
    assert_eq!(space, p.space(), "projector belongs to a different space");
    p.complement()
}
