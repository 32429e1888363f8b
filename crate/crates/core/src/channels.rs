//! Quantum operations in operator-sum form, `𝓔(ρ) = Σ_i E_i ρ E_i†`.
//!
//! A [`KrausChannel`] only guarantees that its elements are shaped for the
//! space; whether `Σ E_i†E_i ≤ I` actually holds is what [`classify`] reports,
//! so that invalid element sets can still be loaded and diagnosed.
//!
//! Complete positivity is certified through the Choi matrix
//! `J = Σ_{jk} |j⟩⟨k| ⊗ 𝓔(|j⟩⟨k|)` (unnormalized, reference system first).

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, Complex64, ComplexMatrix, ToleranceConfig, ZERO};
use crate::state_space::{DensityOperator, ExtendedSpace};

/// Elements with Frobenius norm below this are dropped by [`KrausChannel::pruned`].
pub const PRUNE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    space: ExtendedSpace,
    elements: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    pub fn new(space: ExtendedSpace, elements: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyChannel);
        }
        for e in &elements {
            space.check_total(e)?;
        }
        Ok(Self {
            space,
            elements,
            label: label.into(),
        })
    }

    pub fn identity(space: ExtendedSpace) -> Self {
        Self {
            space,
            elements: vec![ComplexMatrix::identity(space.total_dim())],
            label: "identity".into(),
        }
    }

    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.elements.len() == 1
    }

    fn check_same_space(&self, other: &KrausChannel) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.total_dim(),
                found: other.space.total_dim(),
            });
        }
        Ok(())
    }

    /// `Σ E_i m E_i†` for an arbitrary endomorphism `m`.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.space.check_total(m)?;
        let n = self.space.total_dim();
        Ok(self.elements.iter().fold(ComplexMatrix::zeros(n), |acc, e| {
            &acc + &(&(e * m) * &e.adjoint())
        }))
    }

    /// `Σ E_i†E_i`.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let n = self.space.total_dim();
        self.elements
            .iter()
            .fold(ComplexMatrix::zeros(n), |acc, e| &acc + &(&e.adjoint() * e))
    }

    /// Eigenvalues (descending) of `I − Σ E_i†E_i`.
    fn defect_spectrum(&self) -> Result<Vec<f64>> {
        let n = self.space.total_dim();
        let gap = &ComplexMatrix::identity(n) - &self.completeness_sum();
        Ok(hermitian_eig(&gap.hermitian_part(), &ToleranceConfig::default())?.values)
    }

    pub fn choi(&self) -> ChoiMatrix {
        let n = self.space.total_dim();
        // J[(j,a),(k,b)] = Σ_i E_i[a,j] conj(E_i[b,k]); each element contributes
        // the rank-one term |vec E_i⟩⟨vec E_i| with column-stacked vec.
        let mut acc = ComplexMatrix::zeros(n * n);
        for e in &self.elements {
            let v: Vec<Complex64> = (0..n * n).map(|r| e.get(r % n, r / n)).collect();
            acc = &acc + &ComplexMatrix::outer(&v, &v);
        }
        ChoiMatrix {
            space: self.space,
            matrix: acc,
        }
    }

    /// `E'_j = Σ_i V_ji E_i`. For unitary `V` this is the same channel.
    pub fn mixed(&self, v: &ComplexMatrix) -> Result<KrausChannel> {
        if v.dim() != self.elements.len() {
            return Err(Error::DimensionMismatch {
                expected: self.elements.len(),
                found: v.dim(),
            });
        }
        let n = self.space.total_dim();
        let elements = (0..v.dim())
            .map(|j| {
                self.elements
                    .iter()
                    .enumerate()
                    .fold(ComplexMatrix::zeros(n), |acc, (i, e)| &acc + &e.scale(v.get(j, i)))
            })
            .collect();
        Ok(Self {
            space: self.space,
            elements,
            label: format!("{} (mixed)", self.label),
        })
    }

    /// Copy without elements whose Frobenius norm is below `threshold`. At least
    /// one element is always kept.
    pub fn pruned(&self, threshold: f64) -> KrausChannel {
        let mut elements: Vec<ComplexMatrix> = self
            .elements
            .iter()
            .filter(|e| e.frobenius_norm_sq().sqrt() >= threshold)
            .cloned()
            .collect();
        if elements.is_empty() {
            elements.push(ComplexMatrix::zeros(self.space.total_dim()));
        }
        Self {
            space: self.space,
            elements,
            label: self.label.clone(),
        }
    }
}

/// `Σ_i E_i ρ E_i†`. The result may be subnormalized for trace-decreasing
/// channels, so it is returned as a plain matrix.
pub fn apply(ch: &KrausChannel, rho: &DensityOperator) -> Result<ComplexMatrix> {
    if rho.space() != ch.space {
        return Err(Error::DimensionMismatch {
            expected: ch.space.total_dim(),
            found: rho.space().total_dim(),
        });
    }
    ch.apply_matrix(rho.matrix())
}

/// Max absolute eigenvalue of `I − Σ E_i†E_i`.
pub fn completeness_defect(ch: &KrausChannel) -> Result<f64> {
    Ok(ch
        .defect_spectrum()?
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max))
}

pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    ch.choi()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    space: ExtendedSpace,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps a Choi matrix that did not come from a Kraus set, e.g. to check a
    /// map that is positive but not completely positive.
    pub fn from_raw(space: ExtendedSpace, matrix: ComplexMatrix) -> Result<Self> {
        let n = space.total_dim();
        space.check_dim(matrix.dim(), n * n)?;
        Ok(Self { space, matrix })
    }

    /// Choi matrix of an arbitrary linear map given by its action on matrix units.
    pub fn from_map(space: ExtendedSpace, map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let n = space.total_dim();
        let mut entries = vec![ZERO; n * n * n * n];
        for j in 0..n {
            for k in 0..n {
                let out = map(&ComplexMatrix::ket_bra(n, j, k));
                space.check_total(&out)?;
                for a in 0..n {
                    for b in 0..n {
                        entries[(j * n + a) * n * n + (k * n + b)] = out.get(a, b);
                    }
                }
            }
        }
        Self::from_raw(space, ComplexMatrix::from_row_major(n * n, entries)?)
    }

    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self, tol: &ToleranceConfig) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix, tol)?.values)
    }

    /// `(J ⪰ −psd_tol, min eigenvalue)`.
    pub fn is_positive(&self, tol: &ToleranceConfig) -> Result<(bool, f64)> {
        let min = hermitian_eig(&self.matrix, tol)?.min_value();
        Ok((min >= -tol.psd_tol, min))
    }
}

pub fn is_completely_positive(ch: &KrausChannel, tol: &ToleranceConfig) -> Result<(bool, f64)> {
    ch.choi().is_positive(tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelReport {
    pub trace_preserving: bool,
    pub trace_decreasing_strict: bool,
    pub completely_positive: bool,
    pub pure: bool,
    pub min_choi_eigenvalue: f64,
    pub completeness_defect: f64,
}

/// Classifies a channel, failing with [`Error::InvalidChannel`] when
/// `Σ E_i†E_i ≤ I` is violated by more than `psd_tol` in the Loewner order.
pub fn classify(ch: &KrausChannel, tol: &ToleranceConfig) -> Result<ChannelReport> {
    let spectrum = ch.defect_spectrum()?;
    let min = spectrum.last().copied().unwrap_or(0.0);
    if min < -tol.psd_tol {
        return Err(Error::InvalidChannel { excess: -min });
    }
    let defect = spectrum.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let (completely_positive, min_choi_eigenvalue) = is_completely_positive(ch, tol)?;
    let trace_preserving = defect <= tol.trace_tol;
    Ok(ChannelReport {
        trace_preserving,
        trace_decreasing_strict: !trace_preserving,
        completely_positive,
        pure: ch.is_pure(),
        min_choi_eigenvalue,
        completeness_defect: defect,
    })
}

/// `second ∘ first`: elements `F_j E_i` with `j` outer and `i` inner. Zero
/// products are kept; see [`KrausChannel::pruned`].
pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
    second.check_same_space(first)?;
    let elements = second
        .elements
        .iter()
        .flat_map(|f| first.elements.iter().map(move |e| f * e))
        .collect();
    Ok(KrausChannel {
        space: first.space,
        elements,
        label: format!("({}) after ({})", second.label, first.label),
    })
}

/// Largest entrywise difference between the Choi matrices of `a` and `b`.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    a.check_same_space(b)?;
    a.choi().matrix.max_abs_diff(&b.choi().matrix)
}

/// Representation-independent equality: Choi matrices agree entrywise within
/// `eq_tol · total_dim`.
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    Ok(choi_distance(a, b)? <= tol.eq_tol * a.space.total_dim() as f64)
}
