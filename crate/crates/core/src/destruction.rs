//! Destruction of states with no selection.
//!
//! Given a projector `Π_Ω` on the qudit sector, the destruction map is
//!
//! ```text
//! D_Ω(ρ) = Π_Ω^⊥ ρ Π_Ω^⊥ + tr(Π_Ω ρ Π_Ω) |vac⟩⟨vac|
//! ```
//!
//! where the second term is the supertrace `tr̂(m) = tr(m) |vac⟩⟨vac|`. The
//! supertrace has operation elements `F_i = |vac⟩⟨i|`, `i = 0..=d`, and
//! `D_Ω` has elements `F_b Π_Ω = |vac⟩⟨b|` for each `b` in an orthonormal basis
//! of `range(Π_Ω)`, plus `Π_Ω^⊥`. The basis comes from the observable's
//! eigendecomposition, so the computational-basis case is just the diagonal
//! special case.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::numerics::{Complex64, ComplexMatrix, ToleranceConfig, ZERO};
use crate::state_space::{projector_from_vectors, DensityOperator, ExtendedSpace, Observable, OmegaSet, Projector};

/// The supertrace operation elements `F_i = |vac⟩⟨i|`, `i = 0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupertraceElements {
    space: ExtendedSpace,
    elements: Vec<ComplexMatrix>,
}

impl SupertraceElements {
    pub fn new(space: ExtendedSpace) -> Self {
        let n = space.total_dim();
        let vac = space.vac_index();
        Self {
            space,
            elements: (0..n).map(|i| ComplexMatrix::ket_bra(n, vac, i)).collect(),
        }
    }

    pub fn space(&self) -> ExtendedSpace {
        self.space
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// `tr(m) |vac⟩⟨vac|`.
pub fn supertrace_apply(space: ExtendedSpace, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    space.check_total(m)?;
    let vac = space.vac_index();
    Ok(ComplexMatrix::ket_bra(space.total_dim(), vac, vac).scale(m.trace()))
}

pub fn supertrace_channel(space: ExtendedSpace) -> KrausChannel {
    let SupertraceElements { elements, .. } = SupertraceElements::new(space);
    KrausChannel::new(space, elements, "supertrace").expect("supertrace elements are well-formed")
}

/// Von Neumann–Lüders measurement of `Π` with no selection:
/// `Π^⊥ ρ Π^⊥ + Π ρ Π`.
pub fn measure_no_selection(p: &Projector, rho: &DensityOperator) -> Result<DensityOperator> {
    check_space(p.space(), rho)?;
    let perp = p.complement();
    let m = rho.matrix();
    let kept = &(perp.matrix() * m) * perp.matrix();
    let inside = &(p.matrix() * m) * p.matrix();
    Ok(DensityOperator::from_trusted(rho.space(), &kept + &inside))
}

fn check_space(space: ExtendedSpace, rho: &DensityOperator) -> Result<()> {
    if space != rho.space() {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: rho.space().total_dim(),
        });
    }
    Ok(())
}

/// Everything needed to build `D_Ω`: the projector, an orthonormal basis of
/// its range and its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct DestructionSpec {
    projector: Projector,
    omega_basis: Vec<Vec<Complex64>>,
    complement: Projector,
    label: String,
}

impl DestructionSpec {
    /// Builds a spec directly from an orthonormal set of qudit-sector vectors
    /// (each of length `d + 1` with zero vacuum component).
    pub fn from_basis(space: ExtendedSpace, basis: Vec<Vec<Complex64>>, tol: &ToleranceConfig) -> Result<Self> {
        let n = space.total_dim();
        for v in &basis {
            space.check_dim(v.len(), n)?;
            if v[space.vac_index()] != ZERO {
                return Err(Error::VacuumNotAnnihilated {
                    row: space.vac_index(),
                    col: 0,
                });
            }
        }
        let mut deviation: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((ip - want).norm());
            }
        }
        if deviation > tol.eq_tol {
            return Err(Error::NotProjector { deviation });
        }
        Ok(Self::assemble(space, basis, "destruction".into()))
    }

    fn assemble(space: ExtendedSpace, omega_basis: Vec<Vec<Complex64>>, label: String) -> Self {
        let projector = projector_from_vectors(space, &omega_basis);
        let complement = projector.complement();
        Self {
            projector,
            omega_basis,
            complement,
            label,
        }
    }

    pub fn space(&self) -> ExtendedSpace {
        self.projector.space()
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn omega_basis(&self) -> &[Vec<Complex64>] {
        &self.omega_basis
    }

    pub fn complement(&self) -> &Projector {
        &self.complement
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

pub fn destruction_spec(obs: &Observable, omega: &OmegaSet) -> Result<DestructionSpec> {
    let basis = obs.selected_vectors(omega)?;
    let values: Vec<String> = omega.values().iter().map(|v| v.to_string()).collect();
    let label = format!("destruction Ω={{{}}}", values.join(","));
    Ok(DestructionSpec::assemble(obs.space(), basis, label))
}

/// `Π^⊥ ρ Π^⊥ + tr̂(Π ρ Π)`, evaluated directly.
pub fn destruction_direct(spec: &DestructionSpec, rho: &DensityOperator) -> Result<DensityOperator> {
    let space = spec.space();
    check_space(space, rho)?;
    let p = spec.projector.matrix();
    let perp = spec.complement.matrix();
    let m = rho.matrix();
    let survived = &(perp * m) * perp;
    let destroyed = supertrace_apply(space, &(&(p * m) * p))?;
    Ok(DensityOperator::from_trusted(space, &survived + &destroyed))
}

/// Operation elements `|vac⟩⟨b|` for each basis vector `b` of `range(Π_Ω)`, in
/// basis order, followed by `Π_Ω^⊥`. The zero elements `F_i Π_Ω` for
/// directions outside the range are not included.
pub fn destruction_kraus(spec: &DestructionSpec) -> KrausChannel {
    let space = spec.space();
    let vac = space.basis_vector(space.vac_index());
    let mut elements: Vec<ComplexMatrix> = spec
        .omega_basis
        .iter()
        .map(|b| ComplexMatrix::outer(&vac, b))
        .collect();
    elements.push(spec.complement.matrix().clone());
    KrausChannel::new(space, elements, spec.label.clone()).expect("elements are shaped for the space")
}

/// `(p_destroyed, p_survived) = (tr(ρ Π), tr(ρ Π^⊥))`, each clamped to `[0, 1]`.
pub fn destruction_probabilities(spec: &DestructionSpec, rho: &DensityOperator) -> Result<(f64, f64)> {
    check_space(spec.space(), rho)?;
    let m = rho.matrix();
    let destroyed = (m * spec.projector.matrix()).trace().re;
    let survived = (m * spec.complement.matrix()).trace().re;
    Ok((destroyed.clamp(0.0, 1.0), survived.clamp(0.0, 1.0)))
}
