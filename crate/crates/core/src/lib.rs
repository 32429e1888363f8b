//! Quantum operations on a single qudit extended by a vacuum sector.
//!
//! The Hilbert space is `ℋ = ℋ¹ ⊕ ℋ⁰` with `ℋ¹ ≅ ℂ^d` and a one-dimensional
//! vacuum `ℋ⁰`; the vacuum is basis index `d`. On top of a small dense complex
//! matrix layer ([`numerics`]) the crate provides validated states and
//! spectral projectors ([`state_space`]), generic Kraus channels with
//! Choi-matrix verification ([`channels`]), and the destruction-of-states
//! channel in both its direct and Kraus forms ([`destruction`]).

pub mod channels;
pub mod destruction;
pub mod error;
pub mod numerics;
pub mod sampling;
pub mod state_space;

pub use channels::{ChannelReport, ChoiMatrix, KrausChannel};
pub use destruction::{DestructionSpec, SupertraceElements};
pub use error::{Error, Result, StateViolation};
pub use numerics::{Complex64, ComplexMatrix, HermitianEigen, ToleranceConfig};
pub use state_space::{DensityOperator, ExtendedSpace, Observable, OmegaSet, Projector};
