//! Random matrices, states and channels for property tests and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::numerics::{hermitian_eig, Complex64, ComplexMatrix, ToleranceConfig, ZERO};
use crate::state_space::{DensityOperator, ExtendedSpace};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ginibre(rng, n).hermitian_part()
}

/// Haar-ish unitary from Gram–Schmidt on Ginibre columns.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| g.get(i, j)).collect();
        // two passes of modified Gram–Schmidt for orthogonality to machine precision
        for _ in 0..2 {
            for u in &cols {
                let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ip * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// `U diag(values) U†` for a random unitary `U`.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> ComplexMatrix {
    let u = unitary(rng, values.len());
    (&(&u * &ComplexMatrix::from_real_diagonal(values)) * &u.adjoint()).hermitian_part()
}

/// Random full-rank density matrix `G G† / tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

pub fn density_operator<R: Rng + ?Sized>(rng: &mut R, space: ExtendedSpace) -> DensityOperator {
    DensityOperator::from_trusted(space, density_matrix(rng, space.total_dim()))
}

/// Random trace-preserving channel with `count` elements, `E_i = G_i S^{-1/2}`
/// where `S = Σ G_i†G_i`.
pub fn channel<R: Rng + ?Sized>(rng: &mut R, space: ExtendedSpace, count: usize) -> KrausChannel {
    let n = space.total_dim();
    let gs: Vec<ComplexMatrix> = (0..count).map(|_| ginibre(rng, n)).collect();
    let s = gs
        .iter()
        .fold(ComplexMatrix::zeros(n), |acc, g| &acc + &(&g.adjoint() * g))
        .hermitian_part();
    let eig = hermitian_eig(&s, &ToleranceConfig::default()).expect("Gram matrix is Hermitian");
    let mut inv_sqrt = ComplexMatrix::zeros(n);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        inv_sqrt = &inv_sqrt + &ComplexMatrix::outer(v, v).scale_real(1.0 / lambda.sqrt());
    }
    let elements = gs.iter().map(|g| g * &inv_sqrt).collect();
    KrausChannel::new(space, elements, "random").expect("shapes match")
}

/// Unit vector with a zero vacuum component.
pub fn qudit_vector<R: Rng + ?Sized>(rng: &mut R, space: ExtendedSpace) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..space.qudit_dim()).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v.push(ZERO);
    v
}
