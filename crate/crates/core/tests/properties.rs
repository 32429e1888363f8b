use proptest::prelude::*;
use qudit_destruction::channels::{
    apply, channels_equal, choi_distance, classify, completeness_defect, compose, is_completely_positive,
    ChoiMatrix, KrausChannel,
};
use qudit_destruction::destruction::{
    destruction_direct, destruction_kraus, destruction_probabilities, destruction_spec, measure_no_selection,
    supertrace_channel, DestructionSpec,
};
use qudit_destruction::numerics::{adjoint, approx_equal, hermitian_eig, matmul, trace, Complex64, ComplexMatrix};
use qudit_destruction::sampling;
use qudit_destruction::state_space::{
    build_projector, complement, make_observable, make_space, validate_density, vacuum_state, ExtendedSpace,
    OmegaSet, Projector,
};
use qudit_destruction::ToleranceConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Brute-force Choi matrix from the defining sum over matrix units.
fn choi_oracle(ch: &KrausChannel) -> ComplexMatrix {
    let n = ch.space().total_dim();
    let mut acc = ComplexMatrix::zeros(n * n);
    for j in 0..n {
        for k in 0..n {
            let unit = ComplexMatrix::ket_bra(n, j, k);
            let mut image = ComplexMatrix::zeros(n);
            for e in ch.elements() {
                image = &image + &(&(e * &unit) * &adjoint(e));
            }
            acc = &acc + &unit.kron(&image);
        }
    }
    acc
}

fn random_observable_and_omega(r: &mut ChaCha8Rng, space: ExtendedSpace) -> (qudit_destruction::Observable, OmegaSet) {
    let obs = make_observable(space, &sampling::hermitian(r, space.qudit_dim())).unwrap();
    let values: Vec<f64> = obs
        .spectrum()
        .iter()
        .filter(|_| r.random_bool(0.5))
        .map(|(v, _)| *v)
        .collect();
    (obs, OmegaSet::new(values).unwrap())
}

// ---- numerics -------------------------------------------------------------

#[test]
fn eig_reconstruction_and_orthonormality() {
    let mut r = rng(11);
    for case in 0..100 {
        let n = 2 + case % 8;
        let h = sampling::hermitian(&mut r, n);
        let eig = hermitian_eig(&h, &tol()).unwrap();
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        let rec = eig.reconstruct();
        assert!(rec.max_abs_diff(&h).unwrap() <= 10.0 * tol().eq_tol, "n={n}");
        let gram = ComplexMatrix::from_fn(n, |i, j| {
            eig.vectors[i].iter().zip(&eig.vectors[j]).map(|(a, b)| a.conj() * b).sum()
        });
        assert!(approx_equal(&gram, &ComplexMatrix::identity(n), &tol()).unwrap());
        for v in &eig.vectors {
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap();
            assert!(pivot.re > 0.0 && pivot.im.abs() < 1e-15);
        }
    }
}

#[test]
fn projector_idempotence_from_random_vectors() {
    let mut r = rng(12);
    for n in 2..8 {
        let u = sampling::unitary(&mut r, n);
        let rank = r.random_range(1..=n);
        let p = ComplexMatrix::from_fn(n, |i, j| (0..rank).map(|k| u.get(i, k) * u.get(j, k).conj()).sum());
        assert!(matmul(&p, &p).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_trace_is_real_nonnegative(seed in any::<u64>(), n in 1usize..8) {
        let m = sampling::ginibre(&mut rng(seed), n);
        let t = trace(&matmul(&adjoint(&m), &m).unwrap());
        prop_assert!(t.re >= 0.0);
        prop_assert!(t.im.abs() <= 1e-12 * t.re.max(1.0));
    }

    #[test]
    fn adjoint_involution_and_associativity(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let (a, b, c) = (sampling::ginibre(&mut r, n), sampling::ginibre(&mut r, n), sampling::ginibre(&mut r, n));
        prop_assert_eq!(adjoint(&adjoint(&a)), a.clone());
        let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
        let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
        // entries are O(n^1.5); scale the absolute bound accordingly
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12 * (n * n) as f64);
    }

    #[test]
    fn approx_equal_is_symmetric(seed in any::<u64>(), n in 1usize..6, eps in 0.0f64..2e-10) {
        let a = sampling::ginibre(&mut rng(seed), n);
        let b = ComplexMatrix::from_fn(n, |i, j| a.get(i, j) + Complex64::new(eps, 0.0));
        prop_assert_eq!(approx_equal(&a, &b, &tol()).unwrap(), approx_equal(&b, &a, &tol()).unwrap());
    }
}

// ---- state space ----------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn built_projectors_are_projectors(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let (obs, omega) = random_observable_and_omega(&mut r, space);
        let p = build_projector(&obs, &omega).unwrap();
        let m = p.matrix();
        prop_assert!((m * m).max_abs_diff(m).unwrap() <= tol().eq_tol);
        prop_assert!(m.max_abs_diff(&m.adjoint()).unwrap() <= tol().eq_tol);
        prop_assert!(p.annihilates_vacuum());
        prop_assert_eq!(p.rank(), omega.values().len());
        let c = complement(space, &p);
        prop_assert_eq!(&(m + c.matrix()), &ComplexMatrix::identity(d + 1));
        prop_assert_eq!(c.rank(), d + 1 - p.rank());
    }

    #[test]
    fn full_spectrum_leaves_only_vacuum(seed in any::<u64>(), d in 2usize..=8) {
        let space = make_space(d).unwrap();
        let obs = make_observable(space, &sampling::hermitian(&mut rng(seed), d)).unwrap();
        let all = OmegaSet::new(obs.spectrum().iter().map(|(v, _)| *v).collect()).unwrap();
        let p = build_projector(&obs, &all).unwrap();
        prop_assert_eq!(p.rank(), d);
        let perp = complement(space, &p);
        prop_assert!(perp.matrix().max_abs_diff(vacuum_state(space).matrix()).unwrap() <= tol().eq_tol);
    }

    #[test]
    fn projector_additive_over_disjoint_omegas(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let obs = make_observable(space, &sampling::hermitian(&mut r, d)).unwrap();
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for (v, _) in obs.spectrum() {
            match r.random_range(0..3) {
                0 => first.push(*v),
                1 => second.push(*v),
                _ => {}
            }
        }
        let union: Vec<f64> = first.iter().chain(&second).copied().collect();
        let p1 = build_projector(&obs, &OmegaSet::new(first).unwrap()).unwrap();
        let p2 = build_projector(&obs, &OmegaSet::new(second).unwrap()).unwrap();
        let pu = build_projector(&obs, &OmegaSet::new(union).unwrap()).unwrap();
        prop_assert!(pu.matrix().max_abs_diff(&(p1.matrix() + p2.matrix())).unwrap() <= tol().eq_tol);
    }
}

#[test]
fn degenerate_observable_projector_is_basis_free() {
    let mut r = rng(13);
    for d in 3..=7 {
        let space = make_space(d).unwrap();
        // twofold level at 1.0 inside a random rotation
        let mut values: Vec<f64> = (0..d).map(|k| -(k as f64) - 1.0).collect();
        values[0] = 1.0;
        values[1] = 1.0;
        let u = sampling::unitary(&mut r, d);
        let h = (&(&u * &ComplexMatrix::from_real_diagonal(&values)) * &u.adjoint()).hermitian_part();
        let obs = make_observable(space, &h).unwrap();
        assert_eq!(obs.spectrum()[0].1, 2);
        let p = build_projector(&obs, &OmegaSet::new(vec![1.0]).unwrap()).unwrap();
        let expected = space
            .embed_block(&ComplexMatrix::from_fn(d, |i, j| {
                (0..2).map(|k| u.get(i, k) * u.get(j, k).conj()).sum()
            }))
            .unwrap();
        assert!(p.matrix().max_abs_diff(&expected).unwrap() < 1e-10);
    }
}

// ---- channels --------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_is_affine_in_the_state(seed in any::<u64>(), d in 2usize..=6, alpha in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let ch = sampling::channel(&mut r, space, 3);
        let a = sampling::density_operator(&mut r, space);
        let b = sampling::density_operator(&mut r, space);
        let mix = validate_density(
            space,
            &(&a.matrix().scale_real(alpha) + &b.matrix().scale_real(1.0 - alpha)),
            &tol(),
        ).unwrap();
        let lhs = apply(&ch, &mix).unwrap();
        let rhs = &apply(&ch, &a).unwrap().scale_real(alpha) + &apply(&ch, &b).unwrap().scale_real(1.0 - alpha);
        prop_assert!(approx_equal(&lhs, &rhs, &tol()).unwrap());
    }

    #[test]
    fn choi_matches_brute_force(seed in any::<u64>(), d in 2usize..=4, count in 1usize..4) {
        let ch = sampling::channel(&mut rng(seed), make_space(d).unwrap(), count);
        let j = ch.choi();
        prop_assert!(j.matrix().max_abs_diff(&choi_oracle(&ch)).unwrap() < 1e-13);
        let frob: f64 = ch.elements().iter().map(|e| e.frobenius_norm_sq()).sum();
        prop_assert!((j.matrix().trace().re - frob).abs() < 1e-12);
    }

    #[test]
    fn compose_matches_sequential_application(seed in any::<u64>(), d in 2usize..=5) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let f = sampling::channel(&mut r, space, 2);
        let g = sampling::channel(&mut r, space, 3);
        let rho = sampling::density_operator(&mut r, space);
        let gf = compose(&g, &f).unwrap();
        prop_assert_eq!(gf.len(), 6);
        let seq = g.apply_matrix(&apply(&f, &rho).unwrap()).unwrap();
        prop_assert!(approx_equal(&apply(&gf, &rho).unwrap(), &seq, &tol()).unwrap());
    }

    #[test]
    fn compose_is_associative_on_choi(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let a = sampling::channel(&mut r, space, 2);
        let b = sampling::channel(&mut r, space, 2);
        let c = sampling::channel(&mut r, space, 2);
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(choi_distance(&left, &right).unwrap() <= tol().eq_tol);
    }

    #[test]
    fn unitary_mixing_is_an_equivalence(seed in any::<u64>(), d in 2usize..=5, count in 1usize..5) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let ch = sampling::channel(&mut r, space, count);
        let b = ch.mixed(&sampling::unitary(&mut r, count)).unwrap();
        let c = b.mixed(&sampling::unitary(&mut r, count)).unwrap();
        prop_assert!(channels_equal(&ch, &ch, &tol()).unwrap());
        prop_assert!(channels_equal(&ch, &b, &tol()).unwrap());
        prop_assert!(channels_equal(&b, &ch, &tol()).unwrap());
        prop_assert!(channels_equal(&b, &c, &tol()).unwrap());
        prop_assert!(channels_equal(&ch, &c, &tol()).unwrap());
    }
}

#[test]
fn outputs_are_positive_and_trace_preserved() {
    let mut r = rng(14);
    for case in 0..100 {
        let d = 2 + case % 7;
        let space = make_space(d).unwrap();
        let ch = sampling::channel(&mut r, space, 1 + case % 4);
        let rho = sampling::density_operator(&mut r, space);
        let out = apply(&ch, &rho).unwrap();
        let eig = hermitian_eig(&out, &tol()).unwrap();
        assert!(eig.min_value() >= -tol().psd_tol);
        assert!((out.trace().re - 1.0).abs() <= tol().trace_tol);
        let (cp, min) = is_completely_positive(&ch, &tol()).unwrap();
        assert!(cp, "min choi eigenvalue {min}");
        assert!(completeness_defect(&ch).unwrap() <= tol().trace_tol);
    }
}

#[test]
fn trace_decreasing_channel_loses_trace_by_defect() {
    // E = sqrt(s) U: Σ E†E = s·I, so tr(𝓔(ρ)) = s for every ρ.
    let mut r = rng(15);
    for d in 2..=6 {
        let space = make_space(d).unwrap();
        let s = 0.3 + 0.1 * d as f64;
        let u = sampling::unitary(&mut r, d + 1);
        let ch = KrausChannel::new(space, vec![u.scale_real(s.sqrt())], "scaled unitary").unwrap();
        let rho = sampling::density_operator(&mut r, space);
        let out = apply(&ch, &rho).unwrap();
        assert!((out.trace().re - s).abs() < 1e-12);
        let report = classify(&ch, &tol()).unwrap();
        assert!(report.trace_decreasing_strict && report.pure && report.completely_positive);
        assert!((report.completeness_defect - (1.0 - s)).abs() < 1e-12);
    }
}

#[test]
fn transpose_map_choi_is_flagged() {
    for d in 2..=4 {
        let space = make_space(d).unwrap();
        let choi = ChoiMatrix::from_map(space, |m| m.to_transpose()).unwrap();
        let (cp, min) = choi.is_positive(&tol()).unwrap();
        assert!(!cp);
        assert!((min + 1.0).abs() < 1e-12);
    }
}

trait Transpose {
    fn to_transpose(&self) -> ComplexMatrix;
}

impl Transpose for ComplexMatrix {
    fn to_transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, j| self.get(j, i))
    }
}

// ---- destruction -----------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_and_kraus_forms_agree(seed in any::<u64>(), d in 2usize..=8) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let (obs, omega) = random_observable_and_omega(&mut r, space);
        let spec = destruction_spec(&obs, &omega).unwrap();
        let ch = destruction_kraus(&spec);
        prop_assert_eq!(ch.len(), omega.values().len() + 1);
        for _ in 0..5 {
            let rho = sampling::density_operator(&mut r, space);
            let direct = destruction_direct(&spec, &rho).unwrap();
            prop_assert!(approx_equal(direct.matrix(), &apply(&ch, &rho).unwrap(), &tol()).unwrap());
            prop_assert!(validate_density(space, direct.matrix(), &tol()).is_ok());

            let (pd, ps) = destruction_probabilities(&spec, &rho).unwrap();
            prop_assert!((pd + ps - 1.0).abs() <= tol().trace_tol);
            prop_assert!((direct.vacuum_population() - rho.vacuum_population() - pd).abs() <= tol().eq_tol);

            let measured = measure_no_selection(spec.projector(), &rho).unwrap();
            prop_assert!((measured.matrix().trace().re - 1.0).abs() <= tol().trace_tol);
        }
        let report = classify(&ch, &tol()).unwrap();
        prop_assert!(report.trace_preserving);
        prop_assert!(report.completely_positive);
        prop_assert!(report.min_choi_eigenvalue >= -tol().psd_tol);
        prop_assert!(channels_equal(&compose(&ch, &ch).unwrap(), &ch, &tol()).unwrap());
        let vac = vacuum_state(space);
        prop_assert!(approx_equal(destruction_direct(&spec, &vac).unwrap().matrix(), vac.matrix(), &tol()).unwrap());
    }

    #[test]
    fn measurement_is_idempotent(seed in any::<u64>(), d in 2usize..=6) {
        let mut r = rng(seed);
        let space = make_space(d).unwrap();
        let (obs, omega) = random_observable_and_omega(&mut r, space);
        let p: Projector = build_projector(&obs, &omega).unwrap();
        let rho = sampling::density_operator(&mut r, space);
        let once = measure_no_selection(&p, &rho).unwrap();
        let twice = measure_no_selection(&p, &once).unwrap();
        prop_assert!(approx_equal(once.matrix(), twice.matrix(), &tol()).unwrap());
    }
}

#[test]
fn kraus_form_is_basis_independent() {
    let mut r = rng(16);
    for d in 3..=8 {
        let space = make_space(d).unwrap();
        let k = 2 + d % 2;
        let mut values = vec![2.0; k];
        values.extend((k..d).map(|i| -(i as f64)));
        let obs = make_observable(space, &sampling::hermitian_with_spectrum(&mut r, &values)).unwrap();
        let spec = destruction_spec(&obs, &OmegaSet::new(vec![2.0]).unwrap()).unwrap();
        assert_eq!(spec.omega_basis().len(), k);

        // rotate the Ω basis by a random k×k unitary
        let w = sampling::unitary(&mut r, k);
        let rotated: Vec<Vec<Complex64>> = (0..k)
            .map(|j| {
                (0..d + 1)
                    .map(|c| (0..k).map(|i| w.get(i, j) * spec.omega_basis()[i][c]).sum())
                    .collect()
            })
            .collect();
        let alt = DestructionSpec::from_basis(space, rotated, &tol()).unwrap();
        let a = destruction_kraus(&spec);
        let b = destruction_kraus(&alt);
        assert_ne!(a.elements(), b.elements());
        assert!(channels_equal(&a, &b, &tol()).unwrap());
    }
}

#[test]
fn full_spectrum_destruction_is_the_supertrace() {
    let space = make_space(2).unwrap();
    let obs = make_observable(space, &ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
    let spec = destruction_spec(&obs, &OmegaSet::new(vec![1.0, -1.0]).unwrap()).unwrap();
    let ch = destruction_kraus(&spec);
    let st = supertrace_channel(space);
    let mut a: Vec<Vec<Complex64>> = ch.elements().iter().map(|e| e.to_row_major()).collect();
    let mut b: Vec<Vec<Complex64>> = st.elements().iter().map(|e| e.to_row_major()).collect();
    let key = |v: &Vec<Complex64>| v.iter().map(|z| format!("{:?}", z)).collect::<String>();
    a.sort_by_key(key);
    b.sort_by_key(key);
    assert_eq!(a, b);
    assert!(channels_equal(&ch, &st, &tol()).unwrap());

    // Any d and any observable: Ω = Λ gives the supertrace channel.
    let mut r = rng(17);
    for d in 2..=8 {
        let space = make_space(d).unwrap();
        let obs = make_observable(space, &sampling::hermitian(&mut r, d)).unwrap();
        let all = OmegaSet::new(obs.spectrum().iter().map(|(v, _)| *v).collect()).unwrap();
        let ch = destruction_kraus(&destruction_spec(&obs, &all).unwrap());
        assert!(channels_equal(&ch, &supertrace_channel(space), &tol()).unwrap());
    }
}

#[test]
fn empty_omega_is_identity_channel() {
    let mut r = rng(18);
    for d in 2..=6 {
        let space = make_space(d).unwrap();
        let obs = make_observable(space, &sampling::hermitian(&mut r, d)).unwrap();
        let ch = destruction_kraus(&destruction_spec(&obs, &OmegaSet::empty()).unwrap());
        assert_eq!(ch.elements(), &[ComplexMatrix::identity(d + 1)]);
        assert!(channels_equal(&ch, &KrausChannel::identity(space), &tol()).unwrap());
    }
}

// Seed 1 hits a d = 8 Choi matrix where the first eigensolver attempt returns NaN.
#[test]
fn large_destruction_choi_spectra_are_finite() {
    let mut r = rng(1);
    let space = make_space(8).unwrap();
    for t in 0..40 {
        let obs = make_observable(space, &sampling::hermitian(&mut r, 8)).unwrap();
        let levels: Vec<f64> = obs.spectrum().iter().map(|x| x.0).collect();
        let spec = destruction_spec(&obs, &OmegaSet::new(levels[..t % 9].to_vec()).unwrap()).unwrap();
        let (cp, min) = is_completely_positive(&destruction_kraus(&spec), &tol()).unwrap();
        assert!(cp && min.is_finite(), "t={t}: min {min}");
    }
}
