use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use syncsub::clocks::{
    block_structure, classify_compatibility, clock_from_hamiltonian, compatibility_residual,
    make_clock, random_compatible, ClockObservable, CompatClass,
};
use syncsub::opcore::{commutator_norm, operator_norm, tensor_product, vector, CMatrix, Hermitian};
use syncsub::random;
use syncsub::sync::{
    drift_trace, epsilon_compatible, preservation_residual, sample_kernel_state, stability_window,
    sync_bundle, sync_operator, SyncSystem,
};
use syncsub::Error;

fn t3() -> ClockObservable {
    make_clock(vec![0.0, 1.0, 2.0]).unwrap()
}

fn herm(rows: &[&[f64]]) -> Hermitian {
    Hermitian::new(CMatrix::from_real_rows(rows)).unwrap()
}

fn h4() -> Hermitian {
    herm(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]])
}

fn z() -> CMatrix {
    CMatrix::from_diag(&[1.0, -1.0])
}

fn x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn sigma_z_pair(h: CMatrix) -> SyncSystem {
    let tz = make_clock(vec![1.0, -1.0]).unwrap();
    SyncSystem::new(tz.clone(), tz, Hermitian::new(h).unwrap()).unwrap()
}

#[test]
fn clock_construction() {
    let t = t3();
    assert_eq!(t.matrix().matrix(), &CMatrix::from_diag(&[0.0, 1.0, 2.0]));
    assert!(t.is_non_degenerate());
    let sz = make_clock(vec![1.0, -1.0]).unwrap();
    assert_eq!(sz.matrix().matrix(), &z());
    assert!(!make_clock(vec![1.0, 1.0, 2.0]).unwrap().is_non_degenerate());
    assert_eq!(
        make_clock(Vec::<f64>::new()).unwrap_err(),
        Error::EmptyLabels
    );
    assert!(matches!(
        make_clock(vec![0.0, f64::NAN]),
        Err(Error::NonFinite(_))
    ));
}

#[test]
fn example_hamiltonians_against_three_level_clock() {
    let t = t3();
    let h1 = Hermitian::identity(3);
    let h2 = Hermitian::from_real_diag(&[PI, -PI, 0.0]);
    let h3 = Hermitian::from_real_diag(&[0.0, SQRT_2, -1.0]);
    for h in [&h1, &h2, &h3] {
        let v = classify_compatibility(h, &t).unwrap();
        assert!(v.residual <= 1e-12);
        assert_eq!(v.class, CompatClass::Diagonal);
    }
    let v = classify_compatibility(&h4(), &t).unwrap();
    assert!((v.residual - 1.0).abs() < 1e-12);
    assert_eq!(v.class, CompatClass::Incompatible);
    // H4 − diag(H4) is the σ_x block, norm 1
    assert!((v.off_block_mass - 1.0).abs() < 1e-12);
    assert_eq!(compatibility_residual(t.matrix(), &t).unwrap(), 0.0);
}

#[test]
fn block_structures() {
    assert_eq!(block_structure(&t3()).dims(), vec![1, 1, 1]);
    assert_eq!(
        block_structure(&make_clock(vec![1.0, 1.0, 2.0]).unwrap()).dims(),
        vec![2, 1]
    );
    assert_eq!(
        block_structure(&make_clock(vec![1.0; 4]).unwrap()).dims(),
        vec![4]
    );
}

#[test]
fn random_block_on_degenerate_eigenspace_is_block_diagonal() {
    let t = make_clock(vec![1.0, 1.0, 2.0]).unwrap();
    let blocks = block_structure(&t);
    let p1 = blocks.blocks[0].projector.matrix();
    let mut rng = random::rng(4);
    let r = random::hermitian::<f64>(3, &mut rng);
    let h = Hermitian::new(&(p1 * r.matrix()) * p1).unwrap();
    let v = classify_compatibility(&h, &t).unwrap();
    assert!(v.residual <= 1e-12);
    assert_eq!(v.class, CompatClass::BlockDiagonal);
}

#[test]
fn random_compatible_examples() {
    let t = t3();
    let h = random_compatible(&t, 9);
    let off = &h.matrix().clone()
        - &CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                h.matrix()[(i, i)]
            } else {
                Default::default()
            }
        });
    assert_eq!(off.max_abs(), 0.0);
    assert_eq!(h, random_compatible(&t, 9));

    let id = make_clock(vec![0.5; 3]).unwrap();
    let h = random_compatible(&id, 1);
    assert!(h.matrix()[(0, 1)].norm() > 0.0);
}

#[test]
fn canonical_clock_from_hamiltonian() {
    let h = Hermitian::from_real_diag(&[5.0, 5.0, 7.0]);
    let c = clock_from_hamiltonian(&h, 1e-9).unwrap();
    assert_eq!(c.labels(), &[0.0, 0.0, 1.0]);
    assert_eq!(c.matrix().matrix(), &CMatrix::from_diag(&[0.0, 0.0, 1.0]));

    let scalar = Hermitian::<f64>::identity(3).scale(2.5);
    assert!(clock_from_hamiltonian(&scalar, 1e-9).unwrap().is_trivial());
    assert!(clock_from_hamiltonian(&h, 0.0).is_err());

    for seed in 0..20 {
        let h = random_compatible(&t3(), seed);
        let c = clock_from_hamiltonian(&h, 1e-9).unwrap();
        let r = commutator_norm(c.matrix().matrix(), t3().matrix().matrix()).unwrap();
        assert!(r <= 1e-9, "seed {seed}: {r}");
        let hr = commutator_norm(c.matrix().matrix(), h.matrix()).unwrap();
        assert!(hr <= 1e-10 * operator_norm(h.matrix()) * operator_norm(c.matrix().matrix()));
    }
}

#[test]
fn sync_operator_examples() {
    let tz = make_clock(vec![1.0, -1.0]).unwrap();
    assert_eq!(
        sync_operator(&tz, &tz).matrix(),
        &CMatrix::from_diag(&[0.0, 2.0, -2.0, 0.0])
    );
    let id = make_clock(vec![1.0, 1.0]).unwrap();
    assert_eq!(sync_operator(&id, &id).matrix(), &CMatrix::zeros(4, 4));

    // label pairs (j, k): entry t_j − t_k
    let k = sync_operator(&t3(), &t3());
    let labels = [0.0, 1.0, 2.0];
    let oracle: Vec<f64> = labels
        .iter()
        .flat_map(|a| labels.iter().map(move |b| a - b))
        .collect();
    assert_eq!(k.matrix(), &CMatrix::from_diag(&oracle));
    let sys = SyncSystem::from_locals(t3(), t3(), Hermitian::identity(3), Hermitian::identity(3))
        .unwrap();
    assert_eq!(sync_bundle(&sys).unwrap().kernel.dim(), 3);
}

#[test]
fn example_two_qubit_bundle() {
    let i2 = CMatrix::identity(2);
    let (a, b) = (0.3, -1.1);
    let h = &tensor_product(&z(), &i2).scale_real(a) + &tensor_product(&i2, &z()).scale_real(b);
    let bundle = sync_bundle(&sigma_z_pair(h)).unwrap();
    assert!(bundle.epsilon <= 1e-12);
    assert_eq!(bundle.kernel.dim(), 2);
    assert!(
        (bundle.projector.matrix() - &CMatrix::from_diag(&[1.0, 0.0, 0.0, 1.0])).max_abs() < 1e-12
    );

    let psi = sample_kernel_state(&bundle, 5).unwrap();
    assert_eq!(psi[1].norm(), 0.0);
    assert_eq!(psi[2].norm(), 0.0);
    assert_eq!(psi, sample_kernel_state(&bundle, 5).unwrap());
}

#[test]
fn local_x_drive_has_epsilon_two() {
    // [X⊗I, Z⊗I − I⊗Z] = −2i Y⊗I
    let bundle = sync_bundle(&sigma_z_pair(tensor_product(&x(), &CMatrix::identity(2)))).unwrap();
    assert!((bundle.epsilon - 2.0).abs() < 1e-12);
}

#[test]
fn trivial_clocks_give_full_kernel() {
    let id = make_clock(vec![0.0, 0.0]).unwrap();
    let mut rng = random::rng(0);
    let h = random::hermitian::<f64>(4, &mut rng);
    let bundle = sync_bundle(&SyncSystem::new(id.clone(), id, h).unwrap()).unwrap();
    assert_eq!(bundle.kernel.dim(), 4);
    assert_eq!(bundle.epsilon, 0.0);
}

#[test]
fn preservation_examples() {
    let zz = tensor_product(&z(), &z());
    let sys = sigma_z_pair(zz);
    let bundle = sync_bundle(&sys).unwrap();
    assert!(preservation_residual(&sys, &bundle, &[0.0, 1.0, 10.0]).unwrap() <= 1e-10);

    let sys = sigma_z_pair(tensor_product(&x(), &CMatrix::identity(2)));
    let bundle = sync_bundle(&sys).unwrap();
    assert_eq!(preservation_residual(&sys, &bundle, &[0.0]).unwrap(), 0.0);
    // |00⟩ ↦ cos t|00⟩ − i sin t|10⟩, so the leakage is |sin t|
    let leak = preservation_residual(&sys, &bundle, &[FRAC_PI_4]).unwrap();
    assert!((leak - FRAC_PI_4.sin()).abs() < 1e-12);
    assert!(leak > 0.5);
}

#[test]
fn drift_for_compatible_and_perturbed_dynamics() {
    let tz = make_clock(vec![1.0, -1.0]).unwrap();
    let t = make_clock(vec![0.0, 1.0, 2.0]).unwrap();
    let base = SyncSystem::from_locals(
        tz.clone(),
        t.clone(),
        random_compatible(&tz, 1),
        random_compatible(&t, 2),
    )
    .unwrap();
    let bundle = sync_bundle(&base).unwrap();
    let psi = sample_kernel_state(&bundle, 3).unwrap();
    let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
    let rep = drift_trace(&base, &psi, &times).unwrap();
    assert!(rep.drift.iter().all(|&d| d <= 1e-10));
    assert!(rep.fidelity.iter().all(|&f| f >= 1.0 - 1e-10));
    assert!(rep.drift_bound_ok && rep.fidelity_bound_ok);

    let mut rng = random::rng(4);
    let v = random::hermitian::<f64>(6, &mut rng);
    let h = epsilon_compatible(base.hamiltonian(), &bundle.k, &v, 0.05).unwrap();
    let sys = SyncSystem::new(tz, t, h).unwrap();
    let rep = drift_trace(&sys, &psi, &times).unwrap();
    assert!((rep.epsilon - 0.05).abs() < 1e-12);
    for (i, &d) in rep.drift.iter().enumerate() {
        assert!(d <= 0.05 * times[i] + 1e-9);
    }
    assert!(rep.drift_bound_ok);

    let back: Vec<f64> = times.iter().map(|t| -t).collect();
    let rep = drift_trace(&sys, &psi, &back).unwrap();
    assert!(rep.drift_bound_ok);
}

#[test]
fn drift_preconditions() {
    let sys = sigma_z_pair(tensor_product(&z(), &z()));
    let bad_norm = vec![
        num_complex::Complex64::new(0.5, 0.0),
        0.0.into(),
        0.0.into(),
        0.0.into(),
    ];
    assert!(matches!(
        drift_trace(&sys, &bad_norm, &[1.0]),
        Err(Error::NotNormalized { .. })
    ));
    let outside = vector::normalized(&[0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
    assert!(matches!(
        drift_trace(&sys, &outside, &[1.0]),
        Err(Error::OutsideKernel { .. })
    ));
}

#[test]
fn stability_windows() {
    let mut bundle = sync_bundle(&sigma_z_pair(tensor_product(&z(), &z()))).unwrap();
    assert!(stability_window(&bundle, 0.1).unwrap().is_infinite());
    bundle.epsilon = 0.01;
    assert!((stability_window(&bundle, 0.1).unwrap() - 10.0).abs() < 1e-12);
    assert!(stability_window(&bundle, 0.0).is_err());
}

#[test]
fn window_spot_check() {
    let tz = make_clock(vec![1.0, -1.0]).unwrap();
    let base = sigma_z_pair(tensor_product(&z(), &z()));
    let k = sync_bundle(&base).unwrap().k;
    let mut rng = random::rng(12);
    let v = random::hermitian::<f64>(4, &mut rng);
    let h = epsilon_compatible(base.hamiltonian(), &k, &v, 0.02).unwrap();
    let sys = SyncSystem::new(tz.clone(), tz, h).unwrap();
    let bundle = sync_bundle(&sys).unwrap();
    let window = stability_window(&bundle, 0.1).unwrap();
    let psi = sample_kernel_state(&bundle, 1).unwrap();
    let rep = drift_trace(&sys, &psi, &[0.9 * window]).unwrap();
    assert!(rep.drift[0] <= 0.1 + 1e-9);
}

#[test]
fn unequal_dimensions_are_allowed() {
    let a = make_clock(vec![0.0, 1.0]).unwrap();
    let b = make_clock(vec![5.0, 6.0, 7.0]).unwrap();
    let sys = SyncSystem::new(a, b, Hermitian::identity(6)).unwrap();
    let bundle = sync_bundle(&sys).unwrap();
    assert_eq!(bundle.kernel.dim(), 0);
    assert_eq!(
        sample_kernel_state(&bundle, 0).unwrap_err(),
        Error::TrivialKernel
    );
}
