use super::*;
use crate::linalg::{
    eig_desc, haar_unitary, phi_plus_unnormalized, projector, random_density, DensityOperator,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn plus() -> DensityOperator {
    let v = CVec::from_vec(vec![cr(1.0), cr(1.0)]);
    DensityOperator::pure(vec![2], &v).unwrap()
}

fn u2() -> CMat {
    CMat::identity(2, 2) * cr(0.5)
}

fn zoo() -> Vec<QuantumChannel> {
    let mut r = rng(11);
    let sigma = random_density(&[2], 2, &mut r);
    let p0 = projector(&ket(2, 0));
    let p1 = projector(&ket(2, 1));
    vec![
        identity(vec![2]),
        unitary(haar_unitary(2, &mut r)).unwrap(),
        classical_identity(2),
        depolarizing(2, 0.3).unwrap(),
        depolarizing(3, 0.6).unwrap(),
        povm(&[p0, p1]).unwrap(),
        amplitude_damping(0.4).unwrap(),
        replacement(vec![2], &sigma).unwrap(),
        dephasing(2, 0.7).unwrap(),
        completely_randomizing(2),
    ]
}

#[test]
fn apply_examples() {
    let mut r = rng(1);
    let rho = random_density(&[3], 3, &mut r);
    let out = identity(vec![3]).apply(&rho).unwrap();
    assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-14);

    let rho2 = random_density(&[2], 2, &mut r);
    let out = completely_randomizing(2).apply(&rho2).unwrap();
    assert!(max_abs_diff(out.matrix(), &u2()) < 1e-12);

    let g = 0.35;
    let one = DensityOperator::basis_state(vec![2], 1);
    let out = amplitude_damping(g).unwrap().apply(&one).unwrap();
    let mut want = CMat::zeros(2, 2);
    want[(0, 0)] = cr(g);
    want[(1, 1)] = cr(1.0 - g);
    assert!(max_abs_diff(out.matrix(), &want) < 1e-12);

    assert!(identity(vec![2]).apply(&rho).is_err());
}

#[test]
fn choi_examples() {
    let phi = phi_plus_unnormalized(2);
    let j = identity(vec![2]).choi();
    assert!(max_abs_diff(&j, &projector(&phi)) < 1e-14);

    let mut r = rng(2);
    let sigma = random_density(&[2], 2, &mut r);
    let j = replacement(vec![3], &sigma).unwrap().choi();
    assert!(max_abs_diff(&j, &CMat::identity(3, 3).kronecker(sigma.matrix())) < 1e-12);

    let g = 0.3;
    let j = depolarizing(2, g).unwrap().choi();
    let want = projector(&phi) * cr(1.0 - g) + CMat::identity(4, 4) * cr(g / 2.0);
    assert!(max_abs_diff(&j, &want) < 1e-12);
}

#[test]
fn from_choi_examples() {
    let ch = from_choi(&identity(vec![2]).choi(), vec![2], vec![2]).unwrap();
    let mut r = rng(3);
    for _ in 0..10 {
        let rho = random_density(&[2], 2, &mut r);
        assert!(max_abs_diff(ch.apply(&rho).unwrap().matrix(), rho.matrix()) < 1e-8);
    }

    let sigma = random_density(&[2], 2, &mut r);
    let ch = from_choi(&CMat::identity(2, 2).kronecker(sigma.matrix()), vec![2], vec![2]).unwrap();
    for _ in 0..10 {
        let rho = random_density(&[2], 2, &mut r);
        assert!(max_abs_diff(ch.apply(&rho).unwrap().matrix(), sigma.matrix()) < 1e-8);
    }

    let mut bad = identity(vec![2]).choi();
    bad[(1, 1)] = cr(-0.1);
    bad[(2, 2)] = cr(-0.1);
    assert!(matches!(
        from_choi(&bad, vec![2], vec![2]),
        Err(QceError::NotCompletelyPositive(_))
    ));

    let half = identity(vec![2]).choi() * cr(0.5);
    assert!(matches!(from_choi(&half, vec![2], vec![2]), Err(QceError::NotTracePreserving(_))));
}

#[test]
fn zoo_choi_round_trip() {
    for ch in zoo() {
        let j = ch.choi();
        let back = from_choi(&j, ch.in_dims().to_vec(), ch.out_dims().to_vec()).unwrap();
        assert!(max_abs_diff(&back.choi(), &j) < 1e-7);
        assert!(ch.tp_deviation() < 1e-8);
    }
}

#[test]
fn compose_and_tensor() {
    let mut r = rng(4);
    let u = haar_unitary(3, &mut r);
    let id = compose(&unitary(u.adjoint()).unwrap(), &unitary(u).unwrap()).unwrap();
    let rho = random_density(&[3], 3, &mut r);
    assert!(max_abs_diff(id.apply(&rho).unwrap().matrix(), rho.matrix()) < 1e-12);

    let w = random_density(&[2], 2, &mut r);
    let t = random_density(&[2], 2, &mut r);
    let ch = tensor(&identity(vec![2]), &completely_randomizing(2));
    let out = ch.apply(&w.kron(&t)).unwrap();
    let want = w.kron(&DensityOperator::maximally_mixed(vec![2]));
    assert!(max_abs_diff(out.matrix(), want.matrix()) < 1e-12);

    let (g1, g2) = (0.2, 0.5);
    let c = compose(&depolarizing(2, g1).unwrap(), &depolarizing(2, g2).unwrap()).unwrap();
    let d = depolarizing(2, 1.0 - (1.0 - g1) * (1.0 - g2)).unwrap();
    for _ in 0..10 {
        let rho = random_density(&[2], 2, &mut r);
        assert!(max_abs_diff(c.apply(&rho).unwrap().matrix(), d.apply(&rho).unwrap().matrix()) < 1e-9);
    }
    assert!(compose(&identity(vec![3]), &identity(vec![2])).is_err());
}

#[test]
fn zoo_formulas() {
    let mut r = rng(5);
    let g = 0.45;
    let dep = depolarizing(2, g).unwrap();
    let deph = dephasing(2, g).unwrap();
    let cl = classical_identity(2);
    for _ in 0..20 {
        let rho = random_density(&[2], 2, &mut r);
        let m = rho.matrix();
        let want = m * cr(1.0 - g) + u2() * cr(g);
        assert!(max_abs_diff(dep.apply(&rho).unwrap().matrix(), &want) < 1e-9);
        let mut diag = CMat::zeros(2, 2);
        diag[(0, 0)] = m[(0, 0)];
        diag[(1, 1)] = m[(1, 1)];
        assert!(max_abs_diff(cl.apply(&rho).unwrap().matrix(), &diag) < 1e-12);
        let want = m * cr(1.0 - g) + &diag * cr(g);
        assert!(max_abs_diff(deph.apply(&rho).unwrap().matrix(), &want) < 1e-9);
    }

    let f1 = dephasing(2, 1.0).unwrap();
    assert!(max_abs_diff(f1.apply(&plus()).unwrap().matrix(), &u2()) < 1e-12);

    let p0 = projector(&ket(2, 0));
    let p1 = projector(&ket(2, 1));
    let n = povm(&[p0, p1]).unwrap();
    assert!(max_abs_diff(n.apply(&plus()).unwrap().matrix(), &u2()) < 1e-12);
}

#[test]
fn zoo_rejects_bad_parameters() {
    assert!(depolarizing(2, 1.5).is_err());
    assert!(amplitude_damping(-0.1).is_err());
    assert!(dephasing(2, 2.0).is_err());
    let p0 = projector(&ket(2, 0));
    assert!(povm(&[p0.clone(), p0]).is_err());
    assert!(matches!(
        make(&ChannelKind::Depolarizing { d: 2, gamma: -1.0 }),
        Err(QceError::OutOfRange(_))
    ));
}

#[test]
fn random_choi_channels_preserve_states() {
    let mut r = rng(6);
    for i in 0..200 {
        let (din, dout) = (2 + i % 2, 2 + (i / 2) % 2);
        // Random PSD J normalised so that Tr_out J = I.
        let g = crate::linalg::ginibre(din * dout, din * dout, &mut r);
        let j = &g * g.adjoint();
        let m = partial_trace_mat(&j, &[din, dout], &[0]).unwrap();
        let (vals, vecs) = eigh(&m);
        let inv_sqrt = &vecs
            * CMat::from_diagonal(&CVec::from_iterator(din, vals.iter().map(|&l| cr(1.0 / l.sqrt()))))
            * vecs.adjoint();
        let s = inv_sqrt.kronecker(&CMat::identity(dout, dout));
        let j = &s * j * s.adjoint();
        let ch = from_choi(&j, vec![din], vec![dout]).unwrap();
        let rho = random_density(&[din], din, &mut r);
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-8);
        assert!(eig_desc(out.matrix()).unwrap().last().unwrap() > &-1e-8);
    }
}

#[test]
fn unitary_channels_preserve_spectra() {
    let mut r = rng(7);
    for _ in 0..20 {
        let u = unitary(haar_unitary(3, &mut r)).unwrap();
        let rho = random_density(&[3], 2, &mut r);
        let a = rho.eigenvalues();
        let b = u.apply(&rho).unwrap().eigenvalues();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }
}

#[test]
fn apply_on_first_matches_tensor_with_identity() {
    let mut r = rng(8);
    let ch = random_channel(vec![2], vec![3], 2, &mut r);
    let rho = random_density(&[2, 2], 4, &mut r);
    let a = ch.apply_on_first(&rho).unwrap();
    let b = tensor(&ch, &identity(vec![2])).apply(&rho).unwrap();
    assert_eq!(a.dims(), &[3, 2]);
    assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
}

#[test]
fn compressed_keeps_action() {
    let mut r = rng(9);
    let a = depolarizing(2, 0.3).unwrap();
    let b = dephasing(2, 0.6).unwrap();
    let c = compose(&a, &compose(&b, &a).unwrap()).unwrap();
    assert!(c.kraus().len() <= 4);
    let rho = random_density(&[2], 2, &mut r);
    let direct = a.apply_mat(&b.apply_mat(&a.apply_mat(rho.matrix())));
    assert!(max_abs_diff(c.apply(&rho).unwrap().matrix(), &direct) < 1e-9);
}
