use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{cr, partial_trace_mat, CMat, CVec, DensityOperator, C64};

/// What to draw in [`sample`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleKind {
    HaarUnitary(usize),
    Density { dims: Vec<usize>, rank: usize },
    Pmf(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Unitary(CMat),
    Density(DensityOperator),
    Pmf(Vec<f64>),
}

/// Seeded draw; the same kind and seed always give bitwise-identical output.
pub fn sample(kind: &SampleKind, seed: u64) -> Sample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SampleKind::HaarUnitary(d) => Sample::Unitary(haar_unitary(*d, &mut rng)),
        SampleKind::Density { dims, rank } => {
            Sample::Density(random_density(dims, *rank, &mut rng))
        }
        SampleKind::Pmf(n) => Sample::Pmf(random_pmf(*n, &mut rng)),
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of diag(R) removed.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let ph = rjj / cr(n);
            for i in 0..d {
                q[(i, j)] *= ph;
            }
        }
    }
    q
}

/// Haar-random isometry with `cols` orthonormal columns in dimension `rows`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let mut v = CVec::zeros(d);
    for i in 0..d {
        v[i] = gaussian(rng);
    }
    let n = v.norm();
    v / cr(n)
}

/// Random density operator of the given rank: a Haar pure state on `dims ⊗ [rank]` with the ancilla traced out.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> DensityOperator {
    let n: usize = dims.iter().product();
    let rank = rank.max(1);
    let psi = haar_state(n * rank, rng);
    let full = &psi * psi.adjoint();
    let m = partial_trace_mat(&full, &[n, rank], &[0]).expect("valid dims");
    DensityOperator::new_unchecked(dims.to_vec(), m)
}

/// Uniform draw from the probability simplex (flat Dirichlet).
pub fn random_pmf<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
