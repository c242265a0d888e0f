//! Conditionally unital, semi-causal (CUSC) channels: Choi-matrix checks and explicit constructions.
//!
//! All bipartite channels here have `in_dims = [dA, dB]` and `out_dims = [dA', dB']`,
//! and the Choi matrix is indexed as (A, B, Ã, B').

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{
    check_pmf, from_choi, random_channel, tensor, QuantumChannel,
};
use crate::error::{QceError, Result};
use crate::linalg::{
    cr, eigh, haar_state, haar_unitary, ket, max_abs_diff, partial_trace_mat, permutation_operator,
    permute_subsystems, phi_plus_vec, projector, random_density, random_pmf, weyl, CMat, CVec,
    DensityOperator,
};

/// Outcome of the CUSC checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuscVerdict {
    pub conditionally_unital: bool,
    pub semicausal_choi: bool,
    pub semicausal_operational: Option<bool>,
    /// Largest entry deviation over the two Choi conditions.
    pub max_violation: f64,
    pub unital_violation: f64,
    pub semicausal_violation: f64,
    pub operational_violation: Option<f64>,
}

impl CuscVerdict {
    pub fn is_cusc(&self) -> bool {
        self.conditionally_unital && self.semicausal_choi && self.semicausal_operational.unwrap_or(true)
    }
}

struct Bipartite {
    da: usize,
    db: usize,
    da_out: usize,
    db_out: usize,
}

fn bipartite(ch: &QuantumChannel) -> Result<Bipartite> {
    match (ch.in_dims(), ch.out_dims()) {
        ([da, db], [da_out, db_out]) => Ok(Bipartite { da: *da, db: *db, da_out: *da_out, db_out: *db_out }),
        (i, o) => Err(QceError::DimensionMismatch(format!(
            "CUSC checks need bipartite dims, got in {i:?} out {o:?}"
        ))),
    }
}

/// ‖J_{BÃB'} − J_{BB'} ⊗ u_Ã‖_max, with the product reordered to (B, Ã, B').
pub fn conditional_unital_violation(ch: &QuantumChannel) -> Result<f64> {
    let b = bipartite(ch)?;
    let dims = [b.da, b.db, b.da_out, b.db_out];
    let j = ch.choi();
    let j_bab = partial_trace_mat(&j, &dims, &[1, 2, 3])?;
    let j_bb = partial_trace_mat(&j, &dims, &[1, 3])?;
    let u = CMat::identity(b.da_out, b.da_out) * cr(1.0 / b.da_out as f64);
    let prod = permute_subsystems(&j_bb.kronecker(&u), &[b.db, b.db_out, b.da_out], &[0, 2, 1])?;
    Ok(max_abs_diff(&j_bab, &prod))
}

/// ‖J_{ABB'} − u_A ⊗ J_{BB'}‖_max.
pub fn semicausal_choi_violation(ch: &QuantumChannel) -> Result<f64> {
    let b = bipartite(ch)?;
    let dims = [b.da, b.db, b.da_out, b.db_out];
    let j = ch.choi();
    let j_abb = partial_trace_mat(&j, &dims, &[0, 1, 3])?;
    let j_bb = partial_trace_mat(&j, &dims, &[1, 3])?;
    let u = CMat::identity(b.da, b.da) * cr(1.0 / b.da as f64);
    Ok(max_abs_diff(&j_abb, &u.kronecker(&j_bb)))
}

pub fn is_conditionally_unital(ch: &QuantumChannel, tol: f64) -> Result<(bool, f64)> {
    let v = conditional_unital_violation(ch)?;
    Ok((v <= tol, v))
}

/// Largest deviation of Tr_Ã 𝒩((ℳ⊗id)ρ) from Tr_Ã 𝒩(ρ) over random local channels ℳ on A and states ρ.
pub fn semicausal_operational_violation(ch: &QuantumChannel, trials: usize, seed: u64) -> Result<f64> {
    let b = bipartite(ch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out_dims = [b.da_out, b.db_out];
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let m = random_channel(vec![b.da], vec![b.da], b.da * b.da, &mut rng);
        let rho = random_density(&[b.da, b.db], b.da * b.db, &mut rng);
        let local = tensor(&m, &crate::channels::identity(vec![b.db]));
        let with = partial_trace_mat(&ch.apply_mat(&local.apply_mat(rho.matrix())), &out_dims, &[1])?;
        let without = partial_trace_mat(&ch.apply_mat(rho.matrix()), &out_dims, &[1])?;
        worst = worst.max(max_abs_diff(&with, &without));
    }
    Ok(worst)
}

/// Semi-causality check: the Choi condition decides; with `operational_trials > 0` a randomized
/// cross-check is also run. Returns (choi verdict, choi violation, operational verdict and violation).
pub fn is_semicausal(
    ch: &QuantumChannel,
    tol: f64,
    operational_trials: usize,
) -> Result<(bool, f64, Option<(bool, f64)>)> {
    let v = semicausal_choi_violation(ch)?;
    let op = if operational_trials > 0 {
        let w = semicausal_operational_violation(ch, operational_trials, 0)?;
        Some((w <= tol, w))
    } else {
        None
    };
    Ok((v <= tol, v, op))
}

pub fn is_cusc(ch: &QuantumChannel, tol: f64) -> Result<CuscVerdict> {
    is_cusc_with(ch, tol, 0, 0)
}

pub fn is_cusc_with(ch: &QuantumChannel, tol: f64, operational_trials: usize, seed: u64) -> Result<CuscVerdict> {
    let cu = conditional_unital_violation(ch)?;
    let sc = semicausal_choi_violation(ch)?;
    let op = if operational_trials > 0 {
        Some(semicausal_operational_violation(ch, operational_trials, seed)?)
    } else {
        None
    };
    Ok(CuscVerdict {
        conditionally_unital: cu <= tol,
        semicausal_choi: sc <= tol,
        semicausal_operational: op.map(|w| w <= tol),
        max_violation: cu.max(sc),
        unital_violation: cu,
        semicausal_violation: sc,
        operational_violation: op,
    })
}

fn check_doubly_stochastic(d: &DMatrix<f64>) -> Result<()> {
    if d.nrows() != d.ncols() {
        return Err(QceError::InvalidInput("doubly stochastic matrix must be square".into()));
    }
    let bad_entry = d.iter().any(|&x| x < -1e-9 || !x.is_finite());
    let bad_rows = d.row_iter().any(|r| (r.sum() - 1.0).abs() > 1e-9);
    let bad_cols = d.column_iter().any(|c| (c.sum() - 1.0).abs() > 1e-9);
    if bad_entry || bad_rows || bad_cols {
        return Err(QceError::InvalidInput("matrix is not doubly stochastic".into()));
    }
    Ok(())
}

/// Σ_j 𝒟⁽ʲ⁾ ⊗ ℱ⁽ʲ⁾: `ds[j]` acts on the computational diagonal of A (columns are inputs),
/// `fs[j]` is a Kraus list of a CP map B → B'. The ℱ⁽ʲ⁾ must sum to a channel.
pub fn cds_channel(ds: &[DMatrix<f64>], fs: &[Vec<CMat>]) -> Result<QuantumChannel> {
    if ds.is_empty() || ds.len() != fs.len() {
        return Err(QceError::InvalidInput("need one CP map per doubly stochastic matrix".into()));
    }
    let m = ds[0].nrows();
    let first = fs[0].first().ok_or_else(|| QceError::InvalidInput("empty Kraus list".into()))?;
    let (db_out, db) = first.shape();
    let mut tp = CMat::zeros(db, db);
    for (d, f) in ds.iter().zip(fs) {
        check_doubly_stochastic(d)?;
        if d.nrows() != m {
            return Err(QceError::DimensionMismatch("doubly stochastic matrices differ in size".into()));
        }
        for k in f {
            if k.shape() != (db_out, db) {
                return Err(QceError::DimensionMismatch("CP maps differ in shape".into()));
            }
            tp += k.adjoint() * k;
        }
    }
    let dev = max_abs_diff(&tp, &CMat::identity(db, db));
    if dev > 1e-8 {
        return Err(QceError::NotTracePreserving(dev));
    }
    let mut kraus = Vec::new();
    for (d, f) in ds.iter().zip(fs) {
        for x_out in 0..m {
            for x in 0..m {
                let w = d[(x_out, x)];
                if w <= 0.0 {
                    continue;
                }
                let a = ket(m, x_out) * ket(m, x).adjoint() * cr(w.sqrt());
                for k in f {
                    kraus.push(a.kronecker(k));
                }
            }
        }
    }
    QuantumChannel::new(vec![m, db], vec![m, db_out], kraus)
}

/// 𝒩(ρ_AB) = ℰ_{RA→Ã}(ℱ_{B→RB'}(ρ_AB)) with output order (Ã, B').
///
/// `f_iso` must have a single isometric Kraus operator and `out_dims = [dR, dB']`;
/// `e` takes (R, A) to Ã.
pub fn semicausal_from_parts(f_iso: &QuantumChannel, e: &QuantumChannel) -> Result<QuantumChannel> {
    let [v] = f_iso.kraus() else {
        return Err(QceError::InvalidInput("f_iso must have exactly one Kraus operator".into()));
    };
    let dev = crate::linalg::unitarity_deviation(v);
    if dev > 1e-8 {
        return Err(QceError::InvalidInput(format!("f_iso is not an isometry (deviation {dev:.3e})")));
    }
    let &[dr, db_out] = f_iso.out_dims() else {
        return Err(QceError::DimensionMismatch("f_iso must output (R, B')".into()));
    };
    let db = f_iso.in_dim();
    if !e.in_dim().is_multiple_of(dr) {
        return Err(QceError::DimensionMismatch("e must take (R, A)".into()));
    }
    let da = e.in_dim() / dr;
    let da_out = e.out_dim();
    let lift = CMat::identity(da, da).kronecker(v);
    let perm = permutation_operator(&[da, dr, db_out], &[1, 0, 2])?;
    let head = &perm * lift;
    let kraus = e
        .kraus()
        .iter()
        .map(|k| k.kronecker(&CMat::identity(db_out, db_out)) * &head)
        .collect();
    QuantumChannel::new(vec![da, db], vec![da_out, db_out], kraus)
}

/// Generalised Bell vector (X^a Z^b ⊗ I)|φ⁺⟩ as a d×d coefficient matrix β[a', b].
fn bell_coefficients(d: usize, a: usize, b: usize) -> CMat {
    let psi = weyl(d, a, b).kronecker(&CMat::identity(d, d)) * phi_plus_vec(d);
    CMat::from_fn(d, d, |i, j| psi[i * d + j])
}

/// CUSC channel with 𝒩(φ⁺) = target, built from teleportation with Weyl corrections.
pub fn teleport_cusc(target: &DensityOperator) -> Result<QuantumChannel> {
    let &[da, db] = target.dims() else {
        return Err(QceError::DimensionMismatch("target must be bipartite".into()));
    };
    if da != db {
        return Err(QceError::DimensionMismatch(format!("teleportation needs |A| = |B|, got {da} and {db}")));
    }
    let d = da;
    let (vals, vecs) = eigh(target.matrix());
    let mut kraus = Vec::new();
    for (mi, &q) in vals.iter().enumerate() {
        if q <= 1e-14 {
            continue;
        }
        let t = CMat::from_fn(d, d, |i, j| vecs[(i * d + j, mi)]);
        for a in 0..d {
            for b in 0..d {
                let beta = bell_coefficients(d, a, b);
                // G[b', b] = Σ_a' conj(β[a', b]) t[a', b']
                let g = t.transpose() * beta.conjugate();
                kraus.push(weyl(d, a, b).kronecker(&g) * cr(q.sqrt()));
            }
        }
    }
    QuantumChannel::with_tol(vec![d, d], vec![d, d], kraus, 1e-8)
}

/// Measures (A, B) in the generalised Bell basis, discards A₂ and prepares |j⟩ on ÃÃ₂.
///
/// Input order is (A A₂, B) with dims `[d², d]`, output `[d², 1]`.
pub fn theorem1_scrambler(d: usize) -> Result<QuantumChannel> {
    if d < 2 {
        return Err(QceError::OutOfRange("scrambler needs d ≥ 2".into()));
    }
    let n = d * d;
    // Choi in the order (A, B, A₂, out).
    let mut j = CMat::zeros(n * d * n, n * d * n);
    for (idx, (a, b)) in (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).enumerate() {
        let beta = bell_coefficients(d, a, b);
        let phi = CVec::from_fn(n, |i, _| beta[(i / d, i % d)]);
        j += projector(&phi).kronecker(&CMat::identity(d, d)).kronecker(&projector(&ket(n, idx)));
    }
    let j = permute_subsystems(&j, &[d, d, d, n], &[0, 2, 1, 3])?;
    from_choi(&j, vec![n, d], vec![n, 1])
}

/// The channel ℰ_{ÃB̃→A} of the non-negativity construction together with the composite
/// 𝒩(ω) = ℰ(ω ⊗ φ⁺_{B̃B}), whose output on |0⟩⟨0| is ρ.
#[derive(Debug, Clone)]
pub struct NonnegWitness {
    pub preprocessor: QuantumChannel,
    pub composite: QuantumChannel,
}

pub fn nonneg_witness_channel(rho: &DensityOperator) -> Result<NonnegWitness> {
    let &[da, db] = rho.dims() else {
        return Err(QceError::DimensionMismatch("state must be bipartite".into()));
    };
    if da != db || da < 2 {
        return Err(QceError::DimensionMismatch("witness needs |A| = |B| ≥ 2".into()));
    }
    let d = da;
    let df = d as f64;
    let lmax = rho.eigenvalues()[0];
    if lmax > 1.0 / df + 1e-9 {
        return Err(QceError::HypothesisViolated(format!(
            "largest eigenvalue {lmax} exceeds 1/{d}"
        )));
    }
    let rb = partial_trace_mat(rho.matrix(), &[d, d], &[1])?;
    let dev = max_abs_diff(&rb, &(CMat::identity(d, d) * cr(1.0 / df)));
    if dev > 1e-8 {
        return Err(QceError::HypothesisViolated(format!(
            "B marginal deviates from maximally mixed by {dev:.3e}"
        )));
    }
    let n = d * d;
    let rho_ba = permute_subsystems(rho.matrix(), &[d, d], &[1, 0])?;
    let first = &rho_ba * cr(df);
    let rest = (CMat::identity(n, n) - &first) * cr(1.0 / (df - 1.0));
    let mut j = CMat::zeros(d * n, d * n);
    for x in 0..d {
        let block = if x == 0 { &first } else { &rest };
        j += projector(&ket(d, x)).kronecker(block);
    }
    let pre = from_choi(&j, vec![d, d], vec![d])?;
    let attach = CMat::identity(d, d).kronecker(&phi_plus_vec(d));
    let kraus = pre
        .kraus()
        .iter()
        .map(|k| k.kronecker(&CMat::identity(d, d)) * &attach)
        .collect();
    let composite = QuantumChannel::with_tol(vec![d, 1], vec![d, d], kraus, 1e-7)?;
    Ok(NonnegWitness { preprocessor: pre, composite })
}

/// Unitary with first column ψ: a Householder reflection times a phase.
pub fn householder_from_zero(psi: &CVec) -> CMat {
    let d = psi.len();
    let psi = psi / cr(psi.norm());
    let p0 = psi[0];
    let phase = if p0.norm() > 1e-15 { p0 / cr(p0.norm()) } else { cr(1.0) };
    let v = &psi - ket(d, 0) * phase;
    let vn = v.norm_squared();
    let h = if vn < 1e-28 {
        CMat::identity(d, d)
    } else {
        CMat::identity(d, d) - (&v * v.adjoint()) * cr(2.0 / vn)
    };
    h * phase
}

/// Σ_j p_j 𝒰⁽ʲ⁾ ⊗ 𝒱⁽ʲ⁾ with 𝒰⁽ʲ⁾|0⟩ = ψ_j and 𝒱⁽ʲ⁾|0⟩ = φ_j.
pub fn separable_prep_channel(parts: &[(f64, CVec, CVec)]) -> Result<QuantumChannel> {
    check_pmf(&parts.iter().map(|p| p.0).collect::<Vec<_>>())?;
    let (da, db) = (parts[0].1.len(), parts[0].2.len());
    let mut kraus = Vec::new();
    for (p, psi, phi) in parts {
        if psi.len() != da || phi.len() != db {
            return Err(QceError::DimensionMismatch("pure states differ in dimension".into()));
        }
        if (psi.norm() - 1.0).abs() > 1e-9 || (phi.norm() - 1.0).abs() > 1e-9 {
            return Err(QceError::InvalidInput("pure states must be normalised".into()));
        }
        if *p > 0.0 {
            let u = householder_from_zero(psi);
            let v = householder_from_zero(phi);
            kraus.push(u.kronecker(&v) * cr(p.sqrt()));
        }
    }
    let ch = QuantumChannel::new(vec![da, db], vec![da, db], kraus)?;
    Ok(if ch.kraus().len() > ch.in_dim() * ch.out_dim() { ch.compressed() } else { ch })
}

/// Isometric embedding of a `from`-dimensional system into `to ≥ from` dimensions (zero padding).
pub fn embedding(from: usize, to: usize) -> Result<QuantumChannel> {
    if from == 0 || to < from {
        return Err(QceError::DimensionMismatch(format!("cannot embed dimension {from} into {to}")));
    }
    let v = CMat::from_fn(to, from, |i, j| if i == j { cr(1.0) } else { cr(0.0) });
    QuantumChannel::new(vec![from], vec![to], vec![v])
}

/// Zero-pads subsystem `k` of `rho` up to dimension `to`.
pub fn embed_subsystem(rho: &DensityOperator, k: usize, to: usize) -> Result<DensityOperator> {
    let dims = rho.dims();
    if k >= dims.len() {
        return Err(QceError::InvalidInput(format!("no subsystem {k}")));
    }
    let e = embedding(dims[k], to)?;
    let before: usize = dims[..k].iter().product();
    let after: usize = dims[k + 1..].iter().product();
    let v = CMat::identity(before, before)
        .kronecker(&e.kraus()[0])
        .kronecker(&CMat::identity(after, after));
    let mut out_dims = dims.to_vec();
    out_dims[k] = to;
    DensityOperator::new(out_dims, &v * rho.matrix() * v.adjoint())
}

/// Random CUSC channel on (A, B) → (A, B), drawn from the explicit constructions above.
pub fn random_cusc<R: Rng + ?Sized>(da: usize, db: usize, rng: &mut R) -> QuantumChannel {
    match rng.random_range(0..3) {
        0 => {
            let k = rng.random_range(1..=3);
            let w = random_pmf(k, rng);
            let parts: Vec<_> = w
                .into_iter()
                .map(|p| (p, haar_state(da, rng), haar_state(db, rng)))
                .collect();
            // Precomposing with a local random unitary keeps the action non-trivial on all inputs.
            let prep = separable_prep_channel(&parts).expect("valid parts");
            let twirl = tensor(
                &crate::channels::unitary(haar_unitary(da, rng)).expect("unitary"),
                &crate::channels::unitary(haar_unitary(db, rng)).expect("unitary"),
            );
            crate::channels::compose(&prep, &twirl).expect("shapes match")
        }
        1 => {
            let k = rng.random_range(1..=2);
            let mut ds = Vec::new();
            let mut fs = Vec::new();
            let inst = random_instrument(db, k, rng);
            for f in inst {
                ds.push(random_doubly_stochastic(da, rng));
                fs.push(f);
            }
            cds_channel(&ds, &fs).expect("valid CDS data")
        }
        _ if da == db => {
            let target = random_density(&[da, db], da * db, rng);
            teleport_cusc(&target).expect("square dims")
        }
        _ => {
            let u = crate::channels::depolarizing(da, rng.random::<f64>()).expect("gamma in range");
            tensor(&u, &random_channel(vec![db], vec![db], db, rng))
        }
    }
}

/// Random convex combination of permutation matrices.
pub fn random_doubly_stochastic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let k = m.max(2);
    let w = random_pmf(k, rng);
    let mut d = DMatrix::zeros(m, m);
    for wi in w {
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for (col, &row) in perm.iter().enumerate() {
            d[(row, col)] += wi;
        }
    }
    d
}

/// Random quantum instrument on a d-dimensional system with `k` branches (Kraus lists).
pub fn random_instrument<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<Vec<CMat>> {
    let ch = random_channel(vec![d], vec![d], 2 * k, rng);
    let kr = ch.kraus().to_vec();
    (0..k).map(|j| kr.iter().skip(j).step_by(k).cloned().collect()).collect()
}
