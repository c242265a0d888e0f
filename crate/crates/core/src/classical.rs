//! Classical bipartite distributions, 𝒯-game values and conditional majorization by LP feasibility.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QceError, Result};
use crate::linalg::{cr, kyfan_vec, random_pmf, CMat, DensityOperator};
use crate::lp;

/// Feasibility tolerance on the phase-one objective and on the certificate residual.
pub const LP_TOL: f64 = 1e-7;

/// Joint distribution with rows indexed by Alice's symbol and columns by Bob's.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalJoint {
    p: DMatrix<f64>,
}

impl ClassicalJoint {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() == 0 || p.ncols() == 0 {
            return Err(QceError::InvalidInput("joint distribution has an empty alphabet".into()));
        }
        if p.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
            return Err(QceError::InvalidInput("joint distribution has negative entries".into()));
        }
        let s = p.sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(QceError::InvalidInput(format!("joint distribution sums to {s}")));
        }
        Ok(Self { p: p.map(|x| x.max(0.0)) })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(QceError::InvalidInput("ragged joint distribution".into()));
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn alice(&self) -> usize {
        self.p.nrows()
    }

    pub fn bob(&self) -> usize {
        self.p.ncols()
    }

    /// Joint column (p(x, y))_x.
    pub fn column(&self, y: usize) -> Vec<f64> {
        self.p.column(y).iter().copied().collect()
    }

    /// Zero-pads Alice's alphabet up to `m` symbols.
    pub fn padded(&self, m: usize) -> ClassicalJoint {
        if m <= self.alice() {
            return self.clone();
        }
        let mut p = DMatrix::zeros(m, self.bob());
        p.view_mut((0, 0), self.p.shape()).copy_from(&self.p);
        Self { p }
    }
}

/// Column-stochastic host matrix t_{w|z'}: row `w − 1` holds guess budget `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct HostMatrix {
    t: DMatrix<f64>,
}

impl HostMatrix {
    pub fn new(t: DMatrix<f64>) -> Result<Self> {
        if t.nrows() == 0 || t.ncols() == 0 {
            return Err(QceError::InvalidInput("host matrix is empty".into()));
        }
        if t.iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x)) {
            return Err(QceError::InvalidInput("host matrix entries must lie in [0, 1]".into()));
        }
        for c in t.column_iter() {
            if (c.sum() - 1.0).abs() > 1e-9 {
                return Err(QceError::InvalidInput("host matrix columns must sum to 1".into()));
            }
        }
        Ok(Self { t: t.map(|x| x.clamp(0.0, 1.0)) })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(QceError::InvalidInput("ragged host matrix".into()));
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    /// Every column puts all mass on budget `w`.
    pub fn deterministic(w: usize, n_w: usize, n_z: usize) -> Result<Self> {
        if w == 0 || w > n_w {
            return Err(QceError::OutOfRange(format!("budget {w} not in 1..={n_w}")));
        }
        let mut t = DMatrix::zeros(n_w, n_z.max(1));
        t.row_mut(w - 1).fill(1.0);
        Ok(Self { t })
    }

    pub fn random<R: Rng + ?Sized>(n_w: usize, n_z: usize, rng: &mut R) -> Self {
        let mut t = DMatrix::zeros(n_w, n_z);
        for z in 0..n_z {
            let col = random_pmf(n_w, rng);
            for (w, v) in col.into_iter().enumerate() {
                t[(w, z)] = v;
            }
        }
        Self { t }
    }

    /// Random host matrix whose columns are point masses.
    pub fn random_deterministic<R: Rng + ?Sized>(n_w: usize, n_z: usize, rng: &mut R) -> Self {
        let mut t = DMatrix::zeros(n_w, n_z);
        for z in 0..n_z {
            t[(rng.random_range(0..n_w), z)] = 1.0;
        }
        Self { t }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn n_w(&self) -> usize {
        self.t.nrows()
    }

    pub fn n_z(&self) -> usize {
        self.t.ncols()
    }

    /// max_{z'} Σ_w t_{w|z'} · kf(w), where `kf(w)` is the Ky-Fan value for budget w.
    pub fn best_column(&self, kf: impl Fn(usize) -> f64) -> (f64, usize) {
        let vals: Vec<f64> = (1..=self.n_w()).map(kf).collect();
        let mut best = (f64::NEG_INFINITY, 0);
        for z in 0..self.n_z() {
            let v: f64 = (0..self.n_w()).map(|w| self.t[(w, z)] * vals[w]).sum();
            if v > best.0 + 1e-15 {
                best = (v, z);
            }
        }
        best
    }
}

/// Expected win probability Σ_y max_{z'} Σ_w t_{w|z'} ‖p(·, y)‖_(w) of the classical 𝒯-game.
pub fn prob_t(p: &ClassicalJoint, t: &HostMatrix) -> f64 {
    (0..p.bob())
        .map(|y| {
            let col = p.column(y);
            t.best_column(|w| kyfan_vec(&col, w)).0
        })
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Σ_y ‖p(·, y)‖_(w): the value of the game with a fixed budget `w`.
pub fn fixed_w_value(p: &ClassicalJoint, w: usize) -> Result<f64> {
    if w == 0 || w > p.alice() {
        return Err(QceError::OutOfRange(format!("budget {w} not in 1..={}", p.alice())));
    }
    Ok((0..p.bob()).map(|y| kyfan_vec(&p.column(y), w)).sum::<f64>().min(1.0))
}

/// Recovered certificate: q_w = Σ_y t_{yw} D_{(y,w)} p_y.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    /// Row-stochastic, rows indexed by P's Bob symbol y, columns by Q's w.
    pub t: Vec<Vec<f64>>,
    /// `d[y][w]` is a doubly stochastic m×m matrix, stored row-major.
    pub d: Vec<Vec<Vec<Vec<f64>>>>,
    pub residual: f64,
}

/// A game on which Q scores strictly more than P.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalWitness {
    pub host: Vec<Vec<f64>>,
    pub value_p: f64,
    pub value_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    /// Whether P conditionally majorizes Q, i.e. Q is reachable from P.
    pub feasible: bool,
    /// Optimal phase-one objective of the feasibility LP.
    pub infeasibility: f64,
    pub certificate: Option<MajorizationCertificate>,
    pub witness: Option<ClassicalWitness>,
}

/// Decides whether P conditionally majorizes Q by LP feasibility.
///
/// Variables are Z_{(y,w)} ≥ 0 (m×m blocks) and t_{yw} ≥ 0. Constraints: each block has all row and
/// column sums equal to t_{yw}; Σ_w t_{yw} = 1; Σ_y Z_{(y,w)} p_y = q_w. When infeasible, a falsifying
/// game is searched for among fixed-budget games and `spot_checks` random host matrices.
pub fn cond_majorizes_classical(p: &ClassicalJoint, q: &ClassicalJoint) -> Result<MajorizationVerdict> {
    cond_majorizes_classical_with(p, q, 500, 0)
}

pub fn cond_majorizes_classical_with(
    p: &ClassicalJoint,
    q: &ClassicalJoint,
    spot_checks: usize,
    seed: u64,
) -> Result<MajorizationVerdict> {
    let m = p.alice().max(q.alice());
    let (p, q) = (p.padded(m), q.padded(m));
    let (n, n2) = (p.bob(), q.bob());
    let blocks = n * n2;
    let zvars = blocks * m * m;
    let nv = zvars + blocks;
    let zi = |y: usize, w: usize, i: usize, j: usize| ((y * n2 + w) * m + i) * m + j;
    let ti = |y: usize, w: usize| zvars + y * n2 + w;

    let rows = blocks * 2 * m + n + n2 * m;
    let mut a = DMatrix::<f64>::zeros(rows, nv);
    let mut b = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for y in 0..n {
        for w in 0..n2 {
            for i in 0..m {
                for j in 0..m {
                    a[(r, zi(y, w, i, j))] = 1.0;
                }
                a[(r, ti(y, w))] = -1.0;
                r += 1;
            }
            for j in 0..m {
                for i in 0..m {
                    a[(r, zi(y, w, i, j))] = 1.0;
                }
                a[(r, ti(y, w))] = -1.0;
                r += 1;
            }
        }
    }
    for y in 0..n {
        for w in 0..n2 {
            a[(r, ti(y, w))] = 1.0;
        }
        b[r] = 1.0;
        r += 1;
    }
    for w in 0..n2 {
        for i in 0..m {
            for y in 0..n {
                for j in 0..m {
                    a[(r, zi(y, w, i, j))] = p.matrix()[(j, y)];
                }
            }
            b[r] = q.matrix()[(i, w)];
            r += 1;
        }
    }
    debug_assert_eq!(r, rows);

    let sol = lp::phase_one(&a, &b)?;
    if sol.infeasibility > LP_TOL {
        let witness = search_witness(&p, &q, spot_checks, seed);
        return Ok(MajorizationVerdict {
            feasible: false,
            infeasibility: sol.infeasibility,
            certificate: None,
            witness,
        });
    }

    let x = &sol.x;
    let mut t = vec![vec![0.0; n2]; n];
    let mut d = vec![vec![Vec::new(); n2]; n];
    for y in 0..n {
        for w in 0..n2 {
            let tyw = x[ti(y, w)];
            t[y][w] = tyw;
            d[y][w] = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if tyw > 1e-12 { x[zi(y, w, i, j)] / tyw } else { 1.0 / m as f64 })
                        .collect()
                })
                .collect();
        }
    }
    let residual = certificate_residual(&p, &q, &t, &d);
    if residual > LP_TOL {
        return Err(QceError::Numerical(format!(
            "LP reported feasible but the certificate residual is {residual:.3e}"
        )));
    }
    Ok(MajorizationVerdict {
        feasible: true,
        infeasibility: sol.infeasibility,
        certificate: Some(MajorizationCertificate { t, d, residual }),
        witness: None,
    })
}

/// Largest violation of stochasticity or of q_w = Σ_y t_{yw} D_{(y,w)} p_y.
pub fn certificate_residual(
    p: &ClassicalJoint,
    q: &ClassicalJoint,
    t: &[Vec<f64>],
    d: &[Vec<Vec<Vec<f64>>>],
) -> f64 {
    let m = p.alice();
    let mut worst: f64 = 0.0;
    for row in t {
        worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
        worst = worst.max(row.iter().fold(0.0f64, |acc, &v| acc.max(-v)));
    }
    for dy in d {
        for dyw in dy {
            for i in 0..m {
                worst = worst.max((dyw[i].iter().sum::<f64>() - 1.0).abs());
                worst = worst.max(((0..m).map(|k| dyw[k][i]).sum::<f64>() - 1.0).abs());
                worst = worst.max(dyw[i].iter().fold(0.0f64, |acc, &v| acc.max(-v)));
            }
        }
    }
    for w in 0..q.bob() {
        for i in 0..m {
            let mut s = 0.0;
            for y in 0..p.bob() {
                for j in 0..m {
                    s += t[y][w] * d[y][w][i][j] * p.matrix()[(j, y)];
                }
            }
            worst = worst.max((s - q.matrix()[(i, w)]).abs());
        }
    }
    worst
}

fn search_witness(p: &ClassicalJoint, q: &ClassicalJoint, n_random: usize, seed: u64) -> Option<ClassicalWitness> {
    let m = p.alice();
    let n_z = p.bob().max(q.bob());
    let check = |t: &HostMatrix| {
        let (vp, vq) = (prob_t(p, t), prob_t(q, t));
        (vq > vp + 1e-6).then(|| ClassicalWitness {
            host: matrix_rows(t.matrix()),
            value_p: vp,
            value_q: vq,
        })
    };
    for w in 1..=m {
        if let Some(wit) = check(&HostMatrix::deterministic(w, m, n_z).expect("valid budget")) {
            return Some(wit);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..n_random {
        let t = if k % 2 == 0 {
            HostMatrix::random(m, n_z, &mut rng)
        } else {
            HostMatrix::random_deterministic(m, n_z, &mut rng)
        };
        if let Some(wit) = check(&t) {
            return Some(wit);
        }
    }
    None
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Q = Σ_j E⁽ʲ⁾ P R⁽ʲ⁾ with column-stochastic E⁽ʲ⁾ and nonnegative R⁽ʲ⁾ summing to a row-stochastic matrix.
pub fn apply_cds_classical(p: &ClassicalJoint, e: &[DMatrix<f64>], r: &[DMatrix<f64>]) -> Result<ClassicalJoint> {
    if e.is_empty() || e.len() != r.len() {
        return Err(QceError::InvalidInput("need matching, non-empty E and R lists".into()));
    }
    let (m, n) = p.matrix().shape();
    let n2 = r[0].ncols();
    let mut rsum = DMatrix::<f64>::zeros(n, n2);
    let mut qm = DMatrix::<f64>::zeros(m, n2);
    for (ej, rj) in e.iter().zip(r) {
        if ej.shape() != (m, m) || rj.shape() != (n, n2) {
            return Err(QceError::DimensionMismatch("CDS data has incompatible shapes".into()));
        }
        if ej.iter().chain(rj.iter()).any(|&x| x < -1e-12) {
            return Err(QceError::InvalidInput("CDS data must be nonnegative".into()));
        }
        if ej.column_iter().any(|c| (c.sum() - 1.0).abs() > 1e-9) {
            return Err(QceError::InvalidInput("E matrices must be column stochastic".into()));
        }
        rsum += rj;
        qm += ej * p.matrix() * rj;
    }
    if rsum.row_iter().any(|row| (row.sum() - 1.0).abs() > 1e-9) {
        return Err(QceError::InvalidInput("Σ R must be row stochastic".into()));
    }
    ClassicalJoint::new(qm)
}

/// Random CDS data: `k` doubly stochastic E's and a random split of a row-stochastic R.
pub fn random_cds_data<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    n2: usize,
    k: usize,
    rng: &mut R,
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
    let e = (0..k).map(|_| crate::cusc::random_doubly_stochastic(m, rng)).collect();
    let mut r = vec![DMatrix::zeros(n, n2); k];
    for y in 0..n {
        let w = random_pmf(k * n2, rng);
        for j in 0..k {
            for z in 0..n2 {
                r[j][(y, z)] = w[j * n2 + z];
            }
        }
    }
    (e, r)
}

pub fn random_joint<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> ClassicalJoint {
    let v = random_pmf(m * n, rng);
    ClassicalJoint { p: DMatrix::from_row_slice(m, n, &v) }
}

/// Σ p_{xy} |x⟩⟨x| ⊗ |y⟩⟨y| on dims [m, n].
pub fn embed_classical(p: &ClassicalJoint) -> DensityOperator {
    let (m, n) = p.matrix().shape();
    let mut d = CMat::zeros(m * n, m * n);
    for x in 0..m {
        for y in 0..n {
            d[(x * n + y, x * n + y)] = cr(p.matrix()[(x, y)]);
        }
    }
    DensityOperator::new_unchecked(vec![m, n], d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::vn_cond_entropy;
    use crate::linalg::shannon;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn correlated() -> ClassicalJoint {
        ClassicalJoint::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
    }

    fn uniform(m: usize, n: usize) -> ClassicalJoint {
        ClassicalJoint::new(DMatrix::from_element(m, n, 1.0 / (m * n) as f64)).unwrap()
    }

    #[test]
    fn prob_t_examples() {
        let mut r = rng(1);
        for _ in 0..5 {
            let t = HostMatrix::random(2, 3, &mut r);
            assert!((prob_t(&correlated(), &t) - 1.0).abs() < 1e-12);
        }
        let t1 = HostMatrix::deterministic(1, 2, 2).unwrap();
        assert!((prob_t(&uniform(2, 2), &t1) - 0.5).abs() < 1e-12);
        let p = ClassicalJoint::from_rows(&[vec![0.35, 0.3], vec![0.15, 0.2]]).unwrap();
        assert!((prob_t(&p, &t1) - 0.65).abs() < 1e-12);
    }

    #[test]
    fn fixed_w_examples() {
        let mut r = rng(2);
        let p = random_joint(3, 2, &mut r);
        assert!((fixed_w_value(&p, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((fixed_w_value(&uniform(2, 2), 1).unwrap() - 0.5).abs() < 1e-12);
        let p = ClassicalJoint::from_rows(&[vec![0.375, 0.125], vec![0.125, 0.375]]).unwrap();
        assert!((fixed_w_value(&p, 1).unwrap() - 0.75).abs() < 1e-12);
        assert!(fixed_w_value(&p, 0).is_err());
        assert!(fixed_w_value(&p, 3).is_err());
        let t = HostMatrix::deterministic(1, 2, 4).unwrap();
        assert!((prob_t(&p, &t) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn majorization_examples() {
        let mut r = rng(3);
        let p = random_joint(3, 3, &mut r);
        let v = cond_majorizes_classical(&p, &uniform(3, 2)).unwrap();
        assert!(v.feasible);
        assert!(v.certificate.unwrap().residual <= 1e-7);

        let v = cond_majorizes_classical(&uniform(2, 2), &correlated()).unwrap();
        assert!(!v.feasible);
        let w = v.witness.expect("fixed-w witness");
        assert!(w.value_q > w.value_p + 1e-6);

        let (e, rr) = random_cds_data(3, 3, 3, 2, &mut r);
        let q = apply_cds_classical(&p, &e, &rr).unwrap();
        assert!(cond_majorizes_classical(&p, &q).unwrap().feasible);
    }

    #[test]
    fn explicit_uniform_certificate() {
        let mut r = rng(4);
        let p = random_joint(3, 2, &mut r);
        let q = uniform(3, 4);
        let t = vec![vec![0.25; 4]; 2];
        let d = vec![vec![vec![vec![1.0 / 3.0; 3]; 3]; 4]; 2];
        assert!(certificate_residual(&p, &q, &t, &d) < 1e-12);
    }

    #[test]
    fn majorization_is_reflexive_and_pads() {
        let mut r = rng(5);
        for _ in 0..10 {
            let p = random_joint(3, 2, &mut r);
            assert!(cond_majorizes_classical(&p, &p).unwrap().feasible);
        }
        let small = ClassicalJoint::from_rows(&[vec![0.5, 0.5]]).unwrap();
        let big = random_joint(3, 2, &mut r);
        assert!(cond_majorizes_classical(&big, &small).unwrap().feasible == cond_majorizes_classical(&big, &small.padded(3)).unwrap().feasible);
    }

    #[test]
    fn cds_examples() {
        let mut r = rng(6);
        let p = random_joint(3, 2, &mut r);
        let i3 = DMatrix::identity(3, 3);
        let i2 = DMatrix::identity(2, 2);
        let q = apply_cds_classical(&p, &[i3], std::slice::from_ref(&i2)).unwrap();
        assert!((q.matrix() - p.matrix()).amax() < 1e-15);

        let flat = DMatrix::from_element(3, 3, 1.0 / 3.0);
        let q = apply_cds_classical(&p, &[flat], &[i2]).unwrap();
        for y in 0..2 {
            let col = q.column(y);
            let mass: f64 = p.column(y).iter().sum();
            assert!(col.iter().all(|&v| (v - mass / 3.0).abs() < 1e-12));
        }

        let bad = DMatrix::from_element(3, 3, 0.5);
        assert!(apply_cds_classical(&p, &[bad], &[DMatrix::identity(2, 2)]).is_err());
    }

    #[test]
    fn embedding_matches_shannon_conditional_entropy() {
        let mut r = rng(7);
        let u = embed_classical(&uniform(2, 2));
        assert!(crate::linalg::max_abs_diff(u.matrix(), DensityOperator::maximally_mixed(vec![2, 2]).matrix()) < 1e-15);
        let c = embed_classical(&correlated());
        assert!((c.matrix()[(0, 0)].re - 0.5).abs() < 1e-15 && (c.matrix()[(3, 3)].re - 0.5).abs() < 1e-15);
        for _ in 0..10 {
            let p = random_joint(3, 2, &mut r);
            let joint: Vec<f64> = p.matrix().iter().copied().collect();
            let bob: Vec<f64> = (0..2).map(|y| p.column(y).iter().sum()).collect();
            let h = shannon(&joint) - shannon(&bob);
            assert!((vn_cond_entropy(&embed_classical(&p)).unwrap() - h).abs() < 1e-10);
        }
    }

    #[test]
    fn validation() {
        assert!(ClassicalJoint::from_rows(&[vec![0.5, 0.6]]).is_err());
        assert!(ClassicalJoint::from_rows(&[vec![1.2, -0.2]]).is_err());
        assert!(HostMatrix::from_rows(&[vec![0.5], vec![0.4]]).is_err());
        assert!(HostMatrix::deterministic(3, 2, 2).is_err());
    }
}
