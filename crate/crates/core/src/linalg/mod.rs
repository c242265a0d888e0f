//! Dense complex linear algebra used throughout the crate.
//!
//! Subsystem ordering: for a dimension list `[d0, d1, ..]` the leftmost
//! subsystem is the slowest-varying index, so `|i⟩⊗|j⟩` sits at `i·d1 + j`.

mod sample;

pub use sample::{
    ginibre, haar_isometry, haar_state, haar_unitary, random_density, random_pmf, sample, Sample,
    SampleKind,
};

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{QceError, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Structural tolerance for Hermiticity, positivity and trace checks.
pub const STRUCT_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as exact zeros.
pub const ZERO_EIG: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A dense complex matrix whose entries are guaranteed finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[C64]) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(QceError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::new(CMat::from_row_slice(rows, cols, data))
    }

    pub fn new(m: CMat) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QceError::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        self.0.transpose().iter().copied().collect()
    }
}

impl Deref for ComplexMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.0
    }
}

impl From<ComplexMatrix> for CMat {
    fn from(m: ComplexMatrix) -> CMat {
        m.0
    }
}

/// Unit-trace positive semidefinite operator with a subsystem dimension list.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    mat: CMat,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace at [`STRUCT_TOL`].
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        Self::with_tol(dims, mat, STRUCT_TOL)
    }

    pub fn with_tol(dims: Vec<usize>, mat: CMat, tol: f64) -> Result<Self> {
        check_dims(&dims, mat.nrows())?;
        if mat.nrows() != mat.ncols() {
            return Err(QceError::DimensionMismatch("density matrix must be square".into()));
        }
        let mat = ComplexMatrix::new(mat)?.into_inner();
        let dev = hermitian_deviation(&mat);
        if dev > tol {
            return Err(QceError::NotHermitian(dev));
        }
        let mat = hermitian_part(&mat);
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > tol {
            return Err(QceError::BadTrace(tr));
        }
        let min = eigvals_desc(&mat).last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(QceError::NotPositive(min));
        }
        Ok(Self { dims, mat })
    }

    /// Wraps a matrix that is valid by construction. Only Hermitian symmetrisation is applied.
    pub(crate) fn new_unchecked(dims: Vec<usize>, mat: CMat) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.nrows());
        Self { dims, mat: hermitian_part(&mat) }
    }

    pub fn pure(dims: Vec<usize>, psi: &CVec) -> Result<Self> {
        check_dims(&dims, psi.len())?;
        let n = psi.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(QceError::InvalidInput("state vector must be nonzero and finite".into()));
        }
        let v = psi / cr(n);
        Ok(Self::new_unchecked(dims, &v * v.adjoint()))
    }

    /// Maximally mixed state on the given subsystems.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self::new_unchecked(dims, CMat::identity(n, n) * cr(1.0 / n as f64))
    }

    /// Normalised φ⁺ = |Φ⟩⟨Φ|/d on `[d, d]`.
    pub fn phi_plus(d: usize) -> Self {
        let psi = phi_plus_vec(d);
        Self::new_unchecked(vec![d, d], &psi * psi.adjoint())
    }

    pub fn basis_state(dims: Vec<usize>, index: usize) -> Self {
        let n: usize = dims.iter().product();
        Self::new_unchecked(dims, projector(&ket(n, index)))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_desc(&self.mat)
    }

    pub fn kron(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new_unchecked(dims, self.mat.kronecker(&other.mat))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    pub fn permute(&self, perm: &[usize]) -> Result<DensityOperator> {
        let mat = permute_subsystems(&self.mat, &self.dims, perm)?;
        let dims = perm.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::new_unchecked(dims, mat))
    }

    /// Replaces the dimension list with another one of equal total size.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<DensityOperator> {
        check_dims(&dims, self.dim())?;
        Ok(Self { dims, mat: self.mat.clone() })
    }
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(QceError::InvalidInput(format!("invalid dimension list {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != n {
        return Err(QceError::DimensionMismatch(format!(
            "dims {dims:?} have product {prod}, matrix side is {n}"
        )));
    }
    Ok(())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(ms: &[&CMat]) -> CMat {
    ms.iter().fold(CMat::identity(1, 1), |acc, m| acc.kronecker(*m))
}

pub fn ket(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = cr(1.0);
    v
}

pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Unnormalised Σ_j |jj⟩.
pub fn phi_plus_unnormalized(d: usize) -> CVec {
    let mut v = CVec::zeros(d * d);
    for j in 0..d {
        v[j * d + j] = cr(1.0);
    }
    v
}

/// Normalised (1/√d) Σ_j |jj⟩.
pub fn phi_plus_vec(d: usize) -> CVec {
    phi_plus_unnormalized(d) / cr((d as f64).sqrt())
}

/// Weyl shift X|j⟩ = |j+1 mod d⟩.
pub fn weyl_x(d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = cr(1.0);
    }
    m
}

/// Weyl clock Z|j⟩ = ω^j |j⟩.
pub fn weyl_z(d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for j in 0..d {
        let th = 2.0 * std::f64::consts::PI * j as f64 / d as f64;
        m[(j, j)] = c(th.cos(), th.sin());
    }
    m
}

/// X^a Z^b.
pub fn weyl(d: usize, a: usize, b: usize) -> CMat {
    let x = weyl_x(d);
    let z = weyl_z(d);
    let mut m = CMat::identity(d, d);
    for _ in 0..a {
        m = &x * m;
    }
    let mut zb = CMat::identity(d, d);
    for _ in 0..b {
        zb = &z * zb;
    }
    m * zb
}

/// Discrete Fourier transform matrix, columns are the Fourier basis.
pub fn fourier(d: usize) -> CMat {
    let s = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |j, k| {
        let th = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
        c(s * th.cos(), s * th.sin())
    })
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Row/column index maps between a full space and the kept/traced factors.
fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let n: usize = dims.iter().product();
    let mut kept_of = vec![0usize; n];
    let mut traced_of = vec![0usize; n];
    let mut nk = 1;
    let mut nt = 1;
    for (k, &d) in dims.iter().enumerate() {
        if keep.contains(&k) {
            nk *= d;
        } else {
            nt *= d;
        }
    }
    for idx in 0..n {
        let mut rem = idx;
        let mut digits = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let (mut ki, mut ti) = (0, 0);
        for (k, &d) in dims.iter().enumerate() {
            if keep.contains(&k) {
                ki = ki * d + digits[k];
            } else {
                ti = ti * d + digits[k];
            }
        }
        kept_of[idx] = ki;
        traced_of[idx] = ti;
    }
    (kept_of, traced_of, nk, nt)
}

fn check_keep(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() || k.iter().any(|&i| i >= dims.len()) {
        return Err(QceError::InvalidInput(format!(
            "invalid subsystem set {keep:?} for dims {dims:?}"
        )));
    }
    Ok(k)
}

/// Partial trace of an arbitrary square operator, keeping the listed subsystems in their original order.
pub fn partial_trace_mat(m: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    check_dims(dims, m.nrows())?;
    let keep = check_keep(dims, keep)?;
    let (kept_of, traced_of, nk, nt) = split_indices(dims, &keep);
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nt];
    for idx in 0..m.nrows() {
        groups[traced_of[idx]].push((idx, kept_of[idx]));
    }
    let mut out = CMat::zeros(nk, nk);
    for g in &groups {
        for &(i, ki) in g {
            for &(j, kj) in g {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let keep_sorted = check_keep(&rho.dims, keep)?;
    let m = partial_trace_mat(&rho.mat, &rho.dims, &keep_sorted)?;
    let dims = if keep_sorted.is_empty() {
        vec![1]
    } else {
        keep_sorted.iter().map(|&k| rho.dims[k]).collect()
    };
    Ok(DensityOperator::new_unchecked(dims, m))
}

/// Maps each index of the permuted space to its index in the original space.
/// Output subsystem `k` is input subsystem `perm[k]`.
pub fn permutation_index_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
        return Err(QceError::InvalidInput(format!(
            "{perm:?} is not a permutation of {} subsystems",
            dims.len()
        )));
    }
    let n: usize = dims.iter().product();
    let new_dims: Vec<usize> = perm.iter().map(|&k| dims[k]).collect();
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut map = vec![0usize; n];
    for (out_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = out_idx;
        let mut src = 0;
        for k in (0..new_dims.len()).rev() {
            let digit = rem % new_dims[k];
            rem /= new_dims[k];
            src += digit * strides[perm[k]];
        }
        *slot = src;
    }
    Ok(map)
}

/// Reorders the tensor factors of an operator; output subsystem `k` is input subsystem `perm[k]`.
pub fn permute_subsystems(m: &CMat, dims: &[usize], perm: &[usize]) -> Result<CMat> {
    check_dims(dims, m.nrows())?;
    let map = permutation_index_map(dims, perm)?;
    let n = map.len();
    Ok(CMat::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

/// The permutation operator P with P(⊗ v_k) = ⊗ v_{perm[k]}, so P M P† = permute_subsystems(M).
pub fn permutation_operator(dims: &[usize], perm: &[usize]) -> Result<CMat> {
    let map = permutation_index_map(dims, perm)?;
    let n = map.len();
    let mut p = CMat::zeros(n, n);
    for (i, &src) in map.iter().enumerate() {
        p[(i, src)] = cr(1.0);
    }
    Ok(p)
}

/// Eigenvalues of a Hermitian matrix, descending. The input is not checked.
pub fn eigvals_desc(h: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Hermitian eigendecomposition with descending eigenvalues.
///
/// Each eigenvector is rescaled so that its first entry of maximal modulus is real positive.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]).then(a.cmp(&b)));
    let vals = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = se.eigenvectors.column(i).into_owned();
        let mut best = 0;
        let mut best_abs = -1.0;
        for (j, z) in col.iter().enumerate() {
            if z.norm() > best_abs + 1e-12 {
                best_abs = z.norm();
                best = j;
            }
        }
        if best_abs > 0.0 {
            let phase = col[best] / cr(col[best].norm());
            col /= phase;
        }
        vecs.set_column(k, &col);
    }
    (vals, vecs)
}

/// Eigenvalues of a Hermitian matrix (descending), rejecting non-Hermitian input.
pub fn eig_desc(h: &CMat) -> Result<Vec<f64>> {
    if h.nrows() != h.ncols() {
        return Err(QceError::DimensionMismatch("eig_desc needs a square matrix".into()));
    }
    let dev = hermitian_deviation(h);
    if dev > STRUCT_TOL {
        return Err(QceError::NotHermitian(dev));
    }
    Ok(eigvals_desc(&hermitian_part(h)))
}

/// Sum of the `w` largest entries of a descending-sorted vector; `w` beyond the length saturates.
pub fn kyfan_sorted(sorted_desc: &[f64], w: usize) -> f64 {
    sorted_desc.iter().take(w).sum()
}

/// Sum of the `w` largest entries of an unsorted vector, saturating beyond its length.
pub fn kyfan_vec(v: &[f64], w: usize) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    kyfan_sorted(&s, w)
}

/// Ky-Fan w-norm: the sum of the w largest singular values.
pub fn kyfan(m: &CMat, w: usize) -> Result<f64> {
    let side = m.nrows().min(m.ncols());
    if w == 0 || w > side {
        return Err(QceError::OutOfRange(format!("Ky-Fan index {w} not in 1..={side}")));
    }
    let mut sv: Vec<f64> = if m.nrows() == m.ncols() && hermitian_deviation(m) <= 1e-12 {
        eigvals_desc(&hermitian_part(m)).into_iter().map(f64::abs).collect()
    } else {
        m.singular_values().iter().copied().collect()
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(kyfan_sorted(&sv, w))
}

/// Ky-Fan norm of a PSD operator with saturation: `w` beyond the side gives the trace.
pub fn kyfan_psd(h: &CMat, w: usize) -> f64 {
    let ev = eigvals_desc(h);
    kyfan_sorted(&ev, w.min(ev.len()))
}

/// Whether `v` majorizes `u` (both zero-padded to equal length).
pub fn majorizes(v: &[f64], u: &[f64]) -> Result<bool> {
    if v.iter().chain(u).any(|&x| x < -STRUCT_TOL || !x.is_finite()) {
        return Err(QceError::InvalidInput("majorization needs nonnegative entries".into()));
    }
    let sv: f64 = v.iter().sum();
    let su: f64 = u.iter().sum();
    if (sv - su).abs() > STRUCT_TOL {
        return Err(QceError::InvalidInput(format!(
            "majorization needs equal sums, got {sv} and {su}"
        )));
    }
    let n = v.len().max(u.len());
    let sort = |x: &[f64]| {
        let mut s = x.to_vec();
        s.resize(n, 0.0);
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (a, b) = (sort(v), sort(u));
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..n {
        pa += a[k];
        pb += b[k];
        if pa < pb - STRUCT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Spectral purification Σ_i √λ_i |v_i⟩⊗|i⟩ on `dims ⊗ [rank]`.
pub fn purify(rho: &DensityOperator) -> DensityOperator {
    let (vals, vecs) = eigh(rho.matrix());
    let rank = vals.iter().filter(|&&l| l > ZERO_EIG).count().max(1);
    let n = rho.dim();
    let mut psi = CVec::zeros(n * rank);
    for i in 0..rank {
        let s = vals[i].max(0.0).sqrt();
        for a in 0..n {
            psi[a * rank + i] += vecs[(a, i)] * cr(s);
        }
    }
    let norm = psi.norm();
    psi /= cr(norm);
    let mut dims = rho.dims().to_vec();
    dims.push(rank);
    DensityOperator::new_unchecked(dims, projector(&psi))
}

/// Polar factor of M = W P: the closest matrix with orthonormal columns (for rows ≥ cols).
pub fn polar_factor(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.expect("svd u") * svd.v_t.expect("svd v_t")
}

pub fn unitarity_deviation(u: &CMat) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &CMat::identity(n, n))
}

/// Shannon entropy in bits with 0·log 0 = 0.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > ZERO_EIG).map(|&x| -x * x.log2()).sum()
}
