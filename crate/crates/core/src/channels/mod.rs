//! Quantum channels in Kraus form, their Choi matrices and the standard channel zoo.

use rand::Rng;

use crate::error::{QceError, Result};
use crate::linalg::{
    cr, eigh, haar_isometry, hermitian_part, ket, max_abs_diff, partial_trace_mat,
    unitarity_deviation, weyl, CMat, CVec, DensityOperator,
};

/// Trace-preservation tolerance for Kraus lists.
pub const TP_TOL: f64 = 1e-8;
/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const CHOI_RANK_TOL: f64 = 1e-10;

/// A CPTP map given by Kraus operators of shape `∏out_dims × ∏in_dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    kraus: Vec<CMat>,
}

fn prod(d: &[usize]) -> usize {
    d.iter().product()
}

fn check_dim_list(d: &[usize]) -> Result<()> {
    if d.is_empty() || d.contains(&0) {
        return Err(QceError::InvalidInput(format!("invalid dimension list {d:?}")));
    }
    Ok(())
}

impl QuantumChannel {
    pub fn new(in_dims: Vec<usize>, out_dims: Vec<usize>, kraus: Vec<CMat>) -> Result<Self> {
        Self::with_tol(in_dims, out_dims, kraus, TP_TOL)
    }

    pub fn with_tol(in_dims: Vec<usize>, out_dims: Vec<usize>, kraus: Vec<CMat>, tol: f64) -> Result<Self> {
        check_dim_list(&in_dims)?;
        check_dim_list(&out_dims)?;
        if kraus.is_empty() {
            return Err(QceError::InvalidInput("a channel needs at least one Kraus operator".into()));
        }
        let (din, dout) = (prod(&in_dims), prod(&out_dims));
        for k in &kraus {
            if k.shape() != (dout, din) {
                return Err(QceError::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(QceError::InvalidInput("Kraus operator has non-finite entries".into()));
            }
        }
        let ch = Self { in_dims, out_dims, kraus };
        let dev = ch.tp_deviation();
        if dev > tol {
            return Err(QceError::NotTracePreserving(dev));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(in_dims: Vec<usize>, out_dims: Vec<usize>, kraus: Vec<CMat>) -> Self {
        debug_assert!(kraus.iter().all(|k| k.shape() == (prod(&out_dims), prod(&in_dims))));
        Self { in_dims, out_dims, kraus }
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        prod(&self.in_dims)
    }

    pub fn out_dim(&self) -> usize {
        prod(&self.out_dims)
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    /// max |Σ K†K − I|.
    pub fn tp_deviation(&self) -> f64 {
        let n = self.in_dim();
        let mut s = CMat::zeros(n, n);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        max_abs_diff(&s, &CMat::identity(n, n))
    }

    /// Σ K X K† on an arbitrary operator, without checks.
    pub fn apply_mat(&self, x: &CMat) -> CMat {
        let n = self.out_dim();
        let mut out = CMat::zeros(n, n);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// Heisenberg picture Σ K† Y K.
    pub fn adjoint_apply_mat(&self, y: &CMat) -> CMat {
        let n = self.in_dim();
        let mut out = CMat::zeros(n, n);
        for k in &self.kraus {
            out += k.adjoint() * y * k;
        }
        out
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dims() != self.in_dims.as_slice() {
            return Err(QceError::DimensionMismatch(format!(
                "state dims {:?} do not match channel input {:?}",
                rho.dims(),
                self.in_dims
            )));
        }
        Ok(DensityOperator::new_unchecked(self.out_dims.clone(), self.apply_mat(rho.matrix())))
    }

    /// Applies the channel to the leading subsystems of `rho`, leaving the rest untouched.
    pub fn apply_on_first(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let k = self.in_dims.len();
        if rho.dims().len() < k || rho.dims()[..k] != self.in_dims[..] {
            return Err(QceError::DimensionMismatch(format!(
                "channel input {:?} is not a prefix of state dims {:?}",
                self.in_dims,
                rho.dims()
            )));
        }
        let rest: Vec<usize> = rho.dims()[k..].to_vec();
        let ext = if rest.is_empty() { self.clone() } else { tensor(self, &identity(rest.clone())) };
        let mut dims = self.out_dims.clone();
        dims.extend(rest);
        Ok(DensityOperator::new_unchecked(dims, ext.apply_mat(rho.matrix())))
    }

    /// Unnormalised Choi matrix Σ_ij |i⟩⟨j| ⊗ 𝒩(|i⟩⟨j|), input factor first.
    pub fn choi(&self) -> CMat {
        let (din, dout) = (self.in_dim(), self.out_dim());
        let n = din * dout;
        let mut j = CMat::zeros(n, n);
        for k in &self.kraus {
            let v = CVec::from_fn(n, |idx, _| k[(idx % dout, idx / dout)]);
            j += &v * v.adjoint();
        }
        j
    }

    /// Choi dimension list: input factors followed by output factors.
    pub fn choi_dims(&self) -> Vec<usize> {
        let mut d = self.in_dims.clone();
        d.extend_from_slice(&self.out_dims);
        d
    }

    /// Rebuilds a minimal Kraus list through the Choi matrix.
    pub fn compressed(&self) -> QuantumChannel {
        if self.kraus.len() <= 1 {
            return self.clone();
        }
        kraus_from_choi(&self.choi(), &self.in_dims, &self.out_dims)
            .map(|k| Self::new_unchecked(self.in_dims.clone(), self.out_dims.clone(), k))
            .unwrap_or_else(|_| self.clone())
    }

    /// Same linear map with relabelled dimension lists of equal totals.
    pub fn regroup(&self, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<QuantumChannel> {
        check_dim_list(&in_dims)?;
        check_dim_list(&out_dims)?;
        if prod(&in_dims) != self.in_dim() || prod(&out_dims) != self.out_dim() {
            return Err(QceError::DimensionMismatch("regrouping must keep total dimensions".into()));
        }
        Ok(Self::new_unchecked(in_dims, out_dims, self.kraus.clone()))
    }
}

fn kraus_from_choi(j: &CMat, in_dims: &[usize], out_dims: &[usize]) -> Result<Vec<CMat>> {
    let (din, dout) = (prod(in_dims), prod(out_dims));
    let (vals, vecs) = eigh(&hermitian_part(j));
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -1e-8 {
        return Err(QceError::NotCompletelyPositive(min));
    }
    let mut kraus = Vec::new();
    for (i, &l) in vals.iter().enumerate() {
        if l <= CHOI_RANK_TOL {
            continue;
        }
        let s = l.sqrt();
        kraus.push(CMat::from_fn(dout, din, |o, a| vecs[(a * dout + o, i)] * cr(s)));
    }
    if kraus.is_empty() {
        return Err(QceError::NotTracePreserving(1.0));
    }
    Ok(kraus)
}

/// Inverse of [`QuantumChannel::choi`].
pub fn from_choi(j: &CMat, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<QuantumChannel> {
    check_dim_list(&in_dims)?;
    check_dim_list(&out_dims)?;
    let (din, dout) = (prod(&in_dims), prod(&out_dims));
    if j.shape() != (din * dout, din * dout) {
        return Err(QceError::DimensionMismatch(format!(
            "Choi matrix must be {0}x{0}",
            din * dout
        )));
    }
    let herm = crate::linalg::hermitian_deviation(j);
    if herm > 1e-8 {
        return Err(QceError::NotHermitian(herm));
    }
    let marg = partial_trace_mat(j, &[din, dout], &[0])?;
    let dev = max_abs_diff(&marg, &CMat::identity(din, din));
    let kraus = kraus_from_choi(j, &in_dims, &out_dims)?;
    if dev > 1e-7 {
        return Err(QceError::NotTracePreserving(dev));
    }
    QuantumChannel::with_tol(in_dims, out_dims, kraus, 1e-7)
}

/// `outer ∘ inner`.
pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel> {
    if outer.in_dim() != inner.out_dim() {
        return Err(QceError::DimensionMismatch(format!(
            "cannot compose: inner outputs {:?}, outer expects {:?}",
            inner.out_dims, outer.in_dims
        )));
    }
    let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for a in &outer.kraus {
        for b in &inner.kraus {
            kraus.push(a * b);
        }
    }
    let ch = QuantumChannel::new_unchecked(inner.in_dims.clone(), outer.out_dims.clone(), kraus);
    Ok(if ch.kraus.len() > ch.in_dim() * ch.out_dim() { ch.compressed() } else { ch })
}

/// `a ⊗ b` with dimension lists concatenated.
pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> QuantumChannel {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for x in &a.kraus {
        for y in &b.kraus {
            kraus.push(x.kronecker(y));
        }
    }
    let mut in_dims = a.in_dims.clone();
    in_dims.extend_from_slice(&b.in_dims);
    let mut out_dims = a.out_dims.clone();
    out_dims.extend_from_slice(&b.out_dims);
    QuantumChannel::new_unchecked(in_dims, out_dims, kraus)
}

/// Convex mixture Σ p_i 𝒩_i of channels with equal shapes.
pub fn mixture(parts: &[(f64, QuantumChannel)]) -> Result<QuantumChannel> {
    let first = &parts.first().ok_or_else(|| QceError::InvalidInput("empty mixture".into()))?.1;
    check_pmf(&parts.iter().map(|p| p.0).collect::<Vec<_>>())?;
    let mut kraus = Vec::new();
    for (p, ch) in parts {
        if ch.in_dim() != first.in_dim() || ch.out_dim() != first.out_dim() {
            return Err(QceError::DimensionMismatch("mixture parts differ in shape".into()));
        }
        if *p > 0.0 {
            kraus.extend(ch.kraus.iter().map(|k| k * cr(p.sqrt())));
        }
    }
    let ch = QuantumChannel::new_unchecked(first.in_dims.clone(), first.out_dims.clone(), kraus);
    Ok(if ch.kraus.len() > ch.in_dim() * ch.out_dim() { ch.compressed() } else { ch })
}

pub(crate) fn check_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| x < -1e-12 || !x.is_finite()) {
        return Err(QceError::InvalidInput("probabilities must be nonnegative".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(QceError::InvalidInput(format!("probabilities sum to {s}, expected 1")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(QceError::OutOfRange(format!("noise parameter {gamma} not in [0, 1]")));
    }
    Ok(())
}

pub fn identity(dims: Vec<usize>) -> QuantumChannel {
    let n = prod(&dims);
    QuantumChannel::new_unchecked(dims.clone(), dims, vec![CMat::identity(n, n)])
}

/// Conjugation by an isometry `v` (unitary when square).
pub fn isometry(v: CMat, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<QuantumChannel> {
    let dev = unitarity_deviation(&v);
    if dev > TP_TOL {
        return Err(QceError::InvalidInput(format!("not an isometry (deviation {dev:.3e})")));
    }
    QuantumChannel::new(in_dims, out_dims, vec![v])
}

pub fn unitary(u: CMat) -> Result<QuantumChannel> {
    if u.nrows() != u.ncols() {
        return Err(QceError::DimensionMismatch("unitary must be square".into()));
    }
    let d = u.nrows();
    isometry(u, vec![d], vec![d])
}

/// Full dephasing in the computational basis.
pub fn classical_identity(d: usize) -> QuantumChannel {
    let kraus = (0..d).map(|j| crate::linalg::projector(&ket(d, j))).collect();
    QuantumChannel::new_unchecked(vec![d], vec![d], kraus)
}

/// 𝒟_γ(ρ) = (1−γ)ρ + γ I/d, with Kraus operators from the Weyl basis.
pub fn depolarizing(d: usize, gamma: f64) -> Result<QuantumChannel> {
    check_gamma(gamma)?;
    let d2 = (d * d) as f64;
    let mut kraus = vec![CMat::identity(d, d) * cr((1.0 - gamma + gamma / d2).sqrt())];
    if gamma > 0.0 {
        for a in 0..d {
            for b in 0..d {
                if a + b > 0 {
                    kraus.push(weyl(d, a, b) * cr((gamma / d2).sqrt()));
                }
            }
        }
    }
    Ok(QuantumChannel::new_unchecked(vec![d], vec![d], kraus))
}

/// ρ ↦ Σ_j Tr[μ_j ρ] |j⟩⟨j| on an output of dimension equal to the number of elements.
pub fn povm(elements: &[CMat]) -> Result<QuantumChannel> {
    let first = elements.first().ok_or_else(|| QceError::InvalidInput("empty POVM".into()))?;
    let d = first.nrows();
    let m = elements.len();
    let mut total = CMat::zeros(d, d);
    let mut kraus = Vec::new();
    for (j, mu) in elements.iter().enumerate() {
        if mu.shape() != (d, d) {
            return Err(QceError::DimensionMismatch("POVM elements differ in shape".into()));
        }
        let dev = crate::linalg::hermitian_deviation(mu);
        if dev > 1e-9 {
            return Err(QceError::NotHermitian(dev));
        }
        let (vals, vecs) = eigh(mu);
        if vals[d - 1] < -1e-9 {
            return Err(QceError::NotPositive(vals[d - 1]));
        }
        total += mu;
        for (k, &l) in vals.iter().enumerate() {
            if l > CHOI_RANK_TOL {
                let bra = vecs.column(k).adjoint() * cr(l.sqrt());
                kraus.push(ket(m, j) * bra);
            }
        }
    }
    let dev = max_abs_diff(&total, &CMat::identity(d, d));
    if dev > 1e-8 {
        return Err(QceError::InvalidInput(format!(
            "POVM elements do not sum to the identity (deviation {dev:.3e})"
        )));
    }
    QuantumChannel::new(vec![d], vec![m], kraus)
}

/// Qubit amplitude damping with decay probability γ.
pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    check_gamma(gamma)?;
    let mut k0 = CMat::zeros(2, 2);
    k0[(0, 0)] = cr(1.0);
    k0[(1, 1)] = cr((1.0 - gamma).sqrt());
    let mut k1 = CMat::zeros(2, 2);
    k1[(0, 1)] = cr(gamma.sqrt());
    Ok(QuantumChannel::new_unchecked(vec![2], vec![2], vec![k0, k1]))
}

/// ℛ_σ: discards the input and prepares σ.
pub fn replacement(in_dims: Vec<usize>, sigma: &DensityOperator) -> Result<QuantumChannel> {
    check_dim_list(&in_dims)?;
    let din = prod(&in_dims);
    let (vals, vecs) = eigh(sigma.matrix());
    let mut kraus = Vec::new();
    for (k, &l) in vals.iter().enumerate() {
        if l <= CHOI_RANK_TOL {
            continue;
        }
        let v = vecs.column(k) * cr(l.sqrt());
        for i in 0..din {
            kraus.push(&v * ket(din, i).adjoint());
        }
    }
    QuantumChannel::new(in_dims, sigma.dims().to_vec(), kraus)
}

/// ℛ: the replacement channel onto the maximally mixed state.
pub fn completely_randomizing(d: usize) -> QuantumChannel {
    replacement(vec![d], &DensityOperator::maximally_mixed(vec![d])).expect("valid replacement")
}

/// ℱ_γ(ρ) = (1−γ)ρ + γ I_CL(ρ).
pub fn dephasing(d: usize, gamma: f64) -> Result<QuantumChannel> {
    check_gamma(gamma)?;
    let mut kraus = vec![CMat::identity(d, d) * cr((1.0 - gamma).sqrt())];
    if gamma > 0.0 {
        for j in 0..d {
            kraus.push(crate::linalg::projector(&ket(d, j)) * cr(gamma.sqrt()));
        }
    }
    Ok(QuantumChannel::new_unchecked(vec![d], vec![d], kraus))
}

/// Random channel: Stinespring isometry into `out ⊗ env` with `env = kraus_rank`.
pub fn random_channel<R: Rng + ?Sized>(
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
    kraus_rank: usize,
    rng: &mut R,
) -> QuantumChannel {
    let (din, dout) = (prod(&in_dims), prod(&out_dims));
    let r = kraus_rank.max(1).max(din.div_ceil(dout));
    let v = haar_isometry(dout * r, din, rng);
    QuantumChannel::new_unchecked(in_dims, out_dims, kraus_from_isometry(&v, dout, r))
}

/// Splits a Stinespring isometry `V: in → out ⊗ env` into Kraus operators (I ⊗ ⟨k|)V.
pub fn kraus_from_isometry(v: &CMat, dout: usize, env: usize) -> Vec<CMat> {
    let din = v.ncols();
    (0..env)
        .map(|k| CMat::from_fn(dout, din, |o, i| v[(o * env + k, i)]))
        .collect()
}

/// Parameters for [`make`].
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Identity(usize),
    Unitary(CMat),
    ClassicalIdentity(usize),
    Depolarizing { d: usize, gamma: f64 },
    Povm(Vec<CMat>),
    AmplitudeDamping(f64),
    Replacement { in_dims: Vec<usize>, sigma: DensityOperator },
    Dephasing { d: usize, gamma: f64 },
    CompletelyRandomizing(usize),
}

pub fn make(kind: &ChannelKind) -> Result<QuantumChannel> {
    match kind {
        ChannelKind::Identity(d) => Ok(identity(vec![*d])),
        ChannelKind::Unitary(u) => unitary(u.clone()),
        ChannelKind::ClassicalIdentity(d) => Ok(classical_identity(*d)),
        ChannelKind::Depolarizing { d, gamma } => depolarizing(*d, *gamma),
        ChannelKind::Povm(el) => povm(el),
        ChannelKind::AmplitudeDamping(g) => amplitude_damping(*g),
        ChannelKind::Replacement { in_dims, sigma } => replacement(in_dims.clone(), sigma),
        ChannelKind::Dephasing { d, gamma } => dephasing(*d, *gamma),
        ChannelKind::CompletelyRandomizing(d) => Ok(completely_randomizing(*d)),
    }
}

#[cfg(test)]
mod tests;
