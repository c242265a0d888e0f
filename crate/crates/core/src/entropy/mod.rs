//! Von Neumann entropy, relative entropies and the conditional entropies built from them.
//!
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{QceError, Result};
use crate::linalg::{
    cr, eigh, partial_trace, purify, shannon, CMat, DensityOperator, ZERO_EIG,
};

/// Weight of ρ outside supp(σ) above which a divergence is reported as +∞.
pub const SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    /// Tr ρ(log ρ − log σ).
    Umegaki,
    /// log min{λ : ρ ≤ λσ}.
    Dmax,
}

impl Divergence {
    pub fn name(self) -> &'static str {
        match self {
            Divergence::Umegaki => "umegaki",
            Divergence::Dmax => "dmax",
        }
    }
}

impl std::str::FromStr for Divergence {
    type Err = QceError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "umegaki" => Ok(Divergence::Umegaki),
            "dmax" => Ok(Divergence::Dmax),
            other => Err(QceError::InvalidInput(format!("unknown divergence '{other}'"))),
        }
    }
}

pub fn vn_entropy(rho: &DensityOperator) -> f64 {
    let ev: Vec<f64> = rho.eigenvalues().into_iter().map(|l| l.max(0.0)).collect();
    shannon(&ev).max(0.0)
}

fn bipartite_dims(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        d => Err(QceError::DimensionMismatch(format!("expected a bipartite state, got dims {d:?}"))),
    }
}

/// D(ρ‖σ) in bits, `f64::INFINITY` when ρ is not supported on supp(σ).
pub fn divergence(kind: Divergence, rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    divergence_mat(kind, rho.matrix(), sigma.matrix())
}

pub(crate) fn divergence_mat(kind: Divergence, rho: &CMat, sigma: &CMat) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(QceError::DimensionMismatch(format!(
            "divergence arguments have sides {} and {}",
            rho.nrows(),
            sigma.nrows()
        )));
    }
    let (mu, w) = eigh(sigma);
    let support: Vec<usize> = (0..mu.len()).filter(|&k| mu[k] > ZERO_EIG).collect();
    let leak: f64 = (0..mu.len())
        .filter(|k| !support.contains(k))
        .map(|k| (w.column(k).adjoint() * rho * w.column(k))[(0, 0)].re)
        .sum();
    if leak > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    match kind {
        Divergence::Umegaki => {
            let lam = crate::linalg::eigvals_desc(rho);
            let neg_s: f64 = lam.iter().filter(|&&l| l > ZERO_EIG).map(|&l| l * l.log2()).sum();
            let cross: f64 = support
                .iter()
                .map(|&k| {
                    let p = (w.column(k).adjoint() * rho * w.column(k))[(0, 0)].re;
                    p * mu[k].log2()
                })
                .sum();
            Ok((neg_s - cross).max(0.0))
        }
        Divergence::Dmax => {
            let n = rho.nrows();
            let mut s = CMat::zeros(n, n);
            for &k in &support {
                s += w.column(k) * w.column(k).adjoint() * cr(1.0 / mu[k].sqrt());
            }
            let m = &s * rho * &s;
            let top = crate::linalg::eigvals_desc(&crate::linalg::hermitian_part(&m))[0];
            if top <= 0.0 {
                return Err(QceError::Numerical("D_max of a zero operator".into()));
            }
            Ok(top.log2().max(0.0))
        }
    }
}

/// H↓(A|B) = log|A| − D(ρ_AB ‖ u_A ⊗ ρ_B).
pub fn cond_entropy_down(rho: &DensityOperator, kind: Divergence) -> Result<f64> {
    let (da, _) = bipartite_dims(rho)?;
    let rb = partial_trace(rho, &[1])?;
    let sigma = DensityOperator::maximally_mixed(vec![da]).kron(&rb);
    Ok((da as f64).log2() - divergence(kind, rho, &sigma)?)
}

/// S(AB) − S(B).
pub fn vn_cond_entropy(rho: &DensityOperator) -> Result<f64> {
    bipartite_dims(rho)?;
    Ok(vn_entropy(rho) - vn_entropy(&partial_trace(rho, &[1])?))
}

/// H^dual(A|B)_ρ = −H(A|C)_φ for the spectral purification φ_ABC.
pub fn dual_cond_entropy<F>(h: F, rho: &DensityOperator) -> Result<f64>
where
    F: Fn(&DensityOperator) -> Result<f64>,
{
    bipartite_dims(rho)?;
    let phi = purify(rho);
    let ac = partial_trace(&phi, &[0, 2])?;
    Ok(-h(&ac)?)
}

/// −H(A|B).
pub fn coherent_information(rho: &DensityOperator) -> Result<f64> {
    Ok(-vn_cond_entropy(rho)?)
}

/// ρ_AB ⊗ τ_A'B' regrouped as (AA')(BB').
pub fn tensor_bipartite(rho: &DensityOperator, tau: &DensityOperator) -> Result<DensityOperator> {
    let (a, b) = bipartite_dims(rho)?;
    let (a2, b2) = bipartite_dims(tau)?;
    rho.kron(tau).permute(&[0, 2, 1, 3])?.regroup(vec![a * a2, b * b2])
}
