//! Dense phase-one simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! Small problems only (a few hundred variables). Bland's rule guarantees termination.

use nalgebra::{DMatrix, DVector};

use crate::error::{QceError, Result};

const PIVOT_EPS: f64 = 1e-11;

/// Result of a phase-one solve.
#[derive(Debug, Clone)]
pub struct PhaseOne {
    /// Optimal sum of artificial variables; zero (up to rounding) iff feasible.
    pub infeasibility: f64,
    /// Best point found; satisfies the constraints when `infeasibility` is small.
    pub x: DVector<f64>,
    pub iterations: usize,
}

/// Minimises the total artificial slack for `A x = b, x ≥ 0`.
pub fn phase_one(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<PhaseOne> {
    let (rows, nv) = a.shape();
    if b.len() != rows {
        return Err(QceError::DimensionMismatch("LP right-hand side has wrong length".into()));
    }
    if a.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(QceError::InvalidInput("LP data must be finite".into()));
    }
    let cols = nv + rows + 1;
    let rhs = cols - 1;
    let mut tab = DMatrix::<f64>::zeros(rows + 1, cols);
    for i in 0..rows {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            tab[(i, j)] = s * a[(i, j)];
        }
        tab[(i, nv + i)] = 1.0;
        tab[(i, rhs)] = s * b[i];
    }
    // Objective row holds reduced costs of minimising Σ artificials.
    for j in 0..cols {
        if j >= nv && j < nv + rows {
            continue;
        }
        let s: f64 = (0..rows).map(|i| tab[(i, j)]).sum();
        tab[(rows, j)] = -s;
    }
    let mut basis: Vec<usize> = (nv..nv + rows).collect();
    let scale = 1.0 + b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let max_iter = 50 * (rows + cols) + 1000;
    let mut iterations = 0;
    loop {
        let Some(enter) = (0..nv + rows).find(|&j| tab[(rows, j)] < -PIVOT_EPS * scale) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..rows {
            let piv = tab[(i, enter)];
            if piv > PIVOT_EPS {
                let ratio = tab[(i, rhs)] / piv;
                let better = ratio < best - 1e-14
                    || (ratio <= best + 1e-14 && leave.is_some_and(|l| basis[i] < basis[l]));
                if leave.is_none() || better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Unbounded direction cannot occur in phase one (objective bounded below by 0).
            return Err(QceError::Numerical("phase-one simplex found an unbounded ray".into()));
        };
        pivot(&mut tab, r, enter);
        basis[r] = enter;
        iterations += 1;
        if iterations > max_iter {
            return Err(QceError::Numerical("simplex iteration limit reached".into()));
        }
    }
    let mut x = DVector::zeros(nv);
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            x[bv] = tab[(i, rhs)].max(0.0);
        }
    }
    Ok(PhaseOne { infeasibility: (-tab[(rows, rhs)]).max(0.0), x, iterations })
}

fn pivot(tab: &mut DMatrix<f64>, r: usize, c: usize) {
    let p = tab[(r, c)];
    let ncols = tab.ncols();
    for j in 0..ncols {
        tab[(r, j)] /= p;
    }
    for i in 0..tab.nrows() {
        if i == r {
            continue;
        }
        let f = tab[(i, c)];
        if f != 0.0 {
            for j in 0..ncols {
                let v = tab[(r, j)];
                tab[(i, j)] -= f * v;
            }
        }
    }
}

/// max |A x − b|.
pub fn residual(a: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>) -> f64 {
    (a * x - b).amax()
}
