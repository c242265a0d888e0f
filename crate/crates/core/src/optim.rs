//! Derivative-free minimisation and unitary parametrisations shared by the game optimisers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, cr, CMat};

/// Options for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NmOptions {
    pub max_evals: usize,
    /// Initial simplex edge length.
    pub step: f64,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop as soon as a value at or below this is seen.
    pub target: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { max_evals: 2000, step: 0.3, f_tol: 1e-12, target: f64::NEG_INFINITY }
    }
}

/// Result of a minimisation.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Nelder–Mead simplex minimisation with standard coefficients and one restart of the simplex
/// around the incumbent when it collapses early.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: NmOptions) -> Minimum {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    if n == 0 {
        let v = eval(x0, &mut evals);
        return Minimum { x: vec![], value: v, evals };
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut best = Minimum { x: x0.to_vec(), value: f64::INFINITY, evals: 0 };
    let mut start = x0.to_vec();
    let mut step = opts.step;
    for _round in 0..2 {
        let mut pts: Vec<Vec<f64>> = vec![start.clone()];
        for i in 0..n {
            let mut p = start.clone();
            p[i] += step;
            pts.push(p);
        }
        let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            if vals[0] < best.value {
                best.value = vals[0];
                best.x = pts[0].clone();
            }
            if vals[0] <= opts.target || evals >= opts.max_evals || (vals[n] - vals[0]).abs() <= opts.f_tol {
                break;
            }
            let mut cen = vec![0.0; n];
            for p in &pts[..n] {
                for (c, v) in cen.iter_mut().zip(p) {
                    *c += v / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> { cen.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect() };
            let xr = along(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < vals[0] {
                let xe = along(gamma);
                let fe = eval(&xe, &mut evals);
                if fe < fr {
                    pts[n] = xe;
                    vals[n] = fe;
                } else {
                    pts[n] = xr;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                pts[n] = xr;
                vals[n] = fr;
            } else {
                let (xc, fc) = if fr < vals[n] {
                    let xc = along(rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < vals[n].min(fr) {
                    pts[n] = xc;
                    vals[n] = fc;
                } else {
                    for i in 1..=n {
                        let p: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, x)| b + sigma * (x - b)).collect();
                        vals[i] = eval(&p, &mut evals);
                        pts[i] = p;
                    }
                }
            }
        }
        if best.value <= opts.target || evals >= opts.max_evals {
            break;
        }
        start = best.x.clone();
        step *= 0.2;
    }
    best.evals = evals;
    best
}

/// Number of real parameters of [`givens_unitary`] for dimension `d`.
pub fn unitary_param_count(d: usize) -> usize {
    d * d
}

/// U(x) = diag(e^{iφ}) · Π_{j<k} G_{jk}(θ, α), with U(0) = I.
///
/// The layout is `[θ_01, α_01, θ_02, α_02, …, φ_0, …, φ_{d−1}]`.
pub fn givens_unitary(d: usize, x: &[f64]) -> CMat {
    assert_eq!(x.len(), unitary_param_count(d), "wrong parameter count");
    let mut u = CMat::identity(d, d);
    let mut idx = 0;
    for j in 0..d {
        for k in j + 1..d {
            let (th, al) = (x[idx], x[idx + 1]);
            idx += 2;
            let (s, co) = th.sin_cos();
            let e = c(al.cos(), al.sin());
            // Right-multiply by the rotation acting on columns j and k.
            for r in 0..d {
                let (uj, uk) = (u[(r, j)], u[(r, k)]);
                u[(r, j)] = uj * cr(co) + uk * e * cr(s);
                u[(r, k)] = -uj * e.conj() * cr(s) + uk * cr(co);
            }
        }
    }
    for j in 0..d {
        let ph = c(x[idx + j].cos(), x[idx + j].sin());
        for col in 0..d {
            u[(j, col)] *= ph;
        }
    }
    u
}

/// Independent RNG substream for restart `index` under a base seed.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index + 1);
    r
}
