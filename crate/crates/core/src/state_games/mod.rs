//! The conditional gambling game on bipartite states.
//!
//! Bob measures B in a rank-one basis {u_z}, reports z' = f(z), the host draws a guess budget w from
//! column z' of T and Alice wins if her outcome, ordered by decreasing probability, is among the first w.
//! The reward for a fixed basis is Σ_z max_{z'} Σ_w t_{w|z'} ‖(I⊗⟨u_z|)ρ(I⊗|u_z⟩)‖_(w).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classical::HostMatrix;
use crate::cusc::embed_subsystem;
use crate::error::{QceError, Result};
use crate::games::{
    Adversary, ComparisonVerdict, GameSampler, RewardOptions, RewardReport, StateStrategy, Strategy,
    Witness, WITNESS_GAP,
};
use crate::linalg::{
    eigh, fourier, haar_unitary, partial_trace_mat, polar_factor, unitarity_deviation, CMat,
    DensityOperator,
};
use crate::optim::{givens_unitary, nelder_mead, substream, unitary_param_count, NmOptions};

/// Largest |A| for which set partitions are enumerated.
pub const MAX_ADVERSARY_DIM: usize = 5;
const ONE: f64 = 1.0 - 1e-12;

/// Host matrix plus the probability that the adversary acts.
#[derive(Debug, Clone, PartialEq)]
pub struct StateGameSpec {
    pub t: HostMatrix,
    pub p_adv: f64,
}

impl StateGameSpec {
    pub fn new(t: HostMatrix, p_adv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_adv) {
            return Err(QceError::OutOfRange(format!("adversary probability {p_adv} not in [0, 1]")));
        }
        Ok(Self { t, p_adv })
    }

    /// Number of values z' that Bob may report.
    pub fn n_zprime(&self) -> usize {
        self.t.n_z()
    }
}

/// (|A|, |B|) of a state given as `[dA, dB]` or `[dA]` (trivial Bob).
pub fn split_dims(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        [a] => Ok((*a, 1)),
        d => Err(QceError::DimensionMismatch(format!("expected a bipartite state, got dims {d:?}"))),
    }
}

struct BobEval {
    value: f64,
    f: Vec<usize>,
    /// Column z is Ω_z u_z, the ascent direction for u_z.
    grad: CMat,
}

/// Unnormalised conditional A-states M_z = (I⊗⟨u_z|)ρ(I⊗|u_z⟩).
fn conditional_states(rho: &CMat, da: usize, db: usize, u: &CMat) -> Vec<CMat> {
    let lift = CMat::identity(da, da).kronecker(u);
    let r = lift.adjoint() * rho * &lift;
    (0..db)
        .map(|z| CMat::from_fn(da, da, |a, b| r[(a * db + z, b * db + z)]))
        .collect()
}

fn kyfan_profile(vals: &[f64], n_w: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_w);
    let mut s = 0.0;
    for w in 0..n_w {
        if w < vals.len() {
            s += vals[w];
        }
        out.push(s);
    }
    out
}

fn eval_bob(rho: &CMat, da: usize, db: usize, t: &HostMatrix, u: &CMat, fixed_f: Option<&[usize]>) -> BobEval {
    let tm = t.matrix();
    let n_w = t.n_w();
    let ms = conditional_states(rho, da, db, u);
    let mut value = 0.0;
    let mut f = Vec::with_capacity(db);
    let mut grad = CMat::zeros(db, db);
    for (z, m) in ms.iter().enumerate() {
        let (vals, vecs) = eigh(m);
        let kf = kyfan_profile(&vals, n_w);
        let (best, zp) = match fixed_f {
            Some(ff) => ((0..n_w).map(|w| tm[(w, ff[z])] * kf[w]).sum(), ff[z]),
            None => t.best_column(|w| kf[w - 1]),
        };
        value += best;
        f.push(zp);
        // Q = Σ_k c_k |e_k⟩⟨e_k| with c_k = Σ_{w > k} t_{w|z'}.
        let mut q = CMat::zeros(da, da);
        let mut tail: f64 = (0..n_w).map(|w| tm[(w, zp)]).sum();
        for k in 0..da {
            if k > 0 && k - 1 < n_w {
                tail -= tm[(k - 1, zp)];
            }
            let ck = tail.max(0.0);
            if ck > 0.0 {
                let e = vecs.column(k);
                q += e * e.adjoint() * crate::linalg::cr(ck);
            }
        }
        // Ω_z[b, b'] = Σ_{a,a'} Q[a', a] ρ[(a,b), (a',b')]
        let mut omega = CMat::zeros(db, db);
        for a in 0..da {
            for a2 in 0..da {
                let qa = q[(a2, a)];
                if qa.norm() == 0.0 {
                    continue;
                }
                for b in 0..db {
                    for b2 in 0..db {
                        omega[(b, b2)] += qa * rho[(a * db + b, a2 * db + b2)];
                    }
                }
            }
        }
        grad.set_column(z, &(omega * u.column(z)));
    }
    BobEval { value, f, grad }
}

struct Ascent {
    value: f64,
    u: CMat,
    f: Vec<usize>,
}

/// Monotone minorise–maximise ascent: u_z ← polar([Ω_z u_z]_z).
fn ascend(rho: &CMat, da: usize, db: usize, t: &HostMatrix, u0: CMat, max_iters: usize) -> Ascent {
    let mut u = u0;
    let mut ev = eval_bob(rho, da, db, t, &u, None);
    for _ in 0..max_iters {
        if ev.value >= ONE {
            break;
        }
        let cand = polar_factor(&ev.grad);
        let next = eval_bob(rho, da, db, t, &cand, None);
        let gain = next.value - ev.value;
        if gain > 0.0 {
            u = cand;
            ev = next;
        }
        if gain <= 1e-14 {
            break;
        }
    }
    Ascent { value: ev.value, u, f: ev.f }
}

struct BobSearch {
    value: f64,
    strategy: StateStrategy,
    restarts_used: usize,
}

fn trivial_bob_value(rho: &CMat, t: &HostMatrix) -> (f64, usize) {
    let vals = crate::linalg::eigvals_desc(rho);
    let kf = kyfan_profile(&vals, t.n_w());
    t.best_column(|w| kf[w - 1])
}

fn maximize_bob(
    rho: &CMat,
    da: usize,
    db: usize,
    t: &HostMatrix,
    hints: &[CMat],
    restarts: usize,
    seed: u64,
    max_iters: usize,
) -> BobSearch {
    if db == 1 {
        let (v, zp) = trivial_bob_value(rho, t);
        return BobSearch {
            value: v,
            strategy: StateStrategy { bob_basis: CMat::identity(1, 1), f: vec![zp] },
            restarts_used: 0,
        };
    }
    let rb = partial_trace_mat(rho, &[da, db], &[1]).expect("bipartite dims");
    let (_, eb) = eigh(&rb);
    let mut starts: Vec<CMat> = hints.to_vec();
    starts.push(CMat::identity(db, db));
    starts.push(eb.clone());
    starts.push(fourier(db));
    starts.push(&eb * fourier(db));

    let mut best: Option<Ascent> = None;
    let mut used = 0;
    for u0 in starts {
        let a = ascend(rho, da, db, t, u0, max_iters);
        used += 1;
        if best.as_ref().is_none_or(|b| a.value > b.value) {
            best = Some(a);
        }
        if best.as_ref().is_some_and(|b| b.value >= ONE) {
            break;
        }
    }
    if best.as_ref().is_some_and(|b| b.value < ONE) && restarts > 0 {
        let runs: Vec<Ascent> = (0..restarts as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, i);
                ascend(rho, da, db, t, haar_unitary(db, &mut rng), max_iters)
            })
            .collect();
        used += runs.len();
        for a in runs {
            if best.as_ref().is_none_or(|b| a.value > b.value) {
                best = Some(a);
            }
        }
    }
    let b = best.expect("at least one start");
    BobSearch {
        value: b.value.clamp(0.0, 1.0),
        strategy: StateStrategy { bob_basis: b.u, f: b.f },
        restarts_used: used,
    }
}

fn check_basis(u: &CMat, d: usize, what: &str) -> Result<()> {
    if u.shape() != (d, d) {
        return Err(QceError::DimensionMismatch(format!("{what} must be {d}x{d}")));
    }
    let dev = unitarity_deviation(u);
    if dev > 1e-9 {
        return Err(QceError::InvalidInput(format!("{what} is not unitary (deviation {dev:.3e})")));
    }
    Ok(())
}

/// Reward for a fixed Bob basis, with Alice's measurement and the map f chosen optimally.
pub fn reward_given_bob(rho: &DensityOperator, t: &HostMatrix, bob_basis: &CMat) -> Result<f64> {
    let (da, db) = split_dims(rho)?;
    check_basis(bob_basis, db, "Bob's basis")?;
    Ok(eval_bob(rho.matrix(), da, db, t, bob_basis, None).value.clamp(0.0, 1.0))
}

/// Reward of a complete strategy (basis and response map) without the adversary.
pub fn strategy_value(rho: &DensityOperator, t: &HostMatrix, strategy: &StateStrategy) -> Result<f64> {
    let (da, db) = split_dims(rho)?;
    check_basis(&strategy.bob_basis, db, "Bob's basis")?;
    if strategy.f.len() != db || strategy.f.iter().any(|&z| z >= t.n_z()) {
        return Err(QceError::InvalidInput("response map does not fit the host matrix".into()));
    }
    Ok(eval_bob(rho.matrix(), da, db, t, &strategy.bob_basis, Some(&strategy.f)).value.clamp(0.0, 1.0))
}

/// R(𝒯, 0): the reward maximised over Bob's rank-one measurements.
pub fn reward_noadv(rho: &DensityOperator, t: &HostMatrix, opts: &RewardOptions) -> Result<RewardReport> {
    let (da, db) = split_dims(rho)?;
    let s = maximize_bob(rho.matrix(), da, db, t, &[], opts.restarts, opts.seed, opts.max_iters);
    Ok(RewardReport {
        value: s.value,
        strategy: Strategy::State(s.strategy),
        adversary: None,
        restarts_used: s.restarts_used,
        certified: db > 1,
    })
}

/// All set partitions of {0, …, n−1}, the single-block partition first.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(1, n, &mut vec![vec![0]], &mut out);
    }
    out
}

fn check_partition(partition: &[Vec<usize>], d: usize) -> Result<()> {
    let mut seen = vec![false; d];
    for block in partition {
        if block.is_empty() {
            return Err(QceError::InvalidInput("partition has an empty block".into()));
        }
        for &i in block {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(QceError::InvalidInput(format!("invalid partition {partition:?}")));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(QceError::InvalidInput(format!("partition {partition:?} does not cover 0..{d}")));
    }
    Ok(())
}

fn scramble_mat(rho: &CMat, da: usize, db: usize, basis: &CMat, partition: &[Vec<usize>]) -> CMat {
    let mut out = CMat::zeros(da * db, da * db);
    for block in partition {
        let mut p = CMat::zeros(da, da);
        for &i in block {
            p += basis.column(i) * basis.column(i).adjoint();
        }
        let big = p.kronecker(&CMat::identity(db, db));
        out += &big * rho * &big;
    }
    out
}

/// Σ_j Π_j ρ Π_j with Π_j = Σ_{i∈S_j} |v_i⟩⟨v_i| ⊗ I_B.
pub fn scramble(rho: &DensityOperator, basis: &CMat, partition: &[Vec<usize>]) -> Result<DensityOperator> {
    let (da, db) = split_dims(rho)?;
    check_basis(basis, da, "adversary basis")?;
    check_partition(partition, da)?;
    DensityOperator::with_tol(rho.dims().to_vec(), scramble_mat(rho.matrix(), da, db, basis, partition), 1e-8)
}

struct AdvResult {
    value: f64,
    adversary: Adversary,
    inner: BobSearch,
}

fn adversary_search(rho: &CMat, da: usize, db: usize, t: &HostMatrix, opts: &RewardOptions, noadv: &BobSearch) -> AdvResult {
    let partitions = set_partitions(da);
    let trivial = Adversary { basis: CMat::identity(da, da), partition: partitions[0].clone() };
    let inner_iters = opts.max_iters.min(100);
    // Minimum over nontrivial partitions of a cheap inner maximisation.
    let h = |v: &CMat| -> (f64, usize) {
        let mut best = (noadv.value, 0);
        for (pi, part) in partitions.iter().enumerate().skip(1) {
            let s = scramble_mat(rho, da, db, v, part);
            let hint = [v.conjugate()];
            let val = maximize_bob(&s, da, db, t, &hint, 1, opts.seed ^ 0x5eed, inner_iters).value;
            if val < best.0 - 1e-15 {
                best = (val, pi);
            }
        }
        best
    };

    let ra = partial_trace_mat(rho, &[da, db], &[0]).expect("bipartite dims");
    let (_, ea) = eigh(&ra);
    let mut bases = vec![CMat::identity(da, da), fourier(da), ea.clone(), &ea * fourier(da)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xad5e);
    for _ in 0..(opts.restarts / 8).max(2) {
        bases.push(haar_unitary(da, &mut rng));
    }
    let n = unitary_param_count(da);
    let nm = NmOptions { max_evals: 40 * n + 40, step: 0.4, f_tol: 1e-10, target: f64::NEG_INFINITY };
    let mut best: (f64, CMat, usize) = (noadv.value, CMat::identity(da, da), 0);
    for base in &bases {
        let (v0, p0) = h(base);
        if v0 < best.0 - 1e-15 {
            best = (v0, base.clone(), p0);
        }
        let m = nelder_mead(|x| h(&(base * givens_unitary(da, x))).0, &vec![0.0; n], nm);
        if m.value < best.0 - 1e-15 {
            let v = base * givens_unitary(da, &m.x);
            let (val, pi) = h(&v);
            best = (val, v, pi);
        }
    }
    if best.2 == 0 {
        return AdvResult { value: noadv.value, adversary: trivial, inner: clone_search(noadv) };
    }
    let (_, v, pi) = best;
    let s = scramble_mat(rho, da, db, &v, &partitions[pi]);
    let inner = maximize_bob(&s, da, db, t, &[v.conjugate()], opts.restarts, opts.seed, opts.max_iters);
    if inner.value >= noadv.value {
        return AdvResult { value: noadv.value, adversary: trivial, inner: clone_search(noadv) };
    }
    AdvResult { value: inner.value, adversary: Adversary { basis: v, partition: partitions[pi].clone() }, inner }
}

fn clone_search(s: &BobSearch) -> BobSearch {
    BobSearch { value: s.value, strategy: s.strategy.clone(), restarts_used: s.restarts_used }
}

fn check_adv_dim(da: usize) -> Result<()> {
    if da > MAX_ADVERSARY_DIM {
        return Err(QceError::OutOfRange(format!(
            "adversary search enumerates partitions only for |A| ≤ {MAX_ADVERSARY_DIM}, got {da}"
        )));
    }
    Ok(())
}

/// R(𝒯, 1): minimum over projective scrambles of the optimised reward.
pub fn reward_adv(rho: &DensityOperator, t: &HostMatrix, opts: &RewardOptions) -> Result<RewardReport> {
    let (da, db) = split_dims(rho)?;
    check_adv_dim(da)?;
    let noadv = maximize_bob(rho.matrix(), da, db, t, &[], opts.restarts, opts.seed, opts.max_iters);
    let adv = adversary_search(rho.matrix(), da, db, t, opts, &noadv);
    Ok(RewardReport {
        value: adv.value,
        strategy: Strategy::State(adv.inner.strategy),
        adversary: Some(adv.adversary),
        restarts_used: noadv.restarts_used + adv.inner.restarts_used,
        certified: true,
    })
}

/// R(𝒯, p) = p·R(𝒯, 1) + (1−p)·R(𝒯, 0).
pub fn reward(rho: &DensityOperator, game: &StateGameSpec, opts: &RewardOptions) -> Result<RewardReport> {
    let (da, db) = split_dims(rho)?;
    let p = game.p_adv;
    let noadv = maximize_bob(rho.matrix(), da, db, &game.t, &[], opts.restarts, opts.seed, opts.max_iters);
    if p == 0.0 {
        return Ok(RewardReport {
            value: noadv.value,
            strategy: Strategy::State(noadv.strategy),
            adversary: None,
            restarts_used: noadv.restarts_used,
            certified: db > 1,
        });
    }
    check_adv_dim(da)?;
    let adv = adversary_search(rho.matrix(), da, db, &game.t, opts, &noadv);
    let value = (p * adv.value + (1.0 - p) * noadv.value).clamp(0.0, 1.0);
    let strategy = if p == 1.0 { adv.inner.strategy } else { noadv.strategy };
    Ok(RewardReport {
        value,
        strategy: Strategy::State(strategy),
        adversary: Some(adv.adversary),
        restarts_used: noadv.restarts_used + adv.inner.restarts_used,
        certified: true,
    })
}

/// Tests σ ≾ ρ on sampled games: fixed-budget games with p ∈ {0, 1} first, then random host matrices.
pub fn compare_states(rho: &DensityOperator, sigma: &DensityOperator, sampler: GameSampler) -> Result<ComparisonVerdict<StateGameSpec>> {
    compare_states_with(rho, sigma, sampler, &RewardOptions::default())
}

pub fn compare_states_with(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    sampler: GameSampler,
    opts: &RewardOptions,
) -> Result<ComparisonVerdict<StateGameSpec>> {
    let (da_r, db_r) = split_dims(rho)?;
    let (da_s, db_s) = split_dims(sigma)?;
    let da = da_r.max(da_s);
    let pad = |s: &DensityOperator, d: usize| -> Result<DensityOperator> {
        let s = if s.dims().len() == 1 { s.regroup(vec![d, 1])? } else { s.clone() };
        if d < da { embed_subsystem(&s, 0, da) } else { Ok(s) }
    };
    let rho = pad(rho, da_r)?;
    let sigma = pad(sigma, da_s)?;
    let n_z = db_r.max(db_s);
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for k in 0..sampler.n_games {
        let p_adv = (k % 2) as f64;
        if p_adv > 0.0 && da > MAX_ADVERSARY_DIM {
            continue;
        }
        let t = if k < 2 * da {
            HostMatrix::deterministic(k / 2 + 1, da, n_z)?
        } else {
            HostMatrix::random(da, n_z, &mut rng)
        };
        let game = StateGameSpec::new(t, p_adv)?;
        let mut rs = reward(&sigma, &game, opts)?.value;
        let rr = reward(&rho, &game, opts)?.value;
        if rs > rr + WITNESS_GAP {
            // Confirm with a stronger search on ρ, and on σ when the adversary term can still drop.
            let strong = RewardOptions { restarts: opts.restarts * 4, seed: opts.seed.wrapping_add(1), ..opts.clone() };
            let rr = rr.max(reward(&rho, &game, &strong)?.value);
            if p_adv > 0.0 {
                rs = rs.min(reward(&sigma, &game, &strong)?.value);
            }
            if rs > rr + WITNESS_GAP {
                return Ok(ComparisonVerdict {
                    consistent: false,
                    witness: Some(Witness { game, upper: rr, lower: rs }),
                    games_evaluated: k + 1,
                });
            }
        }
    }
    Ok(ComparisonVerdict { consistent: true, witness: None, games_evaluated: sampler.n_games })
}
