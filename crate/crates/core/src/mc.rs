//! Monte Carlo simulation of single game rounds.
//!
//! Round r draws exactly five uniforms from a ChaCha8 stream positioned at word 10·r, so totals do not
//! depend on how rounds are sharded across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel_games::ChannelGameSpec;
use crate::channels::{compose, QuantumChannel};
use crate::error::{QceError, Result};
use crate::games::{Adversary, StateStrategy};
use crate::linalg::{eigh, eigvals_desc, CMat, DensityOperator};
use crate::state_games::{scramble, split_dims, StateGameSpec};

const WORDS_PER_ROUND: u128 = 10;
const SHARD: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub wins: u64,
    pub rounds: u64,
    pub win_rate: f64,
    pub std_err: f64,
    pub seed: u64,
}

impl SimResult {
    fn new(wins: u64, rounds: u64, seed: u64) -> Self {
        let r = wins as f64 / rounds as f64;
        Self { wins, rounds, win_rate: r, std_err: (r * (1.0 - r) / rounds as f64).sqrt(), seed }
    }

    /// |win_rate − value| ≤ k·std_err, with a floor for rates of exactly 0 or 1.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.win_rate - value).abs() <= (k * self.std_err).max(1.0 / self.rounds as f64)
    }
}

/// Index i with cumulative mass first exceeding u; falls back to the last positive entry.
fn pick(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u * total < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn run_rounds(rounds: u64, seed: u64, round: impl Fn([f64; 5]) -> bool + Sync) -> SimResult {
    let shards = rounds.div_ceil(SHARD);
    let wins: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = s * SHARD;
            let end = (start + SHARD).min(rounds);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(start as u128 * WORDS_PER_ROUND);
            let mut w = 0;
            for _ in start..end {
                let u: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
                w += round(u) as u64;
            }
            w
        })
        .sum();
    SimResult::new(wins, rounds, seed)
}

fn check_rounds(rounds: u64) -> Result<()> {
    if rounds == 0 {
        return Err(QceError::InvalidInput("rounds must be at least 1".into()));
    }
    Ok(())
}

/// Per Bob outcome z: P(z) and Alice's outcome distribution in the measurement basis `basis_of[z]`.
struct Branch {
    pz: Vec<f64>,
    alice: Vec<Vec<f64>>,
}

fn conditional(rho: &CMat, da: usize, db: usize, u: &CMat) -> Vec<CMat> {
    let lift = CMat::identity(da, da).kronecker(u);
    let r = lift.adjoint() * rho * &lift;
    (0..db).map(|z| CMat::from_fn(da, da, |a, b| r[(a * db + z, b * db + z)])).collect()
}

fn branch(state: &CMat, da: usize, db: usize, u: &CMat, bases: &[CMat]) -> Branch {
    let ms = conditional(state, da, db, u);
    let pz = ms.iter().map(|m| m.trace().re.max(0.0)).collect();
    let alice = ms
        .iter()
        .zip(bases)
        .map(|(m, e)| (0..da).map(|y| (e.column(y).adjoint() * m * e.column(y))[(0, 0)].re.max(0.0)).collect())
        .collect();
    Branch { pz, alice }
}

/// Plays the state game with a fixed strategy. When the adversary acts it measures {Π_j} and the state
/// collapses; Bob and Alice do not learn j, so Alice measures in the descending eigenbasis of the
/// z-conditioned post-adversary average state.
pub fn simulate_state_game(
    rho: &DensityOperator,
    game: &StateGameSpec,
    strategy: &StateStrategy,
    adversary: Option<&Adversary>,
    rounds: u64,
    seed: u64,
) -> Result<SimResult> {
    check_rounds(rounds)?;
    let (da, db) = split_dims(rho)?;
    let u = &strategy.bob_basis;
    crate::state_games::strategy_value(rho, &game.t, strategy)?;
    let alice_bases = |state: &CMat| -> Vec<CMat> { conditional(state, da, db, u).iter().map(|m| eigh(m).1).collect() };

    let plain = branch(rho.matrix(), da, db, u, &alice_bases(rho.matrix()));
    let (pj, adv_branches) = match adversary {
        Some(adv) if game.p_adv > 0.0 => {
            let mixed = scramble(rho, &adv.basis, &adv.partition)?;
            let bases = alice_bases(mixed.matrix());
            let mut pj = Vec::new();
            let mut bs = Vec::new();
            for block in &adv.partition {
                let mut p = CMat::zeros(da, da);
                for &i in block {
                    p += adv.basis.column(i) * adv.basis.column(i).adjoint();
                }
                let big = p.kronecker(&CMat::identity(db, db));
                let post = &big * rho.matrix() * &big;
                let q = post.trace().re.max(0.0);
                pj.push(q);
                bs.push(branch(&(post / crate::linalg::cr(q.max(f64::MIN_POSITIVE))), da, db, u, &bases));
            }
            (pj, bs)
        }
        _ => (Vec::new(), Vec::new()),
    };
    let tm = game.t.matrix();
    let cols: Vec<Vec<f64>> = (0..tm.ncols()).map(|z| tm.column(z).iter().copied().collect()).collect();
    let p_adv = if adv_branches.is_empty() { 0.0 } else { game.p_adv };

    Ok(run_rounds(rounds, seed, |u| {
        let br = if u[0] < p_adv { &adv_branches[pick(&pj, u[1])] } else { &plain };
        let z = pick(&br.pz, u[2]);
        let w = pick(&cols[strategy.f[z]], u[3]) + 1;
        let y = pick(&br.alice[z], u[4]) + 1;
        y <= w
    }))
}

/// Plays the channel game with fixed preprocessing `e`.
pub fn simulate_channel_game(
    n: &QuantumChannel,
    e: &QuantumChannel,
    game: &ChannelGameSpec,
    rounds: u64,
    seed: u64,
) -> Result<SimResult> {
    check_rounds(rounds)?;
    crate::channel_games::channel_reward_fixed(n, e, game)?;
    let (_, db) = game.dims();
    let composite = compose(n, e)?;
    let ks: Vec<CMat> = composite.kraus().iter().map(|k| k.kronecker(&CMat::identity(db, db))).collect();
    let px: Vec<f64> = game.entries().iter().map(|e| e.0).collect();
    let spectra: Vec<Vec<f64>> = game
        .entries()
        .iter()
        .map(|(_, rho)| {
            let mut y = CMat::zeros(ks[0].nrows(), ks[0].nrows());
            for k in &ks {
                y += k * rho.matrix() * k.adjoint();
            }
            eigvals_desc(&y).into_iter().map(|l| l.max(0.0)).collect()
        })
        .collect();
    Ok(run_rounds(rounds, seed, |u| {
        let x = pick(&px, u[0]);
        let y = pick(&spectra[x], u[1]);
        y <= x
    }))
}
