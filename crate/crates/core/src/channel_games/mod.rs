//! The gambling game on channels.
//!
//! A game is a list of (p_x, ρ⁽ˣ⁾) on A⊗B. The player preprocesses A with ℰ, the channel 𝒩 acts and the
//! player wins round x with probability ‖(𝒩∘ℰ⊗id_B)(ρ⁽ˣ⁾)‖_(x). The reward is the average over x.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{self, check_pmf, compose, kraus_from_isometry, mixture, QuantumChannel};
use crate::error::{QceError, Result};
use crate::games::{ComparisonVerdict, GameSampler, RewardOptions, RewardReport, Strategy, Witness, WITNESS_GAP};
use crate::linalg::{
    cr, eigh, fourier, haar_isometry, haar_state, ket, kyfan_sorted, max_abs_diff, polar_factor, projector,
    random_density, random_pmf, CMat, CVec, DensityOperator,
};
use crate::optim::substream;

const ONE: f64 = 1.0 - 1e-12;

/// Weighted list of bipartite states indexed by the host's budget x = 1, 2, ….
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGameSpec {
    entries: Vec<(f64, DensityOperator)>,
}

impl ChannelGameSpec {
    /// Entry k carries budget x = k + 1. Single-system states are read as having a trivial B.
    pub fn new(entries: Vec<(f64, DensityOperator)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(QceError::InvalidInput("channel game has no entries".into()));
        }
        let ps: Vec<f64> = entries.iter().map(|e| e.0).collect();
        check_pmf(&ps)?;
        let mut out = Vec::with_capacity(entries.len());
        for (p, rho) in entries {
            let rho = match rho.dims().len() {
                1 => rho.regroup(vec![rho.dim(), 1])?,
                2 => rho,
                _ => return Err(QceError::DimensionMismatch(format!("game state dims {:?} are not bipartite", rho.dims()))),
            };
            out.push((p, rho));
        }
        if out.iter().any(|e| e.1.dims() != out[0].1.dims()) {
            return Err(QceError::DimensionMismatch("game states must share dims".into()));
        }
        Ok(Self { entries: out })
    }

    /// The same state at every budget with weights `p`.
    pub fn uniform_state(rho: &DensityOperator, p: &[f64]) -> Result<Self> {
        Self::new(p.iter().map(|&px| (px, rho.clone())).collect())
    }

    pub fn entries(&self) -> &[(f64, DensityOperator)] {
        &self.entries
    }

    /// (|A|, |B|).
    pub fn dims(&self) -> (usize, usize) {
        let d = self.entries[0].1.dims();
        (d[0], d[1])
    }

    pub fn n_x(&self) -> usize {
        self.entries.len()
    }
}

fn check_chain(n: &QuantumChannel, e: &QuantumChannel, da: usize) -> Result<()> {
    if e.in_dim() != da {
        return Err(QceError::DimensionMismatch(format!("preprocessing expects |A| = {}, game has {da}", e.in_dim())));
    }
    if e.out_dim() != n.in_dim() {
        return Err(QceError::DimensionMismatch(format!(
            "preprocessing outputs dimension {}, channel expects {}",
            e.out_dim(),
            n.in_dim()
        )));
    }
    Ok(())
}

fn lift(kraus: &[CMat], db: usize) -> Vec<CMat> {
    let id = CMat::identity(db, db);
    kraus.iter().map(|k| k.kronecker(&id)).collect()
}

fn apply_lifted(kraus: &[CMat], rho: &CMat) -> CMat {
    let mut out = CMat::zeros(kraus[0].nrows(), kraus[0].nrows());
    for k in kraus {
        out += k * rho * k.adjoint();
    }
    out
}

fn adjoint_lifted(kraus: &[CMat], y: &CMat) -> CMat {
    let mut out = CMat::zeros(kraus[0].ncols(), kraus[0].ncols());
    for k in kraus {
        out += k.adjoint() * y * k;
    }
    out
}

/// Top-x eigenprojector together with the Ky-Fan x-norm.
fn top_projector(y: &CMat, x: usize) -> (f64, CMat) {
    let (vals, vecs) = eigh(y);
    let x = x.min(vals.len());
    let v = vecs.columns(0, x);
    (kyfan_sorted(&vals, x), v * v.adjoint())
}

/// Σ_x p_x ‖(𝒩∘ℰ⊗id_B)(ρ⁽ˣ⁾)‖_(x), x clipped at the output dimension.
pub fn channel_reward_fixed(n: &QuantumChannel, e: &QuantumChannel, game: &ChannelGameSpec) -> Result<f64> {
    let (da, db) = game.dims();
    check_chain(n, e, da)?;
    let composite = compose(n, e)?;
    let ks = lift(composite.kraus(), db);
    let mut v = 0.0;
    for (x, (p, rho)) in game.entries.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let y = apply_lifted(&ks, rho.matrix());
        v += p * kyfan_sorted(&crate::linalg::eigvals_desc(&y), x + 1);
    }
    Ok(v.clamp(0.0, 1.0))
}

struct Problem<'a> {
    game: &'a ChannelGameSpec,
    n_lift: Vec<CMat>,
    da: usize,
    db: usize,
    dc: usize,
    env: usize,
}

impl Problem<'_> {
    /// Value and ascent direction G_V for the isometry V: A → C⊗Env.
    fn eval(&self, v: &CMat) -> (f64, CMat) {
        let (da, db, dc, env) = (self.da, self.db, self.dc, self.env);
        let e_lift = lift(&kraus_from_isometry(v, dc, env), db);
        let mut value = 0.0;
        let mut g = CMat::zeros(dc * env, da);
        for (x, (p, rho)) in self.game.entries.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            let rho = rho.matrix();
            let tau = apply_lifted(&e_lift, rho);
            let y = apply_lifted(&self.n_lift, &tau);
            let (kf, proj) = top_projector(&y, x + 1);
            value += p * kf;
            let z = adjoint_lifted(&self.n_lift, &proj);
            let zr: Vec<CMat> = e_lift.iter().map(|ek| &z * ek * rho).collect();
            for (k, m) in zr.iter().enumerate() {
                for c in 0..dc {
                    for a in 0..da {
                        let mut s = cr(0.0);
                        for b in 0..db {
                            s += m[(c * db + b, a * db + b)];
                        }
                        g[(c * env + k, a)] += s * cr(*p);
                    }
                }
            }
        }
        (value, g)
    }

    fn ascend(&self, v0: CMat, max_iters: usize) -> (f64, CMat) {
        let mut v = v0;
        let (mut val, mut g) = self.eval(&v);
        for _ in 0..max_iters {
            if val >= ONE {
                break;
            }
            let cand = polar_factor(&g);
            let (nv, ng) = self.eval(&cand);
            let gain = nv - val;
            if gain > 0.0 {
                v = cand;
                val = nv;
                g = ng;
            }
            if gain <= 1e-14 {
                break;
            }
        }
        (val, v)
    }

    fn channel(&self, v: &CMat) -> QuantumChannel {
        QuantumChannel::new_unchecked(vec![self.da], vec![self.dc], kraus_from_isometry(v, self.dc, self.env))
    }

    /// Stinespring isometry of `e`, if its Kraus rank fits the environment.
    fn isometry_of(&self, e: &QuantumChannel) -> Option<CMat> {
        let mut ks = e.kraus().to_vec();
        if ks.len() > self.env {
            ks = e.compressed().kraus().to_vec();
        }
        if ks.len() > self.env {
            return None;
        }
        let mut v = CMat::zeros(self.dc * self.env, self.da);
        for (k, op) in ks.iter().enumerate() {
            for c in 0..self.dc {
                for a in 0..self.da {
                    v[(c * self.env + k, a)] = op[(c, a)];
                }
            }
        }
        Some(v)
    }
}

/// Replacement channel onto the pure state ψ.
fn pure_replacement(din: usize, psi: &CVec) -> QuantumChannel {
    let kraus = (0..din).map(|a| psi * ket(din, a).adjoint()).collect();
    QuantumChannel::new_unchecked(vec![din], vec![psi.len()], kraus)
}

/// Measure A in `basis` and prepare |a mod dc⟩.
fn measure_prepare(basis: &CMat, dc: usize) -> QuantumChannel {
    let da = basis.nrows();
    let kraus = (0..da).map(|a| ket(dc, a % dc) * basis.column(a).adjoint()).collect();
    QuantumChannel::new_unchecked(vec![da], vec![dc], kraus)
}

/// Embedding of A into C, folding the surplus of A into the Kraus index when |A| > |C|.
fn fold_identity(da: usize, dc: usize) -> QuantumChannel {
    let blocks = da.div_ceil(dc);
    let kraus = (0..blocks)
        .map(|k| {
            let mut m = CMat::zeros(dc, da);
            for a in (k * dc)..((k + 1) * dc).min(da) {
                m[(a - k * dc, a)] = cr(1.0);
            }
            m
        })
        .collect();
    QuantumChannel::new_unchecked(vec![da], vec![dc], kraus)
}

fn structured_candidates(n: &QuantumChannel, da: usize, opts: &RewardOptions) -> Vec<QuantumChannel> {
    let dc = n.in_dim();
    let mut out = vec![fold_identity(da, dc)];
    let f = fourier(dc);
    for j in 0..dc {
        out.push(pure_replacement(da, &ket(dc, j)));
        out.push(pure_replacement(da, &f.column(j).into_owned()));
    }
    out.push(pure_replacement(da, &purity_maximizer(n, opts).1));
    out.push(measure_prepare(&CMat::identity(da, da), dc));
    out.push(measure_prepare(&fourier(da), dc));
    out.extend(opts.extra_candidates.iter().filter(|e| e.in_dim() == da && e.out_dim() == dc).cloned());
    out
}

fn identical_states(game: &ChannelGameSpec) -> bool {
    let first = game.entries[0].1.matrix();
    game.entries.iter().all(|(_, r)| max_abs_diff(r.matrix(), first) < 1e-12)
}

/// Trivial B with one state for all x: ℰ can prepare any state on C, and pure states suffice.
fn reward_pure_inputs(n: &QuantumChannel, game: &ChannelGameSpec, opts: &RewardOptions) -> RewardReport {
    let (da, _) = game.dims();
    let dc = n.in_dim();
    let weights: Vec<(usize, f64)> = game.entries.iter().enumerate().map(|(x, e)| (x + 1, e.0)).collect();
    let eval = |psi: &CVec| -> (f64, CMat) {
        let y = n.apply_mat(&projector(psi));
        let mut h = CMat::zeros(dc, dc);
        let mut v = 0.0;
        for &(x, p) in &weights {
            if p == 0.0 {
                continue;
            }
            let (kf, proj) = top_projector(&y, x);
            v += p * kf;
            h += n.adjoint_apply_mat(&proj) * cr(p);
        }
        (v, h)
    };
    let ascend = |psi0: CVec| -> (f64, CVec) {
        let mut psi = psi0;
        let (mut val, mut h) = eval(&psi);
        for _ in 0..opts.max_iters {
            if val >= ONE {
                break;
            }
            let (_, vecs) = eigh(&h);
            let cand = vecs.column(0).into_owned();
            let (nv, nh) = eval(&cand);
            let gain = nv - val;
            if gain > 0.0 {
                psi = cand;
                val = nv;
                h = nh;
            }
            if gain <= 1e-14 {
                break;
            }
        }
        (val, psi)
    };

    let f = fourier(dc);
    let mut starts: Vec<CVec> = (0..dc).map(|j| ket(dc, j)).collect();
    starts.extend((0..dc).map(|j| f.column(j).into_owned()));
    starts.push(purity_maximizer(n, opts).1);
    let mut best: (f64, QuantumChannel) = (-1.0, fold_identity(da, dc));
    let mut used = 0;
    for s in starts {
        let (v, psi) = ascend(s);
        used += 1;
        if v > best.0 {
            best = (v, pure_replacement(da, &psi));
        }
    }
    for e in opts.extra_candidates.iter().filter(|e| e.in_dim() == da && e.out_dim() == dc) {
        if let Ok(v) = channel_reward_fixed(n, e, game) {
            if v > best.0 {
                best = (v, e.clone());
            }
        }
    }
    if best.0 < ONE && opts.restarts > 0 {
        let runs: Vec<(f64, CVec)> = (0..opts.restarts as u64)
            .into_par_iter()
            .map(|i| ascend(haar_state(dc, &mut substream(opts.seed, i))))
            .collect();
        used += runs.len();
        for (v, psi) in runs {
            if v > best.0 {
                best = (v, pure_replacement(da, &psi));
            }
        }
    }
    RewardReport {
        value: best.0.clamp(0.0, 1.0),
        strategy: Strategy::Preprocessing(best.1),
        adversary: None,
        restarts_used: used,
        certified: true,
    }
}

/// max_ℰ Σ_x p_x ‖(𝒩∘ℰ⊗id_B)(ρ⁽ˣ⁾)‖_(x) over preprocessing channels A → C.
pub fn channel_reward(n: &QuantumChannel, game: &ChannelGameSpec, opts: &RewardOptions) -> Result<RewardReport> {
    let (da, db) = game.dims();
    if db == 1 && identical_states(game) {
        return Ok(reward_pure_inputs(n, game, opts));
    }
    let dc = n.in_dim();
    let env = opts.kraus_rank.unwrap_or(da * da).max(da.div_ceil(dc));
    let prob = Problem { game, n_lift: lift(n.kraus(), db), da, db, dc, env };

    let mut best: (f64, QuantumChannel) = (-1.0, fold_identity(da, dc));
    let mut used = 0;
    for cand in structured_candidates(n, da, opts) {
        let fixed = channel_reward_fixed(n, &cand, game)?;
        if fixed > best.0 {
            best = (fixed, cand.clone());
        }
        if best.0 >= ONE {
            break;
        }
        if let Some(v0) = prob.isometry_of(&cand) {
            let (v, iso) = prob.ascend(v0, opts.max_iters);
            used += 1;
            if v > best.0 {
                best = (v, prob.channel(&iso));
            }
        }
    }
    if best.0 < ONE && opts.restarts > 0 {
        let runs: Vec<(f64, CMat)> = (0..opts.restarts as u64)
            .into_par_iter()
            .map(|i| prob.ascend(haar_isometry(dc * env, da, &mut substream(opts.seed, i)), opts.max_iters))
            .collect();
        used += runs.len();
        for (v, iso) in runs {
            if v > best.0 {
                best = (v, prob.channel(&iso));
            }
        }
    }
    Ok(RewardReport {
        value: best.0.clamp(0.0, 1.0),
        strategy: Strategy::Preprocessing(best.1),
        adversary: None,
        restarts_used: used,
        certified: true,
    })
}

/// Rows of the noisy-channel table, all on a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Unitary,
    ClassicalIdentity,
    Depolarizing,
    Measurement,
    AmplitudeDamping,
    Replacement,
    Dephasing,
}

/// Spectrum of the σ used by the replacement row.
pub const TABLE_SIGMA: [f64; 2] = [0.7, 0.3];

impl TableKind {
    pub const ALL: [TableKind; 7] = [
        TableKind::Unitary,
        TableKind::ClassicalIdentity,
        TableKind::Depolarizing,
        TableKind::Measurement,
        TableKind::AmplitudeDamping,
        TableKind::Replacement,
        TableKind::Dephasing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Unitary => "U",
            TableKind::ClassicalIdentity => "I_CL",
            TableKind::Depolarizing => "D_gamma",
            TableKind::Measurement => "N_Pi",
            TableKind::AmplitudeDamping => "A_gamma",
            TableKind::Replacement => "R_sigma",
            TableKind::Dephasing => "F_gamma",
        }
    }

    /// The amplitude-damping entry for the entangled game has a conflicting closed form in the literature;
    /// the value used here is 1 − p₁γ/2.
    pub fn erratum_suspect(self, game: TableGame) -> bool {
        self == TableKind::AmplitudeDamping && game == TableGame::Bell
    }

    pub fn channel(self, gamma: f64) -> Result<QuantumChannel> {
        check_gamma(gamma)?;
        match self {
            TableKind::Unitary => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                channels::unitary(CMat::from_row_slice(2, 2, &[cr(s), cr(s), cr(s), cr(-s)]))
            }
            TableKind::ClassicalIdentity => Ok(channels::classical_identity(2)),
            TableKind::Depolarizing => channels::depolarizing(2, gamma),
            TableKind::Measurement => channels::povm(&[projector(&ket(2, 0)), projector(&ket(2, 1))]),
            TableKind::AmplitudeDamping => channels::amplitude_damping(gamma),
            TableKind::Replacement => channels::replacement(vec![2], &table_sigma()),
            TableKind::Dephasing => channels::dephasing(2, gamma),
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = QceError;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QceError::InvalidInput(format!("unknown table channel '{s}'")))
    }
}

/// The two table games: φ⁺ on every round, or |0⟩⟨0| with a trivial B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableGame {
    Bell,
    Zero,
}

impl TableGame {
    pub fn spec(self, p: &[f64]) -> Result<ChannelGameSpec> {
        let p = table_pmf(p)?;
        let rho = match self {
            TableGame::Bell => DensityOperator::phi_plus(2),
            TableGame::Zero => DensityOperator::basis_state(vec![2, 1], 0),
        };
        ChannelGameSpec::uniform_state(&rho, &p)
    }
}

fn table_sigma() -> DensityOperator {
    DensityOperator::new_unchecked(
        vec![2],
        CMat::from_diagonal(&CVec::from_vec(TABLE_SIGMA.iter().map(|&s| cr(s)).collect())),
    )
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(QceError::OutOfRange(format!("noise parameter {gamma} not in [0, 1]")));
    }
    Ok(())
}

/// Validates a table PMF and pads it with zeros to four budgets.
pub fn table_pmf(p: &[f64]) -> Result<Vec<f64>> {
    if p.is_empty() || p.len() > 4 {
        return Err(QceError::InvalidInput(format!("table PMF must have 1 to 4 entries, got {}", p.len())));
    }
    check_pmf(p)?;
    let mut out = p.to_vec();
    out.resize(4, 0.0);
    Ok(out)
}

/// Closed-form table value.
pub fn analytic_reward(kind: TableKind, gamma: f64, game: TableGame, p: &[f64]) -> Result<f64> {
    check_gamma(gamma)?;
    let p = table_pmf(p)?;
    let p1 = p[0];
    let kf_sum = |spec: &[f64]| -> f64 { p.iter().enumerate().map(|(x, px)| px * kyfan_sorted(spec, x + 1)).sum() };
    let v = match (kind, game) {
        (TableKind::Unitary, _) => 1.0,
        (TableKind::ClassicalIdentity | TableKind::Measurement, TableGame::Bell) => 1.0 - p1 / 2.0,
        (TableKind::Depolarizing, TableGame::Bell) => {
            let mean_x: f64 = p.iter().enumerate().map(|(x, px)| (x + 1) as f64 * px).sum();
            (1.0 - gamma) + gamma * mean_x / 4.0
        }
        (TableKind::Depolarizing, TableGame::Zero) => 1.0 - gamma * p1 / 2.0,
        (TableKind::AmplitudeDamping | TableKind::Dephasing, TableGame::Bell) => 1.0 - gamma * p1 / 2.0,
        (TableKind::Replacement, TableGame::Bell) => {
            let [a, b] = TABLE_SIGMA;
            kf_sum(&[a / 2.0, a / 2.0, b / 2.0, b / 2.0])
        }
        (TableKind::Replacement, TableGame::Zero) => kf_sum(&TABLE_SIGMA),
        (_, TableGame::Zero) => 1.0,
    };
    Ok(v)
}

/// ℳ = Σ_z p_z 𝒱_z∘𝒩∘ℰ_z for isometries V_z on the output and preprocessings ℰ_z on the input.
pub fn degrade(n: &QuantumChannel, parts: &[(f64, CMat, QuantumChannel)]) -> Result<QuantumChannel> {
    if parts.is_empty() {
        return Err(QceError::InvalidInput("degrade needs at least one part".into()));
    }
    let mut mixed = Vec::with_capacity(parts.len());
    for (p, v, e) in parts {
        if v.ncols() != n.out_dim() {
            return Err(QceError::DimensionMismatch(format!(
                "isometry takes dimension {}, channel outputs {}",
                v.ncols(),
                n.out_dim()
            )));
        }
        let iso = channels::isometry(v.clone(), n.out_dims().to_vec(), vec![v.nrows()])?;
        mixed.push((*p, compose(&iso, &compose(n, e)?)?));
    }
    if mixed.iter().any(|(_, m)| m.in_dims() != mixed[0].1.in_dims() || m.out_dims() != mixed[0].1.out_dims()) {
        return Err(QceError::DimensionMismatch("degradation parts disagree on dims".into()));
    }
    mixture(&mixed)
}

/// Largest output purity over pure inputs and an input attaining it.
pub fn purity_maximizer(n: &QuantumChannel, opts: &RewardOptions) -> (f64, CVec) {
    let d = n.in_dim();
    let ascend = |psi0: CVec| -> (f64, CVec) {
        let mut psi = psi0;
        let purity = |psi: &CVec| -> (f64, CMat) {
            let y = n.apply_mat(&projector(psi));
            ((&y * &y).trace().re, y)
        };
        let (mut val, mut y) = purity(&psi);
        for _ in 0..opts.max_iters {
            let (_, vecs) = eigh(&n.adjoint_apply_mat(&y));
            let cand = vecs.column(0).into_owned();
            let (nv, ny) = purity(&cand);
            let gain = nv - val;
            if gain > 0.0 {
                psi = cand;
                val = nv;
                y = ny;
            }
            if gain <= 1e-15 {
                break;
            }
        }
        (val, psi)
    };
    let f = fourier(d);
    let mut starts: Vec<CVec> = (0..d).map(|j| ket(d, j)).collect();
    starts.extend((0..d).map(|j| f.column(j).into_owned()));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37);
    starts.extend((0..opts.restarts.min(8)).map(|_| haar_state(d, &mut rng)));
    starts
        .into_iter()
        .map(ascend)
        .fold((-1.0, ket(d, 0)), |best, cur| if cur.0 > best.0 { cur } else { best })
}

/// sup over pure inputs of Tr[𝒩(ψ)²].
pub fn max_output_purity(n: &QuantumChannel, opts: &RewardOptions) -> f64 {
    purity_maximizer(n, opts).0.clamp(0.0, 1.0)
}

/// Game with trivial B, ρ⁽ˣ⁾ = |0⟩⟨0| and weights p_x = α(λ_x − λ_{x+1}) from the ordered spectrum λ of
/// ℳ(ρ*), α = 1/λ₁. Returns the game and α.
pub fn purity_game(m: &QuantumChannel, rho_star: &DensityOperator) -> Result<(ChannelGameSpec, f64)> {
    if rho_star.dim() != m.in_dim() {
        return Err(QceError::DimensionMismatch(format!(
            "state of dimension {} is not an input of a channel on dimension {}",
            rho_star.dim(),
            m.in_dim()
        )));
    }
    let lam = crate::linalg::eigvals_desc(&m.apply_mat(rho_star.matrix()));
    let lam: Vec<f64> = lam.into_iter().map(|l| l.max(0.0)).collect();
    let alpha = 1.0 / lam[0];
    let mut p: Vec<f64> = (0..lam.len())
        .map(|x| alpha * (lam[x] - lam.get(x + 1).copied().unwrap_or(0.0)).max(0.0))
        .collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    let zero = DensityOperator::basis_state(vec![m.in_dim(), 1], 0);
    Ok((ChannelGameSpec::uniform_state(&zero, &p)?, alpha))
}

/// Random game families used by [`compare_channels`]: fixed budgets on |0⟩⟨0| first, then trivial-B
/// random pure inputs, random bipartite states and maximally entangled inputs with random weights.
fn sample_channel_game(k: usize, da: usize, n_x: usize, rng: &mut ChaCha8Rng) -> Result<ChannelGameSpec> {
    if k < n_x {
        let mut p = vec![0.0; n_x];
        p[k] = 1.0;
        return ChannelGameSpec::uniform_state(&DensityOperator::basis_state(vec![da, 1], 0), &p);
    }
    let p = random_pmf(n_x, rng);
    match (k - n_x) % 3 {
        0 => ChannelGameSpec::new(
            p.into_iter()
                .map(|px| (px, DensityOperator::pure(vec![da, 1], &haar_state(da, rng)).expect("unit vector")))
                .collect(),
        ),
        1 => ChannelGameSpec::new(p.into_iter().map(|px| (px, random_density(&[da, da], 2, rng))).collect()),
        _ => ChannelGameSpec::uniform_state(&DensityOperator::phi_plus(da), &p),
    }
}

/// Tests m ≾ n on sampled games. A witness is a game where m scores more than n.
pub fn compare_channels(n: &QuantumChannel, m: &QuantumChannel, sampler: GameSampler) -> Result<ComparisonVerdict<ChannelGameSpec>> {
    compare_channels_with(n, m, sampler, &RewardOptions::default())
}

pub fn compare_channels_with(
    n: &QuantumChannel,
    m: &QuantumChannel,
    sampler: GameSampler,
    opts: &RewardOptions,
) -> Result<ComparisonVerdict<ChannelGameSpec>> {
    let da = n.in_dim().max(m.in_dim());
    let n_x = da * n.out_dim().min(m.out_dim());
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for k in 0..sampler.n_games {
        let game = sample_channel_game(k, da, n_x, &mut rng)?;
        let rm = channel_reward(m, &game, opts)?.value;
        let rn = channel_reward(n, &game, opts)?.value;
        if rm > rn + WITNESS_GAP {
            let strong = RewardOptions { restarts: opts.restarts * 4, seed: opts.seed.wrapping_add(1), ..opts.clone() };
            let rn = rn.max(channel_reward(n, &game, &strong)?.value);
            if rm > rn + WITNESS_GAP {
                return Ok(ComparisonVerdict {
                    consistent: false,
                    witness: Some(Witness { game, upper: rn, lower: rm }),
                    games_evaluated: k + 1,
                });
            }
        }
    }
    Ok(ComparisonVerdict { consistent: true, witness: None, games_evaluated: sampler.n_games })
}
