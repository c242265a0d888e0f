//! Types shared by the state and channel gambling games.

use crate::channels::QuantumChannel;
use crate::linalg::CMat;

/// Search settings for the reward optimisers.
#[derive(Debug, Clone)]
pub struct RewardOptions {
    /// Random restarts on top of the structured starting points.
    pub restarts: usize,
    pub seed: u64,
    /// Iteration cap for each local ascent.
    pub max_iters: usize,
    /// Environment dimension of the preprocessing isometry; `None` means |A|².
    pub kraus_rank: Option<usize>,
    /// Additional preprocessing channels always evaluated by the channel optimiser.
    pub extra_candidates: Vec<QuantumChannel>,
}

impl Default for RewardOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0, max_iters: 400, kraus_rank: None, extra_candidates: Vec::new() }
    }
}

impl RewardOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Bob's rank-one measurement (columns of `bob_basis`) and response map z ↦ f(z) = z'.
#[derive(Debug, Clone, PartialEq)]
pub struct StateStrategy {
    pub bob_basis: CMat,
    pub f: Vec<usize>,
}

/// Projective scramble Π_j = Σ_{i∈S_j} |v_i⟩⟨v_i| on A.
#[derive(Debug, Clone, PartialEq)]
pub struct Adversary {
    pub basis: CMat,
    pub partition: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub enum Strategy {
    State(StateStrategy),
    Preprocessing(QuantumChannel),
}

#[derive(Debug, Clone)]
pub struct RewardReport {
    pub value: f64,
    pub strategy: Strategy,
    pub adversary: Option<Adversary>,
    pub restarts_used: usize,
    /// True when `value` comes from a search: maxima are lower bounds and adversarial minima upper bounds.
    /// False for closed-form evaluations.
    pub certified: bool,
}

/// Outcome of a game-based comparison. `witness` falsifies the queried ordering; its absence only means
/// that no sampled game separated the pair.
#[derive(Debug, Clone)]
pub struct ComparisonVerdict<G> {
    pub consistent: bool,
    pub witness: Option<Witness<G>>,
    pub games_evaluated: usize,
}

#[derive(Debug, Clone)]
pub struct Witness<G> {
    pub game: G,
    /// Reward of the candidate that should dominate.
    pub upper: f64,
    /// Reward of the candidate that should be dominated.
    pub lower: f64,
}

/// Gap above which a game counts as a falsifying witness.
pub const WITNESS_GAP: f64 = 2e-6;

/// Sampling settings for comparisons.
#[derive(Debug, Clone, Copy)]
pub struct GameSampler {
    pub n_games: usize,
    pub seed: u64,
}
