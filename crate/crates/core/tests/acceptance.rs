//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qce_core::channel_games::{
    analytic_reward, channel_reward, channel_reward_fixed, compare_channels_with, degrade, max_output_purity,
    purity_game, purity_maximizer, ChannelGameSpec, TableGame, TableKind,
};
use qce_core::channels::{self, random_channel, replacement, unitary, QuantumChannel};
use qce_core::classical::{
    apply_cds_classical, cond_majorizes_classical, embed_classical, prob_t, random_cds_data, random_joint, HostMatrix,
};
use qce_core::cusc::{
    cds_channel, is_cusc, nonneg_witness_channel, random_cusc, random_doubly_stochastic, random_instrument,
    separable_prep_channel, teleport_cusc, theorem1_scrambler,
};
use qce_core::entropy::{cond_entropy_down, dual_cond_entropy, tensor_bipartite, vn_cond_entropy, Divergence};
use qce_core::games::{Adversary, GameSampler, RewardOptions, StateStrategy, Strategy, WITNESS_GAP};
use qce_core::linalg::{
    cr, fourier, haar_state, haar_unitary, majorizes, permutation_operator, random_density, random_pmf, CMat,
    CVec, DensityOperator,
};
use qce_core::mc::{simulate_channel_game, simulate_state_game, SimResult};
use qce_core::state_games::{compare_states_with, reward, reward_noadv, scramble, strategy_value, StateGameSpec};

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed <= limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn diag(v: &[f64]) -> DensityOperator {
    DensityOperator::new(vec![v.len()], CMat::from_diagonal(&CVec::from_vec(v.iter().map(|&x| cr(x)).collect())))
        .unwrap()
}

fn bipartite_unitary(u: CMat) -> QuantumChannel {
    unitary(u).unwrap().regroup(vec![2, 2], vec![2, 2]).unwrap()
}

fn random_separable(a: usize, b: usize, r: &mut ChaCha8Rng) -> DensityOperator {
    let k = r.random_range(1..=8);
    let w = random_pmf(k, r);
    let mut m = CMat::zeros(a * b, a * b);
    for wk in w {
        let x = DensityOperator::pure(vec![a], &haar_state(a, r)).unwrap();
        let y = DensityOperator::pure(vec![b], &haar_state(b, r)).unwrap();
        m += x.kron(&y).matrix() * cr(wk);
    }
    DensityOperator::new(vec![a, b], m).unwrap()
}

fn c1_maximally_entangled() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4] {
        for kind in [Divergence::Umegaki, Divergence::Dmax] {
            let h = cond_entropy_down(&DensityOperator::phi_plus(d), kind).map_err(|e| e.to_string())?;
            worst = worst.max((h + (d as f64).log2()).abs());
        }
    }
    check(worst <= 1e-8, || format!("max deviation {worst:.3e}"))?;
    within_time(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max |H + log2 d| = {worst:.2e}"))
}

fn c2_lower_bound() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut min_slack = f64::INFINITY;
    for i in 0..500 {
        let (a, b) = [(2, 2), (2, 3), (3, 2)][i % 3];
        let rank = r.random_range(1..=a * b);
        let rho = random_density(&[a, b], rank, &mut r);
        let bound = -((a.min(b)) as f64).log2();
        for kind in [Divergence::Umegaki, Divergence::Dmax] {
            let h = cond_entropy_down(&rho, kind).map_err(|e| e.to_string())?;
            min_slack = min_slack.min(h - bound);
        }
    }
    check(min_slack >= -1e-7, || format!("bound violated by {:.3e}", -min_slack))?;
    within_time(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("500 states, min slack {min_slack:.2e}"))
}

fn c3_separable() -> Outcome {
    let mut r = rng(3);
    let mut min_h = f64::INFINITY;
    for i in 0..200 {
        let (a, b) = [(2, 2), (2, 3), (3, 2), (3, 3)][i % 4];
        let rho = random_separable(a, b, &mut r);
        min_h = min_h.min(vn_cond_entropy(&rho).map_err(|e| e.to_string())?);
    }
    check(min_h >= -1e-8, || format!("min entropy {min_h:.3e}"))?;
    Ok(format!("200 separable states, min H = {min_h:.3e}"))
}

fn c4_axioms() -> Outcome {
    let mut r = rng(4);
    let mut add_err: f64 = 0.0;
    for _ in 0..50 {
        let (a1, b1) = [(2, 2), (2, 1), (1, 2)][r.random_range(0..3)];
        let rho = random_density(&[a1, b1], r.random_range(1..=a1 * b1), &mut r);
        let tau = random_density(&[2, 2], r.random_range(1..=4), &mut r);
        let joint = tensor_bipartite(&rho, &tau).map_err(|e| e.to_string())?;
        for kind in [Divergence::Umegaki, Divergence::Dmax] {
            let lhs = cond_entropy_down(&joint, kind).map_err(|e| e.to_string())?;
            let rhs = cond_entropy_down(&rho, kind).unwrap() + cond_entropy_down(&tau, kind).unwrap();
            add_err = add_err.max((lhs - rhs).abs());
        }
    }
    let mut mono: f64 = 0.0;
    for _ in 0..100 {
        let ch = random_cusc(2, 2, &mut r);
        let rho = random_density(&[2, 2], r.random_range(1..=4), &mut r);
        let out = ch.apply(&rho).map_err(|e| e.to_string())?;
        for kind in [Divergence::Umegaki, Divergence::Dmax] {
            mono = mono.max(cond_entropy_down(&rho, kind).unwrap() - cond_entropy_down(&out, kind).unwrap());
        }
    }
    let h_u = cond_entropy_down(&DensityOperator::maximally_mixed(vec![2, 1]), Divergence::Umegaki).unwrap();
    let h_u_max = cond_entropy_down(&DensityOperator::maximally_mixed(vec![2, 1]), Divergence::Dmax).unwrap();
    check(add_err <= 1e-7, || format!("additivity error {add_err:.3e}"))?;
    check(mono <= 1e-7, || format!("monotonicity violated by {mono:.3e}"))?;
    check(h_u == 1.0 && h_u_max == 1.0, || format!("H(u2) = {h_u}, {h_u_max}"))?;
    Ok(format!("additivity {add_err:.1e}, monotonicity slack {:.1e}, H(u2) = 1", mono.max(0.0)))
}

fn c5_self_duality() -> Outcome {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let rho = random_density(&[2, 2], r.random_range(1..=4), &mut r);
        let direct = vn_cond_entropy(&rho).map_err(|e| e.to_string())?;
        let dual = dual_cond_entropy(vn_cond_entropy, &rho).map_err(|e| e.to_string())?;
        worst = worst.max((dual - direct).abs());
    }
    check(worst <= 1e-7, || format!("max |dual - direct| = {worst:.3e}"))?;
    Ok(format!("50 states, max gap {worst:.2e}"))
}

fn c6_cusc_constructions() -> Outcome {
    let start = Instant::now();
    let mut r = rng(6);
    let mut channels: Vec<(&str, QuantumChannel)> = Vec::new();
    for _ in 0..5 {
        let k = r.random_range(1..=3);
        let ds: Vec<_> = (0..k).map(|_| random_doubly_stochastic(2, &mut r)).collect();
        channels.push(("cds", cds_channel(&ds, &random_instrument(2, k, &mut r)).unwrap()));
        let t = random_density(&[2, 2], 2, &mut r);
        channels.push(("teleport", teleport_cusc(&t).unwrap()));
        let parts: Vec<(f64, CVec, CVec)> = random_pmf(3, &mut r)
            .into_iter()
            .map(|p| (p, haar_state(2, &mut r), haar_state(2, &mut r)))
            .collect();
        channels.push(("separable-prep", separable_prep_channel(&parts).unwrap()));
    }
    for d in [2, 3] {
        channels.push(("scrambler", theorem1_scrambler(d).unwrap()));
        let w = nonneg_witness_channel(&DensityOperator::maximally_mixed(vec![d, d])).unwrap();
        channels.push(("nonneg-witness", w.composite));
    }
    let phi = DensityOperator::phi_plus(2);
    let mix = DensityOperator::new(vec![2, 2], (CMat::identity(4, 4) - phi.matrix()) * cr(1.0 / 3.0)).unwrap();
    channels.push(("nonneg-witness", nonneg_witness_channel(&mix).unwrap().composite));

    let mut worst: f64 = 0.0;
    for (name, ch) in &channels {
        let v = is_cusc(ch, 1e-7).map_err(|e| format!("{name}: {e}"))?;
        check(v.is_cusc(), || format!("{name} fails its checks: {v:?}"))?;
        worst = worst.max(v.max_violation);
    }
    let mut cnot = CMat::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[(i, j)] = cr(1.0);
    }
    let swap = permutation_operator(&[2, 2], &[1, 0]).unwrap();
    let mut bad = Vec::new();
    for (name, u) in [("SWAP", swap), ("CNOT", cnot)] {
        let v = is_cusc(&bipartite_unitary(u), 1e-7).unwrap();
        check(!v.is_cusc() && v.max_violation >= 1e-3, || format!("{name} not rejected: {v:?}"))?;
        bad.push(v.max_violation);
    }
    within_time(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "{} constructed channels, max violation {worst:.1e}; SWAP {:.2}, CNOT {:.2}",
        channels.len(),
        bad[0],
        bad[1]
    ))
}

fn c7_classical() -> Outcome {
    let mut r = rng(7);
    let opts = RewardOptions::default();
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let p = random_joint(3, 3, &mut r);
        let rho = embed_classical(&p);
        for _ in 0..20 {
            let t = HostMatrix::random(3, 3, &mut r);
            let v = reward_noadv(&rho, &t, &opts).map_err(|e| e.to_string())?.value;
            worst = worst.max((v - prob_t(&p, &t)).abs());
        }
    }
    check(worst <= 1e-6, || format!("max |reward - prob_T| = {worst:.3e}"))?;
    let mut feasible = 0;
    let mut falsified = 0;
    for _ in 0..30 {
        let p = random_joint(3, 2, &mut r);
        let k = r.random_range(1..=3);
        let (e, rr) = random_cds_data(3, 2, 2, k, &mut r);
        let q = apply_cds_classical(&p, &e, &rr).map_err(|e| e.to_string())?;
        let verdict = cond_majorizes_classical(&p, &q).map_err(|e| e.to_string())?;
        if verdict.feasible {
            feasible += 1;
            for _ in 0..100 {
                let t = HostMatrix::random(3, 2, &mut r);
                if prob_t(&q, &t) > prob_t(&p, &t) + WITNESS_GAP {
                    falsified += 1;
                }
            }
        }
    }
    check(feasible == 30, || format!("only {feasible}/30 CDS pairs feasible"))?;
    check(falsified == 0, || format!("{falsified} games falsify feasible pairs"))?;
    Ok(format!("600 embeddings within {worst:.1e}; 30/30 CDS pairs feasible, 0 of 3000 games falsify"))
}

fn c8_lemma8() -> Outcome {
    let mut r = rng(8);
    let opts = RewardOptions::default();
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        for _ in 0..20 {
            let t = HostMatrix::random(d, d, &mut r);
            let p = [0.0, 1.0, r.random::<f64>()][r.random_range(0..3)];
            let v = reward(&DensityOperator::phi_plus(d), &StateGameSpec::new(t, p).unwrap(), &opts)
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max((v - 1.0).abs());
        }
    }
    check(worst <= 1e-6, || format!("max |reward(phi+) - 1| = {worst:.3e}"))?;
    let game = StateGameSpec::new(HostMatrix::deterministic(1, 2, 2).unwrap(), 1.0).unwrap();
    let mut prod_gap: f64 = 0.0;
    for _ in 0..3 {
        let psi = haar_state(2, &mut r).kronecker(&haar_state(2, &mut r));
        let rho = DensityOperator::pure(vec![2, 2], &psi).unwrap();
        let v = reward(&rho, &game, &opts).map_err(|e| e.to_string())?.value;
        prod_gap = prod_gap.max((v - 0.5).abs());
    }
    check(prod_gap <= 1e-6, || format!("product state off by {prod_gap:.3e}"))?;
    Ok(format!("40 games on phi+ within {worst:.1e}; product states score 1/2 within {prod_gap:.1e}"))
}

fn c9_lemma9() -> Outcome {
    let mut r = rng(9);
    let opts = RewardOptions::default().with_restarts(8);
    let mut both = [0, 0];
    for i in 0..30 {
        let rho = random_density(&[3], r.random_range(1..=3), &mut r);
        let sigma = if i % 2 == 0 {
            // Reachable by a mixture of unitaries, hence majorized.
            let mut m = CMat::zeros(3, 3);
            for w in random_pmf(3, &mut r) {
                let u = haar_unitary(3, &mut r);
                m += &u * rho.matrix() * u.adjoint() * cr(w);
            }
            DensityOperator::new(vec![3], m).unwrap()
        } else {
            random_density(&[3], r.random_range(1..=3), &mut r)
        };
        let expected = majorizes(&rho.eigenvalues(), &sigma.eigenvalues()).unwrap();
        let v = compare_states_with(&rho, &sigma, GameSampler { n_games: 6, seed: i }, &opts)
            .map_err(|e| e.to_string())?;
        check(v.consistent == expected, || format!("pair {i}: games say {}, spectra say {expected}", v.consistent))?;
        both[expected as usize] += 1;
    }
    Ok(format!("30 pairs agree ({} majorized, {} not)", both[1], both[0]))
}

fn c10_table() -> Outcome {
    let start = Instant::now();
    let mut r = rng(10);
    let opts = RewardOptions::default();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut cells = 0;
    for kind in TableKind::ALL {
        for gamma in [0.0, 0.3, 0.7, 1.0] {
            let ch = kind.channel(gamma).unwrap();
            for _ in 0..5 {
                let p = random_pmf(4, &mut r);
                for game in [TableGame::Bell, TableGame::Zero] {
                    let want = analytic_reward(kind, gamma, game, &p).unwrap();
                    let got = channel_reward(&ch, &game.spec(&p).unwrap(), &opts).map_err(|e| e.to_string())?.value;
                    cells += 1;
                    if (got - want).abs() > worst.0 {
                        worst = ((got - want).abs(), format!("{} gamma={gamma} {game:?}", kind.name()));
                    }
                }
            }
        }
    }
    check(worst.0 <= 1e-3, || format!("gap {:.3e} at {}", worst.0, worst.1))?;
    within_time(start.elapsed(), Duration::from_secs(180))?;
    Ok(format!("{cells} cells, max gap {:.1e} (amplitude damping bell cell uses 1 - p1*gamma/2)", worst.0))
}

fn random_parts(n: &QuantumChannel, r: &mut ChaCha8Rng) -> Vec<(f64, CMat, QuantumChannel)> {
    let k = r.random_range(1..=3);
    random_pmf(k, r)
        .into_iter()
        .map(|p| {
            let e = if r.random::<bool>() {
                unitary(haar_unitary(n.in_dim(), r)).unwrap()
            } else {
                random_channel(vec![n.in_dim()], vec![n.in_dim()], 2, r)
            };
            (p, haar_unitary(n.out_dim(), r), e)
        })
        .collect()
}

fn c11_channel_orderings() -> Outcome {
    let mut r = rng(11);
    let opts = RewardOptions::default();
    for i in 0..3 {
        let n = if i == 0 { channels::depolarizing(2, 0.3).unwrap() } else { random_channel(vec![2], vec![2], 2, &mut r) };
        let m = degrade(&n, &random_parts(&n, &mut r)).map_err(|e| e.to_string())?;
        let v = compare_channels_with(&n, &m, GameSampler { n_games: 50, seed: i }, &opts).map_err(|e| e.to_string())?;
        check(v.consistent, || format!("degraded channel {i} beats its parent: {:?}", v.witness.map(|w| (w.lower, w.upper))))?;
    }
    for i in 0..3 {
        let u = unitary(haar_unitary(2, &mut r)).unwrap();
        let m = random_channel(vec![2], vec![2], r.random_range(1..=4), &mut r);
        let v = compare_channels_with(&u, &m, GameSampler { n_games: 20, seed: 100 + i }, &opts)
            .map_err(|e| e.to_string())?;
        check(v.consistent, || format!("random channel {i} beats a unitary"))?;
    }
    let mut agree = [0, 0];
    for i in 0..20 {
        let d = 2 + i % 2;
        let a = random_density(&[d], r.random_range(1..=d), &mut r);
        let b = random_density(&[d], r.random_range(1..=d), &mut r);
        let (ra, rb) = (replacement(vec![d], &a).unwrap(), replacement(vec![d], &b).unwrap());
        let expected = majorizes(&a.eigenvalues(), &b.eigenvalues()).unwrap();
        let v = compare_channels_with(&ra, &rb, GameSampler { n_games: d * d, seed: 200 + i as u64 }, &opts)
            .map_err(|e| e.to_string())?;
        check(v.consistent == expected, || format!("replacement pair {i}: games {}, spectra {expected}", v.consistent))?;
        agree[expected as usize] += 1;
    }
    Ok(format!(
        "3 degradations x 50 games and 3 channels x 20 games consistent; 20 replacement pairs agree ({} majorized)",
        agree[1]
    ))
}

fn c12_purity() -> Outcome {
    let mut r = rng(12);
    let opts = RewardOptions::default();
    let mut ms = vec![channels::depolarizing(2, 0.4).unwrap(), channels::amplitude_damping(0.6).unwrap()];
    ms.extend((0..3).map(|_| random_channel(vec![2], vec![3], 2, &mut r)));
    let mut worst: f64 = 0.0;
    for m in &ms {
        let (purity, psi) = purity_maximizer(m, &opts);
        let star = DensityOperator::pure(vec![m.in_dim()], &psi).unwrap();
        let (game, alpha) = purity_game(m, &star).map_err(|e| e.to_string())?;
        let v = channel_reward(m, &game, &opts).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - alpha * purity).abs());
    }
    check(worst <= 1e-5, || format!("max |reward - alpha Tr M(rho*)^2| = {worst:.3e}"))?;
    let mut slack = f64::INFINITY;
    for _ in 0..10 {
        let n = random_channel(vec![2], vec![2], r.random_range(1..=3), &mut r);
        let m = degrade(&n, &random_parts(&n, &mut r)).map_err(|e| e.to_string())?;
        slack = slack.min(max_output_purity(&n, &opts) - max_output_purity(&m, &opts));
    }
    check(slack >= -1e-4, || format!("degraded channel purer by {:.3e}", -slack))?;
    Ok(format!("purity games within {worst:.1e}; 10 degradations, min purity slack {slack:.2e}"))
}

fn c13_monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut r = rng(13);
    let rounds = 100_000;
    let mut cases: Vec<(String, SimResult, f64)> = Vec::new();
    let id2 = StateStrategy { bob_basis: CMat::identity(2, 2), f: vec![0, 1] };

    let phi_game = StateGameSpec::new(HostMatrix::random(2, 2, &mut r), 0.0).unwrap();
    let s = simulate_state_game(&DensityOperator::phi_plus(2), &phi_game, &id2, None, rounds, 1).unwrap();
    check(s.wins == s.rounds, || format!("phi+ lost {} rounds", s.rounds - s.wins))?;
    cases.push(("phi+".into(), s, 1.0));

    let p = random_joint(3, 3, &mut r);
    let t = HostMatrix::random(3, 3, &mut r);
    let rho = embed_classical(&p);
    let rep = reward_noadv(&rho, &t, &RewardOptions::default()).unwrap();
    let Strategy::State(strat) = rep.strategy else { unreachable!() };
    let g = StateGameSpec::new(t.clone(), 0.0).unwrap();
    let exact = strategy_value(&rho, &t, &strat).unwrap();
    check((exact - prob_t(&p, &t)).abs() < 1e-6, || "classical strategy is not optimal".into())?;
    cases.push(("classical".into(), simulate_state_game(&rho, &g, &strat, None, rounds, 2).unwrap(), exact));

    let w1 = StateGameSpec::new(HostMatrix::deterministic(1, 2, 2).unwrap(), 0.0).unwrap();
    let uu = DensityOperator::maximally_mixed(vec![2, 2]);
    cases.push(("fair coin".into(), simulate_state_game(&uu, &w1, &id2, None, rounds, 3).unwrap(), 0.5));

    let worst_game = StateGameSpec::new(HostMatrix::deterministic(1, 2, 2).unwrap(), 1.0).unwrap();
    let prod = DensityOperator::basis_state(vec![2, 2], 0);
    let adv = Adversary { basis: fourier(2), partition: vec![vec![0], vec![1]] };
    let scrambled = scramble(&prod, &adv.basis, &adv.partition).unwrap();
    let exact = strategy_value(&scrambled, &worst_game.t, &id2).unwrap();
    cases.push(("product vs adversary".into(), simulate_state_game(&prod, &worst_game, &id2, Some(&adv), rounds, 4).unwrap(), exact));

    let id = channels::identity(vec![2]);
    let bell = |p: &[f64]| TableGame::Bell.spec(p).unwrap();
    let u = unitary(fourier(2)).unwrap();
    cases.push(("unitary bell".into(), simulate_channel_game(&u, &id, &bell(&[0.25; 4]), rounds, 5).unwrap(), 1.0));
    let dep = channels::depolarizing(2, 0.4).unwrap();
    cases.push(("depolarizing bell".into(), simulate_channel_game(&dep, &id, &bell(&[1.0]), rounds, 6).unwrap(), 0.7));
    let ru = replacement(vec![2], &DensityOperator::maximally_mixed(vec![2])).unwrap();
    let zero = TableGame::Zero.spec(&[1.0]).unwrap();
    cases.push(("replacement zero".into(), simulate_channel_game(&ru, &id, &zero, rounds, 7).unwrap(), 0.5));

    for (i, kind) in TableKind::ALL.into_iter().enumerate() {
        let ch = kind.channel(0.3).unwrap();
        let p = random_pmf(4, &mut r);
        let game: ChannelGameSpec = TableGame::Bell.spec(&p).unwrap();
        let rep = channel_reward(&ch, &game, &RewardOptions::default()).unwrap();
        let Strategy::Preprocessing(e) = rep.strategy else { unreachable!() };
        let exact = channel_reward_fixed(&ch, &e, &game).unwrap();
        cases.push((format!("{} optimized", kind.name()), simulate_channel_game(&ch, &e, &game, rounds, 20 + i as u64).unwrap(), exact));
    }
    let rs = diag(&[0.7, 0.3]);
    let rep_sigma = replacement(vec![2], &rs).unwrap();
    let g = ChannelGameSpec::uniform_state(&DensityOperator::phi_plus(2), &[0.5, 0.5]).unwrap();
    let exact = channel_reward_fixed(&rep_sigma, &id, &g).unwrap();
    cases.push(("replacement sigma bell".into(), simulate_channel_game(&rep_sigma, &id, &g, rounds, 8).unwrap(), exact));

    let mut worst_z: f64 = 0.0;
    for (name, s, exact) in &cases {
        check(s.agrees_with(*exact, 4.0), || {
            format!("{name}: rate {} vs {exact} (std err {:.2e})", s.win_rate, s.std_err)
        })?;
        if s.std_err > 0.0 {
            worst_z = worst_z.max((s.win_rate - exact).abs() / s.std_err);
        }
    }
    let a = simulate_channel_game(&dep, &id, &bell(&[0.5, 0.5]), rounds, 99).unwrap();
    let b = simulate_channel_game(&dep, &id, &bell(&[0.5, 0.5]), rounds, 99).unwrap();
    check(a == b && a.win_rate.to_bits() == b.win_rate.to_bits(), || "seeded runs differ".into())?;
    within_time(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{} strategies within 4 std errors (max {worst_z:.2}), seeded runs identical", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("maximally entangled entropy", c1_maximally_entangled),
        ("entropy lower bound", c2_lower_bound),
        ("separable non-negativity", c3_separable),
        ("axioms: additivity, monotonicity, normalization", c4_axioms),
        ("self-duality", c5_self_duality),
        ("CUSC constructions", c6_cusc_constructions),
        ("classical equivalence", c7_classical),
        ("maximally entangled state dominates", c8_lemma8),
        ("trivial-B games match majorization", c9_lemma9),
        ("noisy-channel table", c10_table),
        ("channel orderings", c11_channel_orderings),
        ("output purity", c12_purity),
        ("Monte Carlo oracle", c13_monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} ({name}): {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
