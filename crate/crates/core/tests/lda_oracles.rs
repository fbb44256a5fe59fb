use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use speechnet::lda::{train, GibbsState, Hyperparams};
use statrs::function::gamma::ln_gamma;

fn hp(k: usize, alpha: f64, beta: f64, iterations: usize, seed: u64) -> Hyperparams {
    Hyperparams {
        topics: k,
        alpha,
        beta,
        iterations,
        burn_in: 0,
        seed,
    }
}

/// Count matrices rebuilt from the assignments alone.
fn recount(state: &GibbsState, docs: &[Vec<u32>]) -> (Vec<Vec<u32>>, Vec<Vec<u32>>, Vec<u32>) {
    let (k, v) = (state.topics(), state.vocab_size());
    let mut n_dk = vec![vec![0; k]; docs.len()];
    let mut n_kw = vec![vec![0; v]; k];
    let mut n_k = vec![0; k];
    for (d, doc) in docs.iter().enumerate() {
        for (i, &w) in doc.iter().enumerate() {
            let t = state.assignments()[d][i] as usize;
            n_dk[d][t] += 1;
            n_kw[t][w as usize] += 1;
            n_k[t] += 1;
        }
    }
    (n_dk, n_kw, n_k)
}

fn assert_counts_match(state: &GibbsState, docs: &[Vec<u32>]) {
    let (n_dk, n_kw, n_k) = recount(state, docs);
    for (d, row) in n_dk.iter().enumerate() {
        for (k, &c) in row.iter().enumerate() {
            assert_eq!(state.doc_topic(d, k), c, "n_dk[{d}][{k}]");
        }
    }
    for (k, row) in n_kw.iter().enumerate() {
        for (w, &c) in row.iter().enumerate() {
            assert_eq!(state.topic_word(k, w), c, "n_kw[{k}][{w}]");
        }
        assert_eq!(state.topic_total(k), n_k[k], "n_k[{k}]");
    }
}

/// Collapsed joint log p(w, z), up to nothing: the full Dirichlet-multinomial form.
fn log_joint(state: &GibbsState, docs: &[Vec<u32>], alpha: f64, beta: f64) -> f64 {
    let (n_dk, n_kw, n_k) = recount(state, docs);
    let (k, v) = (state.topics() as f64, state.vocab_size() as f64);
    let mut ll = 0.0;
    for t in 0..state.topics() {
        ll += ln_gamma(v * beta) - v * ln_gamma(beta);
        ll += n_kw[t]
            .iter()
            .map(|&c| ln_gamma(c as f64 + beta))
            .sum::<f64>();
        ll -= ln_gamma(n_k[t] as f64 + v * beta);
    }
    for (d, doc) in docs.iter().enumerate() {
        ll += ln_gamma(k * alpha) - k * ln_gamma(alpha);
        ll += n_dk[d]
            .iter()
            .map(|&c| ln_gamma(c as f64 + alpha))
            .sum::<f64>();
        ll -= ln_gamma(doc.len() as f64 + k * alpha);
    }
    ll
}

fn toy_corpus() -> Vec<Vec<u32>> {
    vec![
        vec![0, 1, 2, 0, 1, 2, 0, 1],
        vec![3, 4, 5, 3, 4, 5, 3, 4, 5],
        vec![0, 1, 2, 3, 0, 1],
        vec![6, 7, 8, 6, 7, 8, 6],
        vec![3, 4, 6, 7, 8, 5, 4],
    ]
}

#[test]
fn init_counts_match_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let docs: Vec<Vec<u32>> = (0..2)
        .map(|_| (0..10).map(|_| rng.random_range(0..6)).collect())
        .collect();
    let state = GibbsState::init(&docs, 6, &hp(3, 0.1, 0.01, 0, 42)).unwrap();
    assert_counts_match(&state, &docs);
}

#[test]
fn counts_match_recount_after_sweeps() {
    let docs = toy_corpus();
    let h = hp(3, 0.5, 0.1, 0, 9);
    let mut state = GibbsState::init(&docs, 9, &h).unwrap();
    for target in [1, 10, 100] {
        while state.sweeps() < target {
            state.sweep(&docs, &h).unwrap();
        }
        assert_counts_match(&state, &docs);
    }
}

/// Straight transcription of the collapsed sampler for one document, V = 1.
fn reference_chain(
    len: usize,
    k: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    sweeps: usize,
) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<usize> = (0..len)
        .map(|_| rng.random_range(0..k as u32) as usize)
        .collect();
    let mut history = vec![z.iter().map(|&t| t as u32).collect()];
    for _ in 0..sweeps {
        for i in 0..len {
            let mut n = vec![0.0; k];
            for (j, &t) in z.iter().enumerate() {
                if j != i {
                    n[t] += 1.0;
                }
            }
            // one word type: n_dk = n_kw = n_k
            let p: Vec<f64> = (0..k)
                .map(|t| (n[t] + alpha) * (n[t] + beta) / (n[t] + beta))
                .collect();
            let u = rng.random::<f64>() * p.iter().sum::<f64>();
            let mut acc = 0.0;
            z[i] = k - 1;
            for (t, pt) in p.iter().enumerate() {
                acc += pt;
                if acc > u {
                    z[i] = t;
                    break;
                }
            }
        }
        history.push(z.iter().map(|&t| t as u32).collect());
    }
    history
}

#[test]
fn chain_matches_reference_sampler() {
    let docs = vec![vec![0u32; 4]];
    let h = hp(2, 0.7, 0.3, 0, 2024);
    let expected = reference_chain(4, 2, 0.7, 0.3, 2024, 25);
    let mut state = GibbsState::init(&docs, 1, &h).unwrap();
    assert_eq!(state.assignments()[0], expected[0]);
    for step in expected.iter().skip(1) {
        state.sweep(&docs, &h).unwrap();
        assert_eq!(&state.assignments()[0], step);
    }
}

#[test]
fn conditional_for_one_word_document_by_hand() {
    // "a a a a", K = 2: with the token removed and the other three split (2, 1),
    // P(k) ∝ (n_k + α)(n_k + β)/(n_k + β) = n_k + α  →  (2.7, 1.7) for α = 0.7
    let h = hp(2, 0.7, 0.3, 0, 2024);
    let state = GibbsState::init(&[vec![0u32; 4]], 1, &h).unwrap();
    let z = &state.assignments()[0];
    let others: Vec<f64> = (0..2)
        .map(|k| z[1..].iter().filter(|&&t| t as usize == k).count() as f64)
        .collect();
    let p: Vec<f64> = others.iter().map(|n| n + 0.7).collect();
    let total: f64 = p.iter().sum();
    assert!((total - (3.0 + 1.4)).abs() < 1e-12);
}

#[test]
fn log_likelihood_trends_upward() {
    let docs = toy_corpus();
    let (alpha, beta) = (0.1, 0.01);
    let h = hp(3, alpha, beta, 0, 77);
    let mut state = GibbsState::init(&docs, 9, &h).unwrap();
    let mut trace = vec![log_joint(&state, &docs, alpha, beta)];
    for _ in 0..100 {
        state.sweep(&docs, &h).unwrap();
        trace.push(log_joint(&state, &docs, alpha, beta));
    }
    // running median over a window of 11 sweeps
    let smoothed: Vec<f64> = (5..trace.len() - 5)
        .map(|i| {
            let mut w = trace[i - 5..=i + 5].to_vec();
            w.sort_by(f64::total_cmp);
            w[5]
        })
        .collect();
    let tail = &smoothed[smoothed.len() - 50..];
    let scale = trace[0].abs();
    let mut best = f64::NEG_INFINITY;
    for &x in tail {
        assert!(
            x >= best - 0.02 * scale,
            "smoothed log-likelihood fell from {best} to {x}"
        );
        best = best.max(x);
    }
    assert!(tail[tail.len() - 1] > trace[0]);
}

#[test]
fn same_seed_same_chain() {
    let docs = toy_corpus();
    let h = hp(4, 0.2, 0.05, 30, 5);
    let (a, ma) = train(&docs, 9, &h).unwrap();
    let (b, mb) = train(&docs, 9, &h).unwrap();
    assert_eq!(a, b);
    assert_eq!(ma, mb);
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn topics_invariant_to_document_order() {
    // two word-disjoint themes; reversing the document order (and the seed
    // stream with it) must find the same topics up to relabelling
    let mut docs = Vec::new();
    for i in 0..6 {
        let base = if i % 2 == 0 { 0 } else { 4 };
        docs.push((0..12).map(|j| base + (j % 4) as u32).collect::<Vec<u32>>());
    }
    let reversed: Vec<Vec<u32>> = docs.iter().rev().cloned().collect();
    let h = hp(2, 0.01, 0.01, 200, 31);
    let (_, a) = train(&docs, 8, &h).unwrap();
    let (_, b) = train(
        &reversed,
        8,
        &Hyperparams {
            seed: 13,
            ..h.clone()
        },
    )
    .unwrap();

    let perms = [[0usize, 1], [1, 0]];
    let matched = perms.iter().any(|perm| {
        (0..2).all(|k| {
            a.phi_row(k)
                .iter()
                .zip(b.phi_row(perm[k]))
                .all(|(x, y)| (x - y).abs() < 1e-12)
        })
    });
    assert!(
        matched,
        "topic-word matrices differ beyond a row permutation"
    );
}

/// Draws `docs` documents of `len` tokens from Dirichlet(α) mixtures over `phi`.
fn planted_corpus(
    phi: &[Vec<f64>],
    docs: usize,
    len: usize,
    alpha: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<u32>> {
    let gamma = Gamma::new(alpha, 1.0).unwrap();
    let draw = |weights: &[f64], rng: &mut ChaCha8Rng| {
        let u = rng.random::<f64>() * weights.iter().sum::<f64>();
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if acc > u {
                return i;
            }
        }
        weights.len() - 1
    };
    (0..docs)
        .map(|_| {
            let theta: Vec<f64> = (0..phi.len()).map(|_| gamma.sample(rng) + 1e-300).collect();
            (0..len)
                .map(|_| {
                    let k = draw(&theta, rng);
                    draw(&phi[k], rng) as u32
                })
                .collect()
        })
        .collect()
}

#[test]
fn recovers_small_planted_topics() {
    let (k, v) = (3usize, 30usize);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            (0..v)
                .map(|w| {
                    if w / 10 == t {
                        1.0 + rng.random::<f64>()
                    } else {
                        0.01
                    }
                })
                .collect()
        })
        .map(|row: Vec<f64>| {
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let docs = planted_corpus(&phi, 150, 60, 0.2, &mut rng);
    let (_, model) = train(&docs, v, &hp(k, 0.2, 0.01, 200, 1)).unwrap();

    let mut unmatched: Vec<usize> = (0..k).collect();
    let mut sims = Vec::new();
    for truth in &phi {
        let (pos, best) = unmatched
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, cosine(truth, model.phi_row(l))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        sims.push(best);
        unmatched.remove(pos);
    }
    let mean = sims.iter().sum::<f64>() / k as f64;
    assert!(mean >= 0.9, "mean cosine {mean}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn estimates_are_normalized_and_positive(
        docs in prop::collection::vec(prop::collection::vec(0u32..7, 1..20), 1..6),
        k in 1usize..5,
        sweeps in 0usize..6,
        seed in any::<u64>(),
    ) {
        let h = hp(k, 0.3, 0.05, sweeps, seed);
        let (state, model) = train(&docs, 7, &h).unwrap();
        prop_assert!(state.check_consistency(&docs).is_ok());
        for t in 0..k {
            let row = model.phi_row(t);
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|&p| p > 0.0));
        }
        for d in 0..docs.len() {
            let row = model.theta_row(d);
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(row.iter().all(|&p| p > 0.0));
        }
        let (again, _) = train(&docs, 7, &h).unwrap();
        prop_assert_eq!(state.assignments(), again.assignments());
    }
}
