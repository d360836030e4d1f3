use alc_core::learner::{bootstrap_score, linear_fit, BootstrapConfig};
use alc_core::simulator::*;
use alc_core::strategy::{jump_strategy, RandomMix};
use alc_core::{alc, auc};

fn spec(n: usize, sep: f64, noise: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        n_samples: n,
        n_features: 5,
        positive_fraction: 0.1,
        class_separation: sep,
        noise_features: noise,
        seed,
    }
}

fn full_label_auc(pool: &Pool) -> f64 {
    let model = linear_fit(&pool.features, &pool.labels, 1.0).unwrap();
    auc(&model.score(&pool.features), &pool.labels).unwrap()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn no_separation_gives_chance_auc() {
    let aucs: Vec<f64> = (0..20)
        .map(|s| {
            let pool = generate_pool(&SyntheticSpec { n_features: 2, ..spec(20_000, 0.0, 0, s) }).unwrap();
            full_label_auc(&pool)
        })
        .collect();
    for a in &aucs {
        assert!((0.45..=0.55).contains(a), "{a}");
    }
}

#[test]
fn wide_separation_is_nearly_perfect() {
    for s in 0..20 {
        let pool = generate_pool(&spec(2000, 6.0, 0, s)).unwrap();
        let a = full_label_auc(&pool);
        assert!(a > 0.99, "seed {s}: {a}");
    }
}

#[test]
fn generator_is_deterministic_and_exact_on_positives() {
    let a = generate_pool(&spec(1000, 3.0, 4, 9)).unwrap();
    let b = generate_pool(&spec(1000, 3.0, 4, 9)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.positives(), 100);
    assert_ne!(a, generate_pool(&spec(1000, 3.0, 4, 10)).unwrap());
}

#[test]
fn bootstrap_beats_chance_from_one_positive() {
    for s in 0..20 {
        let pool = generate_pool(&spec(2000, 3.0, 0, s)).unwrap();
        let state = ScoredPool::initialize(&pool, s).unwrap();
        let pos = state.purchase_log[0].indices[0];
        let scores = bootstrap_score(&pool.features, pos, &BootstrapConfig::default(), s).unwrap();
        let a = auc(&scores, &pool.labels).unwrap();
        assert!(a > 0.5, "seed {s}: {a}");
    }
}

#[test]
fn cold_start_on_noisy_pool_sits_in_low_band() {
    let aucs: Vec<f64> = (0..20)
        .map(|s| {
            let pool = generate_pool(&SyntheticSpec {
                positive_fraction: 0.05,
                ..spec(2000, 3.0, 500, s)
            })
            .unwrap();
            let run = run_simulation(&pool, QueryPolicy::Random, &LearnerConfig::default(), &[1], s).unwrap();
            assert_eq!(run.trajectory.len(), 1);
            run.trajectory.steps()[0].auc
        })
        .collect();
    let m = mean(&aucs);
    assert!((0.5..=0.65).contains(&m), "mean {m}");
}

#[test]
fn buying_the_whole_pool_learns_the_boundary() {
    for s in 0..20 {
        let pool = generate_pool(&spec(1000, 6.0, 0, s)).unwrap();
        let run = run_simulation(&pool, QueryPolicy::Random, &LearnerConfig::default(), &[1, 999], s).unwrap();
        assert!(run.trajectory.last().auc > 0.95, "seed {s}");
        assert_eq!(run.trajectory.last().cumulative_labels, 1000);
    }
}

#[test]
fn revealed_counts_track_label_counts() {
    let pool = generate_pool(&spec(1500, 3.0, 10, 4)).unwrap();
    let schedule = stepped_schedule(20, 150).unwrap();
    let run = run_simulation(&pool, QueryPolicy::Knee { mix: RandomMix::default() }, &LearnerConfig::default(), &schedule, 4).unwrap();
    let counts: Vec<u64> = run.revealed_counts.iter().map(|&c| c as u64).collect();
    assert_eq!(counts, run.trajectory.label_counts());
    let first = run.state.purchase_log[0].indices[0];
    assert!(pool.labels[first]);
    assert_eq!(run.state.revealed_count(), 150);
}

#[test]
fn identical_inputs_identical_runs() {
    let pool = generate_pool(&spec(1500, 3.0, 10, 5)).unwrap();
    let schedule = stepped_schedule(25, 200).unwrap();
    let policy = QueryPolicy::Knee { mix: RandomMix::default() };
    let a = run_simulation(&pool, policy, &LearnerConfig::default(), &schedule, 77).unwrap();
    let b = run_simulation(&pool, policy, &LearnerConfig::default(), &schedule, 77).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.trajectory.to_csv_string(), b.trajectory.to_csv_string());
}

#[test]
fn duplicated_strategy_gives_identical_rows() {
    let pool = generate_pool(&spec(1500, 3.0, 10, 6)).unwrap();
    let s = StrategySpec::jump(0.05, pool.len() as u64).unwrap();
    let scoring = ScoringConfig::defaults(pool.len() as u64).unwrap();
    let out = compare_strategies(&pool, &[s.clone(), s], &LearnerConfig::default(), &scoring, 6).unwrap();
    assert_eq!(out[0], out[1]);
}

fn trained_decision(s: u64) -> (Pool, ScoredPool, Vec<f64>) {
    let pool = generate_pool(&spec(4000, 3.0, 5, s)).unwrap();
    let other = generate_pool(&spec(4000, 3.0, 5, s + 10_000)).unwrap();
    let model = linear_fit(&other.features, &other.labels, 1.0).unwrap();
    let state = ScoredPool::initialize(&pool, s).unwrap();
    let decision = model.score(&pool.features);
    (pool, state, decision)
}

#[test]
fn large_holdout_tracks_full_pool_auc() {
    for s in 0..50 {
        let (pool, state, decision) = trained_decision(s);
        let full = auc(&decision, &pool.labels).unwrap();
        let est = random_holdout_auc(&pool, &state, &decision, 3600, s).unwrap();
        assert!((est - full).abs() <= 0.02, "seed {s}: {est} vs {full}");
    }
}

#[test]
fn whole_unrevealed_holdout_is_exact() {
    let (pool, state, decision) = trained_decision(3);
    let idx: Vec<usize> = (0..pool.len()).filter(|&i| !state.revealed[i]).collect();
    let s: Vec<f64> = idx.iter().map(|&i| decision[i]).collect();
    let l: Vec<bool> = idx.iter().map(|&i| pool.labels[i]).collect();
    let est = random_holdout_auc(&pool, &state, &decision, idx.len(), 0).unwrap();
    assert_eq!(est, auc(&s, &l).unwrap());
}

#[test]
fn holdout_estimate_is_unbiased() {
    let (pool, state, decision) = trained_decision(11);
    let full = auc(&decision, &pool.labels).unwrap();
    let est: Vec<f64> = (0..200)
        .map(|k| random_holdout_auc(&pool, &state, &decision, 400, 1000 + k).unwrap())
        .collect();
    let m = mean(&est);
    assert!((m - full).abs() <= 0.01, "{m} vs {full}");
}

#[test]
fn jump_sweep_peaks_between_five_and_ten_percent() {
    let base = PathologySetup::default().pool;
    let fractions = [0.01, 0.05, 0.10];
    let mut totals = [0.0; 3];
    for s in 0..20 {
        let pool = generate_pool(&SyntheticSpec { seed: s, ..base }).unwrap();
        for (k, &f) in fractions.iter().enumerate() {
            let schedule = jump_strategy(f, pool.len() as u64).unwrap();
            let run = run_simulation(&pool, QueryPolicy::Jump, &LearnerConfig::default(), &schedule, s).unwrap();
            totals[k] += alc(&run.trajectory).unwrap();
        }
    }
    let best = (0..3).max_by(|&a, &b| totals[a].total_cmp(&totals[b])).unwrap();
    assert!(best >= 1, "{totals:?}");
}

#[test]
fn committed_seed_file_parses() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/pathology_seeds.txt")).unwrap();
    let seeds = parse_seeds(&text).unwrap();
    assert_eq!(seeds.len(), 20);
}
