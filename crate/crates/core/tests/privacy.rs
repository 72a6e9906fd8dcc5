use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use zkattest_core::privacy::{
    clamped_mean, default_sweep, detection_probability, generate_traces, lag1_autocorrelation, release_population,
    simulate, simulate_detection, simulate_privacy_utility, AdversaryModel, DpBudget, GroundTruth, PopulationParams,
    Provenance, SimulationConfig,
};

#[test]
fn generated_sessions_carry_the_target_autocorrelation() {
    let truth = GroundTruth::synthetic(12, 3);
    for (r1, seed) in [(0.111, 1), (0.0, 2), (0.4, 3)] {
        let cfg = SimulationConfig { n_sessions: 300, n_checkpoints: 40, r1, seed, ..Default::default() };
        let traces = generate_traces(&truth, &cfg).unwrap();
        let got = lag1_autocorrelation(&traces, &truth);
        assert!((got - r1).abs() < 0.03, "r1 {r1}: measured {got}");
    }
}

#[test]
fn released_population_tracks_the_cohort() {
    let cohort = GroundTruth::synthetic(12, 4).cohort(10_000, 5);
    let budget = DpBudget::new(1.0, 1e-5, cohort.len()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let p = release_population(&cohort, &[(0.0, 1000.0); 12], &budget, 3, Some(6), &mut rng).unwrap();
    let n = cohort.len() as f64;
    for (j, (mu, sd)) in p.mu_ms().iter().zip(p.sigma_ms()).enumerate() {
        let mean = cohort.iter().map(|r| r[j]).sum::<f64>() / n;
        let spread = (cohort.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
        // mean noise sd is about 0.48 ms here
        assert!((mu - mean).abs() < 2.5, "feature {j}: mean {mu} vs {mean}");
        // the spread is inflated on purpose, never deflated by much
        assert!(sd > spread - 2.0 && sd < spread + 4.0, "feature {j}: spread {sd} vs {spread}");
    }
    assert_eq!(p.provenance, Provenance::DpReleased { epsilon: 1.0, delta: 1e-5, n: 10_000, seed: Some(6) });

    let back: PopulationParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn per_checkpoint_evasion_matches_the_formula() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for (f, k) in [(0.1, 2usize), (0.3, 1), (0.05, 4)] {
        let e = simulate_detection(f, k, 1, 1_000, 20_000, &mut rng).unwrap();
        let want = 1.0 - detection_probability(f, k as u64, 1).unwrap();
        assert!((e.checkpoint_evasion_rate - want).abs() < 0.01, "f {f} k {k}: {} vs {want}", e.checkpoint_evasion_rate);
    }
}

#[test]
fn matched_adversary_is_indistinguishable_from_marginals() {
    let cfg = SimulationConfig {
        adversary: AdversaryModel::DistributionMatched,
        n_sessions: 1000,
        ..Default::default()
    };
    let row = simulate(&cfg).unwrap();
    // bounds at 3 sigma cover the whole marginal, so everything passes
    assert!(row.tnr < 0.01 && row.tpr > 0.99, "{row:?}");
}

#[test]
fn sweeps_are_reproducible_and_seed_sensitive() {
    let small: Vec<SimulationConfig> = default_sweep(9)
        .into_iter()
        .map(|c| SimulationConfig { n_sessions: 200, cohort: 2000, ..c })
        .collect();
    let a = simulate_privacy_utility(&small).unwrap();
    let b = simulate_privacy_utility(&small).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.to_csv().unwrap().lines().count(), small.len() + 1);

    let other: Vec<SimulationConfig> = small.iter().map(|c| SimulationConfig { seed: 10, ..c.clone() }).collect();
    assert_ne!(a.to_csv().unwrap(), simulate_privacy_utility(&other).unwrap().to_csv().unwrap());
    assert!(a.summary().contains("eps-0.1"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_record_moves_the_mean_by_at_most_the_sensitivity(
        seed: u64,
        n in 2usize..200,
        lo in -100.0f64..400.0,
        width in 1.0f64..700.0,
        replacement in -2000.0f64..3000.0,
    ) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let clamp = [(lo, lo + width)];
        let mut x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-500.0..1500.0)]).collect();
        let before = clamped_mean(&x, &clamp).unwrap()[0];
        let i = rng.gen_range(0..n);
        x[i][0] = replacement;
        let after = clamped_mean(&x, &clamp).unwrap()[0];
        prop_assert!((after - before).abs() <= width / n as f64 * (1.0 + 1e-12));
    }
}
