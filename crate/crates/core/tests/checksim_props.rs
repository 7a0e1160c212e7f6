use otlab::checksim::*;
use otlab::security::CheatParams;
use proptest::prelude::*;

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn honest_parties_always_complete(seed in any::<u64>(), m in 1usize..80, kb in 0usize..80, ka in 0usize..80) {
        let cfg = CheckConfig { m, k_bob: kb.min(m), k_alice: ka.min(m), trials: 200, seed, ..CheckConfig::default() };
        let run = run_protocol3(&cfg, &AliceStrategy::honest(), BobStrategy::Honest).unwrap();
        for r in &run.reports {
            prop_assert!(!r.bob_check.aborted && r.bob_check.failures == 0);
            let a = r.alice_check.as_ref().unwrap();
            prop_assert!(!a.aborted && a.failures == 0);
            prop_assert_eq!(r.bob_check.delivered_correct, r.bob_check.tables_delivered);
        }
    }

    #[test]
    fn identical_seeds_give_identical_reports(seed in any::<u64>(), phi in 0.0f64..=1.0) {
        let cfg = CheckConfig { m: 20, k_bob: 6, k_alice: 4, trials: 50, seed, record_checks: true, ..CheckConfig::default() };
        let alice = AliceStrategy::mixed(phi, otlab::checksim::AliceKind::LearnY);
        let a = run_protocol3(&cfg, &alice, BobStrategy::PhaseNoise(0.3)).unwrap();
        let b = run_protocol3(&cfg, &alice, BobStrategy::PhaseNoise(0.3)).unwrap();
        prop_assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }

    #[test]
    fn estimate_and_leak_bound(failures in 0usize..200, k in 1usize..200, c1 in 0.1f64..10.0) {
        let failures = failures.min(k);
        let eps = epsilon_estimate(failures, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&eps));
        prop_assert!((eps - ((failures as f64 + 1.0) / k as f64).min(1.0)).abs() <= 1e-15);
        let leak = leak_bound(eps, c1);
        prop_assert!((0.0..=1.0).contains(&leak));
        prop_assert!(leak_bound(eps + 1e-3, c1) >= leak);
    }

    #[test]
    fn param_alice_pass_rate_is_monotone(alpha in 0.0f64..std::f64::consts::FRAC_PI_2, step in 0.0f64..0.5) {
        let hi = (alpha + step).min(std::f64::consts::FRAC_PI_2);
        let p = |a: f64| pass_probability(&AliceStrategy::param(CheatParams::example1(a).unwrap())).unwrap();
        prop_assert!(p(hi) >= p(alpha) - 1e-12);
    }
}

#[test]
fn learn_y_detection_curve() {
    let trials = 20_000;
    let ks: Vec<usize> = (1..=12).collect();
    let curve = detection_curve(
        &Party::Alice(AliceStrategy::learn_y()),
        &ks,
        Threshold::Count(0),
        trials,
        4,
    )
    .unwrap();
    for pt in &curve {
        let want = 1.0 - 0.5f64.powi(pt.k as i32);
        assert!(
            (pt.abort.probability - want).abs() <= three_sigma(want, trials) + 1e-12,
            "k = {}",
            pt.k
        );
    }
}

#[test]
fn mixed_alice_detection_curve() {
    let trials = 20_000;
    let phi = 0.3;
    let ks = [1, 2, 4, 8, 16, 32];
    let alice = AliceStrategy::mixed(phi, otlab::checksim::AliceKind::LearnY);
    let curve = detection_curve(&Party::Alice(alice), &ks, Threshold::Count(0), trials, 5).unwrap();
    let mut last: Option<&DetectionPoint> = None;
    for pt in &curve {
        let want = 1.0 - (1.0 - phi / 2.0).powi(pt.k as i32);
        assert!(
            (pt.abort.probability - want).abs() <= three_sigma(want, trials) + 1e-12,
            "k = {}",
            pt.k
        );
        if let Some(prev) = last {
            let noise = three_sigma(prev.abort.probability, trials)
                + three_sigma(pt.abort.probability, trials);
            assert!(pt.abort.probability >= prev.abort.probability - noise);
        }
        last = Some(pt);
    }
}

#[test]
fn honest_detection_curves_are_zero() {
    let ks = [1, 5, 25];
    for party in [
        Party::Alice(AliceStrategy::honest()),
        Party::Bob(BobStrategy::Honest),
    ] {
        for pt in detection_curve(&party, &ks, Threshold::Count(0), 1000, 6).unwrap() {
            assert_eq!(pt.abort.aborts, 0);
        }
    }
}

#[test]
fn computational_bob_is_detected() {
    let trials = 20_000;
    let ks = [1, 3, 6, 10];
    let curve = detection_curve(
        &Party::Bob(BobStrategy::ComputationalBasis),
        &ks,
        Threshold::Count(0),
        trials,
        7,
    )
    .unwrap();
    for pt in &curve {
        let want = 1.0 - 0.5f64.powi(pt.k as i32);
        assert!(
            (pt.abort.probability - want).abs() <= three_sigma(want, trials) + 1e-12,
            "k = {}",
            pt.k
        );
    }
}

#[test]
fn detection_needs_enough_trials() {
    let err = detection_curve(
        &Party::Alice(AliceStrategy::learn_y()),
        &[1],
        Threshold::Count(0),
        99,
        0,
    );
    assert!(matches!(err, Err(otlab::Error::Config(_))));
}

#[test]
fn threshold_tolerates_failures() {
    let trials = 20_000;
    let cfg = CheckConfig {
        m: 10,
        k_bob: 10,
        threshold_bob: Threshold::Count(2),
        trials,
        seed: 8,
        ..CheckConfig::default()
    };
    let run = run_protocol2(&cfg, &AliceStrategy::learn_y()).unwrap();
    // pass iff at most 2 of 10 fair checks fail: (1 + 10 + 45) / 1024
    let want = 1.0 - 56.0 / 1024.0;
    assert!((run.summary.bob_abort.probability - want).abs() <= three_sigma(want, trials));
}
