use proptest::prelude::*;
use pubsub_gossip::degree_dist::{self, DegreeDistribution};
use pubsub_gossip::rng;

fn sums_to_one(p: &[f64]) -> bool {
    (p.iter().sum::<f64>() - 1.0).abs() < 1e-9
}

/// `q_i = (i + 1) p_(i+1) / <p>` from the pmf alone.
fn excess_direct(p: &[f64]) -> Vec<f64> {
    let mean: f64 = p.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
    (0..p.len().saturating_sub(1))
        .map(|i| (i + 1) as f64 * p[i + 1] / mean)
        .collect()
}

fn check(d: &DegreeDistribution) {
    let p = d.probabilities();
    assert!(sums_to_one(p));
    let q = d.excess_probabilities();
    assert!(sums_to_one(&q));
    for (a, b) in q.iter().zip(excess_direct(p)) {
        assert!((a - b).abs() < 1e-12);
    }
    let m = d.moments();
    let second: f64 = p.iter().enumerate().map(|(i, x)| (i * i) as f64 * x).sum();
    assert!((m.second_moment - second).abs() < 1e-9 * second.max(1.0));
    let excess_mean: f64 = q.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
    assert!((m.mean_excess - excess_mean).abs() < 1e-9 * excess_mean.max(1.0));
}

#[test]
fn named_distributions_are_normalized() {
    check(&DegreeDistribution::poisson(5.0).unwrap());
    check(&DegreeDistribution::power_law_with_cutoff(-3.3, None).unwrap());
    check(&DegreeDistribution::power_law_with_cutoff(-3.3, Some(10_000)).unwrap());
    check(&DegreeDistribution::aiello(6.0, 1.0).unwrap());
}

#[test]
fn power_law_is_decreasing() {
    let d = DegreeDistribution::power_law_with_cutoff(-3.3, None).unwrap();
    assert_eq!(d.k_max(), 1000);
    let p = d.probabilities();
    assert_eq!(p[0], 0.0);
    assert!(p[1..].windows(2).all(|w| w[1] < w[0]));
    assert_eq!(degree_dist::power_law_cutoff(Some(10_000)), 100);
}

#[test]
fn sampled_sequences_follow_the_distribution() {
    let d = DegreeDistribution::poisson(5.0).unwrap();
    let seq = d.sample_degree_sequence(200_000, &mut rng::seeded(1)).unwrap();
    assert_eq!(seq.iter().sum::<usize>() % 2, 0);
    let mean = seq.iter().sum::<usize>() as f64 / seq.len() as f64;
    assert!((mean - 5.0).abs() < 0.03, "mean {mean}");
    let zeros = seq.iter().filter(|&&k| k == 0).count() as f64 / seq.len() as f64;
    assert!((zeros - (-5.0f64).exp()).abs() < 0.002);
}

#[test]
fn aiello_sequence_matches_counts() {
    let seq = degree_dist::aiello_degree_sequence(6.0, 1.0).unwrap();
    let counts = degree_dist::aiello_counts(6.0, 1.0).unwrap();
    assert_eq!(seq.len(), counts.iter().map(|&(_, c)| c).sum::<usize>());
    let e6 = 6f64.exp();
    for &(x, c) in &counts {
        assert_eq!(c, (e6 / x as f64).floor() as usize);
    }
}

proptest! {
    #[test]
    fn empirical_tables_normalize(weights in prop::collection::vec(0.0f64..1.0, 2..30)) {
        prop_assume!(weights[1..].iter().any(|&w| w > 1e-3));
        let total: f64 = weights.iter().sum();
        let table: Vec<(usize, f64)> = weights.iter().map(|w| w / total).enumerate().collect();
        let d = DegreeDistribution::empirical(table).unwrap();
        check(&d);
    }

    #[test]
    fn degree_files_round_trip(seq in prop::collection::vec(0usize..500, 0..200)) {
        let mut buf = Vec::new();
        degree_dist::write_degree_sequence(&mut buf, &seq).unwrap();
        prop_assert_eq!(degree_dist::read_degree_sequence(buf.as_slice()).unwrap(), seq);
    }

    #[test]
    fn parity_fixup_keeps_sums_even(mean in 0.5f64..12.0, n in 2usize..300, seed in any::<u64>()) {
        let d = DegreeDistribution::poisson(mean).unwrap();
        let seq = d.sample_degree_sequence(n, &mut rng::seeded(seed)).unwrap();
        prop_assert_eq!(seq.len(), n);
        prop_assert_eq!(seq.iter().sum::<usize>() % 2, 0);
    }
}
