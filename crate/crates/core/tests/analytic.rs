mod common;

use common::thinned_direct;
use pubsub_gossip::analytic::{self, CoverageParams, MeanCount};
use pubsub_gossip::DegreeDistribution;

fn distributions() -> Vec<(&'static str, DegreeDistribution)> {
    vec![
        ("poisson", DegreeDistribution::poisson(5.0).unwrap()),
        ("power-law", DegreeDistribution::power_law_with_cutoff(-3.3, None).unwrap()),
        ("aiello", DegreeDistribution::aiello(6.0, 1.0).unwrap()),
        ("two-point", DegreeDistribution::empirical([(1, 0.5), (3, 0.5)]).unwrap()),
    ]
}

fn params_grid() -> Vec<CoverageParams> {
    let mut v = Vec::new();
    for s in [0.0, 0.05, 0.1, 0.3, 0.7, 1.0] {
        for g in [0.0, 0.1, 0.4, 0.9] {
            v.push(CoverageParams::new(s, g).unwrap());
        }
    }
    v
}

#[test]
fn forward_pmfs_match_direct_summation() {
    for (name, d) in distributions() {
        let p = d.probabilities();
        let q = d.excess_probabilities();
        for params in params_grid() {
            let g = params.gamma_eff();
            let f = analytic::forward_distribution(&d, params);
            let fl = analytic::link_forward_distribution(&d, params);
            for i in [0usize, 1, 2, 3, 7, 20] {
                let want = thinned_direct(p, g, i);
                let got = f.get(i).copied().unwrap_or(0.0);
                assert!((got - want).abs() < 1e-10, "{name} f_{i} at {g}: {got} vs {want}");
                let want = thinned_direct(&q, g, i);
                let got = fl.get(i).copied().unwrap_or(0.0);
                assert!((got - want).abs() < 1e-10, "{name} link f_{i} at {g}");
            }
        }
    }
}

#[test]
fn generating_function_identity() {
    for (name, d) in distributions() {
        let p = d.probabilities();
        for params in params_grid() {
            let g = params.gamma_eff();
            let f = analytic::forward_distribution(&d, params);
            for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let lhs: f64 = f.iter().enumerate().map(|(i, fi)| fi * f64::powi(x, i as i32)).sum();
                let y = g * x + 1.0 - g;
                let rhs: f64 = p.iter().enumerate().map(|(j, pj)| pj * y.powi(j as i32)).sum();
                assert!((lhs - rhs).abs() < 1e-9, "{name} x={x} gamma_eff={g}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn mean_identities() {
    for (name, d) in distributions() {
        let m = d.moments();
        for params in params_grid() {
            let g = params.gamma_eff();
            let f = analytic::forward_distribution(&d, params);
            let fl = analytic::link_forward_distribution(&d, params);
            let mean = |v: &[f64]| v.iter().enumerate().map(|(i, x)| i as f64 * x).sum::<f64>();
            assert!((mean(&f) - g * m.mean_degree).abs() < 1e-9, "{name}");
            assert!((mean(&fl) - g * m.mean_excess).abs() < 1e-9, "{name}");
        }
    }
}

#[test]
fn closed_form_matches_direct_moments() {
    for (_, d) in distributions() {
        let p = d.probabilities();
        let m1: f64 = p.iter().enumerate().map(|(i, x)| i as f64 * x).sum();
        let m2: f64 = p.iter().enumerate().map(|(i, x)| (i * i) as f64 * x).sum();
        for params in params_grid() {
            let g = params.gamma_eff();
            let pred = analytic::predict(&d, params);
            let denom = (1.0 + g) * m1 - g * m2;
            match pred.mean_receivers {
                MeanCount::Finite(r) => {
                    assert!(denom > 0.0);
                    let want = 1.0 + g * m1 * m1 / denom;
                    assert!((r - want).abs() < 1e-9 * want);
                    assert!(r >= 1.0);
                    let s = pred.mean_subscribers.finite().unwrap();
                    assert!((s - params.sigma() * r).abs() < 1e-12 * r.max(1.0));
                }
                MeanCount::Divergent => assert!(denom < 1e-9 * m1),
            }
        }
    }
}

#[test]
fn divergence_agrees_with_threshold() {
    for (name, d) in distributions() {
        let t = analytic::threshold(&d).unwrap();
        for params in params_grid() {
            let pred = analytic::predict(&d, params);
            let g = params.gamma_eff();
            if (g - t).abs() > 1e-12 {
                assert_eq!(pred.mean_receivers.is_divergent(), t <= g, "{name} at {g}, threshold {t}");
            }
            if pred.branching_factor >= 1.0 {
                assert!(pred.mean_receivers.is_divergent());
            } else if pred.branching_factor < 1.0 - 1e-9 {
                assert!(!pred.mean_receivers.is_divergent());
            }
        }
    }
    let d = DegreeDistribution::empirical([(1, 1.0)]).unwrap();
    assert!(matches!(analytic::threshold(&d), Err(pubsub_gossip::Error::NoGiantComponentPossible)));
}

#[test]
fn coverage_grows_with_both_probabilities() {
    let d = DegreeDistribution::poisson(5.0).unwrap();
    let t = analytic::threshold(&d).unwrap();
    let steps: Vec<f64> = (0..=40).map(|k| k as f64 * 0.005).collect();
    for &s in &steps {
        let mut last = 0.0;
        for &g in &steps {
            let params = CoverageParams::new(s, g).unwrap();
            if params.gamma_eff() >= t - 1e-6 {
                break;
            }
            let r = analytic::predict(&d, params).mean_receivers.finite().unwrap();
            assert!(r >= last);
            last = r;
        }
    }
    for &g in &steps {
        let mut last = 0.0;
        for &s in &steps {
            let params = CoverageParams::new(s, g).unwrap();
            if params.gamma_eff() >= t - 1e-6 {
                break;
            }
            let r = analytic::predict(&d, params).mean_receivers.finite().unwrap();
            assert!(r >= last);
            last = r;
        }
    }
}

/// Every composition of `total` into `parts` positive summands.
fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if parts == 0 {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for a in 1..=total.saturating_sub(parts - 1) {
        cur.push(a);
        compositions(total - a, parts - 1, out, cur);
        cur.pop();
    }
}

/// Cluster-size laws by explicit sums over compositions.
fn cluster_by_compositions(f: &[f64], fl: &[f64], t: usize) -> (Vec<f64>, Vec<f64>) {
    let mut link = vec![0.0; t + 1];
    let mut node = vec![0.0; t + 1];
    for size in 1..=t {
        let rest = size - 1;
        let (mut l, mut n) = (0.0, 0.0);
        for j in 0..=rest {
            let mut comps = Vec::new();
            compositions(rest, j, &mut comps, &mut Vec::new());
            let s: f64 = comps.iter().map(|c| c.iter().map(|&a| link[a]).product::<f64>()).sum();
            l += fl.get(j).copied().unwrap_or(0.0) * s;
            n += f.get(j).copied().unwrap_or(0.0) * s;
        }
        link[size] = l;
        node[size] = n;
    }
    (node, link)
}

#[test]
fn cluster_recurrence_matches_composition_sums() {
    let t = 9;
    for (name, d) in distributions() {
        for params in [
            CoverageParams::new(0.1, 0.0).unwrap(),
            CoverageParams::new(0.05, 0.1).unwrap(),
            CoverageParams::new(0.6, 0.3).unwrap(),
        ] {
            let f = analytic::forward_distribution(&d, params);
            let fl = analytic::link_forward_distribution(&d, params);
            let (node, link) = cluster_by_compositions(&f, &fl, t);
            let got = analytic::cluster_size_pmf(&d, params, t).unwrap();
            assert_eq!(got.node_rooted[0], 0.0);
            assert_eq!(got.link_rooted[0], 0.0);
            for i in 1..=t {
                assert!((got.node_rooted[i] - node[i]).abs() < 1e-12, "{name} r_{i}");
                assert!((got.link_rooted[i] - link[i]).abs() < 1e-12, "{name} link r_{i}");
            }
            assert!(got.residual_mass >= 0.0 && got.link_residual_mass >= 0.0);
            assert_eq!(got.node_rooted[1], f[0]);
            assert_eq!(got.link_rooted[1], fl[0]);
        }
    }
}

#[test]
fn truncated_means_converge_below_threshold() {
    let d = DegreeDistribution::poisson(5.0).unwrap();
    for g in [0.05, 0.1, 0.15] {
        let params = CoverageParams::new(g, 0.0).unwrap();
        let target_link = 1.0 / (1.0 - g * d.moments().mean_excess);
        let mut t = 16;
        let pmf = loop {
            let pmf = analytic::cluster_size_pmf(&d, params, t).unwrap();
            if pmf.link_residual_mass < 1e-3 && pmf.residual_mass < 1e-3 {
                break pmf;
            }
            t *= 2;
        };
        let link = pmf.link_truncated_mean();
        assert!((link - target_link).abs() / target_link < 0.02, "{link} vs {target_link}");
        let node = pmf.truncated_mean();
        let want = analytic::predict(&d, params).mean_receivers.finite().unwrap();
        assert!((node - want).abs() / want < 0.02);
    }
}
