mod common;

use proptest::prelude::*;
use pubsub_gossip::overlay::{self, OverlayGraph};
use pubsub_gossip::rng::{self, Purpose};
use pubsub_gossip::DegreeDistribution;

fn poisson_graph(n: usize, seed: u64) -> (Vec<usize>, OverlayGraph, overlay::ConstructionReport) {
    let d = DegreeDistribution::poisson(5.0).unwrap();
    let degrees = d
        .sample_degree_sequence(n, &mut rng::stream(seed, Purpose::Degrees, 0, 0))
        .unwrap();
    let (g, report) = overlay::configuration_model(&degrees, &mut rng::stream(seed, Purpose::Wiring, 0, 0)).unwrap();
    (degrees, g, report)
}

fn edge_list(g: &OverlayGraph) -> Vec<u8> {
    let mut buf = Vec::new();
    overlay::write_edge_list(g, &mut buf).unwrap();
    buf
}

#[test]
fn construction_is_deterministic() {
    let (_, a, ra) = poisson_graph(3000, 17);
    let (_, b, rb) = poisson_graph(3000, 17);
    assert_eq!(edge_list(&a), edge_list(&b));
    assert_eq!(ra, rb);
    let (_, c, _) = poisson_graph(3000, 18);
    assert_ne!(edge_list(&a), edge_list(&c));
}

#[test]
fn graphs_are_simple_and_symmetric() {
    let (_, g, _) = poisson_graph(2000, 3);
    for u in 0..g.node_count() {
        let row = g.neighbors(u);
        assert!(row.windows(2).all(|w| w[0] < w[1]));
        for &v in row {
            assert_ne!(v as usize, u);
            assert!(g.has_edge(v as usize, u));
        }
    }
    assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
}

#[test]
fn poisson_overlays_at_scale() {
    let n = 10_000;
    let source = DegreeDistribution::poisson(5.0).unwrap();
    for seed in 0..10 {
        let (target, g, report) = poisson_graph(n, seed);
        let realized = g.degrees();
        let deviation: usize = realized.iter().zip(&target).map(|(a, b)| a.abs_diff(*b)).sum();
        assert!(deviation <= 2 * report.discarded_stubs);
        assert_eq!(2 * report.edges + report.discarded_stubs, report.target_stubs);

        let mean = realized.iter().sum::<usize>() as f64 / n as f64;
        assert!((mean - 5.0).abs() / 5.0 < 0.01, "seed {seed}: mean degree {mean}");
        let discarded = report.discarded_stubs as f64 / report.target_stubs as f64;
        assert!(discarded < 0.005, "seed {seed}: discarded fraction {discarded}");
        let giant = overlay::giant_component(&g).size;
        assert!(giant as f64 > 0.99 * n as f64, "seed {seed}: giant {giant}");

        let empirical = DegreeDistribution::from_degree_sequence(&realized).unwrap().moments();
        let m = source.moments();
        assert!((empirical.mean_degree - m.mean_degree).abs() / m.mean_degree < 0.02);
        assert!((empirical.second_moment - m.second_moment).abs() / m.second_moment < 0.02);
    }
}

#[test]
fn attachment_is_not_local() {
    let n = 10_000;
    let bound = 5.0 * DegreeDistribution::poisson(5.0).unwrap().moments().mean_excess / n as f64;
    for seed in 100..120 {
        let (_, g, _) = poisson_graph(n, seed);
        let c = g.global_clustering();
        assert!(c < bound, "seed {seed}: clustering {c} >= {bound}");
    }
}

#[test]
fn aiello_graph_keeps_its_hub() {
    let degrees = pubsub_gossip::degree_dist::aiello_degree_sequence(6.0, 1.0).unwrap();
    let mut degrees = degrees;
    if degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[0] += 1;
    }
    let (g, report) = overlay::configuration_model(&degrees, &mut rng::seeded(2)).unwrap();
    assert_eq!(g.node_count(), 2482);
    let max = g.degrees().into_iter().max().unwrap();
    assert!(max + report.discarded_stubs >= 403);
    assert!(report.discarded_stubs * 100 < report.target_stubs);
}

#[test]
fn construction_report_row() {
    let (_, g, report) = poisson_graph(500, 1);
    let giant = overlay::giant_component(&g).size;
    let row = report.csv_row(1, giant);
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), overlay::ConstructionReport::CSV_HEADER.split(',').count());
    assert_eq!(fields[1], "500");
    assert_eq!(fields[2], g.edge_count().to_string());
}

#[test]
fn malformed_edge_lists_report_lines() {
    for (text, line) in [
        ("# nodes 3 edges 1\n0 1\n1 x\n", 3),
        ("0 1\n2 2\n", 2),
        ("# nodes 2 edges 1\n0 5\n", 2),
        ("0 1\n1 0\n", 2),
    ] {
        match overlay::read_edge_list(text.as_bytes()) {
            Err(pubsub_gossip::Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    let empty = overlay::read_edge_list("# nodes 2 edges 0\n".as_bytes()).unwrap();
    assert_eq!((empty.node_count(), empty.edge_count()), (2, 0));
}

proptest! {
    #[test]
    fn edge_lists_round_trip(n in 1usize..40, p in 0.0f64..0.6, seed in any::<u64>()) {
        let g = common::random_graph(n, p, &mut rng::seeded(seed));
        let text = edge_list(&g);
        prop_assert_eq!(overlay::read_edge_list(text.as_slice()).unwrap(), g);
    }

    #[test]
    fn small_sequences_stay_simple(degrees in prop::collection::vec(0usize..6, 7..30), seed in any::<u64>()) {
        let mut degrees = degrees;
        if degrees.iter().sum::<usize>() % 2 == 1 {
            degrees[0] += 1;
        }
        let (g, r) = overlay::configuration_model(&degrees, &mut rng::seeded(seed)).unwrap();
        let dev: usize = g.degrees().iter().zip(&degrees).map(|(a, b)| a.abs_diff(*b)).sum();
        prop_assert!(dev <= 2 * r.discarded_stubs);
        for (u, v) in g.edges() {
            prop_assert!(u < v);
        }
    }
}
