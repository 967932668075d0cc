#![allow(dead_code)]

use pubsub_gossip::overlay::OverlayGraph;
use pubsub_gossip::rng;
use pubsub_gossip::sim::{self, CoupledCoins, RandomCoin, Ttl};
use rand::RngCore;

/// G(n, p) graph.
pub fn random_graph<R: RngCore>(n: usize, p: f64, rng: &mut R) -> OverlayGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng::bernoulli(rng, p) {
                edges.push((u, v));
            }
        }
    }
    OverlayGraph::from_edges(n, edges).unwrap()
}

pub fn random_subscriptions<R: RngCore>(n: usize, sigma: f64, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng::bernoulli(rng, sigma)).collect()
}

/// One randomized protocol case.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: OverlayGraph,
    pub subscriptions: Vec<bool>,
    pub publisher: usize,
    pub gamma: f64,
    pub ttl: Ttl,
    pub seed: u64,
}

impl Case {
    pub fn generate(seed: u64) -> Case {
        let mut r = rng::seeded(seed);
        let n = 2 + rng::below(&mut r, 39);
        let p = 0.05 + 0.4 * rng::uniform(&mut r);
        let graph = random_graph(n, p, &mut r);
        let sigma = rng::uniform(&mut r);
        let subscriptions = random_subscriptions(n, sigma, &mut r);
        let publisher = rng::below(&mut r, n);
        let gamma = rng::uniform(&mut r);
        let ttl = if rng::bernoulli(&mut r, 0.5) {
            Ttl::Infinite
        } else {
            Ttl::Hops(1 + rng::below(&mut r, 6) as u32)
        };
        Case {
            graph,
            subscriptions,
            publisher,
            gamma,
            ttl,
            seed,
        }
    }
}

/// Checks at-most-once relay, sender exclusion, coupling monotonicity, TTL
/// sufficiency and the subscriber guarantee on one case. Returns the
/// description of every violated property.
pub fn protocol_violations(case: &Case) -> Vec<String> {
    let mut out = Vec::new();
    let g = &case.graph;
    let n = g.node_count();
    let caches = sim::subscription_phase(g, &case.subscriptions).unwrap();

    let mut coin_rng = rng::seeded(case.seed ^ 0x5eed);
    let trace = sim::trace_dissemination(
        g,
        &caches,
        &case.subscriptions,
        case.publisher,
        case.gamma,
        case.ttl,
        &mut RandomCoin(&mut coin_rng),
    )
    .unwrap();

    // At-most-once relay.
    if trace.process_count.iter().any(|&c| c > 1) {
        out.push("a node processed the event twice".into());
    }
    let degree_sum: usize = (0..n).filter(|&u| trace.first_hop[u].is_some()).map(|u| g.degree(u)).sum();
    if trace.result.messages_sent as usize > degree_sum {
        out.push("messages_sent exceeds degree sum of receivers".into());
    }
    let mut pairs: Vec<(u32, u32)> = trace.sends.iter().map(|s| (s.from, s.to)).collect();
    pairs.sort_unstable();
    if pairs.windows(2).any(|w| w[0] == w[1]) {
        out.push("a link carried the event twice in one direction".into());
    }
    if trace.sends.iter().any(|s| !g.has_edge(s.from as usize, s.to as usize)) {
        out.push("send along a non-link".into());
    }

    // Sender exclusion: the first send to a node is the one it processes.
    let mut sender = vec![None; n];
    for s in &trace.sends {
        let to = s.to as usize;
        if sender[to].is_none() && trace.first_hop[to].is_some() && to != case.publisher {
            sender[to] = Some(s.from);
        }
    }
    for s in &trace.sends {
        if sender[s.from as usize] == Some(s.to) {
            out.push(format!("node {} sent the event back to its sender {}", s.from, s.to));
        }
    }

    // Subscriber guarantee.
    for u in 0..n {
        let forwards = match (trace.first_hop[u], trace.ttl_on_processing[u]) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(_), Some(t)) => t > 1,
        };
        if !forwards {
            continue;
        }
        for &w in g.neighbors(u) {
            if case.subscriptions[w as usize] && trace.first_hop[w as usize].is_none() {
                out.push(format!("subscriber {w} next to relaying node {u} was missed"));
            }
        }
    }

    // TTL sufficiency: n hops behave like an infinite budget.
    let run = |ttl: Ttl| {
        let mut r = rng::seeded(case.seed ^ 0x77);
        sim::disseminate(g, &caches, &case.subscriptions, case.publisher, case.gamma, ttl, &mut r).unwrap()
    };
    if run(Ttl::Infinite) != run(Ttl::Hops(n as u32)) {
        out.push("ttl=n differs from infinite ttl".into());
    }

    // Coupling: receiver sets grow with gamma under shared link uniforms.
    let coins = CoupledCoins::draw(g, &mut rng::seeded(case.seed ^ 0xc0));
    let reached = |gamma: f64| {
        let t = sim::trace_dissemination(
            g,
            &caches,
            &case.subscriptions,
            case.publisher,
            gamma,
            Ttl::Infinite,
            &mut coins.clone(),
        )
        .unwrap();
        t.first_hop.iter().map(Option::is_some).collect::<Vec<bool>>()
    };
    let low = case.gamma * 0.5;
    let (a, b) = (reached(low), reached(case.gamma));
    if a.iter().zip(&b).any(|(&x, &y)| x && !y) {
        out.push(format!("coverage at gamma={low} not contained in coverage at gamma={}", case.gamma));
    }
    out
}

/// Connected-or-not small graphs whose oracle enumeration stays within the
/// link limit, with mixed subscriber patterns.
pub fn oracle_corpus(count: usize, seed: u64) -> Vec<(OverlayGraph, Vec<bool>, usize)> {
    let mut r = rng::seeded(seed);
    let mut corpus = Vec::with_capacity(count);
    while corpus.len() < count {
        let n = 2 + rng::below(&mut r, 7);
        let p = 0.2 + 0.5 * rng::uniform(&mut r);
        let graph = random_graph(n, p, &mut r);
        let subs = random_subscriptions(n, 0.35, &mut r);
        let publisher = rng::below(&mut r, n);
        if sim::smallgraph_oracle(&graph, &subs, publisher, 0.5).is_ok() {
            corpus.push((graph, subs, publisher));
        }
    }
    corpus
}

/// Empirical receiver-count distribution over `trials` independent runs.
pub fn monte_carlo_pmf(
    graph: &OverlayGraph,
    subs: &[bool],
    publisher: usize,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Vec<f64> {
    let caches = sim::subscription_phase(graph, subs).unwrap();
    let mut r = rng::seeded(seed);
    let mut counts = vec![0u64; graph.node_count() + 1];
    for _ in 0..trials {
        let res = sim::disseminate(graph, &caches, subs, publisher, gamma, Ttl::Infinite, &mut r).unwrap();
        counts[res.receivers] += 1;
    }
    counts.iter().map(|&c| c as f64 / trials as f64).collect()
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// `Σ_{j>=i} w_j C(j, i) g^i (1-g)^(j-i)` by direct summation with log
/// binomials.
pub fn thinned_direct(weights: &[f64], g: f64, i: usize) -> f64 {
    let ln_fact = |k: usize| (1..=k).map(|x| (x as f64).ln()).sum::<f64>();
    let mut total = 0.0;
    for (j, &w) in weights.iter().enumerate().skip(i) {
        if w == 0.0 {
            continue;
        }
        let ln_c = ln_fact(j) - ln_fact(i) - ln_fact(j - i);
        let term = if g == 0.0 {
            if i == 0 { 1.0 } else { 0.0 }
        } else if g == 1.0 {
            if i == j { 1.0 } else { 0.0 }
        } else {
            (ln_c + i as f64 * g.ln() + (j - i) as f64 * (1.0 - g).ln()).exp()
        };
        total += w * term;
    }
    total
}
