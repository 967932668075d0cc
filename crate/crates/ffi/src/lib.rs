//! C ABI over `pubsub_gossip`.
//!
//! Objects are opaque handles created by `pg_*_new`/`pg_*_generate` style
//! functions and released with the matching `pg_*_free`. Every fallible call
//! returns a [`PgStatus`] and writes its result through an out-pointer.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pubsub_gossip::analytic::{self, CoverageParams, MeanCount};
use pubsub_gossip::overlay::{self, OverlayGraph};
use pubsub_gossip::rng::{self, Purpose};
use pubsub_gossip::sim::{self, PubSubNetwork, RandomCoin, Ttl};
use pubsub_gossip::{DegreeDistribution, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InfeasibleSequence = 3,
    NoThreshold = 4,
    TooLarge = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

impl From<&Error> for PgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NoGiantComponentPossible => PgStatus::NoThreshold,
            Error::InfeasibleSequence(_) => PgStatus::InfeasibleSequence,
            Error::TooLarge { .. } => PgStatus::TooLarge,
            Error::GridPoint { source, .. } => PgStatus::from(source.as_ref()),
            Error::Io(_) | Error::Json(_) | Error::EmptyReport => PgStatus::Internal,
            _ => PgStatus::InvalidArgument,
        }
    }
}

/// Opaque degree distribution.
pub struct PgDistribution(DegreeDistribution);

/// Opaque overlay graph.
pub struct PgGraph(OverlayGraph);

/// Opaque overlay with subscriptions and neighbour caches.
pub struct PgNetwork(PubSubNetwork);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PgMoments {
    pub mean_degree: f64,
    pub second_moment: f64,
    pub mean_excess: f64,
}

/// Means are `INFINITY` when `divergent` is set.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PgPrediction {
    pub gamma_eff: f64,
    pub mean_receivers: f64,
    pub mean_subscribers: f64,
    pub branching_factor: f64,
    pub divergent: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PgDissemination {
    pub receivers: usize,
    pub subscribers_reached: usize,
    pub messages_sent: u64,
    pub max_hops: u32,
}

fn guard<F: FnOnce() -> PgStatus>(f: F) -> PgStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(PgStatus::Internal)
}

fn status<T>(r: pubsub_gossip::Result<T>, write: impl FnOnce(T)) -> PgStatus {
    match r {
        Ok(v) => {
            write(v);
            PgStatus::Ok
        }
        Err(e) => PgStatus::from(&e),
    }
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn pg_status_message(status: PgStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        PgStatus::Ok => b"ok\0",
        PgStatus::NullPointer => b"null pointer argument\0",
        PgStatus::InvalidArgument => b"invalid argument\0",
        PgStatus::InfeasibleSequence => b"infeasible degree sequence\0",
        PgStatus::NoThreshold => b"no finite percolation threshold\0",
        PgStatus::TooLarge => b"input too large for exact enumeration\0",
        PgStatus::BufferTooSmall => b"output buffer too small\0",
        PgStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Truncated Poisson distribution.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_poisson(mean: f64, out: *mut *mut PgDistribution) -> PgStatus {
    if out.is_null() {
        return PgStatus::NullPointer;
    }
    guard(|| status(DegreeDistribution::poisson(mean), |d| put_handle(out, PgDistribution(d))))
}

/// Power law `p_k ∝ k^exponent` on `k_min..=k_max`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_power_law(
    exponent: f64,
    k_min: usize,
    k_max: usize,
    out: *mut *mut PgDistribution,
) -> PgStatus {
    if out.is_null() {
        return PgStatus::NullPointer;
    }
    guard(|| {
        status(DegreeDistribution::power_law(exponent, k_min, k_max), |d| {
            put_handle(out, PgDistribution(d))
        })
    })
}

/// Degree histogram of the `(a, b)` fixed-size power-law construction.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_aiello(a: f64, b: f64, out: *mut *mut PgDistribution) -> PgStatus {
    if out.is_null() {
        return PgStatus::NullPointer;
    }
    guard(|| status(DegreeDistribution::aiello(a, b), |d| put_handle(out, PgDistribution(d))))
}

/// `pmf[k]` is the probability of degree `k`.
///
/// # Safety
/// `pmf` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_empirical(
    pmf: *const f64,
    len: usize,
    out: *mut *mut PgDistribution,
) -> PgStatus {
    if pmf.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let values = std::slice::from_raw_parts(pmf, len);
    guard(|| {
        let pairs = values.iter().copied().enumerate();
        status(DegreeDistribution::empirical(pairs), |d| put_handle(out, PgDistribution(d)))
    })
}

/// # Safety
/// `dist` must be null or a handle from a `pg_distribution_*` constructor
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_free(dist: *mut PgDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_distribution_moments(dist: *const PgDistribution, out: *mut PgMoments) -> PgStatus {
    if dist.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let m = (*dist).0.moments();
    *out = PgMoments {
        mean_degree: m.mean_degree,
        second_moment: m.second_moment,
        mean_excess: m.mean_excess,
    };
    PgStatus::Ok
}

/// Mean receivers and subscribers of one event.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_predict(
    dist: *const PgDistribution,
    sigma: f64,
    gamma: f64,
    out: *mut PgPrediction,
) -> PgStatus {
    if dist.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let dist = &(*dist).0;
    guard(|| {
        status(CoverageParams::new(sigma, gamma), |params| {
            let p = analytic::predict(dist, params);
            let value = |m: MeanCount| m.finite().unwrap_or(f64::INFINITY);
            *out = PgPrediction {
                gamma_eff: params.gamma_eff(),
                mean_receivers: value(p.mean_receivers),
                mean_subscribers: value(p.mean_subscribers),
                branching_factor: p.branching_factor,
                divergent: p.mean_receivers.is_divergent(),
            };
        })
    })
}

/// Critical effective gossip probability.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_threshold(dist: *const PgDistribution, out: *mut f64) -> PgStatus {
    if dist.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let dist = &(*dist).0;
    guard(|| status(analytic::threshold(dist), |t| *out = t))
}

/// Samples `n` degrees from `dist` and wires them with the erased
/// configuration model. The same `seed` always yields the same graph.
///
/// # Safety
/// `dist` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_generate(
    dist: *const PgDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut PgGraph,
) -> PgStatus {
    if dist.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let dist = &(*dist).0;
    guard(|| {
        let built = dist
            .sample_degree_sequence(n, &mut rng::stream(seed, Purpose::Degrees, 0, 0))
            .and_then(|deg| overlay::configuration_model(&deg, &mut rng::stream(seed, Purpose::Wiring, 0, 0)));
        status(built, |(g, _)| put_handle(out, PgGraph(g)))
    })
}

/// Graph from `edge_count` pairs laid out as `[u0, v0, u1, v1, ...]`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (or may be null
/// when `edge_count` is zero); `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_from_edges(
    n: usize,
    edges: *const u32,
    edge_count: usize,
    out: *mut *mut PgGraph,
) -> PgStatus {
    if out.is_null() || (edges.is_null() && edge_count > 0) {
        return PgStatus::NullPointer;
    }
    let flat: &[u32] = if edge_count == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(edges, 2 * edge_count)
    };
    guard(|| {
        let pairs = flat.chunks_exact(2).map(|e| (e[0] as usize, e[1] as usize));
        status(OverlayGraph::from_edges(n, pairs), |g| put_handle(out, PgGraph(g)))
    })
}

/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_free(graph: *mut PgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Zero for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_node_count(graph: *const PgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Zero for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_edge_count(graph: *const PgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Size of the largest connected component.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_giant_component(graph: *const PgGraph) -> usize {
    graph.as_ref().map_or(0, |g| overlay::giant_component(&g.0).size)
}

/// Copies `graph`, attaches the subscription flags and runs the
/// subscription phase.
///
/// # Safety
/// `graph` must be a live handle, `subscriptions` must point to `len`
/// readable bools, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pg_network_new(
    graph: *const PgGraph,
    subscriptions: *const bool,
    len: usize,
    out: *mut *mut PgNetwork,
) -> PgStatus {
    if graph.is_null() || out.is_null() || (subscriptions.is_null() && len > 0) {
        return PgStatus::NullPointer;
    }
    let subs: Vec<bool> = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(subscriptions, len).to_vec()
    };
    let graph = (*graph).0.clone();
    guard(|| status(PubSubNetwork::new(graph, subs), |net| put_handle(out, PgNetwork(net))))
}

/// Like [`pg_network_new`], subscribing each node independently with
/// probability `sigma`.
///
/// # Safety
/// `graph` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_network_random(
    graph: *const PgGraph,
    sigma: f64,
    seed: u64,
    out: *mut *mut PgNetwork,
) -> PgStatus {
    if graph.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let graph = (*graph).0.clone();
    guard(|| {
        let mut rng = rng::stream(seed, Purpose::Subscriptions, 0, 0);
        let net = sim::assign_subscriptions(&graph, sigma, &mut rng)
            .and_then(|subs| PubSubNetwork::new(graph, subs));
        status(net, |net| put_handle(out, PgNetwork(net)))
    })
}

/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_network_free(network: *mut PgNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Number of subscribers.
///
/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_network_subscriber_count(network: *const PgNetwork) -> usize {
    network
        .as_ref()
        .map_or(0, |n| n.0.subscriptions.iter().filter(|&&s| s).count())
}

/// Publishes one event. `ttl` of zero means unlimited.
///
/// # Safety
/// `network` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_network_publish(
    network: *const PgNetwork,
    publisher: usize,
    gamma: f64,
    ttl: u32,
    seed: u64,
    out: *mut PgDissemination,
) -> PgStatus {
    if network.is_null() || out.is_null() {
        return PgStatus::NullPointer;
    }
    let net = &(*network).0;
    let ttl = if ttl == 0 { Ttl::Infinite } else { Ttl::Hops(ttl) };
    guard(|| {
        let mut rng = rng::stream(seed, Purpose::Event, 0, 0);
        let r = net.publish(publisher, gamma, ttl, &mut RandomCoin(&mut rng));
        status(r, |r| {
            *out = PgDissemination {
                receivers: r.receivers,
                subscribers_reached: r.subscribers_reached,
                messages_sent: r.messages_sent,
                max_hops: r.max_hops,
            }
        })
    })
}

/// Exact receiver-count distribution of `network`, written to `pmf[0..=n]`.
///
/// # Safety
/// `network` must be a live handle and `pmf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn pg_network_oracle(
    network: *const PgNetwork,
    publisher: usize,
    gamma: f64,
    pmf: *mut f64,
    len: usize,
) -> PgStatus {
    if network.is_null() || pmf.is_null() {
        return PgStatus::NullPointer;
    }
    let net = &(*network).0;
    if len < net.graph.node_count() + 1 {
        return PgStatus::BufferTooSmall;
    }
    guard(|| {
        status(sim::smallgraph_oracle(&net.graph, &net.subscriptions, publisher, gamma), |dist| {
            ptr::copy_nonoverlapping(dist.as_ptr(), pmf, dist.len());
        })
    })
}
