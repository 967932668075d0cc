//! Discrete-event simulation of the subscription and dissemination protocols.
//!
//! Subscriptions are pushed to neighbours once, before any event is
//! published; each node then keeps a cache of which neighbours want the event
//! type. An event is disseminated from a FIFO message queue: a node that
//! receives an event it has not handled yet (and whose TTL is still positive)
//! marks it handled, decrements the TTL, sends it to every neighbour whose
//! cached subscription matches, and gossips it to every other neighbour with
//! probability `gamma`. The neighbour the event came from is never sent a copy.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, Error, Result};
use crate::overlay::OverlayGraph;
use crate::rng;

/// Hop budget carried by an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ttl {
    #[default]
    Infinite,
    Hops(u32),
}

impl Ttl {
    fn validate(self) -> Result<Self> {
        match self {
            Ttl::Hops(0) => Err(Error::Config("ttl must be at least 1".into())),
            other => Ok(other),
        }
    }
}

impl fmt::Display for Ttl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ttl::Infinite => f.write_str("inf"),
            Ttl::Hops(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Ttl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinite" | "Infinite" => Ok(Ttl::Infinite),
            other => other
                .parse::<u32>()
                .map(Ttl::Hops)
                .map_err(|_| Error::Config(format!("ttl must be a positive integer or 'inf', got {other:?}"))),
        }
    }
}

impl Serialize for Ttl {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ttl::Infinite => serializer.serialize_str("inf"),
            Ttl::Hops(h) => serializer.serialize_u32(*h),
        }
    }
}

impl<'de> Deserialize<'de> for Ttl {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Hops(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Hops(h) => Ok(Ttl::Hops(h)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// I.i.d. Bernoulli(`sigma`) subscription flag per node.
pub fn assign_subscriptions<R: RngCore + ?Sized>(
    graph: &OverlayGraph,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let sigma = check_probability("sigma", sigma)?;
    Ok((0..graph.node_count())
        .map(|_| rng::bernoulli(rng, sigma))
        .collect())
}

/// Per-node caches of neighbour subscriptions. The entry for `(v, u)` lives
/// in `v`'s adjacency slot for `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborCaches {
    entries: Vec<bool>,
    control_messages: u64,
}

impl NeighborCaches {
    /// Caches with every entry "not subscribed".
    pub fn empty(graph: &OverlayGraph) -> Self {
        Self {
            entries: vec![false; graph.link_count()],
            control_messages: 0,
        }
    }

    fn slot(graph: &OverlayGraph, holder: usize, about: usize) -> Option<usize> {
        graph
            .neighbors(holder)
            .binary_search(&(about as u32))
            .ok()
            .map(|k| graph.offset(holder) + k)
    }

    /// `node` announces a new subscription; every neighbour records it.
    pub fn subscribe(&mut self, graph: &OverlayGraph, node: usize) {
        self.announce(graph, node, true);
    }

    /// `node` withdraws its subscription; every neighbour removes the entry.
    pub fn unsubscribe(&mut self, graph: &OverlayGraph, node: usize) {
        self.announce(graph, node, false);
    }

    fn announce(&mut self, graph: &OverlayGraph, node: usize, subscribed: bool) {
        for &w in graph.neighbors(node) {
            self.control_messages += 1;
            if let Some(slot) = Self::slot(graph, w as usize, node) {
                self.entries[slot] = subscribed;
            }
        }
    }

    /// What `holder` believes about neighbour `about`; `None` if they are not adjacent.
    pub fn cached(&self, graph: &OverlayGraph, holder: usize, about: usize) -> Option<bool> {
        Self::slot(graph, holder, about).map(|s| self.entries[s])
    }

    /// `holder`'s whole cache, keyed by neighbour id.
    pub fn cache_of(&self, graph: &OverlayGraph, holder: usize) -> BTreeMap<usize, bool> {
        let base = graph.offset(holder);
        graph
            .neighbors(holder)
            .iter()
            .enumerate()
            .map(|(k, &u)| (u as usize, self.entries[base + k]))
            .collect()
    }

    /// Cache entry for directed link slot `slot` (see [`OverlayGraph::offset`]).
    #[inline]
    pub fn by_slot(&self, slot: usize) -> bool {
        self.entries[slot]
    }

    /// Subscribe and unsubscribe notifications sent so far.
    pub fn control_messages(&self) -> u64 {
        self.control_messages
    }
}

/// Every subscriber announces its subscription to all neighbours.
pub fn subscription_phase(graph: &OverlayGraph, subscriptions: &[bool]) -> Result<NeighborCaches> {
    check_len(graph, subscriptions)?;
    let mut caches = NeighborCaches::empty(graph);
    for (node, _) in subscriptions.iter().enumerate().filter(|(_, &s)| s) {
        caches.subscribe(graph, node);
    }
    Ok(caches)
}

fn check_len(graph: &OverlayGraph, subscriptions: &[bool]) -> Result<()> {
    if subscriptions.len() != graph.node_count() {
        return Err(Error::SubscriptionMismatch {
            got: subscriptions.len(),
            n: graph.node_count(),
        });
    }
    Ok(())
}

/// Source of gossip decisions for links towards non-subscribers. `slot` is
/// the directed link's adjacency slot.
pub trait GossipCoin {
    fn forward(&mut self, slot: usize, gamma: f64) -> bool;
}

/// Fresh Bernoulli(`gamma`) draw per decision.
pub struct RandomCoin<'a, R: RngCore + ?Sized>(pub &'a mut R);

impl<R: RngCore + ?Sized> GossipCoin for RandomCoin<'_, R> {
    #[inline]
    fn forward(&mut self, _slot: usize, gamma: f64) -> bool {
        rng::bernoulli(self.0, gamma)
    }
}

/// One fixed uniform per directed link, shared across `gamma` values:
/// a link open at `gamma` is open at every larger `gamma`.
#[derive(Debug, Clone)]
pub struct CoupledCoins {
    uniforms: Vec<f64>,
}

impl CoupledCoins {
    pub fn draw<R: RngCore + ?Sized>(graph: &OverlayGraph, rng: &mut R) -> Self {
        Self {
            uniforms: (0..graph.link_count()).map(|_| rng::uniform(rng)).collect(),
        }
    }
}

impl GossipCoin for CoupledCoins {
    #[inline]
    fn forward(&mut self, slot: usize, gamma: f64) -> bool {
        self.uniforms[slot] < gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DisseminationResult {
    /// Distinct nodes that processed the event, publisher included.
    pub receivers: usize,
    pub subscribers_reached: usize,
    pub messages_sent: u64,
    /// Largest hop distance at which a node first processed the event.
    pub max_hops: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SendRecord {
    pub from: u32,
    pub to: u32,
    /// Hop count of the message carrying the send (the receiver's distance).
    pub hop: u32,
}

/// Full record of one dissemination, for checking protocol properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisseminationTrace {
    pub result: DisseminationResult,
    /// Hop at which each node processed the event, if it did.
    pub first_hop: Vec<Option<u32>>,
    /// Remaining TTL each node held when it processed the event (`None` for
    /// unprocessed nodes or an infinite TTL).
    pub ttl_on_processing: Vec<Option<u32>>,
    /// Times each node passed the handled/TTL check.
    pub process_count: Vec<u32>,
    pub sends: Vec<SendRecord>,
}

struct Message {
    node: u32,
    sender: Option<u32>,
    ttl: Option<u32>,
    hop: u32,
}

struct Inputs<'a> {
    graph: &'a OverlayGraph,
    caches: &'a NeighborCaches,
    subscriptions: &'a [bool],
    publisher: usize,
    gamma: f64,
    ttl: Ttl,
}

impl<'a> Inputs<'a> {
    fn validate(self) -> Result<Self> {
        check_len(self.graph, self.subscriptions)?;
        if self.caches.entries.len() != self.graph.link_count() {
            return Err(Error::Config("neighbour caches belong to a different graph".into()));
        }
        if self.publisher >= self.graph.node_count() {
            return Err(Error::InvalidPublisher {
                publisher: self.publisher,
                n: self.graph.node_count(),
            });
        }
        check_probability("gamma", self.gamma)?;
        self.ttl.validate()?;
        Ok(self)
    }
}

fn run<C: GossipCoin + ?Sized>(
    inputs: &Inputs<'_>,
    coins: &mut C,
    mut trace: Option<&mut DisseminationTrace>,
) -> DisseminationResult {
    let graph = inputs.graph;
    let mut handled = vec![false; graph.node_count()];
    let mut result = DisseminationResult::default();
    let mut queue = VecDeque::new();
    queue.push_back(Message {
        node: inputs.publisher as u32,
        sender: None,
        ttl: match inputs.ttl {
            Ttl::Infinite => None,
            Ttl::Hops(h) => Some(h),
        },
        hop: 0,
    });

    while let Some(msg) = queue.pop_front() {
        let node = msg.node as usize;
        if handled[node] || msg.ttl == Some(0) {
            continue;
        }
        handled[node] = true;
        result.receivers += 1;
        if inputs.subscriptions[node] {
            result.subscribers_reached += 1;
        }
        result.max_hops = result.max_hops.max(msg.hop);
        if let Some(t) = trace.as_deref_mut() {
            t.first_hop[node] = Some(msg.hop);
            t.ttl_on_processing[node] = msg.ttl;
            t.process_count[node] += 1;
        }
        let ttl = msg.ttl.map(|t| t - 1);
        let base = graph.offset(node);
        let neighbors = graph.neighbors(node);
        let mut send = |w: u32, queue: &mut VecDeque<Message>, result: &mut DisseminationResult| {
            result.messages_sent += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.sends.push(SendRecord {
                    from: msg.node,
                    to: w,
                    hop: msg.hop + 1,
                });
            }
            queue.push_back(Message {
                node: w,
                sender: Some(msg.node),
                ttl,
                hop: msg.hop + 1,
            });
        };
        // Matching subscribers first, then gossip to the rest.
        for (k, &w) in neighbors.iter().enumerate() {
            if Some(w) != msg.sender && inputs.caches.by_slot(base + k) {
                send(w, &mut queue, &mut result);
            }
        }
        for (k, &w) in neighbors.iter().enumerate() {
            if Some(w) != msg.sender
                && !inputs.caches.by_slot(base + k)
                && coins.forward(base + k, inputs.gamma)
            {
                send(w, &mut queue, &mut result);
            }
        }
    }
    result
}

/// Publishes one event at `publisher` and runs the protocol to quiescence.
pub fn disseminate<R: RngCore + ?Sized>(
    graph: &OverlayGraph,
    caches: &NeighborCaches,
    subscriptions: &[bool],
    publisher: usize,
    gamma: f64,
    ttl: Ttl,
    rng: &mut R,
) -> Result<DisseminationResult> {
    disseminate_with(graph, caches, subscriptions, publisher, gamma, ttl, &mut RandomCoin(rng))
}

/// [`disseminate`] with an explicit source of gossip decisions.
pub fn disseminate_with<C: GossipCoin + ?Sized>(
    graph: &OverlayGraph,
    caches: &NeighborCaches,
    subscriptions: &[bool],
    publisher: usize,
    gamma: f64,
    ttl: Ttl,
    coins: &mut C,
) -> Result<DisseminationResult> {
    let inputs = Inputs {
        graph,
        caches,
        subscriptions,
        publisher,
        gamma,
        ttl,
    }
    .validate()?;
    Ok(run(&inputs, coins, None))
}

pub fn trace_dissemination<C: GossipCoin + ?Sized>(
    graph: &OverlayGraph,
    caches: &NeighborCaches,
    subscriptions: &[bool],
    publisher: usize,
    gamma: f64,
    ttl: Ttl,
    coins: &mut C,
) -> Result<DisseminationTrace> {
    let inputs = Inputs {
        graph,
        caches,
        subscriptions,
        publisher,
        gamma,
        ttl,
    }
    .validate()?;
    let n = graph.node_count();
    let mut trace = DisseminationTrace {
        result: DisseminationResult::default(),
        first_hop: vec![None; n],
        ttl_on_processing: vec![None; n],
        process_count: vec![0; n],
        sends: Vec::new(),
    };
    trace.result = run(&inputs, coins, Some(&mut trace));
    Ok(trace)
}

/// Enumeration limit for [`smallgraph_oracle`].
pub const ORACLE_MAX_LINKS: usize = 24;

/// Exact distribution of the receiver count (index = count) for an infinite
/// TTL. Every directed link `u -> w` with `w` a non-subscriber other than the
/// publisher carries an independent Bernoulli(`gamma`) gossip decision; links
/// into subscribers are always used. All `2^k` decision patterns are
/// enumerated and the publisher's reachable set is computed for each.
pub fn smallgraph_oracle(
    graph: &OverlayGraph,
    subscriptions: &[bool],
    publisher: usize,
    gamma: f64,
) -> Result<Vec<f64>> {
    check_len(graph, subscriptions)?;
    check_probability("gamma", gamma)?;
    let n = graph.node_count();
    if publisher >= n {
        return Err(Error::InvalidPublisher { publisher, n });
    }
    if n > 64 {
        return Err(Error::TooLarge {
            links: graph.link_count(),
            limit: ORACLE_MAX_LINKS,
        });
    }

    // Per node: always-open targets, plus the coin-controlled links.
    let mut forced = vec![0u64; n];
    let mut coin_links: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for &w in graph.neighbors(u) {
            let w = w as usize;
            if subscriptions[w] {
                forced[u] |= 1 << w;
            } else if w != publisher {
                coin_links.push((u, w));
            }
        }
    }
    let k = coin_links.len();
    if k > ORACLE_MAX_LINKS {
        return Err(Error::TooLarge {
            links: k,
            limit: ORACLE_MAX_LINKS,
        });
    }

    let mut pmf = vec![0.0; n + 1];
    let masks: Box<dyn Iterator<Item = u32>> = if gamma == 0.0 {
        Box::new(std::iter::once(0))
    } else if gamma == 1.0 {
        Box::new(std::iter::once(((1u64 << k) - 1) as u32))
    } else {
        Box::new(0..(1u32 << k))
    };
    let mut open = vec![0u64; n];
    for mask in masks {
        open.copy_from_slice(&forced);
        for (bit, &(u, w)) in coin_links.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                open[u] |= 1 << w;
            }
        }
        let mut reached = 1u64 << publisher;
        let mut frontier = reached;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= open[u];
            }
            frontier = next & !reached;
            reached |= next;
        }
        let on = mask.count_ones() as i32;
        let weight = gamma.powi(on) * (1.0 - gamma).powi(k as i32 - on);
        pmf[reached.count_ones() as usize] += weight;
    }
    Ok(pmf)
}

/// Graph, subscriptions and the caches built from them.
#[derive(Debug, Clone)]
pub struct PubSubNetwork {
    pub graph: OverlayGraph,
    pub subscriptions: Vec<bool>,
    pub caches: NeighborCaches,
}

impl PubSubNetwork {
    pub fn new(graph: OverlayGraph, subscriptions: Vec<bool>) -> Result<Self> {
        let caches = subscription_phase(&graph, &subscriptions)?;
        Ok(Self {
            graph,
            subscriptions,
            caches,
        })
    }

    pub fn publish<C: GossipCoin + ?Sized>(
        &self,
        publisher: usize,
        gamma: f64,
        ttl: Ttl,
        coins: &mut C,
    ) -> Result<DisseminationResult> {
        disseminate_with(
            &self.graph,
            &self.caches,
            &self.subscriptions,
            publisher,
            gamma,
            ttl,
            coins,
        )
    }
}

/// One CSV row of per-event output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub network_id: u64,
    pub event_id: u64,
    pub publisher: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub ttl: Ttl,
    pub result: DisseminationResult,
}

impl EventRecord {
    pub const CSV_HEADER: &'static str = "network_id,event_id,publisher,sigma,gamma,ttl,receivers,subscribers_reached,messages_sent,max_hops";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.network_id,
            self.event_id,
            self.publisher,
            self.sigma,
            self.gamma,
            self.ttl,
            self.result.receivers,
            self.result.subscribers_reached,
            self.result.messages_sent,
            self.result.max_hops
        )
    }
}
