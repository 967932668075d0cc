//! Overlay graphs built by random stub matching.

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng;

/// Retry passes over rejected stubs before the remainder is discarded.
pub const MAX_RETRY_PASSES: usize = 100;

/// Undirected simple graph on nodes `0..n`, stored as sorted adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlayGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl OverlayGraph {
    fn from_adjacency(mut adjacency: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(adjacency.iter().map(Vec::len).sum());
        for row in &mut adjacency {
            row.sort_unstable();
            neighbors.extend_from_slice(row);
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate edges
    /// and ids outside `0..n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InfeasibleSequence(format!(
                    "edge {u}-{v} outside a {n}-node graph"
                )));
            }
            if u == v {
                return Err(Error::InfeasibleSequence(format!("self-loop at {u}")));
            }
            if !seen.insert(edge_key(u as u32, v as u32)) {
                return Err(Error::InfeasibleSequence(format!("duplicate edge {u}-{v}")));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        Ok(Self::from_adjacency(adjacency))
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).collect()
    }

    /// Sorted neighbour ids of `u`.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Index of `u`'s first adjacency slot. Slot `offset(u) + k` is the
    /// directed link from `u` to `neighbors(u)[k]`.
    pub fn offset(&self, u: usize) -> usize {
        self.offsets[u]
    }

    /// Number of directed links, twice the edge count.
    pub fn link_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// `3 × triangles / connected triples`.
    pub fn global_clustering(&self) -> f64 {
        let mut triangles = 0u64;
        let mut triples = 0u64;
        for u in 0..self.node_count() {
            let d = self.degree(u) as u64;
            triples += d * d.saturating_sub(1) / 2;
            for &v in self.neighbors(u).iter().filter(|&&v| v as usize > u) {
                triangles += sorted_intersection_above(self.neighbors(u), self.neighbors(v as usize), v);
            }
        }
        if triples == 0 {
            0.0
        } else {
            3.0 * triangles as f64 / triples as f64
        }
    }
}

fn sorted_intersection_above(a: &[u32], b: &[u32], floor: u32) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] > floor {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[inline]
fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    ((a as u64) << 32) | b as u64
}

/// Outcome of stub matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionReport {
    pub n: usize,
    pub edges: usize,
    pub target_stubs: usize,
    /// Stubs still unmatched after the retry passes.
    pub discarded_stubs: usize,
    pub passes: usize,
}

impl ConstructionReport {
    pub const CSV_HEADER: &'static str = "seed,n,edges,discarded_stubs,giant_component_size";

    pub fn csv_row(&self, seed: u64, giant_component_size: usize) -> String {
        format!(
            "{seed},{},{},{},{giant_component_size}",
            self.n, self.edges, self.discarded_stubs
        )
    }
}

/// Erased configuration model. Stubs are shuffled and paired in order; a pair
/// that would form a self-loop or a parallel edge is put back and retried in
/// the next pass, up to [`MAX_RETRY_PASSES`] times. Node `i` targets
/// `degrees[i]`.
pub fn configuration_model<R: RngCore + ?Sized>(
    degrees: &[usize],
    rng: &mut R,
) -> Result<(OverlayGraph, ConstructionReport)> {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::InfeasibleSequence(format!("degree sum {total} is odd")));
    }
    if let Some((node, &d)) = degrees.iter().enumerate().find(|&(_, &d)| d >= n && d > 0) {
        return Err(Error::InfeasibleSequence(format!(
            "node {node} has degree {d} in a {n}-node graph"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::InfeasibleSequence("too many nodes".into()));
    }

    let mut pending: Vec<u32> = Vec::with_capacity(total);
    for (node, &d) in degrees.iter().enumerate() {
        pending.extend(std::iter::repeat_n(node as u32, d));
    }
    let mut adjacency: Vec<Vec<u32>> = degrees.iter().map(|&d| Vec::with_capacity(d)).collect();
    let mut present: HashSet<u64> = HashSet::with_capacity(total / 2);
    let mut rejected = Vec::new();
    let mut passes = 0;

    while !pending.is_empty() && passes <= MAX_RETRY_PASSES {
        passes += 1;
        rng::shuffle(&mut pending, rng);
        rejected.clear();
        for pair in pending.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u != v && present.insert(edge_key(u, v)) {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            } else {
                rejected.extend_from_slice(pair);
            }
        }
        std::mem::swap(&mut pending, &mut rejected);
    }

    let graph = OverlayGraph::from_adjacency(adjacency);
    let report = ConstructionReport {
        n,
        edges: graph.edge_count(),
        target_stubs: total,
        discarded_stubs: pending.len(),
        passes,
    };
    Ok((graph, report))
}

/// Connected-component labels (numbered in order of their lowest node id) and sizes.
pub fn components(graph: &OverlayGraph) -> (Vec<u32>, Vec<usize>) {
    let n = graph.node_count();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        label[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in graph.neighbors(u) {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = id;
                    queue.push_back(v as usize);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GiantComponent {
    pub size: usize,
    pub membership: Vec<bool>,
}

/// Largest connected component; ties go to the one holding the lowest node id.
pub fn giant_component(graph: &OverlayGraph) -> GiantComponent {
    let (label, sizes) = components(graph);
    let mut best: Option<(u32, usize)> = None;
    for (id, &s) in sizes.iter().enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((id as u32, s));
        }
    }
    match best {
        Some((id, size)) => GiantComponent {
            size,
            membership: label.iter().map(|&l| l == id).collect(),
        },
        None => GiantComponent {
            size: 0,
            membership: Vec::new(),
        },
    }
}

/// Writes `# nodes N edges M` followed by one `u v` line per edge, `u < v`,
/// ascending.
pub fn write_edge_list<W: Write>(graph: &OverlayGraph, mut sink: W) -> Result<()> {
    writeln!(sink, "# nodes {} edges {}", graph.node_count(), graph.edge_count())?;
    for (u, v) in graph.edges() {
        writeln!(sink, "{u} {v}")?;
    }
    Ok(())
}

/// Reads the format of [`write_edge_list`]. Without a `# nodes` header the
/// node count is one more than the largest id seen.
pub fn read_edge_list<R: BufRead>(source: R) -> Result<OverlayGraph> {
    let mut declared = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if declared.is_none() && words.next() == Some("nodes") {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(lineno, "malformed '# nodes' header"))?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let mut id = |what: &str| -> Result<usize> {
            fields
                .next()
                .ok_or_else(|| Error::parse(lineno, format!("missing {what} node id")))?
                .parse::<usize>()
                .map_err(|e| Error::parse(lineno, format!("bad {what} node id: {e}")))
        };
        let u = id("first")?;
        let v = id("second")?;
        if fields.next().is_some() {
            return Err(Error::parse(lineno, "expected exactly two node ids"));
        }
        if u == v {
            return Err(Error::parse(lineno, format!("self-loop at {u}")));
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(Error::parse(lineno, format!("node id beyond declared {n} nodes")));
            }
        }
        if !seen.insert(edge_key(u as u32, v as u32)) {
            return Err(Error::parse(lineno, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    OverlayGraph::from_edges(n, edges)
}
