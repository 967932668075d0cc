use crate::analytic::{self, CoverageParams, CriticalValue, MeanCount};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::overlay::{self, ConstructionReport, OverlayGraph};
use crate::rng::{self, Purpose};
use crate::sim::{PubSubNetwork, RandomCoin, Ttl};

/// An event "percolates" at finite size when it reaches more than this
/// fraction of the giant component. The largest component only counts as
/// giant when it itself holds more than this fraction of all nodes.
pub const PERCOLATION_FRACTION: f64 = 0.1;

/// The empirical transition is the first grid value where more than this
/// fraction of events percolate.
pub const MAJORITY: f64 = 0.5;

/// One overlay of an experiment together with its subscription uniforms.
/// Node `i` subscribes at `sigma` iff `subscription_uniforms[i] < sigma`, so
/// subscriber sets are nested across the sigma grid.
#[derive(Debug, Clone)]
pub struct ReplicateNetwork {
    pub network_id: u64,
    pub graph: OverlayGraph,
    pub report: ConstructionReport,
    pub giant_component_size: usize,
    pub subscription_uniforms: Vec<f64>,
}

impl ReplicateNetwork {
    pub fn build(config: &ExperimentConfig, network_id: u64) -> Result<Self> {
        let seed = config.master_seed;
        let n = config.nodes()?;
        let degrees = config
            .topology
            .degree_sequence(n, &mut rng::stream(seed, Purpose::Degrees, network_id, 0))?;
        let (graph, report) =
            overlay::configuration_model(&degrees, &mut rng::stream(seed, Purpose::Wiring, network_id, 0))?;
        let giant_component_size = overlay::giant_component(&graph).size;
        let mut subs_rng = rng::stream(seed, Purpose::Subscriptions, network_id, 0);
        let subscription_uniforms = (0..n).map(|_| rng::uniform(&mut subs_rng)).collect();
        Ok(Self {
            network_id,
            graph,
            report,
            giant_component_size,
            subscription_uniforms,
        })
    }

    pub fn subscriptions(&self, sigma: f64) -> Vec<bool> {
        self.subscription_uniforms.iter().map(|&u| u < sigma).collect()
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<PubSubNetwork> {
        PubSubNetwork::new(self.graph.clone(), self.subscriptions(sigma))
    }
}

/// Publishes event `event_id` from a uniformly random node. The publisher and
/// all gossip coins come from the event's own stream.
pub fn run_event(
    network: &PubSubNetwork,
    master_seed: u64,
    network_id: u64,
    event_id: u64,
    gamma: f64,
    ttl: Ttl,
) -> Result<(usize, crate::sim::DisseminationResult)> {
    let mut stream = rng::stream(master_seed, Purpose::Event, network_id, event_id);
    let publisher = rng::below(&mut stream, network.graph.node_count());
    let result = network.publish(publisher, gamma, ttl, &mut RandomCoin(&mut stream))?;
    Ok((publisher, result))
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    count: u64,
    receivers: f64,
    receivers_sq: f64,
    subscribers: f64,
}

impl Accumulator {
    fn add(&mut self, receivers: usize, subscribers: usize) {
        let r = receivers as f64;
        self.count += 1;
        self.receivers += r;
        self.receivers_sq += r * r;
        self.subscribers += subscribers as f64;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.receivers += other.receivers;
        self.receivers_sq += other.receivers_sq;
        self.subscribers += other.subscribers;
    }

    fn mean_receivers(&self) -> f64 {
        self.receivers / self.count as f64
    }

    fn mean_subscribers(&self) -> f64 {
        self.subscribers / self.count as f64
    }

    /// Sample standard deviation (n - 1 denominator).
    fn stddev_receivers(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean_receivers();
        ((self.receivers_sq - n * mean * mean) / (n - 1.0)).max(0.0).sqrt()
    }
}

/// Pooled result for one `(sigma, gamma)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub topology: String,
    pub n: usize,
    pub replicates: usize,
    pub events_per_network: usize,
    pub ttl: Ttl,
    pub sigma: f64,
    pub gamma: f64,
    pub gamma_eff: f64,
    pub sim_mean_receivers: f64,
    pub sim_mean_subscribers: f64,
    pub sim_stddev_receivers: f64,
    pub model_mean_receivers: MeanCount,
    pub model_divergent: bool,
    pub giant_component_mean: f64,
}

impl SweepRow {
    /// Standard error of `sim_mean_receivers` over all pooled events.
    pub fn sim_stderr_receivers(&self) -> f64 {
        self.sim_stddev_receivers / ((self.replicates * self.events_per_network) as f64).sqrt()
    }
}

/// Per-network means, emitted alongside the pooled rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRow {
    pub network_id: u64,
    pub sigma: f64,
    pub gamma: f64,
    pub mean_receivers: f64,
    pub mean_subscribers: f64,
    pub giant_component_size: usize,
    pub discarded_stubs: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub per_network: Vec<NetworkRow>,
}

/// Every `(sigma, gamma)` pair of the grids, sigma-major.
fn grid_points(config: &ExperimentConfig) -> Vec<(f64, f64)> {
    config
        .sigma_grid
        .iter()
        .flat_map(|&s| config.gamma_grid.iter().map(move |&g| (s, g)))
        .collect()
}

/// Runs the full grid. Overlays, subscriptions and events are keyed by
/// `(master_seed, network_id, event_id)` and reused across grid points.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let n = config.nodes()?;
    let dist = config.topology.distribution(Some(n))?;
    let points = grid_points(config);
    let mut pooled = vec![Accumulator::default(); points.len()];
    let mut giant_sum = 0.0;
    let mut per_network = Vec::new();

    for network_id in 0..config.replicates as u64 {
        let replicate = ReplicateNetwork::build(config, network_id)?;
        giant_sum += replicate.giant_component_size as f64;
        for (slot, &(sigma, gamma)) in points.iter().enumerate() {
            let context = |e: Error| Error::GridPoint {
                sigma,
                gamma,
                source: Box::new(e),
            };
            let network = replicate.with_sigma(sigma).map_err(context)?;
            let mut acc = Accumulator::default();
            for event_id in 0..config.events_per_network as u64 {
                let (_, r) = run_event(&network, config.master_seed, network_id, event_id, gamma, config.ttl)
                    .map_err(context)?;
                acc.add(r.receivers, r.subscribers_reached);
            }
            per_network.push(NetworkRow {
                network_id,
                sigma,
                gamma,
                mean_receivers: acc.mean_receivers(),
                mean_subscribers: acc.mean_subscribers(),
                giant_component_size: replicate.giant_component_size,
                discarded_stubs: replicate.report.discarded_stubs,
            });
            pooled[slot].merge(&acc);
        }
    }

    let giant_component_mean = giant_sum / config.replicates as f64;
    let rows = points
        .iter()
        .zip(&pooled)
        .map(|(&(sigma, gamma), acc)| {
            let params = CoverageParams::new(sigma, gamma)?;
            let prediction = analytic::predict(&dist, params);
            Ok(SweepRow {
                topology: config.topology.to_string(),
                n,
                replicates: config.replicates,
                events_per_network: config.events_per_network,
                ttl: config.ttl,
                sigma,
                gamma,
                gamma_eff: params.gamma_eff(),
                sim_mean_receivers: acc.mean_receivers(),
                sim_mean_subscribers: acc.mean_subscribers(),
                sim_stddev_receivers: acc.stddev_receivers(),
                model_mean_receivers: prediction.mean_receivers,
                model_divergent: prediction.mean_receivers.is_divergent(),
                giant_component_mean,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    per_network.sort_by(|a, b| {
        (a.sigma, a.gamma, a.network_id)
            .partial_cmp(&(b.sigma, b.gamma, b.network_id))
            .expect("grid values are finite")
    });
    Ok(SweepOutput { rows, per_network })
}

/// Which probability a phase scan varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanAxis {
    /// Vary sigma at this gamma.
    Sigma { gamma: f64 },
    /// Vary gamma at this sigma.
    Gamma { sigma: f64 },
}

impl ScanAxis {
    fn params(self, value: f64) -> (f64, f64) {
        match self {
            ScanAxis::Sigma { gamma } => (value, gamma),
            ScanAxis::Gamma { sigma } => (sigma, value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub sigma: f64,
    pub gamma: f64,
    /// Fraction of events reaching more than [`PERCOLATION_FRACTION`] of the
    /// giant component.
    pub fraction_percolating: f64,
    pub sim_mean_receivers: f64,
    pub model_mean_receivers: MeanCount,
}

/// Analytic side of a phase scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticTransition {
    Critical(CriticalValue),
    NoGiantComponentPossible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    pub axis: ScanAxis,
    pub points: Vec<PhasePoint>,
    /// First scanned value where a majority of events percolate.
    pub empirical_transition: Option<f64>,
    pub analytic: AnalyticTransition,
}

/// Sweeps one probability over `grid` with the other fixed and locates the
/// finite-size percolation transition. `config`'s own grids are ignored.
pub fn phase_scan(config: &ExperimentConfig, axis: ScanAxis, grid: &[f64]) -> Result<PhaseScan> {
    if grid.is_empty() {
        return Err(Error::Config("phase scan grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("phase scan grid must be strictly increasing".into()));
    }
    let (s0, g0) = axis.params(grid[0]);
    let mut scan_config = config.clone();
    scan_config.sigma_grid = vec![s0];
    scan_config.gamma_grid = vec![g0];
    scan_config.validate()?;
    for &v in grid {
        let (s, g) = axis.params(v);
        CoverageParams::new(s, g)?;
    }

    let n = config.nodes()?;
    let dist = config.topology.distribution(Some(n))?;
    let mut percolating = vec![0u64; grid.len()];
    let mut acc = vec![Accumulator::default(); grid.len()];

    for network_id in 0..config.replicates as u64 {
        let replicate = ReplicateNetwork::build(config, network_id)?;
        let giant = replicate.giant_component_size as f64;
        let cut = if giant > PERCOLATION_FRACTION * replicate.graph.node_count() as f64 {
            PERCOLATION_FRACTION * giant
        } else {
            f64::INFINITY
        };
        let mut cached_sigma = None;
        let mut network = None;
        for (i, &value) in grid.iter().enumerate() {
            let (sigma, gamma) = axis.params(value);
            if cached_sigma != Some(sigma) {
                network = Some(replicate.with_sigma(sigma)?);
                cached_sigma = Some(sigma);
            }
            let net = network.as_ref().expect("network built above");
            for event_id in 0..config.events_per_network as u64 {
                let (_, r) = run_event(net, config.master_seed, network_id, event_id, gamma, config.ttl)?;
                acc[i].add(r.receivers, r.subscribers_reached);
                if r.receivers as f64 > cut {
                    percolating[i] += 1;
                }
            }
        }
    }

    let points: Vec<PhasePoint> = grid
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let (sigma, gamma) = axis.params(value);
            let params = CoverageParams::new(sigma, gamma)?;
            Ok(PhasePoint {
                sigma,
                gamma,
                fraction_percolating: percolating[i] as f64 / acc[i].count as f64,
                sim_mean_receivers: acc[i].mean_receivers(),
                model_mean_receivers: analytic::predict(&dist, params).mean_receivers,
            })
        })
        .collect::<Result<_>>()?;
    let empirical_transition = grid
        .iter()
        .zip(&points)
        .find(|(_, p)| p.fraction_percolating > MAJORITY)
        .map(|(&v, _)| v);
    let analytic = match axis {
        ScanAxis::Sigma { gamma } => analytic::solve_sigma(&dist, gamma),
        ScanAxis::Gamma { sigma } => analytic::solve_gamma(&dist, sigma),
    };
    let analytic = match analytic {
        Ok(c) => AnalyticTransition::Critical(c),
        Err(Error::NoGiantComponentPossible) => AnalyticTransition::NoGiantComponentPossible,
        Err(e) => return Err(e),
    };
    Ok(PhaseScan {
        axis,
        points,
        empirical_transition,
        analytic,
    })
}
