use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pubsub_gossip::analytic::{self, CoverageParams};
use pubsub_gossip::harness::report::{self, PREDICTION_HEADER};
use pubsub_gossip::harness::sweep::{self, ScanAxis};
use pubsub_gossip::harness::{ExperimentConfig, TopologySpec};
use pubsub_gossip::overlay::{self, ConstructionReport};
use pubsub_gossip::sim::{self, EventRecord, PubSubNetwork, Ttl};
use pubsub_gossip::{degree_dist, rng, Error, Result};

#[derive(Parser)]
#[command(name = "pubsub-gossip", version, about = "Gossip publish-subscribe coverage: model and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form coverage prediction (or percolation threshold) for a degree law.
    Analytic(AnalyticArgs),
    /// Build one configuration-model overlay and write its edge list.
    Generate(GenerateArgs),
    /// Publish events on a single overlay; one CSV row per event.
    Simulate(SimulateArgs),
    /// Full (sigma, gamma) grid over replicate overlays, pooled against the model.
    Sweep(SweepArgs),
    /// Locate the finite-size percolation transition along sigma or gamma.
    Scan(ScanArgs),
    /// Exact receiver-count distribution on a small graph.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct AnalyticArgs {
    /// Degree law, e.g. poisson:5, powerlaw:-3.3, aiello:6:1, empirical:1=0.5/3=0.5
    #[arg(long)]
    topology: TopologySpec,
    /// Network size, used for the default power-law cutoff.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    gamma: Vec<f64>,
    /// Print critical values instead of predictions.
    #[arg(long)]
    threshold: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    topology: TopologySpec,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list destination (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the target degree sequence here.
    #[arg(long)]
    degrees_out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Degree law for a freshly generated overlay.
    #[arg(long, required_unless_present = "graph")]
    topology: Option<TopologySpec>,
    /// Existing edge list instead of a generated overlay.
    #[arg(long, conflicts_with = "topology")]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "inf")]
    ttl: Ttl,
    #[arg(long, default_value_t = 400)]
    events: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    topology: Option<TopologySpec>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    events: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ttl: Option<Ttl>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-network means here.
    #[arg(long)]
    per_network: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Sigma,
    Gamma,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Probability to vary.
    #[arg(long, value_enum)]
    vary: Axis,
    /// Value of the probability held fixed.
    #[arg(long)]
    fixed: f64,
    /// start:stop:step, inclusive of stop.
    #[arg(long, default_value = "0:1:0.01")]
    range: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated subscriber node ids.
    #[arg(long, value_delimiter = ',')]
    subscribers: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    publisher: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_analytic(args: AnalyticArgs) -> Result<()> {
    let dist = args.topology.distribution(args.n)?;
    let mut out = sink(args.out.as_ref())?;
    if args.threshold {
        let critical = analytic::threshold(&dist)?;
        writeln!(out, "gamma_eff_threshold,fixed,fixed_value,critical,critical_in_range")?;
        for &g in &args.gamma {
            let s = analytic::solve_sigma(&dist, g)?;
            writeln!(
                out,
                "{},gamma,{},{},{}",
                report::format_g6(critical),
                report::format_g6(g),
                report::format_g6(s.value),
                s.in_range()
            )?;
        }
        for &s in &args.sigma {
            let g = analytic::solve_gamma(&dist, s)?;
            writeln!(
                out,
                "{},sigma,{},{},{}",
                report::format_g6(critical),
                report::format_g6(s),
                report::format_g6(g.value),
                g.in_range()
            )?;
        }
    } else {
        writeln!(out, "{PREDICTION_HEADER}")?;
        for &s in &args.sigma {
            for &g in &args.gamma {
                let p = analytic::predict(&dist, CoverageParams::new(s, g)?);
                writeln!(out, "{}", report::prediction_line(&p))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn build_overlay(topology: &TopologySpec, n: usize, seed: u64) -> Result<(Vec<usize>, overlay::OverlayGraph, ConstructionReport)> {
    let n = topology.network_size(n)?;
    let mut stream = rng::seeded(seed);
    let degrees = topology.degree_sequence(n, &mut stream)?;
    let (graph, report) = overlay::configuration_model(&degrees, &mut stream)?;
    Ok((degrees, graph, report))
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let (degrees, graph, construction) = build_overlay(&args.topology, args.n, args.seed)?;
    if let Some(path) = &args.degrees_out {
        degree_dist::write_degree_sequence(BufWriter::new(File::create(path)?), &degrees)?;
    }
    let giant = overlay::giant_component(&graph).size;
    match &args.out {
        Some(path) => {
            overlay::write_edge_list(&graph, BufWriter::new(File::create(path)?))?;
            let mut out = io::stdout().lock();
            writeln!(out, "{}", ConstructionReport::CSV_HEADER)?;
            writeln!(out, "{}", construction.csv_row(args.seed, giant))?;
        }
        None => {
            overlay::write_edge_list(&graph, BufWriter::new(io::stdout().lock()))?;
            eprintln!("{}", ConstructionReport::CSV_HEADER);
            eprintln!("{}", construction.csv_row(args.seed, giant));
        }
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let graph = match (&args.graph, &args.topology) {
        (Some(path), _) => overlay::read_edge_list(BufReader::new(File::open(path)?))?,
        (None, Some(t)) => build_overlay(t, args.n, args.seed)?.1,
        (None, None) => return Err(Error::Config("need --topology or --graph".into())),
    };
    let subs = sim::assign_subscriptions(
        &graph,
        args.sigma,
        &mut rng::stream(args.seed, rng::Purpose::Subscriptions, 0, 0),
    )?;
    CoverageParams::new(args.sigma, args.gamma)?;
    if graph.node_count() == 0 {
        return Err(Error::Config("graph has no nodes".into()));
    }
    let network = PubSubNetwork::new(graph, subs)?;
    let mut out = sink(args.out.as_ref())?;
    writeln!(out, "{}", EventRecord::CSV_HEADER)?;
    for event_id in 0..args.events as u64 {
        let (publisher, result) = sweep::run_event(&network, args.seed, 0, event_id, args.gamma, args.ttl)?;
        let record = EventRecord {
            network_id: 0,
            event_id,
            publisher,
            sigma: args.sigma,
            gamma: args.gamma,
            ttl: args.ttl,
            result,
        };
        writeln!(out, "{}", record.csv_row())?;
    }
    out.flush()?;
    Ok(())
}

fn experiment_config(
    args: &ExperimentArgs,
    sigma: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => {
            let topology = args
                .topology
                .clone()
                .ok_or_else(|| Error::Config("need --config or --topology".into()))?;
            ExperimentConfig::new(topology, vec![0.0], vec![0.0])
        }
    };
    if let Some(t) = &args.topology {
        config.topology = t.clone();
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(e) = args.events {
        config.events_per_network = e;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(t) = args.ttl {
        config.ttl = t;
    }
    if let Some(s) = sigma {
        config.sigma_grid = s;
    }
    if let Some(g) = gamma {
        config.gamma_grid = g;
    }
    config.validate()?;
    Ok(config)
}

fn run_sweep_cmd(args: SweepArgs) -> Result<()> {
    if args.experiment.config.is_none() && (args.sigma.is_none() || args.gamma.is_none()) {
        return Err(Error::Config("without --config, both --sigma and --gamma are required".into()));
    }
    let config = experiment_config(&args.experiment, args.sigma, args.gamma)?;
    let output = sweep::run_sweep(&config)?;
    match &args.out {
        Some(path) => report::emit_report_to_path(&output.rows, path)?,
        None => report::emit_report(&output.rows, BufWriter::new(io::stdout().lock()))?,
    }
    if let Some(path) = &args.per_network {
        report::emit_network_rows(&output.per_network, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("range {text:?}: expected start:stop:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    // Rounded to 1e-9 so 0.1 + 3 * 0.01 prints as 0.13.
    Ok((0..=count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

fn run_scan(args: ScanArgs) -> Result<()> {
    let grid = parse_range(&args.range)?;
    let axis = match args.vary {
        Axis::Sigma => ScanAxis::Sigma { gamma: args.fixed },
        Axis::Gamma => ScanAxis::Gamma { sigma: args.fixed },
    };
    let config = experiment_config(&args.experiment, None, None)?;
    let scan = sweep::phase_scan(&config, axis, &grid)?;
    report::emit_phase_scan(&scan, sink(args.out.as_ref())?)
}

fn run_oracle(args: OracleArgs) -> Result<()> {
    let graph = overlay::read_edge_list(BufReader::new(File::open(&args.graph)?))?;
    let mut subs = vec![false; graph.node_count()];
    for &s in &args.subscribers {
        *subs
            .get_mut(s)
            .ok_or_else(|| Error::Config(format!("subscriber {s} is not a node")))? = true;
    }
    let pmf = sim::smallgraph_oracle(&graph, &subs, args.publisher, args.gamma)?;
    let mut out = sink(args.out.as_ref())?;
    writeln!(out, "receivers,probability")?;
    for (k, p) in pmf.iter().enumerate().skip(1) {
        writeln!(out, "{k},{}", report::format_g6(*p))?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analytic(a) => run_analytic(a),
        Command::Generate(a) => run_generate(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Sweep(a) => run_sweep_cmd(a),
        Command::Scan(a) => run_scan(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
