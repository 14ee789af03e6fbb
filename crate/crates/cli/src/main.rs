//! Command-line front end: generate networks, rank nodes, simulate epidemics and run
//! or summarize sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use commimmune::harness::{self, ExperimentConfig};
use commimmune::lfr::{self, LfrParams};
use commimmune::sir::{self, SirParams};
use commimmune::strategy::{self, StrategyKind};
use commimmune::util::rng_from_seed;
use commimmune::{io, Error};

#[derive(Parser)]
#[command(
    name = "commimmune",
    version,
    about = "Community-aware immunization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an LFR benchmark network.
    Generate(GenerateArgs),
    /// Emit an immunization plan as CSV.
    Rank(RankArgs),
    /// Run one SIR epidemic and emit its time series as CSV.
    Simulate(SimulateArgs),
    /// Run a full parameter sweep from a config file.
    Sweep(SweepArgs),
    /// Summarize a sweep CSV: per strategy, the removal fraction at which outbreaks die.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 7500)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 180)]
    max_degree: usize,
    #[arg(long, default_value_t = 0.3)]
    mu: f64,
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 5)]
    c_min: usize,
    #[arg(long, default_value_t = 180)]
    c_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for network.edges, network.communities and network.meta.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    strategy: StrategyKind,
    #[arg(long)]
    fraction: f64,
    #[arg(long)]
    edges: PathBuf,
    /// Required by the community strategies.
    #[arg(long)]
    communities: Option<PathBuf>,
    /// Seed for the stochastic strategies.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescore betweenness after this many removals.
    #[arg(long, default_value_t = 1)]
    batch: usize,
    /// Write the plan here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0.01)]
    initial_infected: f64,
    #[arg(long, default_value_t = 100_000)]
    max_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Immunize with this strategy before seeding.
    #[arg(long, requires = "fraction")]
    strategy: Option<StrategyKind>,
    #[arg(long, requires = "strategy")]
    fraction: Option<f64>,
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Sweep CSV; defaults to sweep.csv in the output directory.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Share of the active nodes, beyond the seeds, an outbreak may reach and still count as dead.
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Network size used by the sweep.
    #[arg(long, default_value_t = 7500)]
    nodes: usize,
    /// Initial infected fraction used by the sweep.
    #[arg(long, default_value_t = 0.01)]
    initial_infected: f64,
}

fn emit(text: &str, output: Option<&Path>) -> commimmune::Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_partition(
    path: Option<&Path>,
    kind: StrategyKind,
) -> commimmune::Result<Option<commimmune::Partition>> {
    match path {
        Some(path) => io::read_communities(path).map(Some),
        None if kind.needs_partition() => Err(Error::Config(format!("{kind} needs --communities"))),
        None => Ok(None),
    }
}

fn plan_for(
    g: &commimmune::Graph,
    communities: Option<&Path>,
    kind: StrategyKind,
    fraction: f64,
    seed: u64,
    batch: usize,
) -> commimmune::Result<strategy::ImmunizationPlan> {
    let partition = read_partition(communities, kind)?;
    if let Some(p) = &partition {
        p.check_covers(g)?;
    }
    if kind.is_global() {
        return strategy::plan_global_batched(g, kind, fraction, batch);
    }
    let mut rng = rng_from_seed(seed);
    strategy::plan(g, partition.as_ref(), kind, fraction, &mut rng)
}

fn generate(args: GenerateArgs) -> commimmune::Result<()> {
    let params = LfrParams {
        n: args.n,
        avg_degree: args.avg_degree,
        max_degree: args.max_degree,
        mu: args.mu,
        gamma: args.gamma,
        beta: args.beta,
        c_min: args.c_min,
        c_max: args.c_max,
        seed: args.seed,
        ..LfrParams::default()
    };
    let net = lfr::generate(&params)?;
    let dir = args.out_dir.unwrap_or_else(harness::default_output_dir);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    harness::write_network(
        &net,
        params.n,
        &dir.join("network.edges"),
        &dir.join("network.communities"),
    )?;
    let meta = dir.join("network.meta");
    fs::write(&meta, net.metadata(&params)).map_err(|e| Error::io(&meta, e))?;
    eprintln!(
        "{} nodes, {} edges, {} communities, mixing {:.4} -> {}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.partition.community_count(),
        net.achieved_mu,
        dir.display()
    );
    Ok(())
}

fn rank(args: RankArgs) -> commimmune::Result<()> {
    let g = io::read_edge_list(&args.edges)?;
    let plan = plan_for(
        &g,
        args.communities.as_deref(),
        args.strategy,
        args.fraction,
        args.seed,
        args.batch.max(1),
    )?;
    emit(&plan.to_csv(), args.output.as_deref())
}

fn simulate(args: SimulateArgs) -> commimmune::Result<()> {
    let mut g = io::read_edge_list(&args.edges)?;
    if let (Some(kind), Some(fraction)) = (args.strategy, args.fraction) {
        let plan = plan_for(
            &g,
            args.communities.as_deref(),
            kind,
            fraction,
            args.seed,
            1,
        )?;
        g = g.remove_nodes(&plan.order)?;
    }
    let params = SirParams {
        lambda: args.lambda,
        sigma: args.sigma,
        initial_infected_fraction: args.initial_infected,
        max_steps: args.max_steps,
        seed: args.seed,
    };
    let mut rng = rng_from_seed(args.seed);
    let outcome = sir::run(&g, &params, &mut rng)?;
    eprintln!(
        "total infected {}, peak {}, duration {}{}",
        outcome.total_ever_infected,
        outcome.peak_infected,
        outcome.duration,
        if outcome.truncated {
            " (truncated)"
        } else {
            ""
        }
    );
    emit(&outcome.series_csv(), args.output.as_deref())
}

fn sweep(args: SweepArgs) -> commimmune::Result<()> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(out) = args.output {
        cfg.output_path = out;
    }
    let records = harness::run_sweep(&cfg)?;
    harness::write_records(&records, &cfg.output_path)?;
    let failed = records.iter().filter(|r| r.is_failed()).count();
    eprintln!(
        "{} records ({failed} failed) -> {}",
        records.len(),
        cfg.output_path.display()
    );
    Ok(())
}

fn report(args: ReportArgs) -> commimmune::Result<()> {
    let input = args
        .input
        .unwrap_or_else(|| harness::default_output_dir().join("sweep.csv"));
    let records = harness::read_records(&input)?;
    let rows = harness::report(&records, args.nodes, args.initial_infected, args.threshold);
    print!("{}", harness::format_report(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Rank(a) => rank(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
