use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use linkcomm::analysis::{coverage_curve, SelectionCriteria};
use linkcomm::community::Community;
use linkcomm::graph::{giant_component, load_edge_list, load_protected, prune_degree_one, Graph};
use linkcomm::io::{load_graph, read_groups, read_node_sets, save_cache};
use linkcomm::pipeline::{
    run_batches, BatchSummary, Registry, RunConfig, SeedSource, SeedStrategy, StopReason,
};
use linkcomm::report::{write_matches, write_report, write_trace};
use linkcomm::validity::check_validity;

#[derive(Parser)]
#[command(name = "linkcomm", version, about = "Overlapping link communities by memetic search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an edge list into a binary graph cache.
    Ingest(IngestArgs),
    /// Run the full pipeline and write the solution.
    Run(RunArgs),
    /// Re-check the validity of communities.
    Validity(ValidityArgs),
    /// Write a solution report from a registry.
    Analyze(AnalyzeArgs),
    /// Compare two membership or partition tables.
    Match(MatchArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Whitespace-separated edge list.
    edges: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Drop unprotected nodes of degree one (single pass).
    #[arg(long)]
    prune_degree_one: bool,
    /// `label<TAB>flag` file marking nodes that pruning keeps.
    #[arg(long)]
    protected: Option<PathBuf>,
    /// Keep only the largest connected component.
    #[arg(long)]
    giant: bool,
}

#[derive(Args, Default)]
struct SelectionArgs {
    /// Keep communities with Ψ below this.
    #[arg(long)]
    psi_cutoff: Option<f64>,
    #[arg(long)]
    min_fraction_sum: Option<f64>,
    /// Drop communities holding more than this share of all links.
    #[arg(long)]
    exclude_larger_than: Option<f64>,
    #[arg(long)]
    inclusion_threshold: Option<f64>,
}

impl SelectionArgs {
    fn apply(&self, c: &mut SelectionCriteria) {
        if let Some(x) = self.psi_cutoff {
            c.psi_cutoff = x;
        }
        if let Some(x) = self.min_fraction_sum {
            c.min_fraction_sum = x;
        }
        if let Some(x) = self.exclude_larger_than {
            c.exclude_larger_than = x;
        }
        if let Some(x) = self.inclusion_threshold {
            c.inclusion_threshold = x;
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags override its values.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Edge list or binary cache.
    #[arg(short, long)]
    graph: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Random seeds per batch.
    #[arg(long, conflicts_with = "seed_file")]
    seeds: Option<usize>,
    /// One seed per line of node labels.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    #[arg(short, long)]
    resolution: Option<f64>,
    #[arg(long, env = "LINKCOMM_WORKERS")]
    workers: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    max_batches: Option<usize>,
    /// First-round population size.
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    init_variance: Option<f64>,
    #[arg(long)]
    low_variance: Option<f64>,
    #[arg(long)]
    stagnation_generations: Option<usize>,
    #[arg(long)]
    best_max_age: Option<usize>,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct ValidityArgs {
    #[arg(short, long)]
    graph: PathBuf,
    /// Registry written by `run`.
    #[arg(long, conflicts_with = "communities", required_unless_present = "communities")]
    registry: Option<PathBuf>,
    /// One community per line, given by node labels (induced links).
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(short, long, default_value_t = 1.0 / 3.0)]
    resolution: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(short, long)]
    graph: PathBuf,
    #[arg(long)]
    registry: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct MatchArgs {
    left: PathBuf,
    right: PathBuf,
    /// Membership grades must exceed this to count.
    #[arg(long, default_value_t = 0.5)]
    min_grade: f64,
}

#[derive(Serialize)]
struct GraphInfo {
    path: Option<PathBuf>,
    nodes: usize,
    links: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    config: &'a RunConfig,
    graph: GraphInfo,
    batches: &'a [BatchSummary],
    stop: StopReason,
    registry_size: usize,
    valid: usize,
    coverage: f64,
    seconds: f64,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Ingest(a) => ingest(a),
        Command::Run(a) => run(a),
        Command::Validity(a) => validity(a),
        Command::Analyze(a) => analyze(a),
        Command::Match(a) => compare(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn read_graph(path: &Path) -> Result<Graph> {
    load_graph(path).with_context(|| format!("loading graph {}", path.display()))
}

fn ingest(a: IngestArgs) -> Result<()> {
    let mut g = load_edge_list(open(&a.edges)?).context("parsing edge list")?;
    log::info!("read {} nodes, {} links", g.node_count(), g.link_count());
    if a.prune_degree_one {
        let mask = match &a.protected {
            Some(p) => load_protected(&g, open(p)?).context("reading protected nodes")?,
            None => vec![false; g.node_count()],
        };
        let pruned = prune_degree_one(&g, |v| mask[v]);
        log::info!("pruned {} degree-one nodes", pruned.removed.len());
        g = pruned.graph;
    }
    if a.giant {
        let (giant, dropped) = giant_component(&g)?;
        log::info!("giant component keeps {} nodes, drops {dropped}", giant.node_count());
        g = giant;
    }
    save_cache(&g, &a.output).with_context(|| format!("writing {}", a.output.display()))?;
    println!("{}\t{}\t{}", a.output.display(), g.node_count(), g.link_count());
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let started = Instant::now();
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_toml(&fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if a.graph.is_some() {
        cfg.graph = a.graph.clone();
    }
    if let Some(o) = &a.output {
        cfg.output = o.clone();
    }
    if let Some(n) = a.seeds {
        cfg.seeds = SeedStrategy::RandomNodeLinks { count: n };
    }
    if let Some(p) = &a.seed_file {
        cfg.seeds = SeedStrategy::SeedFile { path: p.clone() };
    }
    macro_rules! set {
        ($flag:expr => $($field:tt)+) => {
            if let Some(x) = $flag {
                cfg.$($field)+ = x;
            }
        };
    }
    set!(a.resolution => resolution);
    set!(a.workers => workers);
    set!(a.master_seed => master_seed);
    set!(a.epsilon => stop.epsilon);
    set!(a.patience => stop.patience);
    set!(a.max_batches => stop.max_batches);
    set!(a.population_size => protocol.first_round.population_size);
    set!(a.init_variance => protocol.first_round.init_variance);
    set!(a.low_variance => protocol.first_round.low_variance);
    set!(a.stagnation_generations => protocol.first_round.stagnation_generations);
    set!(a.best_max_age => protocol.first_round.best_max_age);
    a.selection.apply(&mut cfg.selection);
    cfg.validate()?;

    let Some(graph_path) = cfg.graph.clone() else {
        bail!("no graph given (use --graph or `graph` in the config)");
    };
    let g = read_graph(&graph_path)?;
    let source = match &cfg.seeds {
        SeedStrategy::RandomNodeLinks { count } => SeedSource::Random { count: *count },
        SeedStrategy::SeedFile { path } => {
            SeedSource::Fixed(read_node_sets(&g, open(path)?).context("reading seed file")?)
        }
    };

    let outcome = run_batches(&g, &cfg, &source)?;
    let dir = &cfg.output;
    let (solution, _) = write_report(dir, &g, &outcome.registry, &cfg.selection)?;
    write_trace(dir, &outcome.trace)?;
    let valid = outcome.registry.valid().len();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        graph: GraphInfo {
            path: Some(graph_path),
            nodes: g.node_count(),
            links: g.link_count(),
        },
        batches: &outcome.batches,
        stop: outcome.stop,
        registry_size: outcome.registry.len(),
        valid,
        coverage: outcome.coverage(),
        seconds: started.elapsed().as_secs_f64(),
    };
    let mut w = BufWriter::new(File::create(dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    writeln!(w)?;
    w.flush()?;
    println!(
        "{} communities found, {valid} valid, {} selected, coverage {:.4}",
        outcome.registry.len(),
        solution.communities.len(),
        outcome.coverage()
    );
    Ok(())
}

fn validity(a: ValidityArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let communities: Vec<Community> = match (&a.registry, &a.communities) {
        (Some(p), _) => Registry::read_ndjson(&g, open(p)?)?.communities().to_vec(),
        (None, Some(p)) => read_node_sets(&g, open(p)?)?
            .iter()
            .map(|s| Community::induced(&g, s))
            .collect::<Result<_, _>>()?,
        (None, None) => unreachable!("clap requires one source"),
    };
    let stdout = std::io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    writeln!(w, "index\tlinks\tpsi\tstatus\treason\tradius\texhaustive\tfingerprint")?;
    for (i, c) in communities.iter().enumerate() {
        let v = check_validity(&g, c, a.resolution, &communities)?;
        writeln!(
            w,
            "{}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            c.len(),
            c.psi(),
            serde_json::to_value(v.status)?.as_str().unwrap_or("?"),
            serde_json::to_value(v.reason)?.as_str().unwrap_or("?"),
            v.checked_radius,
            v.exhaustive,
            c.fingerprint()
        )?;
    }
    w.flush()?;
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let registry = Registry::read_ndjson(&g, open(&a.registry)?)?;
    let mut criteria = SelectionCriteria::default();
    a.selection.apply(&mut criteria);
    let limit = criteria.exclude_larger_than * g.link_count() as f64;
    println!("rank\tpsi\tcoverage");
    for (i, p) in coverage_curve(&g, &registry.valid(), |c| c.len() as f64 > limit)
        .iter()
        .enumerate()
    {
        println!("{}\t{:.6}\t{:.6}", i + 1, p.psi, p.fraction);
    }
    let (solution, files) = write_report(&a.output, &g, &registry, &criteria)?;
    log::info!(
        "{} communities selected, {} files in {}",
        solution.communities.len(),
        files.len(),
        a.output.display()
    );
    Ok(())
}

fn compare(a: MatchArgs) -> Result<()> {
    let left: Vec<_> = read_groups(open(&a.left)?, a.min_grade)?.into_iter().collect();
    let right: Vec<_> = read_groups(open(&a.right)?, a.min_grade)?.into_iter().collect();
    let stdout = std::io::stdout();
    write_matches(BufWriter::new(stdout.lock()), &left, &right)?;
    Ok(())
}
