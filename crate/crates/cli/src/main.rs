use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use robust_alloc_cli::{generate, parse_instance, run_experiment, Mode, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "robust-alloc",
    version,
    about = "Robust budget allocation on bipartite influence graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the robust allocation problem with a certified duality gap.
    SolveRobust(RunArgs),
    /// Maximize influence at the estimated failure probabilities.
    SolveNominal(RunArgs),
    /// Maximize expected influence under the Beta posteriors.
    SolveExpected(RunArgs),
    /// Worst-case failure probabilities for a fixed budget.
    Adversary(RunArgs),
    /// Worst-case influence of robust, nominal and expected budgets.
    Compare(RunArgs),
    /// Compare the submodular adversary with plain Frank-Wolfe on a D-norm set.
    FwCompare(RunArgs),
    /// Generate a synthetic instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// `ellipsoid` or `dnorm`.
    #[arg(long)]
    set: Option<String>,
    /// Total budget.
    #[arg(long)]
    cap: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Edge-list CSV with header `s,t,alpha,beta` or `s,t,x_hat,n`.
    #[arg(long)]
    instance: PathBuf,
    /// Budget CSV (`channel,y`) for `adversary` and `fw-compare`.
    #[arg(long)]
    budget: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    customers: Option<usize>,
    /// Channels per customer; 0 for a complete graph.
    #[arg(long)]
    degree: Option<usize>,
    #[command(flatten)]
    common: Common,
}

fn load_config(common: &Common, budget: Option<PathBuf>) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out: common.out.clone(),
        seed: common.seed,
        delta: common.delta,
        epsilon: common.epsilon,
        gamma: common.gamma,
        set: common.set.clone(),
        cap: common.cap,
        budget,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("ROBUST_ALLOC_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("ROBUST_ALLOC_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    init_threads()?;
    let (mode, args) = match cli.command {
        Command::Gen(g) => {
            let mut cfg = load_config(&g.common, None)?;
            if let Some(v) = g.channels {
                cfg.channels = v;
            }
            if let Some(v) = g.customers {
                cfg.customers = v;
            }
            if let Some(v) = g.degree {
                cfg.degree = v;
            }
            let path = generate(&cfg)?;
            println!("wrote {}", path.display());
            return Ok(0);
        }
        Command::SolveRobust(a) => (Mode::Robust, a),
        Command::SolveNominal(a) => (Mode::Nominal, a),
        Command::SolveExpected(a) => (Mode::Expected, a),
        Command::Adversary(a) => (Mode::Adversary, a),
        Command::Compare(a) => (Mode::Compare, a),
        Command::FwCompare(a) => (Mode::FwCompare, a),
    };
    let cfg = load_config(&args.common, args.budget)?;
    let inst = parse_instance(&args.instance)?;
    let outcome = run_experiment(&cfg, mode, &inst)?;
    for cell in &outcome.cells {
        println!("{}: {}", cell.dir.display(), cell.status.name());
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
