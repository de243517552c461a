use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdsnet::{commands, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "rdsnet", version, about = "Reconstruct the induced subgraph behind an RDS sample")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Barabási–Albert graph as an edge list.
    GenerateGraph {
        #[arg(long, default_value_t = 250)]
        nodes: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate one RDS run; writes observed.txt and truth.txt to --out.
    Simulate(#[command(flatten)] RunArgs),
    /// Infer edge and pendant weights from an observed-data file.
    Infer {
        #[arg(long)]
        observed: PathBuf,
        /// Needed only with --selection truth.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Defaults to <out>/inference.txt.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score an inference file against the truth; writes roc.csv, roc.svg, eval.txt.
    Eval {
        #[arg(long)]
        inference: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run simulate → infer → eval for every replicate and aggregate.
    Pipeline(#[command(flatten)] RunArgs),
}

/// Overrides for [`RunConfig`]; see `config.txt` in a pipeline output for
/// every key and its default.
#[derive(Args, Default)]
struct RunArgs {
    /// Flat `key = value` configuration file applied before these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    coupons: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    /// exponential | weibull
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated timing parameters used for simulation: rate, or shape,scale.
    #[arg(long)]
    theta: Option<String>,
    /// Shorthand for --family exponential --theta RATE.
    #[arg(long)]
    rate: Option<String>,
    /// Starting timing parameters for inference; defaults to --theta.
    #[arg(long)]
    theta0: Option<String>,
    #[arg(long)]
    degree_noise: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    /// Norm of the degree penalty; `inf` for the max norm.
    #[arg(long)]
    p: Option<String>,
    /// upper | lower
    #[arg(long)]
    bound: Option<String>,
    /// A/θ alternation rounds; 1 means a single bound at θ0.
    #[arg(long)]
    rounds: Option<String>,
    /// posterior | truth
    #[arg(long)]
    selection: Option<String>,
    #[arg(long)]
    max_major: Option<String>,
    /// degree-residual | marginal
    #[arg(long)]
    pendants: Option<String>,
    /// standard | paper-literal
    #[arg(long)]
    convention: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    attempts: Option<String>,
    #[arg(long)]
    anneal: Option<String>,
    #[arg(long)]
    anneal_stages: Option<String>,
    #[arg(long)]
    anneal_steps: Option<String>,
    #[arg(long)]
    anneal_cooling: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> rdsnet::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("graph", &self.graph),
            ("n", &self.n),
            ("coupons", &self.coupons),
            ("seeds", &self.seeds),
            ("family", &self.family),
            ("theta", &self.theta),
            ("rate", &self.rate),
            ("theta0", &self.theta0),
            ("degree_noise", &self.degree_noise),
            ("omega", &self.omega),
            ("p", &self.p),
            ("bound", &self.bound),
            ("rounds", &self.rounds),
            ("selection", &self.selection),
            ("max_major", &self.max_major),
            ("pendants", &self.pendants),
            ("convention", &self.convention),
            ("replicates", &self.replicates),
            ("jobs", &self.jobs),
            ("out", &self.out),
            ("seed", &self.seed),
            ("attempts", &self.attempts),
            ("anneal", &self.anneal),
            ("anneal_stages", &self.anneal_stages),
            ("anneal_steps", &self.anneal_steps),
            ("anneal_cooling", &self.anneal_cooling),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> rdsnet::Result<()> {
    match cli.command {
        Command::GenerateGraph { nodes, m, seed, out } => commands::generate_graph(nodes, m, seed, &out),
        Command::Simulate(run) => {
            let (o, t) = commands::simulate(&run.resolve()?)?;
            println!("wrote {} and {}", o.display(), t.display());
            Ok(())
        }
        Command::Infer { observed, truth, output, run } => {
            let cfg = run.resolve()?;
            let output = output.unwrap_or_else(|| cfg.out.join("inference.txt"));
            commands::infer(&cfg, &observed, truth.as_deref(), &output)?;
            println!("wrote {}", output.display());
            Ok(())
        }
        Command::Eval { inference, truth, run } => {
            println!("{}", commands::eval(&run.resolve()?, &inference, &truth)?);
            Ok(())
        }
        Command::Pipeline(run) => {
            let (_, line) = commands::pipeline(&run.resolve()?)?;
            println!("{line}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code: i32 = CliError::exit_code(&e);
            ExitCode::from(code as u8)
        }
    }
}
