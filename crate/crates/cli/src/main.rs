//! `groundsplit` binary: argument parsing and command dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use groundsplit_cli::{
    emit, run_estimate, run_gen, run_ground, run_profile, run_split, CliError, GroundMode,
    Options, ProfileParams,
};
use groundsplit_core::instance::{GenConfig, Topology};
use groundsplit_core::treedecomp::{TdConfig, TdStrategy};

#[derive(Parser)]
#[command(
    name = "groundsplit",
    version,
    about = "Decide per rule between body-decoupled and bottom-up grounding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Tree-decomposition strategy for per-rule variable graphs
    #[arg(long, global = true, value_enum, default_value_t = TdStrategyArg::MinFill)]
    td_strategy: TdStrategyArg,
    /// Upgrade heuristic decompositions to exact search up to this many variables
    #[arg(long, global = true, default_value_t = 6, value_name = "N")]
    exact_td_cap: usize,
    /// Per-rule cap on grounding work (instantiations or join steps)
    #[arg(long, global = true, default_value_t = 10_000_000, value_name = "N")]
    ground_cap: u64,
    /// Emit CSV instead of a human-readable table
    #[arg(long, global = true)]
    csv: bool,
    /// Write output here instead of next to the input or to standard output
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TdStrategyArg {
    MinFill,
    MinDegree,
    Exact,
}

impl From<TdStrategyArg> for TdStrategy {
    fn from(arg: TdStrategyArg) -> Self {
        match arg {
            TdStrategyArg::MinFill => TdStrategy::MinFill,
            TdStrategyArg::MinDegree => TdStrategy::MinDegree,
            TdStrategyArg::Exact => TdStrategy::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GroundModeArg {
    Naive,
    BottomUp,
}

impl From<GroundModeArg> for GroundMode {
    fn from(arg: GroundModeArg) -> Self {
        match arg {
            GroundModeArg::Naive => GroundMode::Naive,
            GroundModeArg::BottomUp => GroundMode::BottomUp,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TopologyArg {
    Random,
    Path,
}

impl From<TopologyArg> for Topology {
    fn from(arg: TopologyArg) -> Self {
        match arg {
            TopologyArg::Random => Topology::Random,
            TopologyArg::Path => Topology::Path,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mark every rule bdg or sota; write the annotated program and JSON report
    Split {
        /// Program files, concatenated in order
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print per-rule measures, size estimates, and decisions
    Estimate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Ground with the reference grounder; the ground rule count goes to standard error
    Ground {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Grounding algorithm
        #[arg(long, value_enum, default_value_t = GroundModeArg::BottomUp)]
        mode: GroundModeArg,
    },
    /// Generate a random graph instance (deterministic per seed)
    Gen {
        /// Vertex count
        n: usize,
        /// Percentage of candidate edges to keep, 0-100
        #[arg(long, default_value_t = 100.0)]
        density: f64,
        /// RNG seed; recorded in the instance as a seed(S) fact
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample unordered pairs instead of ordered ones
        #[arg(long)]
        undirected: bool,
        /// Edge layout
        #[arg(long, value_enum, default_value_t = TopologyArg::Random)]
        topology: TopologyArg,
        /// Predicate name for edge facts
        #[arg(long, default_value = "e")]
        pred: String,
        /// Also emit node/1 facts for every vertex
        #[arg(long)]
        nodes: bool,
    },
    /// Sweep instance sizes and densities; print the estimate-vs-actual CSV
    Profile {
        /// Fixture program the instances are combined with
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Rule id to track (default: the input's last rule)
        #[arg(long)]
        rule: Option<usize>,
        /// Instance sizes to sweep
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60")]
        sizes: Vec<usize>,
        /// Density percentages to sweep
        #[arg(long, value_delimiter = ',', default_value = "20,60,100")]
        densities: Vec<f64>,
        /// RNG seed for the generated instances
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generate undirected instances
        #[arg(long)]
        undirected: bool,
        /// Predicate name for edge facts
        #[arg(long, default_value = "e")]
        pred: String,
        /// Also emit node/1 facts for every vertex
        #[arg(long)]
        nodes: bool,
        /// Largest n for which the actual bottom-up count is measured
        #[arg(long, default_value_t = 30, value_name = "N")]
        actual_cap: usize,
    },
}

fn run(command: Command, opts: &Options) -> Result<(), CliError> {
    match command {
        Command::Split { inputs } => {
            let outcome = run_split(&inputs, opts)?;
            eprintln!(
                "wrote {} and {} ({} bdg, {} sota)",
                outcome.annotated_path.display(),
                outcome.report_path.display(),
                outcome.bdg_rules,
                outcome.sota_rules,
            );
            Ok(())
        }
        Command::Estimate { inputs } => emit(&run_estimate(&inputs, opts)?, opts),
        Command::Ground { inputs, mode } => {
            let (text, count) = run_ground(&inputs, mode.into(), opts)?;
            emit(&text, opts)?;
            eprintln!("{count}");
            Ok(())
        }
        Command::Gen { n, density, seed, undirected, topology, pred, nodes } => {
            let cfg = GenConfig {
                n,
                density,
                seed,
                directed: !undirected,
                topology: topology.into(),
                pred,
                with_nodes: nodes,
            };
            emit(&run_gen(&cfg)?, opts)
        }
        Command::Profile {
            inputs,
            rule,
            sizes,
            densities,
            seed,
            undirected,
            pred,
            nodes,
            actual_cap,
        } => {
            let params = ProfileParams {
                rule,
                sizes,
                densities,
                template: GenConfig {
                    seed,
                    directed: !undirected,
                    pred,
                    with_nodes: nodes,
                    ..GenConfig::default()
                },
                actual_cap,
            };
            emit(&run_profile(&inputs, &params, opts)?, opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        td: TdConfig {
            strategy: cli.global.td_strategy.into(),
            auto_exact_cap: cli.global.exact_td_cap,
        },
        ground_cap: cli.global.ground_cap,
        csv: cli.global.csv,
        output: cli.global.output,
    };
    match run(cli.command, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
