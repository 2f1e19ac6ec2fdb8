//! `clusterbench`: generate scenarios, run the clustering pipeline stages or a
//! whole simulation, and export tables and plot data.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};

use clusterbench::Comparator;

/// `println!` that exits quietly when stdout is closed (e.g. piped to `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

mod commands;
mod failure;
mod manifest;
mod tables;

use failure::{CliResult, Failure};
use tables::Format;

#[derive(Debug, Parser)]
#[command(name = "clusterbench", version, about)]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario config (JSON); missing fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Replay the configuration (and timestamp) recorded in a manifest.
    #[arg(long, conflicts_with = "config")]
    pub manifest: Option<PathBuf>,

    /// RNG seed; overrides the config file and CLUSTERBENCH_SEED.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Membership predicate for head election.
    #[arg(long, value_parser = parse_comparator)]
    pub comparator: Option<Comparator>,
}

fn parse_comparator(s: &str) -> Result<Comparator, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place nodes and write the node table.
    Generate {
        #[command(flatten)]
        common: Common,
    },
    /// Cluster, elect heads and assign addresses for a node table.
    Cluster {
        /// Node table (node_id,x,y,energy).
        #[arg(long)]
        nodes: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute Dunn's index for a cluster table.
    Validate {
        /// Cluster table written by `cluster`.
        #[arg(long)]
        clusters: PathBuf,
        /// Fail with exit code 4 when the index is undefined.
        #[arg(long)]
        strict: bool,
        /// Validate every member, not only those admitted by head election.
        #[arg(long)]
        all_members: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the discrete-tick simulation.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Tick-0 index over several network sizes and seeds.
    Sweep {
        /// Network sizes, comma separated [default: 25,50,300].
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Seeds per size, counting up from the base seed [default: 20].
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        all_members: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::config(anyhow!(e)))?;
    }
    match &cli.command {
        Command::Generate { common } => commands::generate(common),
        Command::Cluster { nodes, common } => commands::cluster(common, nodes),
        Command::Validate {
            clusters,
            strict,
            all_members,
            common,
        } => commands::validate_cmd(common, clusters, *strict, *all_members),
        Command::Simulate { common } => commands::simulate(common),
        Command::Sweep {
            sizes,
            seeds,
            all_members,
            common,
        } => commands::sweep(common, sizes.clone(), *seeds, *all_members),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
