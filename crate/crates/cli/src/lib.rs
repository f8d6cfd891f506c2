//! File formats, reports and commands behind the `mlq` binary.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 policy conflict,
//! 4 resource guard.

pub mod args;
pub mod commands;
pub mod formats;
pub mod report;

use std::path::PathBuf;

pub use args::{Cli, Command};
use commands::{cmd_detect, cmd_score, cmd_stats, cmd_sweep, generate};
use mlq_core::synthbench::PlantedSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        source: formats::FormatError,
    },
    #[error(transparent)]
    Core(#[from] mlq_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(mlq_core::Error::PolicyConflict(_)) => 3,
            CliError::Core(mlq_core::Error::SizeGuard(_)) => 4,
            _ => 2,
        }
    }
}

/// Runs a parsed command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Stats { network } => cmd_stats(network),
        Command::Score {
            network,
            communities,
            policy,
            output,
        } => cmd_score(network, communities, policy, *output),
        Command::Detect {
            network,
            policy,
            method,
            seed,
            out,
        } => {
            let o = cmd_detect(network, policy, *method, *seed, out)?;
            Ok(format!(
                "objective\t{}\ncommunities\t{}\nwrote\t{}\nwrote\t{}\nwrote\t{}\n",
                o.objective,
                o.community_count,
                o.communities.display(),
                o.partition.display(),
                o.manifest.display()
            ))
        }
        Command::Sweep {
            network,
            communities,
            step,
            protocol,
        } => cmd_sweep(network, communities, *protocol, *step),
        Command::Generate {
            entities,
            communities,
            layers,
            p_in,
            p_out,
            presence,
            seed,
            out,
        } => {
            let spec = PlantedSpec {
                entities: *entities,
                communities: *communities,
                layers: *layers,
                p_in: *p_in,
                p_out: *p_out,
                presence: *presence,
                seed: *seed,
            };
            let (network, labels) = generate(&spec, out)?;
            Ok(format!("wrote\t{}\nwrote\t{}\n", network.display(), labels.display()))
        }
    }
}
