use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mlq_core::mlgraph::LayerId;
use mlq_core::{
    CouplingKind, CouplingPolicy, LayerOrdering, MultilayerNetwork, Objective, PairingScheme, ResolutionPolicy,
};
use serde_json::{json, Value};

use crate::CliError;

#[derive(Parser, Debug, Clone)]
#[command(
    name = "mlq",
    version,
    about = "Multilayer modularity scoring and community detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Entity, edge, coverage and per-layer structural statistics as TSV.
    Stats { network: PathBuf },
    /// Score a community file against a network.
    Score {
        network: PathBuf,
        communities: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        output: OutputFormat,
    },
    /// Detect communities; writes `<out>.communities`, `<out>.flat` and `<out>.manifest.json`.
    Detect {
        network: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value_t = Method::Gl)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multislice modularity of a fixed structure over γ and ω in [0, 2].
    Sweep {
        network: PathBuf,
        communities: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Protocol::All)]
        protocol: Protocol,
    },
    /// Planted-partition network; writes `<out>.mlg` and `<out>.planted`.
    Generate {
        #[arg(long)]
        entities: usize,
        #[arg(long)]
        communities: usize,
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
        #[arg(long, default_value_t = 1.0)]
        presence: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveArg {
    /// Multilayer modularity.
    Q,
    /// Multislice modularity with uniform γ and ω.
    Qms,
    /// Classic modularity of one layer.
    Newman,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingArg {
    None,
    Sym,
    AsymInner,
    AsymOuter,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingArg {
    None,
    NaturalAdjacent,
    NaturalPairwise,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Generalized Louvain over entity-layer tuples.
    Gl,
    /// Per-layer Louvain, label matching and majority vote.
    Aggregate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    All,
    /// γ varies, ω = 0.
    Gamma,
    /// γ varies, ω = 1 − γ.
    Coupled,
    /// ω varies, γ = 1.
    Omega,
}

fn parse_resolution(s: &str) -> Result<ResolutionPolicy, String> {
    if s == "redundancy" {
        return Ok(ResolutionPolicy::Redundancy);
    }
    let value = s
        .strip_prefix("constant:")
        .ok_or_else(|| format!("expected constant:<float> or redundancy, got {s}"))?;
    value
        .parse()
        .map(ResolutionPolicy::Constant)
        .map_err(|_| format!("invalid resolution value {value}"))
}

#[derive(Args, Debug, Clone)]
pub struct PolicyArgs {
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Q)]
    pub objective: ObjectiveArg,
    /// `constant:<float>` or `redundancy` (objective q).
    #[arg(long, default_value = "constant:1", value_parser = parse_resolution)]
    pub resolution: ResolutionPolicy,
    /// Inter-layer coupling function (objective q).
    #[arg(long, value_enum, default_value_t = CouplingArg::Sym)]
    pub coupling: CouplingArg,
    /// Damp asymmetric coupling by layer distance; needs a natural ordering.
    #[arg(long)]
    pub time_aware: bool,
    #[arg(long, value_enum, default_value_t = OrderingArg::None)]
    pub ordering: OrderingArg,
    /// Resolution of every layer (objective qms).
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Coupling strength (objective qms).
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    /// Layer to score (objective newman).
    #[arg(long)]
    pub layer: Option<String>,
}

impl Default for PolicyArgs {
    fn default() -> Self {
        PolicyArgs {
            objective: ObjectiveArg::Q,
            resolution: ResolutionPolicy::Constant(1.0),
            coupling: CouplingArg::Sym,
            time_aware: false,
            ordering: OrderingArg::None,
            gamma: 1.0,
            omega: 0.0,
            layer: None,
        }
    }
}

/// What a score or detection run optimizes.
#[derive(Debug, Clone, PartialEq)]
pub enum Scoring {
    Newman(LayerId),
    Objective(Objective),
}

impl PolicyArgs {
    pub fn ordering(&self) -> LayerOrdering {
        match self.ordering {
            OrderingArg::None => LayerOrdering::Unordered,
            OrderingArg::NaturalAdjacent => LayerOrdering::Natural(PairingScheme::Adjacent),
            OrderingArg::NaturalPairwise => LayerOrdering::Natural(PairingScheme::PairWise),
        }
    }

    pub fn coupling(&self) -> CouplingPolicy {
        let kind = match self.coupling {
            CouplingArg::None => CouplingKind::None,
            CouplingArg::Sym => CouplingKind::Symmetric,
            CouplingArg::AsymInner => CouplingKind::AsymInner,
            CouplingArg::AsymOuter => CouplingKind::AsymOuter,
        };
        CouplingPolicy {
            kind,
            time_aware: self.time_aware,
        }
    }

    pub fn scoring(&self, net: &MultilayerNetwork) -> Result<Scoring, CliError> {
        if self.time_aware && self.objective != ObjectiveArg::Q {
            return Err(mlq_core::Error::PolicyConflict("--time-aware applies only to --objective q".into()).into());
        }
        let scoring = match self.objective {
            ObjectiveArg::Q => Scoring::Objective(Objective::Multilayer {
                resolution: self.resolution,
                coupling: self.coupling(),
                ordering: self.ordering(),
            }),
            ObjectiveArg::Qms => Scoring::Objective(Objective::multislice_uniform(net, self.gamma, self.omega)),
            ObjectiveArg::Newman => {
                let layer = match &self.layer {
                    Some(name) => net
                        .layer_id(name)
                        .ok_or_else(|| mlq_core::Error::UnknownLayer(name.clone()))?,
                    None if net.layer_count() == 1 => LayerId(0),
                    None => {
                        return Err(CliError::Usage(
                            "--objective newman needs a single-layer network or --layer".into(),
                        ))
                    }
                };
                Scoring::Newman(layer)
            }
        };
        if let Scoring::Objective(objective) = &scoring {
            objective.validate(net)?;
        }
        Ok(scoring)
    }

    /// The settings that affect the selected objective.
    pub fn describe(&self) -> Value {
        match self.objective {
            ObjectiveArg::Q => json!({
                "objective": "q",
                "resolution": match self.resolution {
                    ResolutionPolicy::Constant(g) => format!("constant:{g}"),
                    ResolutionPolicy::Redundancy => "redundancy".to_string(),
                },
                "coupling": value_name(&self.coupling),
                "time_aware": self.time_aware,
                "ordering": value_name(&self.ordering),
            }),
            ObjectiveArg::Qms => json!({ "objective": "qms", "gamma": self.gamma, "omega": self.omega }),
            ObjectiveArg::Newman => json!({ "objective": "newman", "layer": self.layer }),
        }
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}
