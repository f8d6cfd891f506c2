use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mlq_core::detect::{aggregate_majority, generalized_louvain};
use mlq_core::mlgraph::EntityId;
use mlq_core::modularity::{q_multislice, q_newman, score};
use mlq_core::synthbench::{planted_multilayer, PlantedSpec};
use mlq_core::{CommunityStructure, DetectConfig, Error, MultilayerNetwork};
use serde_json::{json, Value};

use crate::args::{Method, OutputFormat, PolicyArgs, Protocol, Scoring};
use crate::formats::{parse_communities, parse_network, write_communities, write_network, write_partition};
use crate::report::{score_json, score_tsv, sha256_hex, stats_tsv};
use crate::CliError;

/// Sweep points per protocol above which a sweep is refused.
pub const SWEEP_POINT_LIMIT: usize = 100_000;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_network(path: &Path) -> Result<MultilayerNetwork, CliError> {
    parse_network(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_communities(path: &Path, net: &MultilayerNetwork) -> Result<CommunityStructure, CliError> {
    parse_communities(&read(path)?, net).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}

pub fn cmd_stats(network: &Path) -> Result<String, CliError> {
    let net = load_network(network)?;
    Ok(stats_tsv(&net)?)
}

pub fn cmd_score(
    network: &Path,
    communities: &Path,
    policy: &PolicyArgs,
    output: OutputFormat,
) -> Result<String, CliError> {
    let net = load_network(network)?;
    let cs = load_communities(communities, &net)?;
    match policy.scoring(&net)? {
        Scoring::Newman(l) => {
            let partition: Vec<usize> = (0..net.entity_count())
                .map(|v| cs.label(EntityId(v), l).unwrap_or(usize::MAX))
                .collect();
            let q = q_newman(net.layer(l), &partition)?;
            Ok(match output {
                OutputFormat::Tsv => format!("layer\ttotal\n{}\t{q}\n", net.layer_name(l)),
                OutputFormat::Json => pretty(&json!({ "policy": policy.describe(), "total": q })),
            })
        }
        Scoring::Objective(objective) => {
            let report = score(&net, &cs, &objective)?;
            Ok(match output {
                OutputFormat::Tsv => score_tsv(&net, &report),
                OutputFormat::Json => pretty(&score_json(&net, &report, policy.describe())),
            })
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn file_entry(path: &Path, contents: &str) -> Value {
    json!({ "path": path.display().to_string(), "sha256": sha256_hex(contents.as_bytes()) })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Files written by [`cmd_detect`].
#[derive(Debug, Clone)]
pub struct DetectOutputs {
    pub communities: PathBuf,
    pub partition: PathBuf,
    pub manifest: PathBuf,
    pub objective: f64,
    pub community_count: usize,
}

pub fn cmd_detect(
    network: &Path,
    policy: &PolicyArgs,
    method: Method,
    seed: u64,
    out: &Path,
) -> Result<DetectOutputs, CliError> {
    let text = read(network)?;
    let net = parse_network(&text).map_err(|source| CliError::Format {
        path: network.to_path_buf(),
        source,
    })?;
    let objective = match policy.scoring(&net)? {
        Scoring::Objective(objective) => objective,
        Scoring::Newman(_) => {
            return Err(CliError::Usage(
                "detect optimizes q or qms; use --objective q --coupling none for a single layer".into(),
            ))
        }
    };
    let config = DetectConfig::new(objective).with_seed(seed);
    let result = match method {
        Method::Gl => generalized_louvain(&net, &config)?,
        Method::Aggregate => aggregate_majority(&net, &config)?,
    };

    let outputs = DetectOutputs {
        communities: with_suffix(out, ".communities"),
        partition: with_suffix(out, ".flat"),
        manifest: with_suffix(out, ".manifest.json"),
        objective: result.objective,
        community_count: result.structure.community_count(),
    };
    let extended = write_communities(&net, &result.structure);
    let flat = write_partition(&net, &result.entity_partition);
    let manifest = json!({
        "command": "detect",
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": { "network": file_entry(network, &text) },
        "config": {
            "policy": policy.describe(),
            "method": match method { Method::Gl => "gl", Method::Aggregate => "aggregate" },
            "seed": seed,
            "max_passes": config.max_passes,
            "min_gain": config.min_gain,
        },
        "result": {
            "objective": result.objective,
            "communities": outputs.community_count,
            "passes": result.passes,
            "moves": result.moves,
            "levels": result.levels,
            "trace": result.trace,
        },
        "outputs": {
            "communities": file_entry(&outputs.communities, &extended),
            "partition": file_entry(&outputs.partition, &flat),
        },
    });
    write(&outputs.communities, &extended)?;
    write(&outputs.partition, &flat)?;
    write(&outputs.manifest, &pretty(&manifest))?;
    Ok(outputs)
}

fn grid(step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    let count = (2.0 / step + 1e-9).floor();
    if count >= SWEEP_POINT_LIMIT as f64 {
        return Err(Error::SizeGuard(format!("step {step} gives more than {SWEEP_POINT_LIMIT} points")).into());
    }
    // rounded so that 0.1 steps print as 0.3, not 0.30000000000000004
    Ok((0..=count as usize).map(|i| round9(i as f64 * step)).collect())
}

fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Multislice modularity of a fixed structure along the sweep protocols.
/// Coupled rows with `ω = 1 − γ < 0` are reported as `NA`.
pub fn cmd_sweep(network: &Path, communities: &Path, protocol: Protocol, step: f64) -> Result<String, CliError> {
    let net = load_network(network)?;
    let cs = load_communities(communities, &net)?;
    let values = grid(step)?;
    let ell = net.layer_count();
    let mut out = String::from("protocol\tgamma\tomega\tqms\n");
    let mut row = |name: &str, gamma: f64, omega: f64| -> Result<(), CliError> {
        if omega < 0.0 {
            writeln!(out, "{name}\t{gamma}\t{omega}\tNA").unwrap();
            return Ok(());
        }
        let q = q_multislice(&net, &cs, &vec![gamma; ell], omega)?.total;
        writeln!(out, "{name}\t{gamma}\t{omega}\t{q}").unwrap();
        Ok(())
    };
    let all = protocol == Protocol::All;
    if all || protocol == Protocol::Gamma {
        for &g in &values {
            row("gamma", g, 0.0)?;
        }
    }
    if all || protocol == Protocol::Coupled {
        for &g in &values {
            row("coupled", g, round9(1.0 - g))?;
        }
    }
    if all || protocol == Protocol::Omega {
        for &w in &values {
            row("omega", 1.0, w)?;
        }
    }
    Ok(out)
}

/// Writes a planted network and its planted labels; returns the two paths.
pub fn generate(spec: &PlantedSpec, out: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let (net, planted) = planted_multilayer(spec)?;
    let network = with_suffix(out, ".mlg");
    let labels = with_suffix(out, ".planted");
    write(&network, &write_network(&net))?;
    write(&labels, &write_partition(&net, &planted))?;
    Ok((network, labels))
}
