//! TSV and JSON renderings of scores, statistics and run manifests.

use std::fmt::Write as _;

use mlq_core::mlgraph::LayerId;
use mlq_core::{Error, MultilayerNetwork, ScoreReport};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCORE_HEADER: &str = "community\tlayer\tintra\tnull\tcoupling\tgamma\tterm";

/// One row per `(community, layer)` term plus a closing `total` row. The
/// `term` column is normalized, so the rows above `total` sum to it.
pub fn score_tsv(net: &MultilayerNetwork, report: &ScoreReport) -> String {
    let mut out = String::from(SCORE_HEADER);
    out.push('\n');
    for r in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.community,
            net.layer_name(LayerId(r.layer)),
            r.intra,
            r.null,
            r.coupling,
            r.gamma,
            r.value() / report.normalization
        )
        .unwrap();
    }
    let sum = |f: fn(&mlq_core::modularity::CommunityTerms) -> f64| report.communities.iter().map(f).sum::<f64>();
    writeln!(
        out,
        "total\t-\t{}\t{}\t{}\t-\t{}",
        sum(|c| c.intra),
        sum(|c| c.null),
        sum(|c| c.coupling),
        report.total
    )
    .unwrap();
    out
}

pub fn score_json(net: &MultilayerNetwork, report: &ScoreReport, policy: Value) -> Value {
    let communities: Vec<Value> = report
        .communities
        .iter()
        .map(|c| {
            let layers: Vec<Value> = report
                .rows
                .iter()
                .filter(|r| r.community == c.community)
                .map(|r| {
                    json!({
                        "layer": net.layer_name(LayerId(r.layer)),
                        "intra": r.intra,
                        "null": r.null,
                        "coupling": r.coupling,
                        "gamma": r.gamma,
                    })
                })
                .collect();
            json!({
                "community": c.community,
                "intra": c.intra,
                "null": c.null,
                "coupling": c.coupling,
                "layers": layers,
            })
        })
        .collect();
    json!({
        "policy": policy,
        "total": report.total,
        "normalization": report.normalization,
        "communities": communities,
    })
}

fn fmt_stat(x: f64) -> String {
    format!("{x:.4}")
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub const STATS_HEADER: &str = "scope\tentities\tedges\tlayers\tnode_coverage\tedge_coverage\tdegree\tdegree_std\tavg_path_length\tavg_path_length_std\tclustering\tclustering_std";

/// Dataset summary: a network row with per-layer means and population
/// standard deviations, then one row per layer.
pub fn stats_tsv(net: &MultilayerNetwork) -> Result<String, Error> {
    let total_edges = net.edge_count();
    let edge_coverage = net.edge_coverage()?;
    let mut per_layer = Vec::with_capacity(net.layer_count());
    for l in 0..net.layer_count() {
        per_layer.push(net.monoplex_stats(LayerId(l))?);
    }
    let (deg, deg_sd) = mean_std(&per_layer.iter().map(|s| s.degree_mean).collect::<Vec<_>>());
    let (apl, apl_sd) = mean_std(&per_layer.iter().map(|s| s.avg_path_length).collect::<Vec<_>>());
    let (cc, cc_sd) = mean_std(&per_layer.iter().map(|s| s.clustering_coefficient).collect::<Vec<_>>());

    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    writeln!(
        out,
        "network\t{}\t{}\t{}\t{:.2}\t{:.2}\t{}\t{}\t{}\t{}\t{}\t{}",
        net.entity_count(),
        total_edges,
        net.layer_count(),
        net.node_coverage(),
        edge_coverage,
        fmt_stat(deg),
        fmt_stat(deg_sd),
        fmt_stat(apl),
        fmt_stat(apl_sd),
        fmt_stat(cc),
        fmt_stat(cc_sd)
    )
    .unwrap();
    for (l, s) in per_layer.iter().enumerate() {
        let layer = net.layer(LayerId(l));
        writeln!(
            out,
            "{}\t{}\t{}\t1\t{:.2}\t{:.2}\t{}\t{}\t{}\t-\t{}\t-",
            layer.name(),
            layer.node_count(),
            layer.edge_count(),
            layer.node_count() as f64 / net.entity_count() as f64,
            layer.edge_count() as f64 / total_edges as f64,
            fmt_stat(s.degree_mean),
            fmt_stat(s.degree_std),
            fmt_stat(s.avg_path_length),
            fmt_stat(s.clustering_coefficient)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
