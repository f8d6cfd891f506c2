//! Text formats: multilayer edge lists and community files.
//!
//! Edge list, one record per line:
//!
//! ```text
//! %order L1 L2 L3      # optional natural layer order
//! L1 a b               # intra-layer edge
//! %presence L2 c       # c is present in L2 without edges
//! ```
//!
//! Community files use either the extended form `entity layer community` or
//! the flattened form `entity community` throughout.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mlq_core::mlgraph::{EntityId, LayerId};
use mlq_core::{CommunityStructure, MultilayerNetwork, NetworkBuilder};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] mlq_core::Error),
}

fn at(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

/// Non-empty records with comments stripped, paired with 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

pub fn parse_network(text: &str) -> Result<MultilayerNetwork, FormatError> {
    let mut b = NetworkBuilder::new();
    let mut order_line = None;
    for (line, tokens) in records(text) {
        match tokens[0] {
            "%order" => {
                if let Some(first) = order_line {
                    return Err(at(line, format!("second %order directive (first on line {first})")));
                }
                if tokens.len() < 2 {
                    return Err(at(line, "%order needs at least one layer"));
                }
                for name in &tokens[1..] {
                    b.ensure_layer(name);
                }
                b.order(&tokens[1..]);
                order_line = Some(line);
            }
            "%presence" => {
                if tokens.len() != 3 {
                    return Err(at(line, "expected %presence <layer> <entity>"));
                }
                b.ensure_layer(tokens[1]);
                b.presence(tokens[1], tokens[2]).map_err(|e| at(line, e.to_string()))?;
            }
            directive if directive.starts_with('%') => {
                return Err(at(line, format!("unknown directive {directive}")));
            }
            _ => {
                if tokens.len() != 3 {
                    return Err(at(line, "expected 3 tokens"));
                }
                b.ensure_layer(tokens[0]);
                b.edge(tokens[0], tokens[1], tokens[2])
                    .map_err(|e| at(line, e.to_string()))?;
            }
        }
    }
    Ok(b.build()?)
}

/// Writes `net` so that parsing the output gives the same network with the
/// same entity and layer indices.
pub fn write_network(net: &MultilayerNetwork) -> String {
    let mut out = String::new();
    let layer = |l: usize| net.layer_name(LayerId(l));
    let entity = |v: usize| net.entity_name(EntityId(v));
    out.push_str("%order");
    for l in 0..net.layer_count() {
        out.push(' ');
        out.push_str(layer(l));
    }
    out.push('\n');
    // presence records first so that entities are interned in index order
    for v in 0..net.entity_count() {
        for &l in net.entity_layers(EntityId(v)) {
            writeln!(out, "%presence {} {}", layer(l), entity(v)).unwrap();
        }
    }
    for (l, data) in net.layers().iter().enumerate() {
        for &(u, v) in data.edges() {
            writeln!(out, "{} {} {}", layer(l), entity(u), entity(v)).unwrap();
        }
    }
    out
}

/// Dense community ids for the labels of a file: numeric order when every
/// label is an integer, first appearance otherwise.
fn dense_labels(labels: &[&str]) -> Vec<usize> {
    let numeric: Option<Vec<i64>> = labels.iter().map(|s| s.parse().ok()).collect();
    let mut map: BTreeMap<&str, usize> = BTreeMap::new();
    match numeric {
        Some(values) => {
            let mut sorted = values.clone();
            sorted.sort_unstable();
            sorted.dedup();
            values.iter().map(|v| sorted.binary_search(v).unwrap()).collect()
        }
        None => labels
            .iter()
            .map(|s| {
                let next = map.len();
                *map.entry(s).or_insert(next)
            })
            .collect(),
    }
}

pub fn parse_communities(text: &str, net: &MultilayerNetwork) -> Result<CommunityStructure, FormatError> {
    let rows: Vec<(usize, Vec<&str>)> = records(text).collect();
    let Some((_, first)) = rows.first() else {
        return Err(at(0, "community file has no records"));
    };
    let width = first.len();
    if width != 2 && width != 3 {
        return Err(at(rows[0].0, "expected `entity layer community` or `entity community`"));
    }
    for (line, tokens) in &rows {
        if tokens.len() != width {
            return Err(at(
                *line,
                format!("expected {width} tokens; extended and flattened records cannot be mixed"),
            ));
        }
    }
    let labels = dense_labels(&rows.iter().map(|(_, t)| t[width - 1]).collect::<Vec<_>>());
    let entity = |line: usize, name: &str| {
        net.entity_id(name)
            .ok_or_else(|| at(line, format!("unknown entity {name}")))
    };

    if width == 2 {
        let mut partition: Vec<Option<usize>> = vec![None; net.entity_count()];
        for ((line, tokens), &c) in rows.iter().zip(&labels) {
            let v = entity(*line, tokens[0])?;
            if partition[v.0].replace(c).is_some() {
                return Err(at(*line, format!("entity {} assigned twice", tokens[0])));
            }
        }
        let partition: Vec<usize> = partition
            .into_iter()
            .enumerate()
            .map(|(v, c)| c.ok_or_else(|| at(0, format!("entity {} has no community", net.entity_name(EntityId(v))))))
            .collect::<Result<_, _>>()?;
        return Ok(CommunityStructure::from_entity_partition(net, &partition)?);
    }

    let mut seen = vec![vec![false; net.entity_count()]; net.layer_count()];
    let mut assignments = Vec::with_capacity(rows.len());
    for ((line, tokens), &c) in rows.iter().zip(&labels) {
        let v = entity(*line, tokens[0])?;
        let l = net
            .layer_id(tokens[1])
            .ok_or_else(|| at(*line, format!("unknown layer {}", tokens[1])))?;
        if !net.layer(l).contains(v.0) {
            return Err(at(
                *line,
                format!("entity {} is not present in layer {}", tokens[0], tokens[1]),
            ));
        }
        if std::mem::replace(&mut seen[l.0][v.0], true) {
            return Err(at(
                *line,
                format!("entity {} assigned twice in layer {}", tokens[0], tokens[1]),
            ));
        }
        assignments.push((v, l, c));
    }
    Ok(CommunityStructure::from_assignments(net, assignments)?)
}

/// Extended form, one `entity layer community` record per tuple.
pub fn write_communities(net: &MultilayerNetwork, cs: &CommunityStructure) -> String {
    let mut out = String::from("# entity layer community\n");
    for (v, l) in net.tuples() {
        let c = cs.label(v, l).expect("structure covers every tuple");
        writeln!(out, "{} {} {}", net.entity_name(v), net.layer_name(l), c).unwrap();
    }
    out
}

/// Flattened form, one `entity community` record per entity.
pub fn write_partition(net: &MultilayerNetwork, partition: &[usize]) -> String {
    let mut out = String::from("# entity community\n");
    for (v, c) in partition.iter().enumerate() {
        writeln!(out, "{} {}", net.entity_name(EntityId(v)), c).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# two layers\r\n%order B A\r\nA x y\r\nA y z # trailing\r\n\r\nB x z\r\n%presence B w\r\n";

    #[test]
    fn parses_records_and_directives() {
        let net = parse_network(SAMPLE).unwrap();
        assert_eq!(net.layer_name(LayerId(0)), "B");
        assert_eq!(net.layer_name(LayerId(1)), "A");
        assert_eq!(net.entity_count(), 4);
        assert_eq!(net.layer(LayerId(0)).node_count(), 3);
        assert_eq!(net.edge_count(), 3);
        assert!(net.has_declared_order());
    }

    #[test]
    fn error_messages_carry_line_numbers() {
        let err = parse_network("A x y\nA x\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: expected 3 tokens");
        let err = parse_network("A x x\n").unwrap_err();
        assert!(err.to_string().starts_with("line 1: "), "{err}");
        assert!(parse_network("%bogus A\n").is_err());
        assert!(parse_network("%order A\n%order A\nA x y\n").is_err());
        assert!(parse_network("%order A\nB x y\n").is_err());
    }

    #[test]
    fn network_round_trip() {
        let net = parse_network(SAMPLE).unwrap();
        let again = parse_network(&write_network(&net)).unwrap();
        assert_eq!(write_network(&net), write_network(&again));
        for l in 0..net.layer_count() {
            assert_eq!(net.layer(LayerId(l)).edges(), again.layer(LayerId(l)).edges());
            assert_eq!(net.layer(LayerId(l)).nodes(), again.layer(LayerId(l)).nodes());
        }
    }

    #[test]
    fn community_forms() {
        let net = parse_network(SAMPLE).unwrap();
        let flat = parse_communities("x 7\ny 7\nz 3\nw 3\n", &net).unwrap();
        assert_eq!(flat.community_count(), 2);
        // numeric labels keep their order: 3 -> 0, 7 -> 1
        assert_eq!(flat.label(net.entity_id("x").unwrap(), LayerId(0)), Some(1));

        let extended = parse_communities(&write_communities(&net, &flat), &net).unwrap();
        assert_eq!(extended, flat);

        let named = parse_communities("x blue\ny red\nz blue\nw red\n", &net).unwrap();
        assert_eq!(named.label(net.entity_id("x").unwrap(), LayerId(0)), Some(0));
    }

    #[test]
    fn community_errors() {
        let net = parse_network(SAMPLE).unwrap();
        let mixed = parse_communities("x 0\ny B 0\n", &net).unwrap_err().to_string();
        assert!(mixed.starts_with("line 2:"), "{mixed}");
        assert!(parse_communities("q 0\n", &net)
            .unwrap_err()
            .to_string()
            .contains("unknown entity q"));
        assert!(parse_communities("x C 0\n", &net)
            .unwrap_err()
            .to_string()
            .contains("unknown layer C"));
        assert!(parse_communities("w A 0\n", &net)
            .unwrap_err()
            .to_string()
            .contains("not present"));
        assert!(parse_communities("x 0\ny 0\n", &net).is_err());
        assert!(parse_communities("", &net).is_err());
    }
}
