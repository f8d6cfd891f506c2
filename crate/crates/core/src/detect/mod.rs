//! Community detection: generalized Louvain over entity-layer tuples, a
//! per-layer Louvain baseline with majority aggregation, and NMI.

mod engine;
mod nmi;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use nmi::nmi;

use crate::community::CommunityStructure;
use crate::error::{Error, Result};
use crate::mlgraph::{LayerId, MultilayerNetwork};
use crate::modularity::{score, Objective};
use engine::{Engine, RunStats};

pub const DEFAULT_MAX_PASSES: usize = 50;
pub const DEFAULT_MIN_GAIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub objective: Objective,
    pub seed: u64,
    /// Cap on local-moving passes per aggregation level.
    pub max_passes: usize,
    /// A move is accepted only when it improves the objective by more than this.
    pub min_gain: f64,
}

impl DetectConfig {
    pub fn new(objective: Objective) -> Self {
        DetectConfig {
            objective,
            seed: 0,
            max_passes: DEFAULT_MAX_PASSES,
            min_gain: DEFAULT_MIN_GAIN,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, net: &MultilayerNetwork) -> Result<()> {
        if !(self.min_gain > 0.0 && self.min_gain.is_finite()) {
            return Err(Error::InvalidParameter("minimum gain must be positive".into()));
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter("max passes must be at least 1".into()));
        }
        self.objective.validate(net)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectResult {
    pub structure: CommunityStructure,
    /// Majority-vote entity partition of `structure`.
    pub entity_partition: Vec<usize>,
    /// `structure` re-scored under the run's objective.
    pub objective: f64,
    pub passes: usize,
    pub moves: usize,
    pub levels: usize,
    /// Optimizer objective after each pass, non-decreasing.
    pub trace: Vec<f64>,
}

fn finish(
    net: &MultilayerNetwork,
    objective: &Objective,
    structure: CommunityStructure,
    stats: RunStats,
) -> Result<DetectResult> {
    let value = score(net, &structure, objective)?.total;
    Ok(DetectResult {
        entity_partition: structure.flatten_majority(),
        structure,
        objective: value,
        passes: stats.passes,
        moves: stats.moves,
        levels: stats.levels,
        trace: stats.trace,
    })
}

/// Generalized Louvain: every entity-layer tuple is assigned separately.
pub fn generalized_louvain(net: &MultilayerNetwork, config: &DetectConfig) -> Result<DetectResult> {
    config.validate(net)?;
    if net.edge_count() == 0 {
        return Err(Error::EdgelessNetwork);
    }
    // Rejects inputs the scorer would reject before spending time optimizing.
    score(
        net,
        &CommunityStructure::from_tuple_labels(net, &vec![0; net.tuple_count()])?,
        &config.objective,
    )?;
    let mut engine = Engine::new(net, &config.objective)?;
    let stats = engine.run(config.seed, config.max_passes, config.min_gain);
    let structure = CommunityStructure::from_tuple_labels(net, &first_appearance(engine.tuple_labels()))?;
    finish(net, &config.objective, structure, stats)
}

fn louvain_layer_with_stats(net: &MultilayerNetwork, l: LayerId, seed: u64) -> Result<(Vec<usize>, RunStats)> {
    let layer = net.layer(l);
    if layer.edge_count() == 0 {
        return Err(Error::EdgelessLayer(layer.name().into()));
    }
    let sub = net.layer_subnetwork(l);
    let objective = Objective::Multislice {
        gammas: vec![1.0],
        omega: 0.0,
    };
    let mut engine = Engine::new(&sub, &objective)?;
    let stats = engine.run(seed, DEFAULT_MAX_PASSES, DEFAULT_MIN_GAIN);
    Ok((first_appearance(engine.tuple_labels()), stats))
}

/// Relabels so that communities are numbered in order of first occurrence.
fn first_appearance(labels: &[usize]) -> Vec<usize> {
    let mut map = alloc::collections::BTreeMap::new();
    labels
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// Classic Louvain on one layer. The result is aligned with
/// `net.layer(l).nodes()`.
pub fn louvain_layer(net: &MultilayerNetwork, l: LayerId, seed: u64) -> Result<Vec<usize>> {
    louvain_layer_with_stats(net, l, seed).map(|(p, _)| p)
}

/// Aggregation baseline: Louvain per layer, labels matched across layers by
/// greedy maximum entity overlap, then a majority vote per entity.
#[allow(clippy::needless_range_loop)]
pub fn aggregate_majority(net: &MultilayerNetwork, config: &DetectConfig) -> Result<DetectResult> {
    config.validate(net)?;
    let n = net.entity_count();
    let mut global_members: Vec<Vec<bool>> = Vec::new();
    let mut tuple_global: Vec<Vec<Option<usize>>> = vec![vec![None; n]; net.layer_count()];
    let mut stats = RunStats::default();

    for l in 0..net.layer_count() {
        let (local, run) = louvain_layer_with_stats(net, LayerId(l), config.seed.wrapping_add(l as u64))?;
        stats.passes += run.passes;
        stats.moves += run.moves;
        stats.levels += run.levels;
        let nodes = net.layer(LayerId(l)).nodes();
        let k = local.iter().max().map_or(0, |m| m + 1);

        let mut overlap: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (&v, &c) in nodes.iter().zip(&local) {
            for (g, members) in global_members.iter().enumerate() {
                if members[v] {
                    *overlap.entry((c, g)).or_insert(0) += 1;
                }
            }
        }
        let mut ranked: Vec<(usize, usize, usize)> = overlap.into_iter().map(|((c, g), o)| (o, c, g)).collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut mapping: Vec<Option<usize>> = vec![None; k];
        let mut taken = vec![false; global_members.len()];
        for (_, c, g) in ranked {
            if mapping[c].is_none() && !taken[g] {
                mapping[c] = Some(g);
                taken[g] = true;
            }
        }
        for slot in mapping.iter_mut() {
            if slot.is_none() {
                *slot = Some(global_members.len());
                global_members.push(vec![false; n]);
            }
        }
        for (&v, &c) in nodes.iter().zip(&local) {
            let g = mapping[c].unwrap();
            global_members[g][v] = true;
            tuple_global[l][v] = Some(g);
        }
    }

    let mut votes = vec![0usize; global_members.len()];
    let partition: Vec<usize> = (0..n)
        .map(|v| {
            votes.iter_mut().for_each(|x| *x = 0);
            for layer in &tuple_global {
                if let Some(g) = layer[v] {
                    votes[g] += 1;
                }
            }
            let mut best = 0;
            for g in 1..votes.len() {
                if votes[g] > votes[best] {
                    best = g;
                }
            }
            best
        })
        .collect();
    let structure = CommunityStructure::from_entity_partition(net, &partition)?;
    finish(net, &config.objective, structure, stats)
}
