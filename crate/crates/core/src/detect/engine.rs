//! Local-moving optimizer over entity-layer tuples.
//!
//! Both objectives decompose as `Σ_C f(C) / d` with `d` fixed for a given
//! network and policy, so a move only changes `f` of the two communities it
//! touches. Each community keeps enough aggregates to recompute `f` in
//! `O(ℓ²)`: per-layer degree and internal degree, the projection overlap
//! matrix `|C^(i) ∩ C^(j)|` and, for the redundancy resolution, `nrp(L, C)`.
//!
//! Moves are made by super-nodes. At the first level every tuple is its own
//! super-node; after a level converges the tuples of each (community, layer)
//! slice are merged into one super-node and community labels are kept.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::community::redundancy_resolution;
use crate::error::Result;
use crate::mlgraph::{EntityId, LayerId, MultilayerNetwork};
use crate::modularity::{
    asymmetric_from_counts, shared_matrix, symmetric_from_counts, time_penalty, CouplingKind, CouplingPolicy,
    Objective, ResolutionPolicy,
};

enum Kind {
    Multislice {
        gammas: Vec<f64>,
        two_e: Vec<f64>,
        omega: f64,
    },
    Multilayer {
        resolution: ResolutionPolicy,
        coupling: CouplingPolicy,
        pairings: Vec<Vec<usize>>,
        shared: Vec<usize>,
        layer_size: Vec<usize>,
    },
}

struct SuperNode {
    layer: usize,
    tuples: Vec<usize>,
    degree: f64,
    /// Twice the number of edges among the node's own tuples.
    internal: f64,
    /// Edge counts to other super-nodes of the same layer.
    links: Vec<(usize, f64)>,
}

#[derive(Clone)]
struct Aggregate {
    nodes: usize,
    degree: Vec<f64>,
    internal: Vec<f64>,
    /// `ℓ × ℓ`, diagonal holds `|C^(i)|`.
    overlap: Vec<u32>,
    nrp: Vec<u32>,
}

impl Aggregate {
    fn empty(ell: usize) -> Self {
        Aggregate {
            nodes: 0,
            degree: vec![0.0; ell],
            internal: vec![0.0; ell],
            overlap: vec![0; ell * ell],
            nrp: vec![0; ell],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RunStats {
    pub passes: usize,
    pub moves: usize,
    pub levels: usize,
    /// Objective after every pass.
    pub trace: Vec<f64>,
}

pub(crate) struct Engine {
    ell: usize,
    kind: Kind,
    norm: f64,
    tuple_entity: Vec<usize>,
    tuple_layer: Vec<usize>,
    entity_tuples: Vec<Vec<usize>>,
    tuple_comm: Vec<usize>,
    nodes: Vec<SuperNode>,
    node_comm: Vec<usize>,
    comms: Vec<Aggregate>,
    values: Vec<f64>,
    empty: Vec<usize>,
    /// Redundant partners `(u, SL(v, u))` per entity; empty unless needed.
    partners: Vec<Vec<(usize, Vec<usize>)>>,
    track_nrp: bool,
    mark: Vec<bool>,
}

impl Engine {
    pub(crate) fn new(net: &MultilayerNetwork, objective: &Objective) -> Result<Self> {
        objective.validate(net)?;
        let ell = net.layer_count();
        let norm = objective.normalization(net)?;
        let kind = match objective {
            Objective::Multislice { gammas, omega } => Kind::Multislice {
                gammas: gammas.clone(),
                two_e: net.layers().iter().map(|l| 2.0 * l.edge_count() as f64).collect(),
                omega: *omega,
            },
            Objective::Multilayer {
                resolution,
                coupling,
                ordering,
            } => Kind::Multilayer {
                resolution: *resolution,
                coupling: *coupling,
                pairings: (0..ell)
                    .map(|l| {
                        net.valid_pairings(LayerId(l), *ordering)
                            .into_iter()
                            .map(|p| p.0)
                            .collect()
                    })
                    .collect(),
                shared: shared_matrix(net),
                layer_size: net.layers().iter().map(|l| l.node_count()).collect(),
            },
        };

        let tuples = net.tuples();
        let tuple_entity: Vec<usize> = tuples.iter().map(|&(v, _)| v.0).collect();
        let tuple_layer: Vec<usize> = tuples.iter().map(|&(_, l)| l.0).collect();
        let mut entity_tuples = vec![Vec::new(); net.entity_count()];
        for (t, &v) in tuple_entity.iter().enumerate() {
            entity_tuples[v].push(t);
        }

        let nodes: Vec<SuperNode> = tuples
            .iter()
            .map(|&(v, l)| {
                let layer = net.layer(l);
                SuperNode {
                    layer: l.0,
                    tuples: vec![net.tuple_index(v, l).unwrap()],
                    degree: layer.neighbors(v.0).len() as f64,
                    internal: 0.0,
                    links: layer
                        .neighbors(v.0)
                        .iter()
                        .map(|&u| (net.tuple_index(EntityId(u), l).unwrap(), 1.0))
                        .collect(),
                }
            })
            .collect();

        let needs_partners = matches!(
            kind,
            Kind::Multilayer {
                resolution: ResolutionPolicy::Redundancy,
                ..
            }
        );
        let partners = if needs_partners {
            redundant_partners(net)
        } else {
            vec![Vec::new(); net.entity_count()]
        };

        let count = nodes.len();
        let mut engine = Engine {
            ell,
            kind,
            norm,
            tuple_entity,
            tuple_layer,
            entity_tuples,
            tuple_comm: (0..count).collect(),
            node_comm: (0..count).collect(),
            nodes,
            comms: Vec::with_capacity(count),
            values: Vec::with_capacity(count),
            empty: Vec::new(),
            partners,
            track_nrp: needs_partners,
            mark: vec![false; net.entity_count()],
        };
        for s in 0..count {
            let empty = Aggregate::empty(ell);
            let agg = engine.with_node(s, &empty, usize::MAX);
            engine.values.push(engine.value(&agg));
            engine.comms.push(agg);
        }
        Ok(engine)
    }

    /// Current objective, `Σ f(C) / d`.
    pub(crate) fn objective(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.norm
    }

    pub(crate) fn tuple_labels(&self) -> &[usize] {
        &self.tuple_comm
    }

    fn value(&self, agg: &Aggregate) -> f64 {
        let ell = self.ell;
        let mut total = 0.0;
        match &self.kind {
            Kind::Multislice { gammas, two_e, omega } => {
                for l in 0..ell {
                    if agg.overlap[l * ell + l] == 0 {
                        continue;
                    }
                    let null = if two_e[l] > 0.0 {
                        gammas[l] * agg.degree[l] * agg.degree[l] / two_e[l]
                    } else {
                        0.0
                    };
                    let coupled: u32 = (0..ell).filter(|&j| j != l).map(|j| agg.overlap[l * ell + j]).sum();
                    total += agg.internal[l] - null + omega * coupled as f64;
                }
            }
            Kind::Multilayer {
                resolution,
                coupling,
                pairings,
                shared,
                layer_size,
            } => {
                for l in 0..ell {
                    let projection = agg.overlap[l * ell + l] as usize;
                    if projection == 0 {
                        continue;
                    }
                    let gamma = match resolution {
                        ResolutionPolicy::Constant(g) => *g,
                        ResolutionPolicy::Redundancy => redundancy_resolution(agg.nrp[l] as usize),
                    };
                    let mut term = agg.internal[l] - gamma * agg.degree[l] * agg.degree[l] / self.norm;
                    if coupling.beta() {
                        for &lp in &pairings[l] {
                            let inter = agg.overlap[l * ell + lp] as usize;
                            let s = shared[l * ell + lp];
                            let mut ic = match coupling.kind {
                                CouplingKind::Symmetric => symmetric_from_counts(inter, s),
                                CouplingKind::AsymInner => asymmetric_from_counts(inter, s, layer_size[l], projection),
                                CouplingKind::AsymOuter => asymmetric_from_counts(
                                    inter,
                                    s,
                                    layer_size[lp],
                                    agg.overlap[lp * ell + lp] as usize,
                                ),
                                CouplingKind::None => 0.0,
                            };
                            if coupling.time_aware {
                                ic *= time_penalty(l.abs_diff(lp));
                            }
                            term += ic;
                        }
                    }
                    total += term;
                }
            }
        }
        total
    }

    fn in_comm(&self, v: usize, c: usize) -> bool {
        self.entity_tuples[v].iter().any(|&t| self.tuple_comm[t] == c)
    }

    fn link_weight(&self, s: usize, c: usize) -> f64 {
        self.nodes[s]
            .links
            .iter()
            .filter(|&&(t, _)| self.node_comm[t] == c)
            .map(|&(_, w)| w)
            .sum()
    }

    /// Redundant pairs gained (or lost) when the entities flagged in `mark`
    /// join (or leave) community `c`. `mark` holds exactly the entities whose
    /// flattened membership changes.
    fn pair_delta(&self, changed: &[usize], c: usize, nrp: &mut [u32], sign: i64) {
        for &x in changed {
            for (y, layers) in &self.partners[x] {
                let counted = if self.mark[*y] { *y > x } else { self.in_comm(*y, c) };
                if counted {
                    for &l in layers {
                        nrp[l] = (nrp[l] as i64 + sign) as u32;
                    }
                }
            }
        }
    }

    /// Aggregate of `base ∪ node s`, where `base` is community `c`
    /// (`usize::MAX` for a fresh community). Node `s` must not be in `c`.
    fn with_node(&mut self, s: usize, base: &Aggregate, c: usize) -> Aggregate {
        let ell = self.ell;
        let mut agg = base.clone();
        let node = &self.nodes[s];
        let i = node.layer;
        agg.nodes += 1;
        agg.degree[i] += node.degree;
        let w = if c == usize::MAX { 0.0 } else { self.link_weight(s, c) };
        agg.internal[i] += node.internal + 2.0 * w;
        let mut joined = Vec::new();
        for &t in &node.tuples {
            let v = self.tuple_entity[t];
            let mut already = false;
            for &t2 in &self.entity_tuples[v] {
                if t2 != t && self.tuple_comm[t2] == c {
                    let j = self.tuple_layer[t2];
                    agg.overlap[i * ell + j] += 1;
                    agg.overlap[j * ell + i] += 1;
                    already = true;
                }
            }
            agg.overlap[i * ell + i] += 1;
            if !already {
                joined.push(v);
            }
        }
        if self.track_nrp {
            for &v in &joined {
                self.mark[v] = true;
            }
            let mut nrp = core::mem::take(&mut agg.nrp);
            self.pair_delta(&joined, c, &mut nrp, 1);
            agg.nrp = nrp;
            for &v in &joined {
                self.mark[v] = false;
            }
        }
        agg
    }

    /// Aggregate of community `c` without node `s` (which must be in `c`).
    fn without_node(&mut self, s: usize, c: usize) -> Aggregate {
        let ell = self.ell;
        let mut agg = self.comms[c].clone();
        let node = &self.nodes[s];
        let i = node.layer;
        agg.nodes -= 1;
        agg.degree[i] -= node.degree;
        agg.internal[i] -= node.internal + 2.0 * self.link_weight(s, c);
        let mut left = Vec::new();
        for &t in &node.tuples {
            let v = self.tuple_entity[t];
            let mut stays = false;
            for &t2 in &self.entity_tuples[v] {
                if t2 != t && self.tuple_comm[t2] == c {
                    let j = self.tuple_layer[t2];
                    agg.overlap[i * ell + j] -= 1;
                    agg.overlap[j * ell + i] -= 1;
                    stays = true;
                }
            }
            agg.overlap[i * ell + i] -= 1;
            if !stays {
                left.push(v);
            }
        }
        if self.track_nrp {
            for &v in &left {
                self.mark[v] = true;
            }
            let mut nrp = core::mem::take(&mut agg.nrp);
            self.pair_delta(&left, c, &mut nrp, -1);
            agg.nrp = nrp;
            for &v in &left {
                self.mark[v] = false;
            }
        }
        agg
    }

    fn candidates(&self, s: usize) -> Vec<usize> {
        let own = self.node_comm[s];
        let node = &self.nodes[s];
        let mut out: Vec<usize> = node.links.iter().map(|&(t, _)| self.node_comm[t]).collect();
        for &t in &node.tuples {
            for &t2 in &self.entity_tuples[self.tuple_entity[t]] {
                if t2 != t {
                    out.push(self.tuple_comm[t2]);
                }
            }
        }
        out.retain(|&c| c != own);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Best-improvement move of node `s`. Returns the gain when a move with
    /// gain above `min_gain` was applied.
    fn move_node(&mut self, s: usize, min_gain: f64) -> Option<f64> {
        let from = self.node_comm[s];
        let removed = self.without_node(s, from);
        let removed_value = self.value(&removed);
        let loss = removed_value - self.values[from];

        let mut best: Option<(f64, usize, Aggregate, f64)> = None;
        for c in self.candidates(s) {
            let base = self.comms[c].clone();
            let joined = self.with_node(s, &base, c);
            let joined_value = self.value(&joined);
            let gain = (loss + joined_value - self.values[c]) / self.norm;
            if best.as_ref().is_none_or(|b| gain > b.0) {
                best = Some((gain, c, joined, joined_value));
            }
        }
        if removed.nodes > 0 {
            if let Some(&fresh) = self.empty.last() {
                let base = Aggregate::empty(self.ell);
                let joined = self.with_node(s, &base, usize::MAX);
                let joined_value = self.value(&joined);
                let gain = (loss + joined_value) / self.norm;
                if best.as_ref().is_none_or(|b| gain > b.0) {
                    best = Some((gain, fresh, joined, joined_value));
                }
            }
        }

        let (gain, to, joined, joined_value) = best?;
        if gain <= min_gain {
            return None;
        }
        if self.comms[to].nodes == 0 {
            self.empty.retain(|&c| c != to);
        }
        self.comms[from] = removed;
        self.values[from] = removed_value;
        if self.comms[from].nodes == 0 {
            self.values[from] = 0.0;
            self.empty.push(from);
        }
        self.comms[to] = joined;
        self.values[to] = joined_value;
        self.node_comm[s] = to;
        for &t in &self.nodes[s].tuples {
            self.tuple_comm[t] = to;
        }
        Some(gain)
    }

    /// Merges the nodes of each (community, layer) slice.
    fn aggregate(&mut self) -> bool {
        let mut group_of = vec![0usize; self.nodes.len()];
        let mut groups: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (s, node) in self.nodes.iter().enumerate() {
            let next = groups.len();
            group_of[s] = *groups.entry((self.node_comm[s], node.layer)).or_insert(next);
        }
        if groups.len() == self.nodes.len() {
            return false;
        }
        // BTreeMap iteration gives groups sorted by (community, layer);
        // renumber so new node ids follow that order.
        let mut rank = vec![0usize; groups.len()];
        let mut keys = vec![(0usize, 0usize); groups.len()];
        for (new_id, (&key, &g)) in groups.iter().enumerate() {
            rank[g] = new_id;
            keys[new_id] = key;
        }
        let mut merged: Vec<SuperNode> = keys
            .iter()
            .map(|&(_, layer)| SuperNode {
                layer,
                tuples: Vec::new(),
                degree: 0.0,
                internal: 0.0,
                links: Vec::new(),
            })
            .collect();
        let mut link_maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); merged.len()];
        for (s, node) in self.nodes.iter().enumerate() {
            let g = rank[group_of[s]];
            let m = &mut merged[g];
            m.tuples.extend_from_slice(&node.tuples);
            m.degree += node.degree;
            m.internal += node.internal;
            for &(t, w) in &node.links {
                let h = rank[group_of[t]];
                if h == g {
                    m.internal += w;
                } else {
                    *link_maps[g].entry(h).or_insert(0.0) += w;
                }
            }
        }
        for (m, links) in merged.iter_mut().zip(link_maps) {
            m.links = links.into_iter().collect();
        }
        self.node_comm = keys.iter().map(|&(c, _)| c).collect();
        for agg in self.comms.iter_mut() {
            agg.nodes = 0;
        }
        for &c in &self.node_comm {
            self.comms[c].nodes += 1;
        }
        self.nodes = merged;
        true
    }

    pub(crate) fn run(&mut self, seed: u64, max_passes: usize, min_gain: f64) -> RunStats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stats = RunStats::default();
        loop {
            stats.levels += 1;
            let mut level_moves = 0;
            for _ in 0..max_passes {
                let mut order: Vec<usize> = (0..self.nodes.len()).collect();
                order.shuffle(&mut rng);
                let mut moves = 0;
                for s in order {
                    if self.move_node(s, min_gain).is_some() {
                        moves += 1;
                    }
                }
                stats.passes += 1;
                stats.trace.push(self.objective());
                level_moves += moves;
                if moves == 0 {
                    break;
                }
            }
            stats.moves += level_moves;
            if level_moves == 0 || !self.aggregate() {
                break;
            }
        }
        stats
    }
}

/// For every entity, partners linked to it in at least two layers.
fn redundant_partners(net: &MultilayerNetwork) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut out = vec![Vec::new(); net.entity_count()];
    let mut support: Vec<(usize, usize)> = Vec::new();
    for (v, slot) in out.iter_mut().enumerate() {
        support.clear();
        for (l, layer) in net.layers().iter().enumerate() {
            support.extend(layer.neighbors(v).iter().map(|&u| (u, l)));
        }
        support.sort_unstable();
        for chunk in support.chunk_by(|a, b| a.0 == b.0) {
            if chunk.len() >= 2 {
                slot.push((chunk[0].0, chunk.iter().map(|&(_, l)| l).collect()));
            }
        }
    }
    out
}
