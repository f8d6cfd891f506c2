//! Planted-partition benchmark networks and brute-force reference scorers.
//!
//! The oracles evaluate the quality functions by literal nested summation
//! over entities, layers and tuple pairs, sharing no aggregation code with
//! [`crate::modularity`]. They exist to cross-check the fast scorer and the
//! detector on small inputs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::community::CommunityStructure;
use crate::error::{Error, Result};
use crate::mlgraph::{EntityId, LayerId, LayerOrdering, MultilayerNetwork, NetworkBuilder, PairingScheme};
use crate::modularity::{CouplingKind, CouplingPolicy, Objective, ResolutionPolicy};

/// Largest number of tuple pairs the literal scorers accept.
pub const ORACLE_PAIR_LIMIT: usize = 10_000;
/// Largest tuple count for exhaustive partition search.
pub const ENUMERATION_TUPLE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedSpec {
    pub entities: usize,
    pub communities: usize,
    pub layers: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Per-layer presence probability of each entity.
    pub presence: f64,
    pub seed: u64,
}

impl PlantedSpec {
    fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !(prob(self.p_in) && prob(self.p_out) && self.p_out <= self.p_in) {
            return Err(Error::InvalidParameter("need 0 <= p_out <= p_in <= 1".into()));
        }
        if !(self.presence > 0.0 && self.presence <= 1.0) {
            return Err(Error::InvalidParameter("presence probability must be in (0, 1]".into()));
        }
        if self.communities == 0 || self.communities > self.entities {
            return Err(Error::InvalidParameter("need 1 <= communities <= entities".into()));
        }
        if self.layers == 0 {
            return Err(Error::InvalidParameter("need at least one layer".into()));
        }
        Ok(())
    }
}

/// Independent planted-partition graphs per layer over a shared entity
/// partition. Entity `v` is named `v{v}`, layer `i` is `L{i+1}`, and the
/// planted block of `v` is `v * k / n`.
pub fn planted_multilayer(spec: &PlantedSpec) -> Result<(MultilayerNetwork, Vec<usize>)> {
    spec.validate()?;
    let (n, k, ell) = (spec.entities, spec.communities, spec.layers);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let planted: Vec<usize> = (0..n).map(|v| v * k / n).collect();

    let mut present = vec![vec![false; ell]; n];
    for row in present.iter_mut() {
        for slot in row.iter_mut() {
            *slot = rng.gen::<f64>() < spec.presence;
        }
        if !row.iter().any(|&p| p) {
            row[rng.gen_range(0..ell)] = true;
        }
    }

    let names: Vec<String> = (0..n).map(|v| format!("v{v}")).collect();
    let layer_names: Vec<String> = (0..ell).map(|l| format!("L{}", l + 1)).collect();
    let mut b = NetworkBuilder::new();
    for name in &layer_names {
        b.layer(name)?;
    }
    for (v, row) in present.iter().enumerate() {
        for (l, &p) in row.iter().enumerate() {
            if p {
                b.presence(&layer_names[l], &names[v])?;
            }
        }
    }
    for (l, layer_name) in layer_names.iter().enumerate() {
        for u in 0..n {
            if !present[u][l] {
                continue;
            }
            for v in u + 1..n {
                if !present[v][l] {
                    continue;
                }
                let p = if planted[u] == planted[v] {
                    spec.p_in
                } else {
                    spec.p_out
                };
                if rng.gen::<f64>() < p {
                    b.edge(layer_name, &names[u], &names[v])?;
                }
            }
        }
    }
    Ok((b.build()?, planted))
}

fn guard_pairs(net: &MultilayerNetwork) -> Result<()> {
    let t = net.tuple_count();
    if t.saturating_mul(t) > ORACLE_PAIR_LIMIT {
        return Err(Error::SizeGuard(format!(
            "{t} tuples exceed the literal-evaluation limit"
        )));
    }
    Ok(())
}

fn linked(net: &MultilayerNetwork, l: usize, u: usize, v: usize) -> bool {
    net.layer(LayerId(l)).has_edge(u, v)
}

fn present(net: &MultilayerNetwork, l: usize, v: usize) -> bool {
    net.layer(LayerId(l)).contains(v)
}

/// `P(L)` written out from its definition.
fn pairing_targets(ell: usize, l: usize, ordering: LayerOrdering) -> Vec<usize> {
    (0..ell)
        .filter(|&j| match ordering {
            LayerOrdering::Unordered => j != l,
            LayerOrdering::Natural(PairingScheme::Adjacent) => j == l + 1,
            LayerOrdering::Natural(PairingScheme::PairWise) => j > l,
        })
        .collect()
}

/// Multilayer modularity by literal summation.
pub fn oracle_q_multilayer(
    net: &MultilayerNetwork,
    cs: &CommunityStructure,
    resolution: ResolutionPolicy,
    coupling: CouplingPolicy,
    ordering: LayerOrdering,
) -> Result<f64> {
    guard_pairs(net)?;
    Objective::Multilayer {
        resolution,
        coupling,
        ordering,
    }
    .validate(net)?;
    let n = net.entity_count();
    let ell = net.layer_count();
    let beta = coupling.kind != CouplingKind::None;

    let mut edge_endpoints = 0usize;
    for l in 0..ell {
        for u in 0..n {
            for v in 0..n {
                if linked(net, l, u, v) {
                    edge_endpoints += 1;
                }
            }
        }
    }
    if edge_endpoints == 0 {
        return Err(Error::EdgelessNetwork);
    }
    let mut coupling_endpoints = 0usize;
    if beta {
        for l in 0..ell {
            for lp in pairing_targets(ell, l, ordering) {
                for v in 0..n {
                    if present(net, l, v) && present(net, lp, v) {
                        coupling_endpoints += 2;
                    }
                }
            }
        }
        if ordering == LayerOrdering::Unordered {
            // each link was visited from both of its layers
            coupling_endpoints /= 2;
        }
    }
    let d = (edge_endpoints + coupling_endpoints) as f64;

    let mut total = 0.0;
    for c in 0..cs.community_count() {
        let in_layer = |v: usize, l: usize| cs.label(EntityId(v), LayerId(l)) == Some(c);
        let member: Vec<bool> = (0..n).map(|v| (0..ell).any(|l| in_layer(v, l))).collect();
        for l in 0..ell {
            let projection: Vec<usize> = (0..n).filter(|&v| in_layer(v, l)).collect();
            if projection.is_empty() {
                continue;
            }
            let mut internal = 0usize;
            let mut degree = 0usize;
            for &u in &projection {
                for v in 0..n {
                    if linked(net, l, u, v) {
                        degree += 1;
                        if in_layer(v, l) {
                            internal += 1;
                        }
                    }
                }
            }
            let gamma = match resolution {
                ResolutionPolicy::Constant(g) => g,
                ResolutionPolicy::Redundancy => {
                    let mut nrp = 0usize;
                    for u in 0..n {
                        for v in u + 1..n {
                            if !(member[u] && member[v]) {
                                continue;
                            }
                            let support = (0..ell).filter(|&x| linked(net, x, u, v)).count();
                            if support >= 2 && linked(net, l, u, v) {
                                nrp += 1;
                            }
                        }
                    }
                    2.0 / (1.0 + libm::log2(1.0 + nrp as f64))
                }
            };
            let mut ic_sum = 0.0;
            if beta {
                for lp in pairing_targets(ell, l, ordering) {
                    let inter = (0..n).filter(|&v| in_layer(v, l) && in_layer(v, lp)).count() as f64;
                    let shared = (0..n).filter(|&v| present(net, l, v) && present(net, lp, v)).count() as f64;
                    let size = |x: usize| (0..n).filter(|&v| present(net, x, v)).count() as f64;
                    let proj = |x: usize| (0..n).filter(|&v| in_layer(v, x)).count() as f64;
                    let conditional = |from: usize| {
                        if shared == 0.0 || proj(from) == 0.0 {
                            0.0
                        } else {
                            (inter / shared) * (size(from) / proj(from))
                        }
                    };
                    let mut ic = match coupling.kind {
                        CouplingKind::Symmetric => {
                            if shared == 0.0 {
                                0.0
                            } else {
                                inter / shared
                            }
                        }
                        CouplingKind::AsymInner => conditional(l),
                        CouplingKind::AsymOuter => conditional(lp),
                        CouplingKind::None => 0.0,
                    };
                    if coupling.time_aware {
                        let distance = lp.abs_diff(l);
                        ic *= 2.0 / (1.0 + libm::log2(1.0 + distance as f64));
                    }
                    ic_sum += ic;
                }
            }
            let degree = degree as f64;
            total += internal as f64 - gamma * degree * degree / d + ic_sum;
        }
    }
    Ok(total / d)
}

/// Multislice modularity by the quadruple sum over `(u, L_i), (v, L_j)`.
pub fn oracle_q_multislice(
    net: &MultilayerNetwork,
    cs: &CommunityStructure,
    gammas: &[f64],
    omega: f64,
) -> Result<f64> {
    guard_pairs(net)?;
    Objective::Multislice {
        gammas: gammas.to_vec(),
        omega,
    }
    .validate(net)?;
    let tuples = net.tuples();
    let ell = net.layer_count();
    let degree = |v: usize, l: usize| (0..net.entity_count()).filter(|&u| linked(net, l, v, u)).count() as f64;
    let two_e: Vec<f64> = (0..ell)
        .map(|l| (0..net.entity_count()).map(|v| degree(v, l)).sum())
        .collect();
    for (l, &e) in two_e.iter().enumerate() {
        if e == 0.0 && net.layer(LayerId(l)).node_count() > 0 {
            return Err(Error::EdgelessLayer(net.layer_name(LayerId(l)).into()));
        }
    }
    let mut couplings = 0.0;
    let mut total = 0.0;
    for &(u, li) in &tuples {
        for &(v, lj) in &tuples {
            if u == v && li != lj {
                couplings += omega;
            }
            if cs.label(u, li) != cs.label(v, lj) {
                continue;
            }
            if li == lj {
                let a = if linked(net, li.0, u.0, v.0) { 1.0 } else { 0.0 };
                total += a - gammas[li.0] * degree(u.0, li.0) * degree(v.0, li.0) / two_e[li.0];
            }
            if u == v && li != lj {
                total += omega;
            }
        }
    }
    let d: f64 = two_e.iter().sum::<f64>() + couplings;
    if d <= 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    Ok(total / d)
}

/// Dispatches to the literal scorer for `objective`.
pub fn oracle_score(net: &MultilayerNetwork, cs: &CommunityStructure, objective: &Objective) -> Result<f64> {
    match objective {
        Objective::Multislice { gammas, omega } => oracle_q_multislice(net, cs, gammas, *omega),
        Objective::Multilayer {
            resolution,
            coupling,
            ordering,
        } => oracle_q_multilayer(net, cs, *resolution, *coupling, *ordering),
    }
}

/// Exhaustive maximum over tuple partitions with at most `max_communities`
/// blocks. Partitions are visited as restricted-growth strings in
/// lexicographic order; the first maximum wins ties.
pub fn oracle_best_partition(
    net: &MultilayerNetwork,
    objective: &Objective,
    max_communities: usize,
) -> Result<(CommunityStructure, f64)> {
    let t = net.tuple_count();
    if t > ENUMERATION_TUPLE_LIMIT {
        return Err(Error::SizeGuard(format!(
            "{t} tuples exceed the enumeration limit of {ENUMERATION_TUPLE_LIMIT}"
        )));
    }
    if t == 0 || max_communities == 0 {
        return Err(Error::InvalidParameter("nothing to enumerate".into()));
    }
    let mut labels = vec![0usize; t];
    let mut best: Option<(Vec<usize>, f64)> = None;
    enumerate(net, objective, max_communities, &mut labels, 1, 1, &mut best)?;
    let (labels, q) = best.expect("at least one partition");
    Ok((CommunityStructure::from_tuple_labels(net, &labels)?, q))
}

fn enumerate(
    net: &MultilayerNetwork,
    objective: &Objective,
    max_blocks: usize,
    labels: &mut [usize],
    pos: usize,
    used: usize,
    best: &mut Option<(Vec<usize>, f64)>,
) -> Result<()> {
    if pos == labels.len() {
        let cs = CommunityStructure::from_tuple_labels(net, labels)?;
        let q = oracle_score(net, &cs, objective)?;
        if best.as_ref().is_none_or(|b| q > b.1) {
            *best = Some((labels.to_vec(), q));
        }
        return Ok(());
    }
    for c in 0..=used.min(max_blocks - 1) {
        labels[pos] = c;
        enumerate(net, objective, max_blocks, labels, pos + 1, used.max(c + 1), best)?;
    }
    Ok(())
}
