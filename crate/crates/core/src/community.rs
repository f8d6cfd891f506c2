//! Community structures over entity-layer tuples, their projections, and
//! the redundancy machinery behind the redundancy-based resolution factor.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::mlgraph::{EntityId, LayerId, MultilayerNetwork};

/// Partition of the present entity-layer tuples of a network.
///
/// Community indices are dense `0..k`; construction relabels the input labels
/// in ascending order and drops labels that end up empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityStructure {
    /// `labels[layer][entity]`, `None` for absent tuples.
    labels: Vec<Vec<Option<usize>>>,
    count: usize,
}

/// Entity pairs of a community connected in at least one layer (`p1`) and in
/// at least two layers (`p2`). Pairs are `(v, u)` with `v < u`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedundantPairs {
    pub p1: Vec<(usize, usize)>,
    pub p2: Vec<(usize, usize)>,
}

impl CommunityStructure {
    fn normalized(mut labels: Vec<Vec<Option<usize>>>) -> Self {
        let mut used: Vec<usize> = labels.iter().flatten().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        for layer in labels.iter_mut() {
            for slot in layer.iter_mut().flatten() {
                *slot = remap[slot];
            }
        }
        Self {
            labels,
            count: used.len(),
        }
    }

    /// Labels given per tuple in the network's dense tuple order.
    pub fn from_tuple_labels(net: &MultilayerNetwork, tuple_labels: &[usize]) -> Result<Self> {
        if tuple_labels.len() != net.tuple_count() {
            return Err(Error::InvalidPartition(format!(
                "{} labels for {} entity-layer tuples",
                tuple_labels.len(),
                net.tuple_count()
            )));
        }
        let mut labels = vec![vec![None; net.entity_count()]; net.layer_count()];
        for (t, (v, l)) in net.tuples().into_iter().enumerate() {
            labels[l.0][v.0] = Some(tuple_labels[t]);
        }
        Ok(Self::normalized(labels))
    }

    /// Explicit `(entity, layer, community)` assignments. Every present tuple
    /// must be assigned exactly once.
    pub fn from_assignments<I>(net: &MultilayerNetwork, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (EntityId, LayerId, usize)>,
    {
        let mut labels = vec![vec![None; net.entity_count()]; net.layer_count()];
        for (v, l, c) in assignments {
            if !net.layer(l).contains(v.0) {
                return Err(Error::NotPresent {
                    entity: net.entity_name(v).into(),
                    layer: net.layer_name(l).into(),
                });
            }
            match labels[l.0][v.0] {
                Some(prev) if prev != c => {
                    return Err(Error::InvalidPartition(format!(
                        "`{}` in layer `{}` assigned twice",
                        net.entity_name(v),
                        net.layer_name(l)
                    )))
                }
                _ => labels[l.0][v.0] = Some(c),
            }
        }
        for (v, l) in net.tuples() {
            if labels[l.0][v.0].is_none() {
                return Err(Error::InvalidPartition(format!(
                    "`{}` in layer `{}` is unassigned",
                    net.entity_name(v),
                    net.layer_name(l)
                )));
            }
        }
        Ok(Self::normalized(labels))
    }

    /// Expands an entity partition: `(v, L)` joins `partition[v]` in every
    /// layer where `v` is present.
    pub fn from_entity_partition(net: &MultilayerNetwork, partition: &[usize]) -> Result<Self> {
        if partition.len() != net.entity_count() {
            return Err(Error::InvalidPartition(format!(
                "{} entities assigned, network has {}",
                partition.len(),
                net.entity_count()
            )));
        }
        let labels = net
            .layers()
            .iter()
            .map(|layer| {
                (0..net.entity_count())
                    .map(|v| layer.contains(v).then(|| partition[v]))
                    .collect()
            })
            .collect();
        Ok(Self::normalized(labels))
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn layer_count(&self) -> usize {
        self.labels.len()
    }

    /// Community of `(v, L)`, `None` when `v` is absent from `L`.
    pub fn label(&self, v: EntityId, l: LayerId) -> Option<usize> {
        self.labels[l.0][v.0]
    }

    /// Per-entity labels of one layer.
    pub fn layer_labels(&self, l: LayerId) -> &[Option<usize>] {
        &self.labels[l.0]
    }

    /// Labels in the network's dense tuple order.
    pub fn tuple_labels(&self, net: &MultilayerNetwork) -> Vec<usize> {
        net.tuples()
            .into_iter()
            .map(|(v, l)| self.labels[l.0][v.0].expect("structure built for this network"))
            .collect()
    }

    /// Tuples of community `c`, layer-major.
    pub fn members(&self, c: usize) -> Vec<(EntityId, LayerId)> {
        let mut out = Vec::new();
        for (l, layer) in self.labels.iter().enumerate() {
            for (v, &lab) in layer.iter().enumerate() {
                if lab == Some(c) {
                    out.push((EntityId(v), LayerId(l)));
                }
            }
        }
        out
    }

    /// `C^(L)`: entities whose tuple in `L` belongs to `c`.
    pub fn projection(&self, c: usize, l: LayerId) -> Vec<EntityId> {
        self.labels[l.0]
            .iter()
            .enumerate()
            .filter(|&(_, &lab)| lab == Some(c))
            .map(|(v, _)| EntityId(v))
            .collect()
    }

    /// Entities with at least one tuple in `c`.
    pub fn flattened_members(&self, c: usize) -> Vec<EntityId> {
        let n = self.labels.first().map_or(0, Vec::len);
        (0..n)
            .filter(|&v| self.labels.iter().any(|layer| layer[v] == Some(c)))
            .map(EntityId)
            .collect()
    }

    /// `d_L(C)`.
    pub fn layer_degree(&self, net: &MultilayerNetwork, c: usize, l: LayerId) -> usize {
        let layer = net.layer(l);
        layer
            .nodes()
            .iter()
            .filter(|&&v| self.labels[l.0][v] == Some(c))
            .map(|&v| layer.neighbors(v).len())
            .sum()
    }

    /// `d_L^int(C)`: twice the number of `L`-edges inside `c`.
    pub fn internal_degree(&self, net: &MultilayerNetwork, c: usize, l: LayerId) -> usize {
        let lab = &self.labels[l.0];
        2 * net
            .layer(l)
            .edges()
            .iter()
            .filter(|&&(u, v)| lab[u] == Some(c) && lab[v] == Some(c))
            .count()
    }

    /// `P1_C` and `P2_C` under flattened membership.
    pub fn redundant_pairs(&self, net: &MultilayerNetwork, c: usize) -> RedundantPairs {
        let members = self.flattened_members(c);
        let mut in_c = vec![false; net.entity_count()];
        for v in &members {
            in_c[v.0] = true;
        }
        let mut out = RedundantPairs::default();
        for &v in &members {
            let mut support: BTreeMap<usize, usize> = BTreeMap::new();
            for layer in net.layers() {
                for &u in layer.neighbors(v.0) {
                    if u > v.0 && in_c[u] {
                        *support.entry(u).or_insert(0) += 1;
                    }
                }
            }
            for (u, count) in support {
                out.p1.push((v.0, u));
                if count >= 2 {
                    out.p2.push((v.0, u));
                }
            }
        }
        out
    }

    /// `ρ(C)`; zero when `c` has no connected pair.
    pub fn redundancy(&self, net: &MultilayerNetwork, c: usize) -> Ratio<u64> {
        let pairs = self.redundant_pairs(net, c);
        if pairs.p1.is_empty() {
            return Ratio::from_integer(0);
        }
        let support: u64 = pairs
            .p2
            .iter()
            .map(|&(v, u)| supporting_layers(net, EntityId(v), EntityId(u)).len() as u64)
            .sum();
        Ratio::new(support, net.layer_count() as u64 * pairs.p1.len() as u64)
    }

    /// `nrp(L, C)` for every layer, counted once per redundant pair.
    pub fn nrp_by_layer(&self, net: &MultilayerNetwork, c: usize) -> Vec<usize> {
        let mut counts = vec![0; net.layer_count()];
        for (v, u) in self.redundant_pairs(net, c).p2 {
            for l in supporting_layers(net, EntityId(v), EntityId(u)) {
                counts[l.0] += 1;
            }
        }
        counts
    }

    pub fn nrp(&self, net: &MultilayerNetwork, l: LayerId, c: usize) -> usize {
        self.nrp_by_layer(net, c)[l.0]
    }

    /// `γ(L, C)` from the redundancy of `c`.
    pub fn gamma_redundancy(&self, net: &MultilayerNetwork, l: LayerId, c: usize) -> f64 {
        redundancy_resolution(self.nrp(net, l, c))
    }

    /// Entity partition by majority vote over each entity's layer instances.
    /// Ties go to the lowest community index.
    pub fn flatten_majority(&self) -> Vec<usize> {
        let n = self.labels.first().map_or(0, Vec::len);
        let mut votes = vec![0usize; self.count];
        (0..n)
            .map(|v| {
                votes.iter_mut().for_each(|x| *x = 0);
                for layer in &self.labels {
                    if let Some(c) = layer[v] {
                        votes[c] += 1;
                    }
                }
                let mut best = 0;
                for c in 1..self.count {
                    if votes[c] > votes[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }
}

/// `SL(v, u)`: layers in which `v` and `u` are linked.
pub fn supporting_layers(net: &MultilayerNetwork, v: EntityId, u: EntityId) -> Vec<LayerId> {
    net.layers()
        .iter()
        .enumerate()
        .filter(|(_, layer)| layer.has_edge(v.0, u.0))
        .map(|(l, _)| LayerId(l))
        .collect()
}

/// `2 / (1 + log2(1 + nrp))`.
pub fn redundancy_resolution(nrp: usize) -> f64 {
    2.0 / (1.0 + libm::log2(1.0 + nrp as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlgraph::build_network;

    fn triangle_pairs_net() -> MultilayerNetwork {
        // (a,b) in L1 and L2, (b,c) in L1, (a,c) in L2
        build_network(
            &["L1", "L2"],
            &[("L1", "a", "b"), ("L2", "a", "b"), ("L1", "b", "c"), ("L2", "a", "c")],
            &[],
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_community_covers_all_tuples() {
        let net = triangle_pairs_net();
        let cs = CommunityStructure::from_entity_partition(&net, &[7, 7, 7]).unwrap();
        assert_eq!(cs.community_count(), 1);
        assert_eq!(cs.members(0).len(), net.tuple_count());
    }

    #[test]
    fn singletons_and_errors() {
        let net = triangle_pairs_net();
        let cs = CommunityStructure::from_entity_partition(&net, &[5, 3, 9]).unwrap();
        assert_eq!(cs.community_count(), 3);
        // relabel keeps label order: 3 -> 0, 5 -> 1, 9 -> 2
        assert_eq!(cs.label(EntityId(0), LayerId(0)), Some(1));
        assert!(CommunityStructure::from_entity_partition(&net, &[0, 0]).is_err());
        assert!(CommunityStructure::from_tuple_labels(&net, &[0]).is_err());
    }

    #[test]
    fn assignments_must_cover() {
        let net = triangle_pairs_net();
        let partial = [(EntityId(0), LayerId(0), 0)];
        assert!(matches!(
            CommunityStructure::from_assignments(&net, partial),
            Err(Error::InvalidPartition(_))
        ));
        let c_absent = build_network(&["L1", "L2"], &[("L1", "a", "b"), ("L2", "a", "c")], &[], None).unwrap();
        let bad = [(EntityId(2), LayerId(0), 0)];
        assert!(matches!(
            CommunityStructure::from_assignments(&c_absent, bad),
            Err(Error::NotPresent { .. })
        ));
    }

    #[test]
    fn projections() {
        let net = build_network(&["L1", "L2"], &[("L1", "a", "b"), ("L2", "c", "d")], &[], None).unwrap();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 1, 1]).unwrap();
        assert!(cs.projection(0, LayerId(1)).is_empty());
        assert_eq!(cs.projection(0, LayerId(0)), vec![EntityId(0), EntityId(1)]);
        let whole = CommunityStructure::from_entity_partition(&net, &[0; 4]).unwrap();
        let v2: Vec<EntityId> = net.layer(LayerId(1)).nodes().iter().map(|&v| EntityId(v)).collect();
        assert_eq!(whole.projection(0, LayerId(1)), v2);
    }

    #[test]
    fn degrees_sum_to_layer_total() {
        let net = triangle_pairs_net();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 1]).unwrap();
        for l in 0..2 {
            let total: usize = (0..cs.community_count())
                .map(|c| cs.layer_degree(&net, c, LayerId(l)))
                .sum();
            assert_eq!(total, 2 * net.layer(LayerId(l)).edge_count());
            for c in 0..cs.community_count() {
                assert!(cs.internal_degree(&net, c, LayerId(l)) <= cs.layer_degree(&net, c, LayerId(l)));
            }
        }
    }

    #[test]
    fn redundant_pair_basics() {
        let one = build_network(&["L"], &[("L", "a", "b"), ("L", "b", "c")], &[], None).unwrap();
        let cs = CommunityStructure::from_entity_partition(&one, &[0, 0, 0]).unwrap();
        assert!(cs.redundant_pairs(&one, 0).p2.is_empty());
        assert_eq!(cs.redundancy(&one, 0), Ratio::from_integer(0));

        let net = triangle_pairs_net();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 0]).unwrap();
        let pairs = cs.redundant_pairs(&net, 0);
        assert_eq!(pairs.p2, vec![(0, 1)]);
        assert_eq!(pairs.p1.len(), 3);
        // ℓ=2, |P1|=3, one pair supported by both layers: 2/(2·3)
        assert_eq!(cs.redundancy(&net, 0), Ratio::new(1, 3));
    }

    #[test]
    fn distinct_single_layer_links_are_not_redundant() {
        let net = build_network(
            &["L1", "L2", "L3"],
            &[("L1", "a", "b"), ("L2", "b", "c"), ("L3", "a", "c")],
            &[],
            None,
        )
        .unwrap();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 0]).unwrap();
        let pairs = cs.redundant_pairs(&net, 0);
        assert_eq!(pairs.p1.len(), 3);
        assert!(pairs.p2.is_empty());
    }

    #[test]
    fn full_redundancy() {
        let net = build_network(
            &["L1", "L2"],
            &[("L1", "a", "b"), ("L2", "a", "b"), ("L1", "b", "c"), ("L2", "b", "c")],
            &[],
            None,
        )
        .unwrap();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 0]).unwrap();
        assert_eq!(cs.redundancy(&net, 0), Ratio::from_integer(1));
    }

    #[test]
    fn supporting_layer_sets() {
        let net = build_network(
            &["L1", "L2", "L3"],
            &[
                ("L1", "a", "b"),
                ("L3", "a", "b"),
                ("L2", "c", "d"),
                ("L1", "e", "f"),
                ("L2", "e", "f"),
                ("L3", "e", "f"),
            ],
            &[],
            None,
        )
        .unwrap();
        let id = |s| net.entity_id(s).unwrap();
        assert!(supporting_layers(&net, id("a"), id("c")).is_empty());
        assert_eq!(supporting_layers(&net, id("a"), id("b")), vec![LayerId(0), LayerId(2)]);
        assert_eq!(supporting_layers(&net, id("f"), id("e")).len(), 3);
    }

    #[test]
    fn nrp_counts_per_pair() {
        // (a,b) supported by {L1,L2}; (c,d) supported by {L2,L3}
        let net = build_network(
            &["L1", "L2", "L3"],
            &[
                ("L1", "a", "b"),
                ("L2", "a", "b"),
                ("L2", "c", "d"),
                ("L3", "c", "d"),
                ("L1", "b", "c"),
            ],
            &[],
            None,
        )
        .unwrap();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 0, 0]).unwrap();
        assert_eq!(cs.nrp(&net, LayerId(1), 0), 2);
        assert_eq!(cs.nrp(&net, LayerId(0), 0), 1);
        assert_eq!(cs.nrp(&net, LayerId(2), 0), 1);
        let none = CommunityStructure::from_entity_partition(&net, &[0, 1, 2, 3]).unwrap();
        assert_eq!(none.nrp(&net, LayerId(1), 0), 0);
    }

    #[test]
    fn identical_support_sets_still_count_twice() {
        let net = build_network(
            &["L1", "L2"],
            &[("L1", "a", "b"), ("L2", "a", "b"), ("L1", "c", "d"), ("L2", "c", "d")],
            &[],
            None,
        )
        .unwrap();
        let cs = CommunityStructure::from_entity_partition(&net, &[0, 0, 0, 0]).unwrap();
        assert_eq!(cs.nrp(&net, LayerId(0), 0), 2);
    }

    #[test]
    fn resolution_values() {
        assert_eq!(redundancy_resolution(0), 2.0);
        assert_eq!(redundancy_resolution(1), 1.0);
        assert_eq!(redundancy_resolution(7), 0.5);
    }

    #[test]
    fn majority_vote() {
        let net = build_network(
            &["L1", "L2", "L3"],
            &[("L1", "a", "b"), ("L2", "a", "b"), ("L3", "a", "b"), ("L1", "c", "d")],
            &[],
            None,
        )
        .unwrap();
        let (a, b, c) = (EntityId(0), EntityId(1), EntityId(2));
        let mut asg = vec![(a, LayerId(0), 0), (a, LayerId(1), 0), (a, LayerId(2), 1)];
        // b split evenly would be impossible with 3 layers; use c/d for the single-layer case
        asg.extend([(b, LayerId(0), 1), (b, LayerId(1), 0), (b, LayerId(2), 1)]);
        asg.extend([(c, LayerId(0), 1), (EntityId(3), LayerId(0), 0)]);
        let cs = CommunityStructure::from_assignments(&net, asg).unwrap();
        assert_eq!(cs.flatten_majority(), vec![0, 1, 1, 0]);

        let two = build_network(&["L1", "L2"], &[("L1", "a", "b"), ("L2", "a", "b")], &[], None).unwrap();
        let tie = [
            (EntityId(0), LayerId(0), 1),
            (EntityId(0), LayerId(1), 0),
            (EntityId(1), LayerId(0), 1),
            (EntityId(1), LayerId(1), 1),
        ];
        let cs = CommunityStructure::from_assignments(&two, tie).unwrap();
        assert_eq!(cs.flatten_majority()[0], 0);
    }
}
