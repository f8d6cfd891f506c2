//! Immutable multilayer network model.
//!
//! Entities and layers are interned to dense indices. When a natural layer
//! order is declared, layer indices follow it, so positional distance in the
//! order is simply the difference of two [`LayerId`]s.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense index of an entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

/// Dense index of a layer. Respects the natural order when one is declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LayerId(pub usize);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl LayerId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Which ordered layer pairs are admitted under a natural order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingScheme {
    /// Only `(L_i, L_{i+1})`.
    Adjacent,
    /// Every `(L_i, L_j)` with `j > i`.
    PairWise,
}

/// Layer ordering used to derive the valid pairings `P(L)`.
///
/// `Natural` always refers to the dense layer order of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerOrdering {
    Unordered,
    Natural(PairingScheme),
}

impl LayerOrdering {
    pub fn is_natural(self) -> bool {
        matches!(self, LayerOrdering::Natural(_))
    }
}

/// One layer graph: its node set `V_i` and undirected edge set `E_i`.
#[derive(Debug, Clone)]
pub struct Layer {
    name: String,
    nodes: Vec<usize>,
    present: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Layer {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Entities present in this layer, ascending.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, entity: usize) -> bool {
        self.present.get(entity).copied().unwrap_or(false)
    }

    /// Sorted neighbours of `entity` in this layer (empty when absent).
    pub fn neighbors(&self, entity: usize) -> &[usize] {
        self.adjacency.get(entity).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Degree of a present entity; `None` when the entity is absent.
    pub fn degree(&self, entity: usize) -> Option<usize> {
        if self.contains(entity) {
            Some(self.adjacency[entity].len())
        } else {
            None
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }
}

/// Per-layer structural statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonoplexStats {
    pub degree_mean: f64,
    pub degree_std: f64,
    /// Mean shortest-path length over connected ordered pairs; 0 when no
    /// pair is connected.
    pub avg_path_length: f64,
    pub clustering_coefficient: f64,
}

#[derive(Debug, Clone)]
pub struct MultilayerNetwork {
    entities: Vec<String>,
    entity_lookup: BTreeMap<String, usize>,
    layers: Vec<Layer>,
    layer_lookup: BTreeMap<String, usize>,
    declared_order: bool,
    entity_layers: Vec<Vec<usize>>,
    tuple_offsets: Vec<usize>,
}

/// Incremental construction of a [`MultilayerNetwork`].
///
/// Entities are interned in order of first appearance. Layers must be
/// declared before edges reference them.
#[derive(Debug, Default, Clone)]
pub struct NetworkBuilder {
    layers: Vec<String>,
    layer_lookup: BTreeMap<String, usize>,
    entities: Vec<String>,
    entity_lookup: BTreeMap<String, usize>,
    edges: Vec<(usize, usize, usize)>,
    presences: Vec<(usize, usize)>,
    order: Option<Vec<String>>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a new layer.
    pub fn layer(&mut self, name: &str) -> Result<LayerId> {
        if self.layer_lookup.contains_key(name) {
            return Err(Error::DuplicateLayer(name.to_string()));
        }
        Ok(LayerId(self.intern_layer(name)))
    }

    /// Declares the layer unless it already exists.
    pub fn ensure_layer(&mut self, name: &str) -> LayerId {
        LayerId(self.intern_layer(name))
    }

    pub fn has_layer(&self, name: &str) -> bool {
        self.layer_lookup.contains_key(name)
    }

    fn intern_layer(&mut self, name: &str) -> usize {
        if let Some(&i) = self.layer_lookup.get(name) {
            return i;
        }
        let i = self.layers.len();
        self.layers.push(name.to_string());
        self.layer_lookup.insert(name.to_string(), i);
        i
    }

    fn intern_entity(&mut self, name: &str) -> usize {
        if let Some(&i) = self.entity_lookup.get(name) {
            return i;
        }
        let i = self.entities.len();
        self.entities.push(name.to_string());
        self.entity_lookup.insert(name.to_string(), i);
        i
    }

    fn lookup_layer(&self, name: &str) -> Result<usize> {
        self.layer_lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLayer(name.to_string()))
    }

    /// Adds the undirected intra-layer edge `u -- v`. Duplicates collapse.
    pub fn edge(&mut self, layer: &str, u: &str, v: &str) -> Result<()> {
        let l = self.lookup_layer(layer)?;
        if u == v {
            return Err(Error::SelfLoop {
                layer: layer.to_string(),
                entity: u.to_string(),
            });
        }
        let a = self.intern_entity(u);
        let b = self.intern_entity(v);
        self.edges.push((l, a, b));
        Ok(())
    }

    /// Declares `entity` present in `layer` regardless of its edges.
    pub fn presence(&mut self, layer: &str, entity: &str) -> Result<()> {
        let l = self.lookup_layer(layer)?;
        let e = self.intern_entity(entity);
        self.presences.push((l, e));
        Ok(())
    }

    /// Declares the natural layer order. Must be a permutation of the layers
    /// known at [`build`](Self::build) time.
    pub fn order<I, S>(&mut self, order: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.order = Some(order.into_iter().map(|s| s.as_ref().to_string()).collect());
    }

    pub fn build(self) -> Result<MultilayerNetwork> {
        let n = self.entities.len();
        let ell = self.layers.len();

        // old layer index -> new layer index
        let permutation: Vec<usize> = match &self.order {
            None => (0..ell).collect(),
            Some(order) => {
                if order.len() != ell {
                    return Err(Error::InvalidOrdering(alloc::format!(
                        "{} layers ordered, {} declared",
                        order.len(),
                        ell
                    )));
                }
                let mut perm = vec![usize::MAX; ell];
                for (pos, name) in order.iter().enumerate() {
                    let old = *self
                        .layer_lookup
                        .get(name.as_str())
                        .ok_or_else(|| Error::InvalidOrdering(alloc::format!("unknown layer `{name}`")))?;
                    if perm[old] != usize::MAX {
                        return Err(Error::InvalidOrdering(alloc::format!("layer `{name}` listed twice")));
                    }
                    perm[old] = pos;
                }
                perm
            }
        };

        let mut names = vec![String::new(); ell];
        for (old, name) in self.layers.iter().enumerate() {
            names[permutation[old]] = name.clone();
        }

        let mut present = vec![vec![false; n]; ell];
        let mut adjacency = vec![vec![Vec::<usize>::new(); n]; ell];
        for &(l, e) in &self.presences {
            present[permutation[l]][e] = true;
        }
        for &(l, a, b) in &self.edges {
            let l = permutation[l];
            present[l][a] = true;
            present[l][b] = true;
            adjacency[l][a].push(b);
            adjacency[l][b].push(a);
        }

        let mut layers = Vec::with_capacity(ell);
        for (l, name) in names.into_iter().enumerate() {
            let mut adj = core::mem::take(&mut adjacency[l]);
            let mut edges = Vec::new();
            for (u, list) in adj.iter_mut().enumerate() {
                list.sort_unstable();
                list.dedup();
                edges.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
            }
            let pres = core::mem::take(&mut present[l]);
            let nodes = (0..n).filter(|&v| pres[v]).collect();
            layers.push(Layer {
                name,
                nodes,
                present: pres,
                adjacency: adj,
                edges,
            });
        }

        let mut entity_layers = vec![Vec::new(); n];
        let mut tuple_offsets = Vec::with_capacity(ell + 1);
        let mut offset = 0;
        for (l, layer) in layers.iter().enumerate() {
            tuple_offsets.push(offset);
            offset += layer.nodes.len();
            for &v in &layer.nodes {
                entity_layers[v].push(l);
            }
        }
        tuple_offsets.push(offset);

        let layer_lookup = layers.iter().enumerate().map(|(i, l)| (l.name.clone(), i)).collect();

        Ok(MultilayerNetwork {
            entities: self.entities,
            entity_lookup: self.entity_lookup,
            layers,
            layer_lookup,
            declared_order: self.order.is_some(),
            entity_layers,
            tuple_offsets,
        })
    }
}

/// Builds a network from explicit layer names, `(layer, u, v)` edges,
/// `(layer, entity)` presences and an optional natural order.
pub fn build_network<S: AsRef<str>>(
    layers: &[S],
    edges: &[(S, S, S)],
    presences: &[(S, S)],
    order: Option<&[S]>,
) -> Result<MultilayerNetwork> {
    let mut b = NetworkBuilder::new();
    for l in layers {
        b.layer(l.as_ref())?;
    }
    for (l, e) in presences {
        b.presence(l.as_ref(), e.as_ref())?;
    }
    for (l, u, v) in edges {
        b.edge(l.as_ref(), u.as_ref(), v.as_ref())?;
    }
    if let Some(order) = order {
        b.order(order.iter().map(AsRef::as_ref));
    }
    b.build()
}

impl MultilayerNetwork {
    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn entity_name(&self, v: EntityId) -> &str {
        &self.entities[v.0]
    }

    pub fn layer_name(&self, l: LayerId) -> &str {
        &self.layers[l.0].name
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_lookup.get(name).copied().map(EntityId)
    }

    pub fn layer_id(&self, name: &str) -> Option<LayerId> {
        self.layer_lookup.get(name).copied().map(LayerId)
    }

    pub fn layer(&self, l: LayerId) -> &Layer {
        &self.layers[l.0]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Whether the source declared an explicit natural order.
    pub fn has_declared_order(&self) -> bool {
        self.declared_order
    }

    /// Layers in which `v` is present, ascending.
    pub fn entity_layers(&self, v: EntityId) -> &[usize] {
        &self.entity_layers[v.0]
    }

    pub fn edge_count(&self) -> usize {
        self.layers.iter().map(Layer::edge_count).sum()
    }

    /// Number of entity-layer tuples `|V_L|`.
    pub fn tuple_count(&self) -> usize {
        self.tuple_offsets[self.layers.len()]
    }

    /// Dense tuple index of `(v, L)`, layer-major.
    pub fn tuple_index(&self, v: EntityId, l: LayerId) -> Option<usize> {
        let layer = &self.layers[l.0];
        if !layer.contains(v.0) {
            return None;
        }
        let rank = layer.nodes.binary_search(&v.0).ok()?;
        Some(self.tuple_offsets[l.0] + rank)
    }

    /// All tuples in dense tuple order.
    pub fn tuples(&self) -> Vec<(EntityId, LayerId)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(l, layer)| layer.nodes.iter().map(move |&v| (EntityId(v), LayerId(l))))
            .collect()
    }

    /// `d_L(v)`. Absence is an error, distinct from degree zero.
    pub fn intra_degree(&self, v: EntityId, l: LayerId) -> Result<usize> {
        self.layers[l.0].degree(v.0).ok_or_else(|| Error::NotPresent {
            entity: self.entities[v.0].clone(),
            layer: self.layers[l.0].name.clone(),
        })
    }

    /// `|V_i ∩ V_j|`.
    pub fn shared_count(&self, i: LayerId, j: LayerId) -> usize {
        let (a, b) = (&self.layers[i.0], &self.layers[j.0]);
        a.nodes.iter().filter(|&&v| b.contains(v)).count()
    }

    /// The valid pairings `P(L)`.
    pub fn valid_pairings(&self, l: LayerId, ordering: LayerOrdering) -> Vec<LayerId> {
        valid_pairings(self.layers.len(), l, ordering)
    }

    /// Number of (ordered valid pairing, shared entity) combinations.
    pub fn coupling_count(&self, beta: bool, ordering: LayerOrdering) -> usize {
        if !beta {
            return 0;
        }
        (0..self.layers.len())
            .map(|i| {
                self.valid_pairings(LayerId(i), ordering)
                    .into_iter()
                    .map(|j| self.shared_count(LayerId(i), j))
                    .sum::<usize>()
            })
            .sum()
    }

    /// Number of distinct undirected coupling links. Without an order both
    /// `(L, L')` and `(L', L)` are valid pairings of the same link.
    pub fn coupling_links(&self, beta: bool, ordering: LayerOrdering) -> usize {
        match ordering {
            LayerOrdering::Unordered => self.coupling_count(beta, ordering) / 2,
            LayerOrdering::Natural(_) => self.coupling_count(beta, ordering),
        }
    }

    /// `d(V_L)`: intra-layer degree plus two per coupling link.
    pub fn total_degree(&self, beta: bool, ordering: LayerOrdering) -> Result<u64> {
        let d = 2 * self.edge_count() as u64 + 2 * self.coupling_links(beta, ordering) as u64;
        if d == 0 {
            return Err(Error::DegenerateNormalization);
        }
        Ok(d)
    }

    /// `(1/ℓ) Σ_i |V_i| / |V|`.
    pub fn node_coverage(&self) -> f64 {
        if self.layers.is_empty() || self.entities.is_empty() {
            return 0.0;
        }
        let n = self.entities.len() as f64;
        self.layers.iter().map(|l| l.node_count() as f64 / n).sum::<f64>() / self.layers.len() as f64
    }

    /// `(1/ℓ) Σ_i |E_i| / Σ_j |E_j|`.
    pub fn edge_coverage(&self) -> Result<f64> {
        let m = self.edge_count();
        if m == 0 {
            return Err(Error::EdgelessNetwork);
        }
        let m = m as f64;
        Ok(self.layers.iter().map(|l| l.edge_count() as f64 / m).sum::<f64>() / self.layers.len() as f64)
    }

    pub fn monoplex_stats(&self, l: LayerId) -> Result<MonoplexStats> {
        let layer = &self.layers[l.0];
        let count = layer.nodes.len();
        if count == 0 {
            return Err(Error::EmptyLayer(layer.name.clone()));
        }
        let nf = count as f64;
        let degree_mean = layer
            .nodes
            .iter()
            .map(|&v| layer.adjacency[v].len() as f64)
            .sum::<f64>()
            / nf;
        let variance = layer
            .nodes
            .iter()
            .map(|&v| {
                let d = layer.adjacency[v].len() as f64 - degree_mean;
                d * d
            })
            .sum::<f64>()
            / nf;

        // BFS from every node; distances summed over connected ordered pairs.
        let mut dist = vec![usize::MAX; self.entities.len()];
        let mut queue = VecDeque::new();
        let (mut path_sum, mut path_pairs) = (0u64, 0u64);
        for &s in &layer.nodes {
            for &v in &layer.nodes {
                dist[v] = usize::MAX;
            }
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &layer.adjacency[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        path_sum += dist[w] as u64;
                        path_pairs += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let avg_path_length = if path_pairs == 0 {
            0.0
        } else {
            path_sum as f64 / path_pairs as f64
        };

        let clustering = layer
            .nodes
            .iter()
            .map(|&v| {
                let nb = &layer.adjacency[v];
                let k = nb.len();
                if k < 2 {
                    return 0.0;
                }
                let mut links = 0usize;
                for (a, &x) in nb.iter().enumerate() {
                    for &y in &nb[a + 1..] {
                        if layer.has_edge(x, y) {
                            links += 1;
                        }
                    }
                }
                2.0 * links as f64 / (k * (k - 1)) as f64
            })
            .sum::<f64>()
            / nf;

        Ok(MonoplexStats {
            degree_mean,
            degree_std: libm::sqrt(variance),
            avg_path_length,
            clustering_coefficient: clustering,
        })
    }

    /// The single-layer network of `L`, with entity `k` of the result being
    /// the `k`-th node of `L`.
    pub fn layer_subnetwork(&self, l: LayerId) -> MultilayerNetwork {
        let layer = &self.layers[l.0];
        let mut b = NetworkBuilder::new();
        b.ensure_layer(&layer.name);
        for &v in &layer.nodes {
            b.presence(&layer.name, &self.entities[v]).expect("layer declared");
        }
        for &(u, v) in &layer.edges {
            b.edge(&layer.name, &self.entities[u], &self.entities[v])
                .expect("layer declared");
        }
        b.build().expect("subnetwork of a valid network")
    }
}

/// `P(L)` for a network with `layer_count` layers.
pub fn valid_pairings(layer_count: usize, l: LayerId, ordering: LayerOrdering) -> Vec<LayerId> {
    match ordering {
        LayerOrdering::Unordered => (0..layer_count).filter(|&j| j != l.0).map(LayerId).collect(),
        LayerOrdering::Natural(PairingScheme::Adjacent) => {
            if l.0 + 1 < layer_count {
                vec![LayerId(l.0 + 1)]
            } else {
                Vec::new()
            }
        }
        LayerOrdering::Natural(PairingScheme::PairWise) => (l.0 + 1..layer_count).map(LayerId).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(layers: &[&str], edges: &[(&str, &str, &str)]) -> MultilayerNetwork {
        build_network(layers, edges, &[], None).unwrap()
    }

    #[test]
    fn minimal_network() {
        let n = net(&["L1"], &[("L1", "a", "b")]);
        assert_eq!(n.entity_count(), 2);
        assert_eq!(n.layer(LayerId(0)).node_count(), 2);
        assert_eq!(n.layer(LayerId(0)).edge_count(), 1);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let n = net(&["L1"], &[("L1", "a", "b"), ("L1", "b", "a"), ("L1", "a", "b")]);
        assert_eq!(n.layer(LayerId(0)).edge_count(), 1);
    }

    #[test]
    fn build_errors() {
        let mut b = NetworkBuilder::new();
        b.layer("L1").unwrap();
        assert_eq!(b.layer("L1"), Err(Error::DuplicateLayer("L1".into())));
        assert_eq!(b.edge("L9", "a", "b"), Err(Error::UnknownLayer("L9".into())));
        assert!(matches!(b.edge("L1", "a", "a"), Err(Error::SelfLoop { .. })));

        let mut b = NetworkBuilder::new();
        b.layer("L1").unwrap();
        b.layer("L2").unwrap();
        b.order(["L1"]);
        assert!(matches!(b.build(), Err(Error::InvalidOrdering(_))));

        let mut b = NetworkBuilder::new();
        b.layer("L1").unwrap();
        b.layer("L2").unwrap();
        b.order(["L1", "L1"]);
        assert!(matches!(b.build(), Err(Error::InvalidOrdering(_))));
    }

    #[test]
    fn order_reindexes_layers() {
        let n = build_network(
            &["B", "A", "C"],
            &[("A", "x", "y"), ("B", "x", "z"), ("C", "y", "z")],
            &[],
            Some(&["A", "B", "C"][..]),
        )
        .unwrap();
        assert!(n.has_declared_order());
        assert_eq!(n.layer_name(LayerId(0)), "A");
        assert_eq!(n.layer_name(LayerId(1)), "B");
        assert!(n.layer(LayerId(1)).has_edge(0, 2));
    }

    #[test]
    fn presence_without_edges() {
        let n = build_network(&["L1", "L2"], &[("L1", "a", "b")], &[("L2", "a")], None).unwrap();
        assert_eq!(n.intra_degree(EntityId(0), LayerId(1)), Ok(0));
        assert!(matches!(
            n.intra_degree(EntityId(1), LayerId(1)),
            Err(Error::NotPresent { .. })
        ));
        assert_eq!(n.entity_layers(EntityId(0)), &[0, 1]);
    }

    #[test]
    fn degrees() {
        let tri = net(&["L"], &[("L", "a", "b"), ("L", "b", "c"), ("L", "a", "c")]);
        assert_eq!(tri.intra_degree(EntityId(0), LayerId(0)), Ok(2));
        let star = net(
            &["L"],
            &[
                ("L", "c", "1"),
                ("L", "c", "2"),
                ("L", "c", "3"),
                ("L", "c", "4"),
                ("L", "c", "5"),
            ],
        );
        let c = star.entity_id("c").unwrap();
        let scanned = star
            .layer(LayerId(0))
            .edges()
            .iter()
            .filter(|&&(u, v)| u == c.0 || v == c.0)
            .count();
        assert_eq!(star.intra_degree(c, LayerId(0)), Ok(scanned));
        assert_eq!(scanned, 5);
    }

    #[test]
    fn pairings() {
        let adj = LayerOrdering::Natural(PairingScheme::Adjacent);
        let pw = LayerOrdering::Natural(PairingScheme::PairWise);
        assert_eq!(valid_pairings(5, LayerId(1), adj), vec![LayerId(2)]);
        assert_eq!(valid_pairings(5, LayerId(4), adj), vec![]);
        let total = |o| (0..5).map(|l| valid_pairings(5, LayerId(l), o).len()).sum::<usize>();
        assert_eq!(total(adj), 4);
        assert_eq!(total(pw), 10);
        assert_eq!(
            valid_pairings(3, LayerId(0), LayerOrdering::Unordered),
            vec![LayerId(1), LayerId(2)]
        );
    }

    fn two_identical_layers() -> MultilayerNetwork {
        net(
            &["L1", "L2"],
            &[
                ("L1", "a", "b"),
                ("L1", "b", "c"),
                ("L1", "c", "d"),
                ("L2", "a", "b"),
                ("L2", "b", "c"),
                ("L2", "c", "d"),
            ],
        )
    }

    #[test]
    fn coupling_and_total_degree() {
        let n = two_identical_layers();
        assert_eq!(n.coupling_count(false, LayerOrdering::Unordered), 0);
        assert_eq!(n.coupling_count(true, LayerOrdering::Unordered), 8);
        assert_eq!(n.total_degree(true, LayerOrdering::Unordered), Ok(20));
        assert_eq!(n.total_degree(false, LayerOrdering::Unordered), Ok(12));

        let three = net(
            &["L1", "L2", "L3"],
            &[("L1", "a", "b"), ("L2", "a", "b"), ("L3", "a", "b")],
        );
        let adj = LayerOrdering::Natural(PairingScheme::Adjacent);
        assert_eq!(three.coupling_count(true, adj), 2 * three.entity_count());
        assert_eq!(three.total_degree(true, adj), Ok(6 + 2 * 4));
    }

    #[test]
    fn degenerate_total_degree() {
        let n = build_network(&["L1"], &[], &[("L1", "a")], None).unwrap();
        assert_eq!(
            n.total_degree(true, LayerOrdering::Unordered),
            Err(Error::DegenerateNormalization)
        );
        assert_eq!(n.edge_coverage(), Err(Error::EdgelessNetwork));
    }

    #[test]
    fn coverage() {
        let n = two_identical_layers();
        assert_eq!(n.node_coverage(), 1.0);
        assert!((n.edge_coverage().unwrap() - 0.5).abs() < 1e-15);

        let half = build_network(
            &["L1", "L2"],
            &[("L1", "a", "b"), ("L1", "c", "d"), ("L2", "a", "b")],
            &[],
            None,
        )
        .unwrap();
        assert!((half.node_coverage() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn stats() {
        let tri = net(&["L"], &[("L", "a", "b"), ("L", "b", "c"), ("L", "a", "c")]);
        let s = tri.monoplex_stats(LayerId(0)).unwrap();
        assert_eq!(s.degree_mean, 2.0);
        assert_eq!(s.degree_std, 0.0);
        assert_eq!(s.clustering_coefficient, 1.0);
        assert_eq!(s.avg_path_length, 1.0);

        // a-b, b-c: ordered distances 1,1,1,1,2,2 → 8/6
        let path = net(&["L"], &[("L", "a", "b"), ("L", "b", "c")]);
        let s = path.monoplex_stats(LayerId(0)).unwrap();
        assert_eq!(s.clustering_coefficient, 0.0);
        assert!((s.avg_path_length - 4.0 / 3.0).abs() < 1e-15);

        let star = net(
            &["L"],
            &[("L", "c", "1"), ("L", "c", "2"), ("L", "c", "3"), ("L", "c", "4")],
        );
        let s = star.monoplex_stats(LayerId(0)).unwrap();
        assert!((s.degree_mean - 8.0 / 5.0).abs() < 1e-15);
        // degrees 4,1,1,1,1: variance = (2.4² + 4·0.6²)/5 = 1.44
        assert!((s.degree_std - 1.2).abs() < 1e-12);

        let empty = build_network(&["L1", "L2"], &[("L1", "a", "b")], &[], None).unwrap();
        assert!(matches!(empty.monoplex_stats(LayerId(1)), Err(Error::EmptyLayer(_))));
    }

    #[test]
    fn tuples_are_layer_major() {
        let n = build_network(&["L1", "L2"], &[("L1", "a", "b"), ("L2", "b", "c")], &[], None).unwrap();
        let t = n.tuples();
        assert_eq!(t.len(), n.tuple_count());
        for (i, &(v, l)) in t.iter().enumerate() {
            assert_eq!(n.tuple_index(v, l), Some(i));
        }
        assert_eq!(n.tuple_index(EntityId(0), LayerId(1)), None);
    }

    #[test]
    fn subnetwork_preserves_node_order() {
        let n = build_network(&["L1", "L2"], &[("L1", "a", "b"), ("L2", "c", "a")], &[], None).unwrap();
        let sub = n.layer_subnetwork(LayerId(1));
        let nodes = n.layer(LayerId(1)).nodes();
        for (k, &v) in nodes.iter().enumerate() {
            assert_eq!(sub.entity_name(EntityId(k)), n.entity_name(EntityId(v)));
        }
        assert_eq!(sub.edge_count(), 1);
    }
}
