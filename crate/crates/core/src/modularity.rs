//! Quality functions: classic modularity, multislice modularity and
//! multilayer modularity with pluggable resolution and coupling policies.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::community::{redundancy_resolution, CommunityStructure};
use crate::error::{Error, Result};
use crate::mlgraph::{Layer, LayerId, LayerOrdering, MultilayerNetwork};
use crate::sum::CompensatedSum;

/// Resolution factor `γ(L, C)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolutionPolicy {
    Constant(f64),
    /// `2 / (1 + log2(1 + nrp(L, C)))`.
    Redundancy,
}

/// Inter-layer coupling function `IC(C, L, L')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    /// `β = 0`.
    None,
    Symmetric,
    /// `IC_a(C, L, L')` for `L' ∈ P(L)`.
    AsymInner,
    /// `IC_a(C, L', L)` for `L' ∈ P(L)`.
    AsymOuter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingPolicy {
    pub kind: CouplingKind,
    /// Damp asymmetric couplings by positional distance in the natural order.
    pub time_aware: bool,
}

impl CouplingPolicy {
    pub const NONE: CouplingPolicy = CouplingPolicy::new(CouplingKind::None);
    pub const SYMMETRIC: CouplingPolicy = CouplingPolicy::new(CouplingKind::Symmetric);

    pub const fn new(kind: CouplingKind) -> Self {
        Self {
            kind,
            time_aware: false,
        }
    }

    pub const fn time_aware(kind: CouplingKind) -> Self {
        Self { kind, time_aware: true }
    }

    /// The `β` switch.
    pub fn beta(&self) -> bool {
        self.kind != CouplingKind::None
    }
}

/// Objective selector shared by the scorer and the detector.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Multislice modularity with per-layer `γ_i` and constant coupling `ω`.
    Multislice { gammas: Vec<f64>, omega: f64 },
    /// Multilayer modularity.
    Multilayer {
        resolution: ResolutionPolicy,
        coupling: CouplingPolicy,
        ordering: LayerOrdering,
    },
}

impl Objective {
    /// Multislice objective with the same `γ` on every layer.
    pub fn multislice_uniform(net: &MultilayerNetwork, gamma: f64, omega: f64) -> Self {
        Objective::Multislice {
            gammas: vec![gamma; net.layer_count()],
            omega,
        }
    }

    pub fn validate(&self, net: &MultilayerNetwork) -> Result<()> {
        match self {
            Objective::Multislice { gammas, omega } => {
                if gammas.len() != net.layer_count() {
                    return Err(Error::InvalidParameter(format!(
                        "{} resolution values for {} layers",
                        gammas.len(),
                        net.layer_count()
                    )));
                }
                if gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                    return Err(Error::InvalidParameter("gamma must be finite and non-negative".into()));
                }
                if !(omega.is_finite() && *omega >= 0.0) {
                    return Err(Error::InvalidParameter("omega must be finite and non-negative".into()));
                }
                Ok(())
            }
            Objective::Multilayer {
                resolution,
                coupling,
                ordering,
            } => {
                if let ResolutionPolicy::Constant(g) = resolution {
                    if !(g.is_finite() && *g >= 0.0) {
                        return Err(Error::InvalidParameter("gamma must be finite and non-negative".into()));
                    }
                }
                if coupling.time_aware {
                    if !matches!(coupling.kind, CouplingKind::AsymInner | CouplingKind::AsymOuter) {
                        return Err(Error::PolicyConflict(
                            "time-aware coupling requires an asymmetric coupling".into(),
                        ));
                    }
                    if !ordering.is_natural() {
                        return Err(Error::PolicyConflict(
                            "time-aware coupling requires a natural layer ordering".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// The normalization `d(V_L)` this objective divides by.
    pub fn normalization(&self, net: &MultilayerNetwork) -> Result<f64> {
        match self {
            Objective::Multislice { omega, .. } => {
                let links = net.coupling_links(true, LayerOrdering::Unordered) as f64;
                let d = 2.0 * net.edge_count() as f64 + 2.0 * omega * links;
                if d <= 0.0 {
                    return Err(Error::DegenerateNormalization);
                }
                Ok(d)
            }
            Objective::Multilayer { coupling, ordering, .. } => {
                Ok(net.total_degree(coupling.beta(), *ordering)? as f64)
            }
        }
    }
}

/// One `(community, layer)` term of a score, before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermRow {
    pub community: usize,
    pub layer: usize,
    /// `d_L^int(C)`.
    pub intra: f64,
    /// Null-model term (already multiplied by the resolution factor).
    pub null: f64,
    pub coupling: f64,
    /// Resolution factor used for this term.
    pub gamma: f64,
}

impl TermRow {
    pub fn value(&self) -> f64 {
        self.intra - self.null + self.coupling
    }
}

/// Per-community sums of [`TermRow`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityTerms {
    pub community: usize,
    pub intra: f64,
    pub null: f64,
    pub coupling: f64,
}

/// A decomposed modularity value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub total: f64,
    pub normalization: f64,
    pub rows: Vec<TermRow>,
    pub communities: Vec<CommunityTerms>,
    pub objective: Objective,
}

impl ScoreReport {
    fn assemble(rows: Vec<TermRow>, community_count: usize, normalization: f64, objective: Objective) -> Self {
        let mut communities: Vec<CommunityTerms> = (0..community_count)
            .map(|c| CommunityTerms {
                community: c,
                intra: 0.0,
                null: 0.0,
                coupling: 0.0,
            })
            .collect();
        for r in &rows {
            let t = &mut communities[r.community];
            t.intra += r.intra;
            t.null += r.null;
            t.coupling += r.coupling;
        }
        let mut report = ScoreReport {
            total: 0.0,
            normalization,
            rows,
            communities,
            objective,
        };
        report.total = report.total_from_rows();
        report
    }

    /// Recomputes the total from the rows in community-then-layer order.
    pub fn total_from_rows(&self) -> f64 {
        self.rows.iter().map(TermRow::value).collect::<CompensatedSum>().value() / self.normalization
    }
}

/// Classic modularity of one layer graph. `partition` is indexed by entity.
pub fn q_newman(layer: &Layer, partition: &[usize]) -> Result<f64> {
    let m = layer.edge_count();
    if m == 0 {
        return Err(Error::EdgelessLayer(layer.name().into()));
    }
    if let Some(&v) = layer.nodes().iter().find(|&&v| v >= partition.len()) {
        return Err(Error::InvalidPartition(format!(
            "node {v} of layer `{}` is unassigned",
            layer.name()
        )));
    }
    let two_m = 2.0 * m as f64;
    let mut per: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for &v in layer.nodes() {
        per.entry(partition[v]).or_default().0 += layer.neighbors(v).len() as f64;
    }
    for &(u, v) in layer.edges() {
        if partition[u] == partition[v] {
            per.entry(partition[u]).or_default().1 += 2.0;
        }
    }
    Ok(per
        .values()
        .map(|&(deg, int)| {
            let x = deg / two_m;
            int / two_m - x * x
        })
        .collect::<CompensatedSum>()
        .value())
}

/// `IC_s` from counts: `|C^(i) ∩ C^(j)| / |V_i ∩ V_j|`.
#[inline]
pub(crate) fn symmetric_from_counts(inter: usize, shared: usize) -> f64 {
    if shared == 0 {
        0.0
    } else {
        inter as f64 / shared as f64
    }
}

/// `IC_a` from counts: `IC_s · |V_i| / |C^(i)|`.
#[inline]
pub(crate) fn asymmetric_from_counts(inter: usize, shared: usize, layer_size: usize, projection: usize) -> f64 {
    if shared == 0 || projection == 0 {
        0.0
    } else {
        (inter as f64 / shared as f64) * (layer_size as f64 / projection as f64)
    }
}

/// `2 / (1 + log2(1 + distance))`.
pub fn time_penalty(distance: usize) -> f64 {
    2.0 / (1.0 + libm::log2(1.0 + distance as f64))
}

fn intersection_size(cs: &CommunityStructure, c: usize, i: LayerId, j: LayerId) -> usize {
    let (a, b) = (cs.layer_labels(i), cs.layer_labels(j));
    a.iter().zip(b).filter(|&(&x, &y)| x == Some(c) && y == Some(c)).count()
}

fn projection_size(cs: &CommunityStructure, c: usize, l: LayerId) -> usize {
    cs.layer_labels(l).iter().filter(|&&x| x == Some(c)).count()
}

/// Symmetric projection-based coupling, exact.
pub fn ic_symmetric(net: &MultilayerNetwork, cs: &CommunityStructure, c: usize, i: LayerId, j: LayerId) -> Ratio<u64> {
    let shared = net.shared_count(i, j) as u64;
    if shared == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(intersection_size(cs, c, i, j) as u64, shared)
}

/// Asymmetric projection-based coupling from `i` to `j`, exact.
pub fn ic_asymmetric(net: &MultilayerNetwork, cs: &CommunityStructure, c: usize, i: LayerId, j: LayerId) -> Ratio<u64> {
    let shared = net.shared_count(i, j) as u64;
    let projection = projection_size(cs, c, i) as u64;
    if shared == 0 || projection == 0 {
        return Ratio::from_integer(0);
    }
    let inter = intersection_size(cs, c, i, j) as u64;
    Ratio::new(inter * net.layer(i).node_count() as u64, shared * projection)
}

/// Time-aware asymmetric coupling; needs a natural ordering.
pub fn ic_time_aware(
    net: &MultilayerNetwork,
    cs: &CommunityStructure,
    c: usize,
    i: LayerId,
    j: LayerId,
    ordering: LayerOrdering,
) -> Result<f64> {
    if !ordering.is_natural() {
        return Err(Error::PolicyConflict(
            "time-aware coupling requires a natural layer ordering".into(),
        ));
    }
    let ic = ic_asymmetric(net, cs, c, i, j);
    Ok(ratio_to_f64(ic) * time_penalty(i.0.abs_diff(j.0)))
}

pub(crate) fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_dimensions(net: &MultilayerNetwork, cs: &CommunityStructure) -> Result<()> {
    let layers_ok = cs.layer_count() == net.layer_count();
    let entities_ok = (0..cs.layer_count()).all(|l| cs.layer_labels(LayerId(l)).len() == net.entity_count());
    if layers_ok && entities_ok {
        Ok(())
    } else {
        Err(Error::InvalidPartition(
            "community structure does not match the network".into(),
        ))
    }
}

/// `|V_i ∩ V_j|` for every layer pair, row-major.
pub(crate) fn shared_matrix(net: &MultilayerNetwork) -> Vec<usize> {
    let ell = net.layer_count();
    let mut shared = vec![0usize; ell * ell];
    for v in 0..net.entity_count() {
        let layers = net.entity_layers(crate::mlgraph::EntityId(v));
        for &i in layers {
            for &j in layers {
                shared[i * ell + j] += 1;
            }
        }
    }
    shared
}

/// Per-community, per-layer aggregates used by the scorer.
struct Aggregates {
    ell: usize,
    degree: Vec<usize>,
    internal: Vec<usize>,
    projection: Vec<usize>,
    /// `(c, i, j)` with `i < j` → `|C^(i) ∩ C^(j)|`.
    overlap: BTreeMap<(usize, usize, usize), usize>,
}

impl Aggregates {
    fn collect(net: &MultilayerNetwork, cs: &CommunityStructure) -> Self {
        let ell = net.layer_count();
        let k = cs.community_count();
        let mut degree = vec![0; k * ell];
        let mut internal = vec![0; k * ell];
        let mut projection = vec![0; k * ell];
        for (l, layer) in net.layers().iter().enumerate() {
            let labels = cs.layer_labels(LayerId(l));
            for &v in layer.nodes() {
                let c = labels[v].expect("present tuple is assigned");
                degree[c * ell + l] += layer.neighbors(v).len();
                projection[c * ell + l] += 1;
            }
            for &(u, v) in layer.edges() {
                if labels[u] == labels[v] {
                    internal[labels[u].unwrap() * ell + l] += 2;
                }
            }
        }
        let mut overlap = BTreeMap::new();
        for v in 0..net.entity_count() {
            let layers = net.entity_layers(crate::mlgraph::EntityId(v));
            for (a, &i) in layers.iter().enumerate() {
                let ci = cs.layer_labels(LayerId(i))[v];
                for &j in &layers[a + 1..] {
                    if cs.layer_labels(LayerId(j))[v] == ci {
                        *overlap.entry((ci.unwrap(), i, j)).or_insert(0) += 1;
                    }
                }
            }
        }
        Aggregates {
            ell,
            degree,
            internal,
            projection,
            overlap,
        }
    }

    fn overlap(&self, c: usize, i: usize, j: usize) -> usize {
        let key = if i < j { (c, i, j) } else { (c, j, i) };
        self.overlap.get(&key).copied().unwrap_or(0)
    }
}

/// `nrp(L, C)` for all communities at once, `[c * ℓ + l]`.
fn nrp_table(net: &MultilayerNetwork, cs: &CommunityStructure) -> Vec<usize> {
    let ell = net.layer_count();
    let k = cs.community_count();
    let mut table = vec![0; k * ell];
    let communities_of = |v: usize| {
        let mut cs_v: Vec<usize> = net
            .entity_layers(crate::mlgraph::EntityId(v))
            .iter()
            .filter_map(|&l| cs.layer_labels(LayerId(l))[v])
            .collect();
        cs_v.sort_unstable();
        cs_v.dedup();
        cs_v
    };
    let mut support: Vec<(usize, usize)> = Vec::new();
    for v in 0..net.entity_count() {
        support.clear();
        for (l, layer) in net.layers().iter().enumerate() {
            support.extend(layer.neighbors(v).iter().filter(|&&u| u > v).map(|&u| (u, l)));
        }
        if support.len() < 2 {
            continue;
        }
        support.sort_unstable();
        let mine = communities_of(v);
        let mut start = 0;
        while start < support.len() {
            let u = support[start].0;
            let mut end = start;
            while end < support.len() && support[end].0 == u {
                end += 1;
            }
            if end - start >= 2 {
                let theirs = communities_of(u);
                for &c in mine.iter().filter(|c| theirs.binary_search(c).is_ok()) {
                    for &(_, l) in &support[start..end] {
                        table[c * ell + l] += 1;
                    }
                }
            }
            start = end;
        }
    }
    table
}

/// Multilayer modularity with its per-term decomposition.
pub fn q_multilayer(
    net: &MultilayerNetwork,
    cs: &CommunityStructure,
    resolution: ResolutionPolicy,
    coupling: CouplingPolicy,
    ordering: LayerOrdering,
) -> Result<ScoreReport> {
    let objective = Objective::Multilayer {
        resolution,
        coupling,
        ordering,
    };
    objective.validate(net)?;
    check_dimensions(net, cs)?;
    if net.edge_count() == 0 {
        return Err(Error::EdgelessNetwork);
    }
    let d = objective.normalization(net)?;
    let agg = Aggregates::collect(net, cs);
    let ell = agg.ell;
    let nrp = match resolution {
        ResolutionPolicy::Redundancy => Some(nrp_table(net, cs)),
        ResolutionPolicy::Constant(_) => None,
    };
    let shared = shared_matrix(net);
    let pairings: Vec<Vec<LayerId>> = (0..ell).map(|l| net.valid_pairings(LayerId(l), ordering)).collect();

    let mut rows = Vec::new();
    for c in 0..cs.community_count() {
        for l in 0..ell {
            let idx = c * ell + l;
            if agg.projection[idx] == 0 {
                continue;
            }
            let gamma = match (resolution, &nrp) {
                (ResolutionPolicy::Constant(g), _) => g,
                (ResolutionPolicy::Redundancy, Some(t)) => redundancy_resolution(t[idx]),
                (ResolutionPolicy::Redundancy, None) => unreachable!(),
            };
            let deg = agg.degree[idx] as f64;
            let mut coupling_term = CompensatedSum::default();
            if coupling.beta() {
                for &LayerId(lp) in &pairings[l] {
                    let inter = agg.overlap(c, l, lp);
                    let s = shared[l * ell + lp];
                    let mut ic = match coupling.kind {
                        CouplingKind::Symmetric => symmetric_from_counts(inter, s),
                        CouplingKind::AsymInner => {
                            asymmetric_from_counts(inter, s, net.layer(LayerId(l)).node_count(), agg.projection[idx])
                        }
                        CouplingKind::AsymOuter => asymmetric_from_counts(
                            inter,
                            s,
                            net.layer(LayerId(lp)).node_count(),
                            agg.projection[c * ell + lp],
                        ),
                        CouplingKind::None => 0.0,
                    };
                    if coupling.time_aware {
                        ic *= time_penalty(l.abs_diff(lp));
                    }
                    coupling_term.add(ic);
                }
            }
            rows.push(TermRow {
                community: c,
                layer: l,
                intra: agg.internal[idx] as f64,
                null: gamma * deg * deg / d,
                coupling: coupling_term.value(),
                gamma,
            });
        }
    }
    Ok(ScoreReport::assemble(rows, cs.community_count(), d, objective))
}

/// Multislice modularity with constant coupling `ω` between every pair of
/// tuples of the same entity.
#[allow(clippy::needless_range_loop)]
pub fn q_multislice(
    net: &MultilayerNetwork,
    cs: &CommunityStructure,
    gammas: &[f64],
    omega: f64,
) -> Result<ScoreReport> {
    let objective = Objective::Multislice {
        gammas: gammas.to_vec(),
        omega,
    };
    objective.validate(net)?;
    check_dimensions(net, cs)?;
    for layer in net.layers() {
        if layer.edge_count() == 0 && layer.node_count() > 0 {
            return Err(Error::EdgelessLayer(layer.name().into()));
        }
    }
    let d = objective.normalization(net)?;
    let agg = Aggregates::collect(net, cs);
    let ell = agg.ell;
    let mut rows = Vec::new();
    for c in 0..cs.community_count() {
        for l in 0..ell {
            let idx = c * ell + l;
            if agg.projection[idx] == 0 {
                continue;
            }
            let two_e = 2.0 * net.layer(LayerId(l)).edge_count() as f64;
            let deg = agg.degree[idx] as f64;
            let coupled: usize = (0..ell).filter(|&j| j != l).map(|j| agg.overlap(c, l, j)).sum();
            rows.push(TermRow {
                community: c,
                layer: l,
                intra: agg.internal[idx] as f64,
                null: gammas[l] * deg * deg / two_e,
                coupling: omega * coupled as f64,
                gamma: gammas[l],
            });
        }
    }
    Ok(ScoreReport::assemble(rows, cs.community_count(), d, objective))
}

/// Scores `cs` under `objective`.
pub fn score(net: &MultilayerNetwork, cs: &CommunityStructure, objective: &Objective) -> Result<ScoreReport> {
    match objective {
        Objective::Multislice { gammas, omega } => q_multislice(net, cs, gammas, *omega),
        Objective::Multilayer {
            resolution,
            coupling,
            ordering,
        } => q_multilayer(net, cs, *resolution, *coupling, *ordering),
    }
}
