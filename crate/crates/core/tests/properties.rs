use mlq_core::community::{redundancy_resolution, supporting_layers};
use mlq_core::detect::{generalized_louvain, nmi};
use mlq_core::mlgraph::{valid_pairings, EntityId, LayerId};
use mlq_core::modularity::{ic_asymmetric, ic_symmetric, ic_time_aware, q_multilayer, q_multislice, q_newman, score};
use mlq_core::synthbench::{
    oracle_best_partition, oracle_q_multilayer, oracle_q_multislice, planted_multilayer, PlantedSpec,
};
use mlq_core::{
    CommunityStructure, CouplingKind, CouplingPolicy, DetectConfig, LayerOrdering, MultilayerNetwork, NetworkBuilder,
    Objective, PairingScheme, ResolutionPolicy,
};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORDERINGS: [LayerOrdering; 3] = [
    LayerOrdering::Unordered,
    LayerOrdering::Natural(PairingScheme::Adjacent),
    LayerOrdering::Natural(PairingScheme::PairWise),
];

fn couplings() -> Vec<CouplingPolicy> {
    use CouplingKind::*;
    vec![
        CouplingPolicy::new(None),
        CouplingPolicy::new(Symmetric),
        CouplingPolicy::new(AsymInner),
        CouplingPolicy::new(AsymOuter),
        CouplingPolicy::time_aware(AsymInner),
        CouplingPolicy::time_aware(AsymOuter),
    ]
}

fn resolutions() -> Vec<ResolutionPolicy> {
    vec![
        ResolutionPolicy::Constant(0.5),
        ResolutionPolicy::Constant(1.0),
        ResolutionPolicy::Constant(2.0),
        ResolutionPolicy::Redundancy,
    ]
}

fn valid_combo(coupling: CouplingPolicy, ordering: LayerOrdering) -> bool {
    !coupling.time_aware || ordering.is_natural()
}

prop_compose! {
    /// Random network with uniform edge probability and random presence.
    fn network(max_entities: usize, max_layers: usize)
        (n in 2..=max_entities, ell in 1..=max_layers, p in 0.1f64..0.9, q in 0.3f64..=1.0, seed in any::<u64>())
        -> MultilayerNetwork
    {
        let spec = PlantedSpec { entities: n, communities: 1, layers: ell, p_in: p, p_out: p, presence: q, seed };
        planted_multilayer(&spec).unwrap().0
    }
}

prop_compose! {
    fn scored(max_entities: usize, max_layers: usize)
        (net in network(max_entities, max_layers), raw in prop::collection::vec(0usize..4, 64))
        -> (MultilayerNetwork, CommunityStructure)
    {
        let labels = &raw[..net.tuple_count()];
        let cs = CommunityStructure::from_tuple_labels(&net, labels).unwrap();
        (net, cs)
    }
}

/// Rebuilds `net` with entities interned in `entity_order` and layers
/// declared in `layer_order`; presences and edges are preserved by name.
fn rebuild(
    net: &MultilayerNetwork,
    entity_order: &[usize],
    layer_order: &[usize],
    keep_natural: bool,
) -> MultilayerNetwork {
    let mut b = NetworkBuilder::new();
    for &l in layer_order {
        b.layer(net.layer_name(LayerId(l))).unwrap();
    }
    for &v in entity_order {
        for &l in net.entity_layers(EntityId(v)) {
            b.presence(net.layer_name(LayerId(l)), net.entity_name(EntityId(v)))
                .unwrap();
        }
    }
    for &l in layer_order {
        let layer = net.layer(LayerId(l));
        for &(u, v) in layer.edges().iter().rev() {
            b.edge(layer.name(), net.entity_name(EntityId(v)), net.entity_name(EntityId(u)))
                .unwrap();
        }
    }
    if keep_natural {
        b.order((0..net.layer_count()).map(|l| net.layer_name(LayerId(l)).to_string()));
    }
    b.build().unwrap()
}

fn transfer(
    from: &MultilayerNetwork,
    cs: &CommunityStructure,
    to: &MultilayerNetwork,
    relabel: &[usize],
) -> CommunityStructure {
    let assignments = from.tuples().into_iter().map(|(v, l)| {
        let v2 = to.entity_id(from.entity_name(v)).unwrap();
        let l2 = to.layer_id(from.layer_name(l)).unwrap();
        (v2, l2, relabel[cs.label(v, l).unwrap()])
    });
    CommunityStructure::from_assignments(to, assignments).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn has_edges(net: &MultilayerNetwork) -> bool {
    net.edge_count() > 0
}

proptest! {
    #[test]
    fn degree_sum_is_twice_edges(net in network(12, 4)) {
        for (l, layer) in net.layers().iter().enumerate() {
            let sum: usize = layer.nodes().iter().map(|&v| net.intra_degree(EntityId(v), LayerId(l)).unwrap()).sum();
            prop_assert_eq!(sum, 2 * layer.edge_count());
        }
    }

    #[test]
    fn pairing_totals(ell in 1usize..40) {
        let total = |o| (0..ell).map(|l| valid_pairings(ell, LayerId(l), o).len()).sum::<usize>();
        prop_assert_eq!(total(LayerOrdering::Natural(PairingScheme::Adjacent)), ell - 1);
        prop_assert_eq!(total(LayerOrdering::Natural(PairingScheme::PairWise)), (ell * ell - ell) / 2);
        prop_assert_eq!(total(LayerOrdering::Unordered), ell * (ell - 1));
    }

    #[test]
    fn coupling_only_adds_degree(net in network(10, 4)) {
        prop_assume!(has_edges(&net));
        for o in ORDERINGS {
            let with = net.total_degree(true, o).unwrap();
            let without = net.total_degree(false, o).unwrap();
            prop_assert_eq!(without, 2 * net.edge_count() as u64);
            prop_assert!(with >= without);
            prop_assert_eq!(with == without, net.coupling_count(true, o) == 0);
        }
    }

    #[test]
    fn total_degree_relabeling(net in network(10, 4), seed in any::<u64>()) {
        prop_assume!(has_edges(&net));
        let mut entities: Vec<usize> = (0..net.entity_count()).collect();
        let mut layers: Vec<usize> = (0..net.layer_count()).collect();
        shuffle(&mut entities, seed);
        shuffle(&mut layers, seed ^ 0x9e37);
        let other = rebuild(&net, &entities, &layers, true);
        for o in ORDERINGS {
            prop_assert_eq!(net.total_degree(true, o).unwrap(), other.total_degree(true, o).unwrap());
        }
    }

    #[test]
    fn redundancy_bounds((net, cs) in scored(10, 4)) {
        for c in 0..cs.community_count() {
            let rho = cs.redundancy(&net, c);
            prop_assert!(rho >= Ratio::from_integer(0) && rho <= Ratio::from_integer(1));
            let pairs = cs.redundant_pairs(&net, c);
            prop_assert!(pairs.p2.iter().all(|p| pairs.p1.contains(p)));
            let nrp = cs.nrp_by_layer(&net, c);
            prop_assert!(nrp.iter().all(|&x| x <= pairs.p2.len()));
            let support: usize = pairs.p2.iter().map(|&(v, u)| supporting_layers(&net, EntityId(v), EntityId(u)).len()).sum();
            prop_assert_eq!(nrp.iter().sum::<usize>(), support);
        }
    }

    #[test]
    fn gamma_law(nrp in 0usize..1_000_000) {
        let g = redundancy_resolution(nrp);
        if nrp == 0 {
            prop_assert_eq!(g, 2.0);
        } else {
            prop_assert!(g > 0.0 && g <= 1.0);
            prop_assert!(redundancy_resolution(nrp + 1) < g);
        }
    }

    #[test]
    fn coupling_function_bounds((net, cs) in scored(10, 4)) {
        let ell = net.layer_count();
        for c in 0..cs.community_count() {
            for i in 0..ell {
                for j in 0..ell {
                    if i == j {
                        continue;
                    }
                    let (li, lj) = (LayerId(i), LayerId(j));
                    let sym = ic_symmetric(&net, &cs, c, li, lj);
                    prop_assert!(sym <= Ratio::from_integer(1));
                    prop_assert_eq!(sym, ic_symmetric(&net, &cs, c, lj, li));
                    let asym = ic_asymmetric(&net, &cs, c, li, lj);
                    let proj = cs.projection(c, li).len() as u64;
                    let size = net.layer(li).node_count() as u64;
                    if proj > 0 {
                        prop_assert_eq!(asym, sym * Ratio::new(size, proj));
                    }
                    let shared = net.shared_count(li, lj) as u64;
                    if shared > 0 {
                        prop_assert!(asym <= Ratio::new(size, shared));
                    }
                    for o in [ORDERINGS[1], ORDERINGS[2]] {
                        let ta = ic_time_aware(&net, &cs, c, li, lj, o).unwrap();
                        let a = *asym.numer() as f64 / *asym.denom() as f64;
                        prop_assert!(ta <= a + 1e-15);
                        if a > 0.0 {
                            prop_assert_eq!(ta == a, i.abs_diff(j) == 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn newman_range((net, cs) in scored(14, 1)) {
        prop_assume!(has_edges(&net));
        let layer = net.layer(LayerId(0));
        let partition: Vec<usize> = (0..net.entity_count()).map(|v| cs.label(EntityId(v), LayerId(0)).unwrap()).collect();
        let q = q_newman(layer, &partition).unwrap();
        prop_assert!((-0.5..=1.0).contains(&q));
        let ml = q_multilayer(&net, &cs, ResolutionPolicy::Constant(1.0), CouplingPolicy::NONE, LayerOrdering::Unordered).unwrap();
        prop_assert!((ml.total - q).abs() <= 1e-12);
        let ms = q_multislice(&net, &cs, &[1.0], 0.0).unwrap();
        prop_assert!((ms.total - q).abs() <= 1e-12);
    }

    #[test]
    fn oracle_equivalence((net, cs) in scored(6, 4)) {
        prop_assume!(has_edges(&net) && net.tuple_count() <= 12);
        for resolution in resolutions() {
            for coupling in couplings() {
                for ordering in ORDERINGS {
                    if !valid_combo(coupling, ordering) {
                        continue;
                    }
                    let fast = q_multilayer(&net, &cs, resolution, coupling, ordering).unwrap();
                    let slow = oracle_q_multilayer(&net, &cs, resolution, coupling, ordering).unwrap();
                    prop_assert!(close(fast.total, slow), "{:?} {:?} {:?}: {} vs {}", resolution, coupling, ordering, fast.total, slow);
                    prop_assert_eq!(fast.total, fast.total_from_rows());
                }
            }
        }
        if net.layers().iter().all(|l| l.node_count() == 0 || l.edge_count() > 0) {
            for (g, w) in [(1.0, 0.0), (0.5, 0.3), (1.7, 2.0)] {
                let gammas = vec![g; net.layer_count()];
                let fast = q_multislice(&net, &cs, &gammas, w).unwrap().total;
                let slow = oracle_q_multislice(&net, &cs, &gammas, w).unwrap();
                prop_assert!(close(fast, slow), "{} vs {}", fast, slow);
            }
        }
    }

    #[test]
    fn relabeling_invariance((net, cs) in scored(8, 3), seed in any::<u64>()) {
        prop_assume!(has_edges(&net));
        let mut entities: Vec<usize> = (0..net.entity_count()).collect();
        let mut layers: Vec<usize> = (0..net.layer_count()).collect();
        let mut comms: Vec<usize> = (0..cs.community_count()).collect();
        shuffle(&mut entities, seed);
        shuffle(&mut layers, seed.rotate_left(17));
        shuffle(&mut comms, seed.rotate_left(33));
        let other = rebuild(&net, &entities, &layers, false);
        let cs2 = transfer(&net, &cs, &other, &comms);
        for resolution in resolutions() {
            for coupling in couplings().into_iter().filter(|c| !c.time_aware) {
                let a = q_multilayer(&net, &cs, resolution, coupling, LayerOrdering::Unordered).unwrap().total;
                let b = q_multilayer(&other, &cs2, resolution, coupling, LayerOrdering::Unordered).unwrap().total;
                prop_assert!(close(a, b), "{} vs {}", a, b);
            }
        }
        if net.layers().iter().all(|l| l.node_count() == 0 || l.edge_count() > 0) {
            let a = q_multislice(&net, &cs, &vec![0.8; net.layer_count()], 0.6).unwrap().total;
            let b = q_multislice(&other, &cs2, &vec![0.8; net.layer_count()], 0.6).unwrap().total;
            prop_assert!(close(a, b));
        }
        // flatten_majority is a function of the multiset of layer labels
        let kept = transfer(&net, &cs, &rebuild(&net, &(0..net.entity_count()).collect::<Vec<_>>(), &layers, false), &(0..cs.community_count()).collect::<Vec<_>>());
        prop_assert_eq!(cs.flatten_majority(), kept.flatten_majority());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detection_contract(net in network(9, 3), seed in any::<u64>(), redundancy in any::<bool>()) {
        prop_assume!(has_edges(&net));
        let objective = Objective::Multilayer {
            resolution: if redundancy { ResolutionPolicy::Redundancy } else { ResolutionPolicy::Constant(1.0) },
            coupling: CouplingPolicy::SYMMETRIC,
            ordering: LayerOrdering::Unordered,
        };
        let config = DetectConfig::new(objective.clone()).with_seed(seed);
        let a = generalized_louvain(&net, &config).unwrap();
        let b = generalized_louvain(&net, &config).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        let rescored = score(&net, &a.structure, &objective).unwrap().total;
        prop_assert!(close(a.objective, rescored));
        if let Some(&last) = a.trace.last() {
            prop_assert!(close(last, a.objective), "trace {} vs objective {}", last, a.objective);
        }
        if net.tuple_count() <= 8 {
            let (_, best) = oracle_best_partition(&net, &objective, net.tuple_count()).unwrap();
            prop_assert!(a.objective <= best + 1e-12);
        }
        prop_assert!(nmi(&a.entity_partition, &b.entity_partition).unwrap() == 1.0);
    }
}

fn shuffle(v: &mut [usize], seed: u64) {
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
}
