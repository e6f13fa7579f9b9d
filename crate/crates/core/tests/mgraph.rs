mod common;

use ctar::mgraph::{fixture, Fixture, MGraph, MissingnessClass, NodeRole};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reachability_matches_path_enumeration() {
    let (queries, bad) = common::dsep_sweep(200, 11);
    assert!(queries > 1000);
    assert_eq!(bad, 0);
}

#[test]
fn topo_order_respects_every_edge_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let (g, _) = common::random_dag(8, 0.4, &mut rng);
        let order = g.topo_order();
        let pos = |n: &str| order.iter().position(|x| *x == n).unwrap();
        assert!(g.edges().all(|(a, b)| pos(a) < pos(b)));
    }
}

/// Rebuilds a graph with nodes, edges and links declared in shuffled order,
/// optionally without its proxy nodes.
fn reshuffled(g: &MGraph, seed: u64, keep_proxies: bool) -> MGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<(&str, NodeRole)> = g.nodes().collect();
    let mut edges: Vec<(&str, &str)> = g.edges().collect();
    nodes.shuffle(&mut rng);
    edges.shuffle(&mut rng);
    let is_proxy = |n: &str| g.role(n).unwrap() == NodeRole::Proxy;
    let mut b = MGraph::builder();
    for (n, r) in nodes {
        if keep_proxies || r != NodeRole::Proxy {
            b.add_node(n, r);
        }
    }
    for (a, c) in edges {
        if keep_proxies || !(is_proxy(a) || is_proxy(c)) {
            b.add_edge(a, c);
        }
    }
    for (r, x) in g.proxy_links() {
        b.add_proxy(r, x);
    }
    b.build().unwrap()
}

#[test]
fn classification_ignores_declaration_order_and_proxies() {
    for f in [Fixture::Fig2, Fixture::Fig3, Fixture::Fig4] {
        let g = fixture(f);
        let mut expected = g.classify_all();
        expected.sort();
        for seed in 0..10 {
            for keep in [true, false] {
                let mut got = reshuffled(&g, seed, keep).classify_all();
                got.sort();
                assert_eq!(got, expected, "{f} seed {seed} keep_proxies {keep}");
            }
        }
    }
}

#[test]
fn fig4_classification_table() {
    let got = fixture(Fixture::Fig4).classify_all();
    assert_eq!(
        got,
        vec![
            ("R_RCT".to_string(), MissingnessClass::Mcar),
            ("R_R".to_string(), MissingnessClass::Mar),
            ("R_O".to_string(), MissingnessClass::Mnar),
        ]
    );
}

proptest! {
    #[test]
    fn d_separation_is_symmetric(seed in any::<u64>(), n in 2usize..9, zmask in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _) = common::random_dag(n, 0.35, &mut rng);
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let z: Vec<&str> = (2..n).filter(|i| zmask & (1 << i) != 0).map(|i| names[i].as_str()).collect();
        let xy = g.d_separated(&[&names[0]], &[&names[1]], &z).unwrap();
        let yx = g.d_separated(&[&names[1]], &[&names[0]], &z).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn mcar_implies_mar_test_passes(seed in any::<u64>()) {
        // Random m-graph: one partially observed node, one indicator, a few others.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dag, edges) = common::random_dag(6, 0.3, &mut rng);
        let mut b = MGraph::builder();
        let roles = [
            NodeRole::FullyObserved,
            NodeRole::FullyObserved,
            NodeRole::PartiallyObserved,
            NodeRole::PartiallyObserved,
            NodeRole::MissingIndicator,
            NodeRole::FullyObserved,
        ];
        for (i, r) in roles.iter().enumerate() {
            b.add_node(&format!("v{i}"), *r);
        }
        for (a, c) in edges {
            b.add_edge(&format!("v{a}"), &format!("v{c}"));
        }
        b.add_proxy("v4", "v2");
        let g = b.build().unwrap();
        drop(dag);
        let class = g.classify_missingness("v4").unwrap();
        if class == MissingnessClass::Mcar {
            // Indicator separated from everything ⇒ also separated given V_o.
            let hidden = ["v2", "v3"];
            let observed = ["v0", "v1", "v5"];
            prop_assert!(g.d_separated(&hidden, &["v4"], &observed).unwrap());
        }
    }
}
