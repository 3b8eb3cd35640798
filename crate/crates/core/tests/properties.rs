use congest_apsp::oracle::{oracle_apsp, oracle_hhop};
use congest_apsp::{parse_graph, run_apsp, ApspConfig, Edge, Graph, WeightedDigraph};
use proptest::prelude::*;

/// Connected graphs: a random spanning tree plus extra edges.
fn graph_strategy() -> impl Strategy<Value = Graph> {
    (3usize..=12, any::<bool>(), 1u64..=20).prop_flat_map(|(n, directed, w_max)| {
        let tree = proptest::collection::vec((any::<prop::sample::Index>(), 1..=w_max, any::<bool>()), n - 1);
        let extra = proptest::collection::vec((1..=n, 1..=n, 1..=w_max), 0..2 * n);
        (Just(n), Just(directed), tree, extra).prop_map(|(n, directed, tree, extra)| {
            let mut edges: Vec<Edge<u64>> = Vec::new();
            let mut seen = std::collections::BTreeSet::new();
            let mut push = |u: usize, v: usize, w: u64| {
                let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
                if u != v && seen.insert(key) {
                    edges.push(Edge { from: u, to: v, weight: w });
                }
            };
            for (i, (idx, w, flip)) in tree.into_iter().enumerate() {
                let v = i + 2;
                let u = idx.index(v - 1) + 1;
                if flip {
                    push(v, u, w);
                } else {
                    push(u, v, w);
                }
            }
            for (u, v, w) in extra {
                push(u, v, w);
            }
            WeightedDigraph::new(n, directed, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn protocol_equals_floyd_warshall(g in graph_strategy(), h_pick in 0usize..100) {
        let n = g.node_count();
        let h = 1 + h_pick % (n - 1);
        let run = run_apsp(&g, &ApspConfig::with_h(h)).unwrap();
        let oracle = oracle_apsp(&g);
        prop_assert_eq!(&run.distances, &oracle);
        prop_assert!(run.total.rounds <= run.budget());
        for u in 1..=n {
            prop_assert_eq!(run.hop_distances.row(u), &oracle_hhop(&g, u, h)[..]);
            for v in 1..=n {
                prop_assert!(run.distances.get(u, v) <= run.hop_distances.get(u, v));
            }
        }
    }

    #[test]
    fn matrix_is_a_metric(g in graph_strategy()) {
        let m = run_apsp(&g, &ApspConfig::default()).unwrap().distances;
        let n = g.node_count();
        for u in 1..=n {
            prop_assert!(m.get(u, u).value() == Some(0));
            for v in 1..=n {
                if !g.is_directed() {
                    prop_assert_eq!(m.get(u, v), m.get(v, u));
                }
                for c in 1..=n {
                    prop_assert!(m.get(u, v) <= m.get(u, c).plus(m.get(c, v)));
                }
            }
        }
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy()) {
        let text = g.to_edge_list();
        let back: Graph = parse_graph(&text).unwrap();
        prop_assert_eq!(back.to_edge_list(), text);
        prop_assert_eq!(back, g);
    }
}
