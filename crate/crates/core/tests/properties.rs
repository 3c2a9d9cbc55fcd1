mod common;

use std::collections::BTreeMap;

use bicover::extension::bicovering_completion;
use bicover::io::{GraphDoc, MatrixDoc};
use bicover::spectral::graph_spectral_radius;
use bicover::{higher_graph, higher_homomorphism, IntMatrix};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn rows_strategy() -> impl Strategy<Value = Rows> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u64..=2, n), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_round_trip(rows in rows_strategy()) {
        let g = graph(&rows);
        prop_assert_eq!(g.adjacency_matrix().to_rows(), rows.clone());
        let doc = MatrixDoc::adjacency(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: MatrixDoc = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_matrix().unwrap(), IntMatrix::from_rows(&rows).unwrap());
        let gdoc = GraphDoc::from_graph(&g);
        prop_assert_eq!(GraphDoc::from_graph(&gdoc.to_graph().unwrap()), gdoc);
    }

    #[test]
    fn essentialize_is_idempotent(rows in rows_strategy()) {
        let g = graph(&rows);
        let once = g.essentialize();
        prop_assert!(once.is_essential());
        prop_assert_eq!(GraphDoc::from_graph(&once.essentialize()), GraphDoc::from_graph(&once));
        let alive = oracle_essential_vertices(&g);
        prop_assert_eq!(once.vertex_count(), alive.iter().filter(|&&a| a).count());
    }

    #[test]
    fn radius_invariant_under_higher_graphs(rows in rows_strategy(), order in 2usize..=3) {
        let g = graph(&rows).essentialize();
        let lg = graph_spectral_radius(&g);
        let lh = graph_spectral_radius(&higher_graph(&g, order).graph);
        prop_assert!((lg - lh).abs() < 1e-9, "{} vs {}", lg, lh);
    }

    #[test]
    fn higher_homomorphisms_stay_bi_resolving(seed in any::<u64>(), order in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = random_irreducible(&mut rng, 3, 2);
        let n = rng.gen_range(1..=4);
        let phi = random_biresolving(&mut rng, &h, n, 0.8);
        let hh = higher_homomorphism(&phi, order);
        prop_assert!(oracle_profile(&hh.map).0);
    }

    /// Preimage paths of one codomain path never share a vertex at the same
    /// position.
    #[test]
    fn bicovering_preimages_are_separated(seed in any::<u64>(), len in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let h = random_irreducible(&mut rng, 3, 2);
        let n = rng.gen_range(1..=4);
        let phi = random_biresolving(&mut rng, &h, n, 0.8);
        let d = oracle_degree(&phi).max(1);
        let cover = bicovering_completion(&phi, d).unwrap().extension;
        prop_assert!(oracle_profile(&cover).1);
        let g = cover.domain();
        let mut by_image: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
        for p in g.paths(len) {
            by_image.entry(cover.map_path(&p)).or_default().push(p);
        }
        for paths in by_image.values() {
            for (i, a) in paths.iter().enumerate() {
                for b in &paths[i + 1..] {
                    for k in 0..len {
                        prop_assert_ne!(g.edge(a[k]).src, g.edge(b[k]).src);
                        prop_assert_ne!(g.edge(a[k]).dst, g.edge(b[k]).dst);
                    }
                }
            }
        }
    }
}
