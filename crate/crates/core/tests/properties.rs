mod common;

use common::{build, g2_oracle, inflate, random_pairing};
use proptest::prelude::*;
use pseudo3::generators::{normalize_labels, random_in_scope, GeneratorKind, Profile};
use pseudo3::io::{parse_json, parse_tet, write_json, write_tet};
use pseudo3::is_isomorphic;
use pseudo3::moves::bistellar_1_move;
use pseudo3::reduction::{decompose, verify_certificate, Certificate, Mode};
use pseudo3::rigidity::{generic_embedding, stress_space_dim};
use pseudo3::surgery::{connected_sum, relabel_above, split_connected_sum, Split};
use pseudo3::weights::{lambda_value_set, WeightTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn profile(choice: u8) -> Profile {
    match choice % 5 {
        0 => Profile::Sphere,
        1 => Profile::OneSingularity { handles: 1 },
        2 => Profile::OneSingularity { handles: 2 },
        3 => Profile::TwoSingularities { m: 1 },
        _ => Profile::TwoSingularities { m: 2 },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn in_scope_complexes_decompose_and_verify(choice in 0u8..5, seed in 100u64..10_000) {
        let p = profile(choice);
        let k = random_in_scope(p, seed).unwrap();
        prop_assert!(g2_oracle(&k) <= p.g2_bound());
        let cert = decompose(&k, Mode::Strict).unwrap();
        prop_assert!(verify_certificate(&k, &cert));
        prop_assert_eq!(cert.summary.vertex_folds, p.vertex_folds());
        prop_assert_eq!(cert.summary.edge_folds, p.edge_folds());
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        prop_assert!(verify_certificate(&k, &back));
    }

    #[test]
    fn sums_add_g2_and_split_back(a in 2usize..5, b in 2usize..5, inflate_by in 0usize..4, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = inflate(&build(GeneratorKind::ChainSum { k: a }, true), inflate_by, &mut rng);
        let k2 = relabel_above(&build(GeneratorKind::ChainSum { k: b }, true), k1.max_label()).unwrap();
        let s = *k1.facets().next().unwrap();
        let t = *k2.facets().last().unwrap();
        let psi = random_pairing(s, t, &mut rng).unwrap();
        let sum = connected_sum(&k1, &k2, &psi).unwrap();
        prop_assert_eq!(g2_oracle(&sum), g2_oracle(&k1) + g2_oracle(&k2));
        prop_assert!(sum.is_normal());
        match split_connected_sum(&sum, s).unwrap() {
            Split::Sum { left, right, .. } => {
                let parts = [left, right];
                let matches_k1 = parts.iter().any(|p| is_isomorphic(p, &k1).is_some());
                let matches_k2 = parts.iter().any(|p| is_isomorphic(p, &k2).is_some());
                prop_assert!(matches_k1 && matches_k2);
            }
            Split::Handle(_) => prop_assert!(false, "a sum split as a handle"),
        }
    }

    #[test]
    fn facet_files_round_trip(choice in 0u8..5, seed in 0u64..50) {
        let k = random_in_scope(profile(choice), seed).unwrap();
        prop_assert_eq!(parse_tet(&write_tet(&k)).unwrap(), k.clone());
        prop_assert_eq!(parse_json(&write_json(&k)).unwrap(), k);
    }

    #[test]
    fn relabelling_preserves_isomorphism_type(n in 1usize..3, seed in 1u64..1000) {
        let k = build(GeneratorKind::SharpOneSingularity { n }, seed % 2 == 0);
        let shuffled = normalize_labels(&k, seed).unwrap();
        prop_assert_eq!(shuffled.f_vector(), k.f_vector());
        prop_assert!(is_isomorphic(&k, &shuffled).is_some());
    }

    #[test]
    fn lambda_takes_only_the_five_values(choice in 1u8..5, seed in 0u64..40) {
        let k = random_in_scope(profile(choice), seed).unwrap();
        let values = lambda_value_set();
        for (t, _) in k.singular_vertices() {
            let table = WeightTable::new(&k, t).unwrap();
            for e in k.edges() {
                prop_assert!(values.contains(&table.get(e[0], e[1]).unwrap()));
                prop_assert!(values.contains(&table.get(e[1], e[0]).unwrap()));
            }
        }
    }

    #[test]
    fn each_bistellar_one_move_adds_a_stress(picks in proptest::collection::vec(0usize..500, 1..4), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut k = inflate(&build(GeneratorKind::ChainSum { k: 3 }, true), 1, &mut rng);
        for p in picks {
            let tris: Vec<_> = k.triangles().copied().collect();
            let t = tris[p % tris.len()];
            if let Ok((next, _)) = bistellar_1_move(&k, t[0], t[1], t[2]) {
                k = next;
            }
        }
        let dim = stress_space_dim(&k, &generic_embedding(&k, seed)) as i64;
        prop_assert_eq!(dim, g2_oracle(&k));
    }
}
