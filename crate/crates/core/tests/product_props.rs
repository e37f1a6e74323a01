mod common;

use common::{c, clusters, max_abs, oracle_eigh, projector, random_gain_graph};
use proptest::prelude::*;
use qlgraph::product::{
    boolean_poset, cartesian_product, compose_spectrum, emergent_product_state, hypercube_check, optimized_product,
    product_of_bits, quotient, zero_coupling_block_count, zero_coupling_block_count_brute,
};
use qlgraph::spectral::graph_spectrum;
use qlgraph::{build_ql_bit, QlBitSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composed_spectrum_matches_direct(n in 1usize..9, m in 1usize..9, p in 0.2f64..0.9, s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = random_gain_graph(n, p, false, s1);
        let h = random_gain_graph(m, p, false, s2);
        let composed = compose_spectrum(&graph_spectrum(&g).unwrap(), &graph_spectrum(&h).unwrap()).unwrap();
        let prod = cartesian_product(&g, &h).unwrap();
        let (vals, vecs) = oracle_eigh(&prod.graph.adjacency_matrix());
        for (x, y) in composed.eigenvalues.iter().zip(&vals) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        for r in clusters(&vals, 1e-6) {
            let d = max_abs(&(projector(&composed.eigenvectors, r.clone()) - projector(&vecs, r)));
            prop_assert!(d < 1e-6);
        }
    }

    #[test]
    fn product_edges_change_one_coordinate(n in 2usize..7, m in 2usize..7, k in 2usize..5, seed in any::<u64>()) {
        let a = random_gain_graph(n, 0.6, false, seed);
        let b = random_gain_graph(m, 0.6, false, seed ^ 1);
        let cc = random_gain_graph(k, 0.6, false, seed ^ 2);
        let p = qlgraph::product::cartesian_product_all(&[&a, &b, &cc], vec![None; 3]).unwrap();
        prop_assert!(p.edge_rule_violations().is_empty());
        prop_assert_eq!(
            p.graph.edge_count(),
            a.edge_count() * m * k + b.edge_count() * n * k + cc.edge_count() * n * m
        );
    }
}

#[test]
fn product_state_is_tensor_of_factor_states() {
    let a = build_ql_bit(&QlBitSpec::new(30, 8, c(0.0, 1.0), 0.1, 1)).unwrap();
    let b = build_ql_bit(&QlBitSpec::new(30, 8, num_complex::Complex64::from_polar(1.0, -1.0), 0.1, 2)).unwrap();
    let assembled = emergent_product_state(&[a.clone(), b.clone()]).unwrap();
    let direct = product_of_bits(&[a, b]).unwrap().emergent_state().unwrap();
    for (x, y) in assembled.projection.iter().zip(&direct.projection) {
        assert!((x - y).norm() < 3e-2, "{:?} vs {:?}", assembled.projection, direct.projection);
    }
    assert!((assembled.eigenvalue - direct.eigenvalue).abs() < 1e-8);
}

#[test]
fn census_formula_matches_enumeration() {
    assert_eq!(zero_coupling_block_count(2).unwrap(), 2);
    assert_eq!(zero_coupling_block_count(3).unwrap(), 16);
    for q in 1..=8 {
        assert_eq!(zero_coupling_block_count(q).unwrap(), zero_coupling_block_count_brute(q).unwrap());
    }
}

#[test]
fn optimized_product_is_smaller_and_cube_shaped() {
    for q in 2..=4usize {
        let bits: Vec<_> = (0..q)
            .map(|k| build_ql_bit(&QlBitSpec::new(8, 3, c(1.0, 0.0), 0.2, k as u64)).unwrap())
            .collect();
        let p = optimized_product(&bits, 99).unwrap();
        assert_eq!(p.n_vertices(), 8 << q);
        assert!(p.n_vertices() < 16usize.pow(q as u32));
        let report = hypercube_check(&quotient(&p), q);
        assert!(report.is_hypercube, "{:?}", report.reason);
        let cert = report.certificate.unwrap();
        let qg = quotient(&p);
        for &(x, y) in &qg.edges {
            assert_eq!((cert[x] ^ cert[y]).count_ones(), 1);
        }
        let poset = boolean_poset(q).unwrap();
        assert_eq!(poset.covers().len(), qg.edges.len());
    }
}
