mod common;

use std::f64::consts::{PI, TAU};

use common::{c, random_gain_graph};
use num_complex::Complex64;
use proptest::prelude::*;
use qlgraph::spectral::{eigendecompose, graph_spectrum, ideal_projection, ql_bit_emergent_state};
use qlgraph::{build_ql_bit, QlBitSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigenpairs_have_small_residuals(n in 1usize..24, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = random_gain_graph(n, p, false, seed);
        let a = g.adjacency_matrix();
        let s = eigendecompose(&a).unwrap();
        prop_assert!(s.max_residual(&a) < 1e-8);
        // equal eigenvalues within 1e-9 are ordered by their vectors
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-9));
        let oracle = common::oracle_eigenvalues(&a);
        for (x, y) in s.eigenvalues.iter().zip(&oracle) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

fn sweep() -> Vec<Vec<Complex64>> {
    let base = QlBitSpec::new(40, 10, c(1.0, 0.0), 0.15, 21);
    (0..16)
        .map(|k| {
            let bias = Complex64::from_polar(1.0, TAU * k as f64 / 16.0);
            let bit = build_ql_bit(&QlBitSpec { coupling_bias: bias, ..base }).unwrap();
            let es = ql_bit_emergent_state(&bit).unwrap();
            let ideal = ideal_projection(bias);
            for (x, y) in es.projection.iter().zip(&ideal) {
                assert!((x - y).norm() < 2e-2, "bias {bias}: {:?} vs {:?}", es.projection, ideal);
            }
            es.projection
        })
        .collect()
}

#[test]
fn bias_sweep_is_one_to_one() {
    let p = sweep();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d: f64 = p[i].iter().zip(&p[j]).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            // neighbouring sweep points differ by about 2 pi / 16 / sqrt 2
            assert!(d > 0.1, "biases {i} and {j} map to the same state");
        }
    }
}

#[test]
fn two_states_emerge_from_the_bulk() {
    for (seed, n, d) in [(1, 30, 8), (2, 40, 10), (3, 50, 12)] {
        for bias in [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, 3.0 * PI / 4.0)] {
            let bit = build_ql_bit(&QlBitSpec::new(n, d, bias, 0.05, seed)).unwrap();
            let s = graph_spectrum(&bit.graph).unwrap();
            let (l1, l2, l3) = (s.eigenvalues[0], s.eigenvalues[1], s.eigenvalues[2]);
            assert!(l1 - l3 > 1.0 && l2 - l3 > 1.0, "n={n} d={d}: {l1} {l2} {l3}");
        }
    }
}
