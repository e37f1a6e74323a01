mod common;

use std::f64::consts::PI;

use common::{c, oracle_eigenvalues};
use num_complex::Complex64;
use proptest::prelude::*;
use qlgraph::kuramoto::{
    order_parameter, phases_to_gains, simulate, step_higher_order, step_pairwise, OscillatorEnsemble, SimConfig,
};
use qlgraph::spectral::{ideal_projection, ql_bit_emergent_state};
use qlgraph::{build_ql_bit, generate_d_regular, GainGraph, QlBit, QlBitSpec};

fn run(e: &OscillatorEnsemble, g: &GainGraph, dt: f64, t: f64) -> OscillatorEnsemble {
    let steps = (t / dt).round() as usize;
    let mut s = e.clone();
    for _ in 0..steps {
        s = step_higher_order(&s, g, dt).unwrap();
    }
    s
}

#[test]
fn mean_phase_is_conserved() {
    let g = generate_d_regular(10, 3, 4).unwrap();
    let e = OscillatorEnsemble::random(10, 0.0, 3.0, 0.0, 8).unwrap();
    let mean = |s: &OscillatorEnsemble| s.unwrapped().iter().sum::<f64>() / 10.0;
    let m0 = mean(&e);
    let mut s = e;
    for _ in 0..10_000 {
        s = step_pairwise(&s, &g, 0.01).unwrap();
    }
    assert!((mean(&s) - m0).abs() < 1e-6);
}

#[test]
fn rk4_is_fourth_order() {
    let g = generate_d_regular(10, 4, 2).unwrap();
    let e = OscillatorEnsemble::random(10, 1.0, 2.0, 0.0, 3).unwrap();
    let (dt, t) = (0.2, 4.0);
    let reference = run(&e, &g, dt / 8.0, t);
    let err = |s: &OscillatorEnsemble| {
        s.unwrapped()
            .iter()
            .zip(reference.unwrapped())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(&run(&e, &g, dt, t)), err(&run(&e, &g, dt / 2.0, t)));
    let ratio = e1 / e2;
    assert!(ratio > 12.0 && ratio < 20.0, "error ratio {ratio} ({e1:e} -> {e2:e})");
}

#[test]
fn four_index_term_closes_the_combination() {
    // one entry (1,2,3,4): X = th2 - th1 + th3 - th4 obeys X' = -(K'/N^3) sin X,
    // so tan(X/2) decays like exp(-K' t / N^3)
    let x0 = 0.3;
    let e = OscillatorEnsemble::new(vec![0.0, x0, 0.0, 0.0], vec![0.0; 4], 0.0, 64.0)
        .unwrap()
        .with_simplex(vec![[0, 1, 2, 3]])
        .unwrap();
    let g = GainGraph::new(4);
    let mut s = e;
    let mut last = x0;
    for k in 1..=20 {
        s = run(&s, &g, 0.01, 0.1);
        let th = s.unwrapped();
        let x = th[1] - th[0] + th[2] - th[3];
        assert!(x.abs() < last.abs());
        let exact = 2.0 * ((x0 / 2.0).tan() * (-0.1 * k as f64).exp()).atan();
        assert!((x - exact).abs() < 1e-9, "t = {}: {x} vs {exact}", 0.1 * k as f64);
        last = x;
    }
}

#[test]
fn ql_bit_synchronises_quickly() {
    let bit = build_ql_bit(&QlBitSpec::new(30, 8, c(1.0, 0.0), 0.2, 6)).unwrap();
    let e = OscillatorEnsemble::random(60, 0.0, 5.0, 0.0, 1).unwrap();
    let cfg = SimConfig { t_max: 50.0, convergence_threshold: 0.0, ..SimConfig::default() };
    let sim = simulate(&e, &bit.graph, &cfg).unwrap();
    assert!(sim.report.r > 0.99, "r = {}", sim.report.r);
    assert!(sim.report.block_sd.iter().all(|&s| s < 0.01));
}

#[test]
fn disconnected_clusters_drift_apart() {
    let g = GainGraph::cycle(6).disjoint_union(&GainGraph::cycle(6));
    let mut eps = vec![0.5; 6];
    eps.extend(vec![-0.5; 6]);
    let thetas = (0..12).map(|k| 0.05 * k as f64).collect();
    let e = OscillatorEnsemble::new(thetas, eps, 5.0, 0.0).unwrap();
    let cfg = SimConfig { t_max: 40.0, ..SimConfig::default() };
    let sim = simulate(&e, &g, &cfg).unwrap();
    assert!(!sim.report.plateau);
    let late: Vec<f64> = sim.trajectory.iter().filter(|p| p.t > 20.0).map(|p| p.r).collect();
    assert!(late.iter().cloned().fold(f64::INFINITY, f64::min) < 0.1);
    let th = sim.final_state.unwrapped();
    let one = OscillatorEnsemble::new(th[..6].to_vec(), vec![0.0; 6], 0.0, 0.0).unwrap();
    assert!(order_parameter(&one).0 > 0.99);
}

#[test]
fn phase_shift_on_one_subgraph_changes_the_bias() {
    let bias = Complex64::from_polar(1.0, 0.4);
    let bit = build_ql_bit(&QlBitSpec::new(30, 8, bias, 0.15, 2)).unwrap();
    let phi = 1.1;
    let thetas: Vec<f64> = (0..60).map(|v| if v < 30 { 0.0 } else { phi }).collect();
    let h = phases_to_gains(&bit.graph, &thetas).unwrap();
    let shifted = QlBit::from_graph(h).unwrap();
    assert!((shifted.spec.coupling_bias - bias * Complex64::from_polar(1.0, -phi)).norm() < 1e-12);
    let p = ql_bit_emergent_state(&shifted).unwrap().projection;
    let ideal = ideal_projection(bias * Complex64::from_polar(1.0, -phi));
    assert!((ideal[1] - Complex64::from_polar(1.0, phi) * bias.conj() / 2f64.sqrt()).norm() < 1e-12);
    for (x, y) in p.iter().zip(&ideal) {
        assert!((x - y).norm() < 2e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conjugation_keeps_the_spectrum(seed in any::<u64>(), phases in prop::collection::vec(-PI..PI, 40)) {
        let bit = build_ql_bit(&QlBitSpec::new(20, 6, Complex64::from_polar(1.0, 0.7), 0.15, seed)).unwrap();
        let h = phases_to_gains(&bit.graph, &phases).unwrap();
        let (a, b) = (oracle_eigenvalues(&bit.graph.adjacency_matrix()), oracle_eigenvalues(&h.adjacency_matrix()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }
}
