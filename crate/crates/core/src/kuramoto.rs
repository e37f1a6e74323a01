//! Phase oscillators on gain graphs.
//!
//! Every vertex carries a phase `theta_i` with frequency offset `eps_i`.
//! Edges pull neighbouring phases towards the lag set by their gain,
//!
//! ```text
//! dtheta_i/dt = eps_i + K/N  sum_j |a_ij| sin(theta_j - theta_i - arg a_ij)
//!                     + K'/N^3 sum_(j,l,m) c_ijlm sin(theta_j - theta_i + theta_l - theta_m)
//! ```
//!
//! so for gain-1 graphs equal phases attract. Integration is fixed-step RK4.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QlError, Result};
use crate::graph::GainGraph;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorEnsemble {
    /// Unwrapped phases; see [`OscillatorEnsemble::thetas`].
    phases: Vec<f64>,
    epsilons: Vec<f64>,
    pub k: f64,
    pub k_prime: f64,
    simplex: Vec<[usize; 4]>,
}

impl OscillatorEnsemble {
    /// `epsilons` must average to zero within 1e-9.
    pub fn new(thetas: Vec<f64>, epsilons: Vec<f64>, k: f64, k_prime: f64) -> Result<Self> {
        if thetas.len() != epsilons.len() {
            return Err(QlError::invalid("one frequency offset per oscillator required"));
        }
        if thetas.iter().chain(&epsilons).any(|x| !x.is_finite()) || !k.is_finite() || !k_prime.is_finite() {
            return Err(QlError::invalid("non-finite oscillator parameters"));
        }
        if !epsilons.is_empty() {
            let mean = epsilons.iter().sum::<f64>() / epsilons.len() as f64;
            if mean.abs() > 1e-9 {
                return Err(QlError::invalid(format!(
                    "frequency offsets must average to zero, mean is {mean:e}"
                )));
            }
        }
        Ok(OscillatorEnsemble {
            phases: thetas,
            epsilons,
            k,
            k_prime,
            simplex: Vec::new(),
        })
    }

    /// Uniform random phases, offsets drawn uniformly from `[-spread, spread]`
    /// and then centred.
    pub fn random(n: usize, spread: f64, k: f64, k_prime: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let thetas: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        let mut eps: Vec<f64> = (0..n)
            .map(|_| if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 })
            .collect();
        center(&mut eps);
        OscillatorEnsemble::new(thetas, eps, k, k_prime)
    }

    /// Attaches the 4-index coupling tensor as a list of unit entries.
    pub fn with_simplex(mut self, entries: Vec<[usize; 4]>) -> Result<Self> {
        let n = self.len();
        if let Some(e) = entries.iter().find(|e| e.iter().any(|&x| x >= n)) {
            return Err(QlError::invalid(format!("tensor entry {e:?} out of range for {n} oscillators")));
        }
        self.simplex = entries;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Phases wrapped to `(-pi, pi]`.
    pub fn thetas(&self) -> Vec<f64> {
        self.phases.iter().map(|&t| wrap(t)).collect()
    }

    /// Phases as integrated, without wrapping.
    pub fn unwrapped(&self) -> &[f64] {
        &self.phases
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn simplex(&self) -> &[[usize; 4]] {
        &self.simplex
    }
}

/// Subtracts the mean.
pub fn center(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= m;
    }
}

/// Neighbour lists with `(j, |a_ij|, arg a_ij)`.
struct Coupling {
    rows: Vec<Vec<(usize, f64, f64)>>,
}

impl Coupling {
    fn new(g: &GainGraph, n: usize) -> Result<Self> {
        if g.n_vertices() != n {
            return Err(QlError::invalid(format!(
                "graph has {} vertices, ensemble has {n} oscillators",
                g.n_vertices()
            )));
        }
        let mut rows = vec![Vec::new(); n];
        for (u, v, z) in g.edges() {
            rows[u].push((v, z.norm(), z.arg()));
            rows[v].push((u, z.norm(), -z.arg()));
        }
        Ok(Coupling { rows })
    }
}

fn rhs_pairwise(e: &OscillatorEnsemble, c: &Coupling, th: &[f64], out: &mut [f64]) {
    let n = th.len();
    let kn = if n > 0 { e.k / n as f64 } else { 0.0 };
    for i in 0..n {
        let s: f64 = c.rows[i].iter().map(|&(j, w, lag)| w * (th[j] - th[i] - lag).sin()).sum();
        out[i] = e.epsilons[i] + kn * s;
    }
}

fn rhs_full(e: &OscillatorEnsemble, c: &Coupling, th: &[f64], out: &mut [f64]) {
    rhs_pairwise(e, c, th, out);
    let n = th.len() as f64;
    let kn3 = e.k_prime / (n * n * n);
    let mut extra = vec![0.0; th.len()];
    for &[i, j, l, m] in &e.simplex {
        extra[i] += (th[j] - th[i] + th[l] - th[m]).sin();
    }
    for (o, x) in out.iter_mut().zip(extra) {
        *o += kn3 * x;
    }
}

fn rk4<F>(e: &OscillatorEnsemble, c: &Coupling, dt: f64, f: F) -> Vec<f64>
where
    F: Fn(&OscillatorEnsemble, &Coupling, &[f64], &mut [f64]),
{
    let n = e.len();
    let y = &e.phases;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    f(e, c, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    f(e, c, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    f(e, c, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    f(e, c, &tmp, &mut k4);
    (0..n)
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// One RK4 step of the pairwise dynamics (the tensor term is ignored).
pub fn step_pairwise(e: &OscillatorEnsemble, g: &GainGraph, dt: f64) -> Result<OscillatorEnsemble> {
    let c = Coupling::new(g, e.len())?;
    Ok(OscillatorEnsemble {
        phases: rk4(e, &c, dt, rhs_pairwise),
        ..e.clone()
    })
}

/// One RK4 step including the tensor term.
pub fn step_higher_order(e: &OscillatorEnsemble, g: &GainGraph, dt: f64) -> Result<OscillatorEnsemble> {
    let c = Coupling::new(g, e.len())?;
    Ok(OscillatorEnsemble {
        phases: rk4(e, &c, dt, rhs_full),
        ..e.clone()
    })
}

/// `(r, psi)` with `r e^{i psi} = mean of e^{i theta_j}`.
pub fn order_parameter(e: &OscillatorEnsemble) -> (f64, f64) {
    order_of(&e.phases)
}

fn order_of(th: &[f64]) -> (f64, f64) {
    if th.is_empty() {
        return (0.0, 0.0);
    }
    let z: Complex64 = th.iter().map(|&t| Complex64::from_polar(1.0, t)).sum::<Complex64>() / th.len() as f64;
    (z.norm(), z.arg())
}

/// Conjugation by `diag(e^{i theta})`: gain `(i, j)` picks up
/// `e^{i (theta_i - theta_j)}`.
pub fn phases_to_gains(g: &GainGraph, thetas: &[f64]) -> Result<GainGraph> {
    if thetas.len() != g.n_vertices() {
        return Err(QlError::invalid(format!(
            "{} phases for {} vertices",
            thetas.len(),
            g.n_vertices()
        )));
    }
    g.map_gains(|u, v, z| z * Complex64::from_polar(1.0, thetas[u] - thetas[v]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Steps between recorded points.
    pub record_every: usize,
    pub seed: u64,
    /// Stop once `r` varies by less than this over 100 recorded points.
    pub convergence_threshold: f64,
    /// Include the tensor term.
    pub higher_order: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.01,
            t_max: 200.0,
            record_every: 10,
            seed: 0,
            convergence_threshold: 1e-5,
            higher_order: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(QlError::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max > self.dt) || !self.t_max.is_finite() {
            return Err(QlError::invalid("t_max must exceed dt"));
        }
        if self.record_every == 0 {
            return Err(QlError::invalid("record_every must be at least 1"));
        }
        if !(self.convergence_threshold >= 0.0) {
            return Err(QlError::invalid("convergence threshold must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub r: f64,
    pub psi: f64,
    /// Circular mean phase of every label block.
    pub block_means: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub t_final: f64,
    pub steps: usize,
    pub r: f64,
    pub psi: f64,
    /// Stopped on the plateau test rather than at `t_max`.
    pub plateau: bool,
    pub block_names: Vec<String>,
    pub block_mean: Vec<f64>,
    /// Circular standard deviation `sqrt(-2 ln R_block)` per block.
    pub block_sd: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Vec<TrajectoryPoint>,
    pub report: SimReport,
    pub final_state: OscillatorEnsemble,
}

impl Simulation {
    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("t,r,psi");
        for name in &self.report.block_names {
            s.push_str(&format!(",mean_{name}"));
        }
        s.push('\n');
        for p in &self.trajectory {
            s.push_str(&format!("{},{},{}", p.t, p.r, p.psi));
            for m in &p.block_means {
                s.push_str(&format!(",{m}"));
            }
            s.push('\n');
        }
        s
    }
}

fn block_stats(th: &[f64], block_of: &[usize], n_blocks: usize) -> (Vec<f64>, Vec<f64>) {
    let mut sums = vec![Complex64::new(0.0, 0.0); n_blocks];
    let mut counts = vec![0usize; n_blocks];
    for (&t, &b) in th.iter().zip(block_of) {
        sums[b] += Complex64::from_polar(1.0, t);
        counts[b] += 1;
    }
    let mut means = Vec::with_capacity(n_blocks);
    let mut sds = Vec::with_capacity(n_blocks);
    for (z, c) in sums.into_iter().zip(counts) {
        let m = z / c.max(1) as f64;
        means.push(m.arg());
        sds.push((-2.0 * m.norm().min(1.0).ln()).max(0.0).sqrt());
    }
    (means, sds)
}

/// Integrates until `t_max` or an order-parameter plateau.
///
/// Aborts with [`QlError::Diverged`] if a phase becomes non-finite or moves
/// by more than `pi / 2` in one step, either of which means `dt` is too
/// large for the coupling.
pub fn simulate(e: &OscillatorEnsemble, g: &GainGraph, cfg: &SimConfig) -> Result<Simulation> {
    cfg.validate()?;
    let c = Coupling::new(g, e.len())?;
    let (names, block_of) = g.blocks();
    let nb = names.len();
    let record = |t: f64, th: &[f64]| {
        let (r, psi) = order_of(th);
        TrajectoryPoint {
            t,
            r,
            psi,
            block_means: block_stats(th, &block_of, nb).0,
        }
    };
    let total_steps = (cfg.t_max / cfg.dt).round() as usize;
    let mut state = e.clone();
    let mut trajectory = vec![record(0.0, &state.phases)];
    let mut plateau = false;
    let mut steps = 0;
    while steps < total_steps {
        let next = if cfg.higher_order {
            rk4(&state, &c, cfg.dt, rhs_full)
        } else {
            rk4(&state, &c, cfg.dt, rhs_pairwise)
        };
        steps += 1;
        let t = steps as f64 * cfg.dt;
        for (a, b) in next.iter().zip(&state.phases) {
            if !a.is_finite() {
                return Err(QlError::Diverged {
                    t,
                    reason: "phase became non-finite; reduce dt".into(),
                });
            }
            if (a - b).abs() > PI / 2.0 {
                return Err(QlError::Diverged {
                    t,
                    reason: format!("phase jumped by {:.3} rad in one step; reduce dt", (a - b).abs()),
                });
            }
        }
        state.phases = next;
        if steps % cfg.record_every == 0 {
            trajectory.push(record(t, &state.phases));
            if trajectory.len() > 100 {
                let tail = &trajectory[trajectory.len() - 101..];
                let lo = tail.iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
                let hi = tail.iter().map(|p| p.r).fold(f64::NEG_INFINITY, f64::max);
                if hi - lo < cfg.convergence_threshold {
                    plateau = true;
                    break;
                }
            }
        }
    }
    let (r, psi) = order_of(&state.phases);
    let (block_mean, block_sd) = block_stats(&state.phases, &block_of, nb);
    Ok(Simulation {
        trajectory,
        report: SimReport {
            t_final: steps as f64 * cfg.dt,
            steps,
            r,
            psi,
            plateau,
            block_names: names,
            block_mean,
            block_sd,
        },
        final_state: state,
    })
}
