//! Non-separability experiments on two-bit products.
//!
//! A Cartesian product of two QL bits never joins blocks `a1b2` and `a2b1`
//! (they differ in both coordinates). Adding edges there makes the emergent
//! state non-separable; scaling down the inherited coupling edges pushes
//! it further from a product state.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{concurrence, TwoBitState};
use crate::error::{QlError, Result};
use crate::linalg::SparseHermitian;
use crate::product::{product_of_bits, ProductGraph, ProductKind};
use crate::qlbit::{build_ql_bit, QlBitSpec};
use crate::spectral::emergent_state_of;

/// Extra edges joining `a1b2` to `a2b1` in a two-bit Cartesian product.
///
/// For every `u` in `a1`, `v` in `a2` and local index `k`, the vertices
/// `(u, b2[k])` and `(v, b1[k])` are joined with probability `probability`.
/// This mirrors how a single factor couples its own subgraphs, so each
/// vertex of the two blocks gains about `probability * |a2|` edges.
pub fn sample_cross_edges(p: &ProductGraph, probability: f64, seed: u64) -> Result<Vec<(usize, usize)>> {
    if p.kind != ProductKind::Cartesian || p.block_radix != [2, 2] {
        return Err(QlError::invalid("cross edges need a two-bit Cartesian product"));
    }
    if !(0.0..=1.0).contains(&probability) {
        return Err(QlError::invalid(format!("probability {probability} outside [0, 1]")));
    }
    let nb = p.factor_sizes[1];
    let mut a: [BTreeSet<usize>; 2] = Default::default();
    let mut b: [BTreeSet<usize>; 2] = Default::default();
    for v in 0..p.n_vertices() {
        let t = p.block_index(v);
        a[t[0]].insert(v / nb);
        b[t[1]].insert(v % nb);
    }
    let a1: Vec<usize> = a[0].iter().copied().collect();
    let a2: Vec<usize> = a[1].iter().copied().collect();
    let b1: Vec<usize> = b[0].iter().copied().collect();
    let b2: Vec<usize> = b[1].iter().copied().collect();
    let m = b1.len().min(b2.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &u in &a1 {
        for &v in &a2 {
            for k in 0..m {
                if rng.gen::<f64>() < probability {
                    out.push((u * nb + b2[k], v * nb + b1[k]));
                }
            }
        }
    }
    Ok(out)
}

/// Emergent two-bit state of an augmented product.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    pub state: TwoBitState,
    pub concurrence: f64,
    pub eigenvalue: f64,
    pub gap: f64,
}

/// Adds `extra_edges` (gain 1) to a two-bit product, multiplies every
/// inherited inter-block coupling edge by `inherited_weight`, and returns
/// the emergent state on the four blocks with its concurrence.
///
/// Every extra edge must join blocks that differ in both coordinates.
pub fn nonseparable_experiment(
    base: &ProductGraph,
    extra_edges: &[(usize, usize)],
    inherited_weight: f64,
) -> Result<ExperimentOutcome> {
    if base.block_radix != [2, 2] {
        return Err(QlError::invalid("the experiment needs a two-bit product"));
    }
    if !(inherited_weight > 0.0) || !inherited_weight.is_finite() {
        return Err(QlError::invalid(format!("inherited weight must be positive, got {inherited_weight}")));
    }
    let n = base.n_vertices();
    let mut seen = BTreeSet::new();
    for &(u, v) in extra_edges {
        if u >= n || v >= n || u == v {
            return Err(QlError::invalid(format!("extra edge ({u}, {v}) is malformed")));
        }
        let (tu, tv) = (base.block_index(u), base.block_index(v));
        let differing = tu.iter().zip(&tv).filter(|(x, y)| x != y).count();
        if differing < 2 {
            return Err(QlError::invalid(format!(
                "extra edge ({u}, {v}) joins {} and {}, which is not a zero-coupling block",
                base.block_label(base.block_of[u]),
                base.block_label(base.block_of[v])
            )));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(QlError::invalid(format!("extra edge ({u}, {v}) repeated")));
        }
    }
    let block_of = &base.block_of;
    let inherited = base.graph.edges().map(|(u, v, z)| {
        let w = if block_of[u] != block_of[v] { inherited_weight } else { 1.0 };
        (u, v, z * w)
    });
    let extra = extra_edges.iter().map(|&(u, v)| (u, v, Complex64::new(1.0, 0.0)));
    let op = SparseHermitian::from_edges(n, inherited.chain(extra));
    let es = emergent_state_of(&op, block_of, 4)?;
    let state = TwoBitState::from_slice(&es.projection)?;
    Ok(ExperimentOutcome {
        concurrence: concurrence(&state),
        state,
        eigenvalue: es.eigenvalue,
        gap: es.gap,
    })
}

/// The three rows of the two-bit experiment table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PaperExperiment {
    /// Plain product.
    V1,
    /// Product plus `a1b2`-`a2b1` edges.
    V2,
    /// As V2 with inherited coupling edges weighted by 0.01.
    V3,
}

impl PaperExperiment {
    pub fn all() -> [PaperExperiment; 3] {
        [PaperExperiment::V1, PaperExperiment::V2, PaperExperiment::V3]
    }

    pub fn name(&self) -> &'static str {
        match self {
            PaperExperiment::V1 => "paper-v1",
            PaperExperiment::V2 => "paper-v2",
            PaperExperiment::V3 => "paper-v3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        PaperExperiment::all().into_iter().find(|e| e.name() == s)
    }

    pub fn inherited_weight(&self) -> f64 {
        match self {
            PaperExperiment::V3 => 0.01,
            _ => 1.0,
        }
    }

    pub fn adds_cross_edges(&self) -> bool {
        *self != PaperExperiment::V1
    }
}

/// Substrate and edge-addition parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_per_subgraph: usize,
    pub degree: usize,
    pub coupling_probability: f64,
    pub bias: Complex64,
    pub extra_probability: f64,
    /// Overrides the variant's inherited weight when set.
    pub inherited_weight: Option<f64>,
}

impl Default for ExperimentConfig {
    /// Two identical-parameter QL bits of 60-vertex, 40-regular subgraphs,
    /// bias 1, extra edges drawn with the coupling probability.
    fn default() -> Self {
        ExperimentConfig {
            n_per_subgraph: 60,
            degree: 40,
            coupling_probability: 0.2,
            bias: Complex64::new(1.0, 0.0),
            extra_probability: 0.2,
            inherited_weight: None,
        }
    }
}

/// One seed of one variant.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: PaperExperiment,
    pub seed: u64,
    pub coefficients: [Complex64; 4],
    pub concurrence: f64,
    pub eigenvalue: f64,
    pub gap: f64,
    pub extra_edges: usize,
}

impl ExperimentReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "coefficients": self.coefficients.iter().map(|z| serde_json::json!({"re": z.re, "im": z.im})).collect::<Vec<_>>(),
            "concurrence": self.concurrence,
        })
    }

    pub fn paired_magnitudes(&self) -> (f64, f64) {
        let a = &self.coefficients;
        ((a[0].norm() + a[3].norm()) / 2.0, (a[1].norm() + a[2].norm()) / 2.0)
    }
}

/// Mean and spread over seeds.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSummary {
    pub experiment: PaperExperiment,
    pub reports: Vec<ExperimentReport>,
    pub mean_concurrence: f64,
    pub sd_concurrence: f64,
    /// Mean modulus on `(a1b1, a2b2)`.
    pub mean_diagonal: f64,
    /// Mean modulus on `(a1b2, a2b1)`.
    pub mean_cross: f64,
}

impl EnsembleSummary {
    fn from_reports(experiment: PaperExperiment, reports: Vec<ExperimentReport>) -> Self {
        let k = reports.len() as f64;
        let mean = reports.iter().map(|r| r.concurrence).sum::<f64>() / k;
        let var = if reports.len() > 1 {
            reports.iter().map(|r| (r.concurrence - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        let mean_diagonal = reports.iter().map(|r| r.paired_magnitudes().0).sum::<f64>() / k;
        let mean_cross = reports.iter().map(|r| r.paired_magnitudes().1).sum::<f64>() / k;
        EnsembleSummary {
            experiment,
            reports,
            mean_concurrence: mean,
            sd_concurrence: var.sqrt(),
            mean_diagonal,
            mean_cross,
        }
    }

    pub const CSV_HEADER: &'static str = "experiment,seeds,mean_concurrence,sd_concurrence,mean_diagonal,mean_cross";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.experiment.name(),
            self.reports.len(),
            self.mean_concurrence,
            self.sd_concurrence,
            self.mean_diagonal,
            self.mean_cross
        )
    }
}

fn derived_seeds(seed: u64) -> [u64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [rng.gen(), rng.gen(), rng.gen()]
}

fn run_one(variants: &[PaperExperiment], cfg: &ExperimentConfig, seed: u64) -> Result<Vec<ExperimentReport>> {
    let [sa, sb, se] = derived_seeds(seed);
    let spec = |s| QlBitSpec::new(cfg.n_per_subgraph, cfg.degree, cfg.bias, cfg.coupling_probability, s);
    let base = product_of_bits(&[build_ql_bit(&spec(sa))?, build_ql_bit(&spec(sb))?])?;
    let extra = if variants.iter().any(|v| v.adds_cross_edges()) {
        sample_cross_edges(&base, cfg.extra_probability, se)?
    } else {
        Vec::new()
    };
    variants
        .iter()
        .map(|&v| {
            let edges: &[(usize, usize)] = if v.adds_cross_edges() { &extra } else { &[] };
            let w = cfg.inherited_weight.unwrap_or_else(|| v.inherited_weight());
            let out = nonseparable_experiment(&base, edges, w)?;
            Ok(ExperimentReport {
                experiment: v,
                seed,
                coefficients: out.state.amplitudes,
                concurrence: out.concurrence,
                eigenvalue: out.eigenvalue,
                gap: out.gap,
                extra_edges: edges.len(),
            })
        })
        .collect()
}

/// Runs `variants` over `seeds` in parallel. Each seed builds one substrate
/// (two QL bits and one draw of cross edges) shared by all variants.
pub fn run_paper_ensemble(
    variants: &[PaperExperiment],
    cfg: &ExperimentConfig,
    seeds: &[u64],
) -> Result<Vec<EnsembleSummary>> {
    if seeds.is_empty() || variants.is_empty() {
        return Err(QlError::invalid("need at least one seed and one variant"));
    }
    let per_seed: Vec<Vec<ExperimentReport>> = seeds
        .par_iter()
        .map(|&s| run_one(variants, cfg, s))
        .collect::<Result<_>>()?;
    Ok(variants
        .iter()
        .enumerate()
        .map(|(i, &v)| EnsembleSummary::from_reports(v, per_seed.iter().map(|r| r[i].clone()).collect()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> ProductGraph {
        let one = Complex64::new(1.0, 0.0);
        let a = build_ql_bit(&QlBitSpec::new(12, 6, one, 0.2, 1)).unwrap();
        let b = build_ql_bit(&QlBitSpec::new(12, 6, one, 0.2, 2)).unwrap();
        product_of_bits(&[a, b]).unwrap()
    }

    #[test]
    fn cross_edges_land_in_zero_coupling_blocks() {
        let p = small_base();
        let e = sample_cross_edges(&p, 0.2, 3).unwrap();
        // 12 * 12 * 12 draws at 0.2
        assert!((e.len() as f64 - 345.6).abs() < 4.0 * 13.9);
        for &(u, v) in &e {
            assert_eq!(p.block_label(p.block_of[u]), "a1b2");
            assert_eq!(p.block_label(p.block_of[v]), "a2b1");
        }
    }

    #[test]
    fn plain_product_is_separable() {
        let out = nonseparable_experiment(&small_base(), &[], 1.0).unwrap();
        assert!(out.concurrence < 1e-8, "{}", out.concurrence);
    }

    #[test]
    fn cross_edges_break_separability() {
        let p = small_base();
        let e = sample_cross_edges(&p, 0.2, 3).unwrap();
        let out = nonseparable_experiment(&p, &e, 1.0).unwrap();
        assert!(out.concurrence > 0.05);
        let (diag, cross) = out.state.paired_magnitudes();
        assert!(cross > diag);
    }

    #[test]
    fn edges_in_allowed_blocks_are_rejected() {
        let p = small_base();
        // (0, 0) -> (0, 12): a1b1 to a1b2 is an ordinary coupling block
        assert!(nonseparable_experiment(&p, &[(0, 12)], 1.0).is_err());
        assert!(nonseparable_experiment(&p, &[], 0.0).is_err());
    }
}
