//! QL bit graphs: two random d-regular subgraphs joined by sparse coupling
//! edges that all carry the same complex bias.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QlError, Result};
use crate::graph::{is_unit, GainGraph};
use crate::regular::generate_d_regular_with;

/// Construction parameters of a QL bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlBitSpec {
    pub n_per_subgraph: usize,
    pub degree: usize,
    pub coupling_bias: Complex64,
    pub coupling_probability: f64,
    pub rng_seed: u64,
}

impl QlBitSpec {
    pub fn new(n_per_subgraph: usize, degree: usize, coupling_bias: Complex64, coupling_probability: f64, rng_seed: u64) -> Self {
        QlBitSpec {
            n_per_subgraph,
            degree,
            coupling_bias,
            coupling_probability,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, d, p) = (self.n_per_subgraph, self.degree, self.coupling_probability);
        if d >= n {
            return Err(QlError::invalid(format!(
                "degree {d} must be below the subgraph size {n}"
            )));
        }
        if (n * d) % 2 != 0 {
            return Err(QlError::Parity { n, d });
        }
        if !is_unit(self.coupling_bias) {
            return Err(QlError::invalid(format!(
                "coupling bias {} is not a complex unit",
                self.coupling_bias
            )));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(QlError::invalid(format!(
                "coupling probability {p} outside (0, 1]"
            )));
        }
        // coupling must stay sparse against the subgraph degree
        if p * n as f64 >= d as f64 {
            return Err(QlError::invalid(format!(
                "expected coupling edges per vertex {} not below degree {d}",
                p * n as f64
            )));
        }
        Ok(())
    }

    /// Expected cross-partition degree `p * n`.
    pub fn expected_cross_degree(&self) -> f64 {
        self.coupling_probability * self.n_per_subgraph as f64
    }
}

/// A realised QL bit. Vertices `0..n` form subgraph 1, `n..2n` subgraph 2.
#[derive(Debug, Clone, PartialEq)]
pub struct QlBit {
    pub graph: GainGraph,
    pub partition: [Vec<usize>; 2],
    pub spec: QlBitSpec,
    /// Some vertex ended up with no coupling edge.
    pub uncoupled_vertex: bool,
}

impl QlBit {
    pub fn n_per_subgraph(&self) -> usize {
        self.spec.n_per_subgraph
    }

    /// Subgraph index (0 or 1) of every vertex.
    pub fn side_of(&self) -> Vec<u8> {
        let n = self.spec.n_per_subgraph;
        (0..2 * n).map(|v| u8::from(v >= n)).collect()
    }

    pub fn coupling_edge_count(&self) -> usize {
        let n = self.spec.n_per_subgraph;
        self.graph.edges().filter(|&(u, v, _)| (u < n) != (v < n)).count()
    }

    /// Recovers a QL bit from a labelled graph (as read back from JSON).
    ///
    /// The graph must have exactly two equal-sized label classes listed
    /// contiguously, regular intra-subgraph structure with gains 1, and a
    /// single common gain on every coupling edge. The coupling probability
    /// is estimated as `edges / n^2`; the seed is unknown and set to 0.
    pub fn from_graph(graph: GainGraph) -> Result<QlBit> {
        let (names, block_of) = graph.blocks();
        if names.len() != 2 {
            return Err(QlError::invalid(format!(
                "a QL bit needs exactly two labelled subgraphs, found {}",
                names.len()
            )));
        }
        let total = graph.n_vertices();
        if total % 2 != 0 {
            return Err(QlError::invalid("odd vertex count for a QL bit"));
        }
        let n = total / 2;
        if block_of.iter().enumerate().any(|(v, &b)| b != usize::from(v >= n)) {
            return Err(QlError::invalid(
                "QL bit subgraphs must occupy vertices 0..n and n..2n",
            ));
        }
        let mut intra = vec![0usize; total];
        let mut bias: Option<Complex64> = None;
        let mut cross = 0usize;
        for (u, v, z) in graph.edges() {
            if (u < n) == (v < n) {
                if (z - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
                    return Err(QlError::invalid(format!(
                        "intra-subgraph edge ({u}, {v}) has gain {z}, expected 1"
                    )));
                }
                intra[u] += 1;
                intra[v] += 1;
            } else {
                cross += 1;
                match bias {
                    None => bias = Some(z),
                    Some(b) if (b - z).norm() > 1e-12 => {
                        return Err(QlError::invalid("coupling edges carry different biases"))
                    }
                    _ => {}
                }
            }
        }
        let d = intra[0];
        if intra.iter().any(|&k| k != d) {
            return Err(QlError::invalid("subgraphs are not regular"));
        }
        let bias = bias.ok_or_else(|| QlError::invalid("QL bit has no coupling edges"))?;
        let mut coupled = vec![false; total];
        for (u, v, _) in graph.edges() {
            if (u < n) != (v < n) {
                coupled[u] = true;
                coupled[v] = true;
            }
        }
        let spec = QlBitSpec::new(n, d, bias, cross as f64 / (n * n) as f64, 0);
        Ok(QlBit {
            graph,
            partition: [(0..n).collect(), (n..total).collect()],
            spec,
            uncoupled_vertex: coupled.iter().any(|&c| !c),
        })
    }
}

/// Builds a QL bit from `spec`.
///
/// Both subgraphs are drawn from one ChaCha stream seeded with
/// `spec.rng_seed`, then every pair `(u in a1, v in a2)` independently
/// receives a coupling edge with probability `coupling_probability`, gain
/// `coupling_bias` read from `u` to `v`. The random draws do not depend on the
/// bias, so two specs differing only in bias share the same edge set.
pub fn build_ql_bit(spec: &QlBitSpec) -> Result<QlBit> {
    spec.validate()?;
    let n = spec.n_per_subgraph;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let g1 = generate_d_regular_with(n, spec.degree, &mut rng)?;
    let g2 = generate_d_regular_with(n, spec.degree, &mut rng)?;
    let mut graph = g1.disjoint_union(&g2);
    let mut coupled = vec![false; 2 * n];
    for u in 0..n {
        for v in 0..n {
            if rng.gen::<f64>() < spec.coupling_probability {
                graph.add_edge(u, n + v, spec.coupling_bias)?;
                coupled[u] = true;
                coupled[n + v] = true;
            }
        }
    }
    let labels = (0..2 * n)
        .map(|v| if v < n { "a1" } else { "a2" }.to_string())
        .collect();
    graph.set_labels(labels)?;
    Ok(QlBit {
        graph,
        partition: [(0..n).collect(), (n..2 * n).collect()],
        spec: *spec,
        uncoupled_vertex: coupled.iter().any(|&c| !c),
    })
}
