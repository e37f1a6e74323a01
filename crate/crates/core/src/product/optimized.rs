//! Optimised products: `2^q` regular blocks wired along the hypercube,
//! plus the contraction and lift that relate them to full products.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{block_label, unflatten, ProductGraph, ProductKind, PRODUCT_VERTEX_CAP};
use crate::error::{QlError, Result};
use crate::graph::GainGraph;
use crate::qlbit::QlBit;
use crate::regular::generate_d_regular_with;

/// Product of `q` QL bits on `n 2^q` vertices.
///
/// Every block gets a fresh `d`-regular graph on `n` vertices. Two blocks
/// whose tuples differ only in factor `k` are coupled exactly like factor
/// `k`: each of the `n^2` vertex pairs independently gets an edge with the
/// factor's coupling probability, gain the factor's bias read from the
/// subgraph-1 side. Block `b` holds vertices `b n .. (b + 1) n`.
pub fn optimized_product(bits: &[QlBit], seed: u64) -> Result<ProductGraph> {
    let first = bits
        .first()
        .ok_or_else(|| QlError::invalid("an optimized product needs at least one bit"))?;
    let (n, d) = (first.spec.n_per_subgraph, first.spec.degree);
    if let Some(b) = bits.iter().find(|b| b.spec.n_per_subgraph != n || b.spec.degree != d) {
        return Err(QlError::invalid(format!(
            "all bits must share n = {n} and d = {d}; found n = {}, d = {}",
            b.spec.n_per_subgraph, b.spec.degree
        )));
    }
    let q = bits.len();
    if q >= usize::BITS as usize - 1 || n.saturating_mul(1 << q) > PRODUCT_VERTEX_CAP {
        return Err(QlError::ProductTooLarge {
            vertices: n.saturating_mul(1usize.checked_shl(q as u32).unwrap_or(usize::MAX)),
            cap: PRODUCT_VERTEX_CAP,
        });
    }
    let blocks = 1usize << q;
    let total = n * blocks;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeMap::new();
    for b in 0..blocks {
        let g = generate_d_regular_with(n, d, &mut rng)?;
        for (u, v, z) in g.edges() {
            edges.insert((b * n + u, b * n + v), z);
        }
    }
    for s in 0..blocks {
        for (k, bit) in bits.iter().enumerate() {
            let mask = 1usize << (q - 1 - k);
            if s & mask != 0 {
                continue;
            }
            let t = s | mask;
            for u in 0..n {
                for v in 0..n {
                    if rng.gen::<f64>() < bit.spec.coupling_probability {
                        edges.insert((s * n + u, t * n + v), bit.spec.coupling_bias);
                    }
                }
            }
        }
    }
    let radix = vec![2; q];
    let block_of: Vec<usize> = (0..total).map(|v| v / n).collect();
    let labels = block_of.iter().map(|&b| block_label(&unflatten(b, &radix))).collect();
    Ok(ProductGraph {
        graph: GainGraph::from_parts(total, edges, Some(labels)),
        kind: ProductKind::Optimized { n },
        q,
        factor_specs: bits.iter().map(|b| Some(b.spec)).collect(),
        factor_sizes: Vec::new(),
        block_radix: radix,
        block_of,
    })
}

/// Contracts every set of `partition` to one vertex.
///
/// The sets must cover all vertices once and have equal size; a labelled
/// graph must not mix labels within a set. Edges inside a set vanish,
/// parallel edges between two sets collapse to one (their gains must
/// agree). If anything was merged, every label block whose induced subgraph
/// is not `target_degree`-regular afterwards is rewired as a fresh random
/// `target_degree`-regular graph with gains 1; inter-block edges are kept.
/// Contracted vertex `i` is set `i`.
pub fn contract_subgraph(g: &GainGraph, partition: &[Vec<usize>], target_degree: usize, seed: u64) -> Result<GainGraph> {
    let n = g.n_vertices();
    let mut set_of = vec![usize::MAX; n];
    for (i, set) in partition.iter().enumerate() {
        if set.len() != partition[0].len() || set.is_empty() {
            return Err(QlError::invalid("partition sets must be non-empty and equal-sized"));
        }
        for &v in set {
            if v >= n || set_of[v] != usize::MAX {
                return Err(QlError::invalid(format!("vertex {v} is out of range or repeated")));
            }
            set_of[v] = i;
        }
    }
    if let Some(v) = set_of.iter().position(|&s| s == usize::MAX) {
        return Err(QlError::invalid(format!("partition misses vertex {v}")));
    }
    let m = partition.len();
    let labels: Option<Vec<String>> = match g.labels() {
        None => None,
        Some(tags) => {
            let mut out = Vec::with_capacity(m);
            for set in partition {
                let t = &tags[set[0]];
                if set.iter().any(|&v| &tags[v] != t) {
                    return Err(QlError::invalid("a contracted set spans several labels"));
                }
                out.push(t.clone());
            }
            Some(out)
        }
    };

    let mut edges: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for (u, v, z) in g.edges() {
        let (su, sv) = (set_of[u], set_of[v]);
        if su == sv {
            continue;
        }
        let (key, w) = if su < sv { ((su, sv), z) } else { ((sv, su), z.conj()) };
        match edges.get(&key) {
            Some(&old) if (old - w).norm() > 1e-9 => {
                return Err(QlError::invalid(format!(
                    "parallel edges between sets {} and {} carry different gains",
                    key.0, key.1
                )))
            }
            Some(_) => {}
            None => {
                edges.insert(key, w);
            }
        }
    }
    let mut out = GainGraph::from_parts(m, edges, labels);
    if partition[0].len() == 1 {
        return Ok(out);
    }

    let (_, block_of) = out.blocks();
    let n_blocks = block_of.iter().max().map_or(0, |&b| b + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for b in 0..n_blocks {
        let members: Vec<usize> = (0..m).filter(|&v| block_of[v] == b).collect();
        let mut intra = vec![0usize; members.len()];
        let local = |v: usize| members.binary_search(&v).ok();
        for (u, v, _) in out.edges() {
            if let (Some(a), Some(c)) = (local(u), local(v)) {
                intra[a] += 1;
                intra[c] += 1;
            }
        }
        if intra.iter().all(|&k| k == target_degree) {
            continue;
        }
        let fresh = generate_d_regular_with(members.len(), target_degree, &mut rng)?;
        let mut edges: BTreeMap<(usize, usize), Complex64> = out
            .edges()
            .filter(|&(u, v, _)| !(local(u).is_some() && local(v).is_some()))
            .map(|(u, v, z)| ((u, v), z))
            .collect();
        for (a, c, z) in fresh.edges() {
            edges.insert((members[a], members[c]), z);
        }
        out = GainGraph::from_parts(m, edges, out.labels().map(|l| l.to_vec()));
    }
    Ok(out)
}

/// Contracts a Cartesian product of QL bits to the optimised size class by
/// merging, inside every block, the vertices that share their first-factor
/// coordinate. The result has `n` vertices per block, block `b` occupying
/// `b n .. (b + 1) n`.
pub fn contract_product(p: &ProductGraph, target_degree: usize, seed: u64) -> Result<ProductGraph> {
    if p.kind != ProductKind::Cartesian || p.q < 2 {
        return Err(QlError::invalid("contraction needs a Cartesian product of at least two factors"));
    }
    let members = p.block_members();
    let mut partition = Vec::new();
    let mut block_of = Vec::new();
    let mut n_per_block = None;
    for (b, verts) in members.iter().enumerate() {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in verts {
            groups.entry(v / (p.n_vertices() / p.factor_sizes[0])).or_default().push(v);
        }
        match n_per_block {
            None => n_per_block = Some(groups.len()),
            Some(k) if k != groups.len() => {
                return Err(QlError::invalid("factor subgraphs differ in size; blocks cannot be contracted evenly"))
            }
            _ => {}
        }
        for (_, set) in groups {
            partition.push(set);
            block_of.push(b);
        }
    }
    let graph = contract_subgraph(&p.graph, &partition, target_degree, seed)?;
    Ok(ProductGraph {
        graph,
        kind: ProductKind::Optimized { n: n_per_block.unwrap_or(0) },
        q: p.q,
        factor_specs: p.factor_specs.clone(),
        factor_sizes: Vec::new(),
        block_radix: p.block_radix.clone(),
        block_of,
    })
}

/// Re-expands every vertex of `g` into a fresh `d`-regular graph on `n`
/// vertices (Cartesian product with that graph). Vertex `(v, x)` sits at
/// `v n + x` and keeps the label of `v`; degrees grow by `d`.
pub fn lift(g: &GainGraph, n: usize, d: usize, seed: u64) -> Result<GainGraph> {
    let fresh = crate::regular::generate_d_regular(n, d, seed)?;
    let p = super::cartesian_product_all(&[g, &fresh], vec![None, None])?;
    let labels = g
        .labels()
        .map(|tags| (0..p.n_vertices()).map(|w| tags[w / n].clone()).collect());
    let mut out = p.graph;
    match labels {
        Some(l) => out.set_labels(l)?,
        None => out = GainGraph::from_parts(out.n_vertices(), out.edges().map(|(u, v, z)| ((u, v), z)).collect(), None),
    }
    Ok(out)
}
