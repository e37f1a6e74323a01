//! Random d-regular graphs by stub pairing.

use std::collections::BTreeMap;
use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QlError, Result};
use crate::graph::GainGraph;

/// Restart budget for the pairing.
pub const MAX_RESTARTS: usize = 1000;

/// Random simple `d`-regular graph on `n` vertices with all gains 1.
///
/// Deterministic for a fixed seed.
pub fn generate_d_regular(n: usize, d: usize, seed: u64) -> Result<GainGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_d_regular_with(n, d, &mut rng)
}

/// As [`generate_d_regular`] but drawing from a caller-supplied generator.
///
/// Stubs are paired one edge at a time; a pair that would create a loop or a
/// repeated edge is redrawn, and the whole pairing restarts if the remaining
/// stubs admit no valid pair. Dense requests (`2d > n - 1`) are served by
/// generating the sparser complement and complementing it.
pub fn generate_d_regular_with<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<GainGraph> {
    if d >= n && !(n == 0 && d == 0) {
        return Err(QlError::invalid(format!(
            "degree {d} must be below the vertex count {n}"
        )));
    }
    if (n * d) % 2 != 0 {
        return Err(QlError::Parity { n, d });
    }
    if n > 1 && 2 * d > n - 1 {
        let sparse = pair_stubs(n, n - 1 - d, rng)?;
        let mut edges = BTreeMap::new();
        for u in 0..n {
            for v in u + 1..n {
                if !sparse.contains(&(u, v)) {
                    edges.insert((u, v), Complex64::new(1.0, 0.0));
                }
            }
        }
        return Ok(GainGraph::from_parts(n, edges, None));
    }
    let pairs = pair_stubs(n, d, rng)?;
    let edges = pairs
        .into_iter()
        .map(|k| (k, Complex64::new(1.0, 0.0)))
        .collect();
    Ok(GainGraph::from_parts(n, edges, None))
}

fn pair_stubs<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<HashSet<(usize, usize)>> {
    'restart: for _ in 0..MAX_RESTARTS {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut misses = 0usize;
            loop {
                let len = stubs.len();
                let i = rng.gen_range(0..len);
                let j = rng.gen_range(0..len);
                let (u, v) = (stubs[i], stubs[j]);
                let key = (u.min(v), u.max(v));
                if i != j && u != v && !edges.contains(&key) {
                    edges.insert(key);
                    let (hi, lo) = (i.max(j), i.min(j));
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                    break;
                }
                misses += 1;
                if misses > 64 * len {
                    if !any_valid_pair(&stubs, &edges) {
                        continue 'restart;
                    }
                    misses = 0;
                }
            }
        }
        return Ok(edges);
    }
    Err(QlError::RejectionsExhausted {
        n,
        d,
        attempts: MAX_RESTARTS,
    })
}

fn any_valid_pair(stubs: &[usize], edges: &HashSet<(usize, usize)>) -> bool {
    let mut vertices: Vec<usize> = stubs.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    for (a, &u) in vertices.iter().enumerate() {
        for &v in &vertices[a + 1..] {
            if !edges.contains(&(u, v)) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertices_cubic_is_k4() {
        for seed in 0..5 {
            let g = generate_d_regular(4, 3, seed).unwrap();
            assert_eq!(g, GainGraph::complete(4));
        }
    }

    #[test]
    fn every_degree_is_d() {
        for &(n, d, seed) in &[(8, 3, 7), (30, 8, 1), (60, 40, 2), (61, 10, 3), (100, 20, 1), (10, 0, 0)] {
            let g = generate_d_regular(n, d, seed).unwrap();
            assert!(g.degrees().iter().all(|&k| k == d), "n={n} d={d}");
            assert_eq!(g.edge_count(), n * d / 2);
        }
    }

    #[test]
    fn parity_and_range_errors() {
        assert!(matches!(generate_d_regular(7, 3, 0), Err(QlError::Parity { .. })));
        assert!(generate_d_regular(4, 4, 0).is_err());
    }

    #[test]
    fn seed_determinism() {
        let a = generate_d_regular(50, 6, 42).unwrap();
        let b = generate_d_regular(50, 6, 42).unwrap();
        let c = generate_d_regular(50, 6, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
