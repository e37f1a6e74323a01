//! Phase-constraint form of no-cloning for QL bit products.
//!
//! Conjugating a product adjacency matrix by `diag(e^{i theta_v})` multiplies
//! entry `(u, v)` by `e^{i (theta_v - theta_u)}`. Cloning asks for a choice
//! of phases that applies a prescribed rotation to every edge of every
//! diagonal block (turning block `B` into a copy of `A`) while all entries
//! of an off-diagonal block rotate together. Phases live on a grid of
//! `resolution` steps per turn, and every relation is an integer linear
//! equation modulo `resolution`.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QlError, Result};
use crate::qlbit::QlBit;

/// A cloning request on `n_blocks` diagonal blocks of `n0` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneTarget {
    pub n0: usize,
    pub n_blocks: usize,
    /// Edges of each diagonal block, local indices `i < j`.
    pub block_edges: Vec<(usize, usize)>,
    /// Required rotation of each block edge, in grid steps.
    pub rotation_steps: Vec<i64>,
    /// Grid steps per full turn.
    pub resolution: i64,
}

impl CloneTarget {
    /// Every block edge left as is.
    pub fn identity(n0: usize, n_blocks: usize, block_edges: Vec<(usize, usize)>, resolution: i64) -> Self {
        let k = block_edges.len();
        CloneTarget {
            n0,
            n_blocks,
            block_edges,
            rotation_steps: vec![0; k],
            resolution,
        }
    }

    /// Turning copies of `bit` into copies of a bit with `target_bias`: the
    /// coupling edges rotate by `arg(target) - arg(bias)`, the rest stay.
    /// The rotation must sit on the grid.
    pub fn from_ql_bit(bit: &QlBit, target_bias: Complex64, n_blocks: usize, resolution: i64) -> Result<Self> {
        let delta = (target_bias / bit.spec.coupling_bias).arg();
        let steps = delta / TAU * resolution as f64;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(QlError::invalid(format!(
                "bias change of {delta} rad is not a multiple of 2 pi / {resolution}"
            )));
        }
        let steps = steps.round() as i64;
        let n = bit.spec.n_per_subgraph;
        let mut block_edges = Vec::new();
        let mut rotation_steps = Vec::new();
        for (u, v, _) in bit.graph.edges() {
            block_edges.push((u, v));
            rotation_steps.push(if (u < n) != (v < n) { steps } else { 0 });
        }
        Ok(CloneTarget {
            n0: 2 * n,
            n_blocks,
            block_edges,
            rotation_steps,
            resolution,
        })
    }

    /// Random instance: a random edge set on `n0` vertices, rotations drawn
    /// uniformly from the grid (zero with probability `p_zero` each).
    pub fn random<R: Rng>(rng: &mut R, n0: usize, n_blocks: usize, p_zero: f64, resolution: i64) -> Self {
        let mut block_edges = Vec::new();
        for i in 0..n0 {
            for j in i + 1..n0 {
                if j == i + 1 || rng.gen::<f64>() < 0.5 {
                    block_edges.push((i, j));
                }
            }
        }
        let rotation_steps = block_edges
            .iter()
            .map(|_| if rng.gen::<f64>() < p_zero { 0 } else { rng.gen_range(1..resolution) })
            .collect();
        CloneTarget {
            n0,
            n_blocks,
            block_edges,
            rotation_steps,
            resolution,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation_steps.iter().all(|&r| r.rem_euclid(self.resolution) == 0)
    }

    fn validate(&self) -> Result<()> {
        if self.n0 < 2 {
            return Err(QlError::invalid("blocks need at least two vertices"));
        }
        if self.n_blocks < 2 {
            return Err(QlError::invalid("cloning needs at least two diagonal blocks"));
        }
        if self.resolution < 1 {
            return Err(QlError::invalid("grid resolution must be positive"));
        }
        if self.block_edges.len() != self.rotation_steps.len() {
            return Err(QlError::invalid("one rotation per block edge required"));
        }
        for &(i, j) in &self.block_edges {
            if i >= j || j >= self.n0 {
                return Err(QlError::invalid(format!("block edge ({i}, {j}) is malformed")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Edge `(i, j)` of diagonal block `block` must rotate by the target.
    BlockIdentity { block: usize, i: usize, j: usize },
    /// Entries `(row, col_a)` and `(row, col_b)` of the off-diagonal block
    /// `(from, to)` must rotate together.
    StarInvariance { from: usize, to: usize, row: usize, col_a: usize, col_b: usize },
}

/// `sum coeff * theta_var == rhs (mod resolution)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConstraint {
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
    pub kind: ConstraintKind,
}

impl PhaseConstraint {
    /// Human-readable form with 1-based phase names.
    pub fn describe(&self) -> String {
        let mut lhs = String::new();
        for (k, &(v, c)) in self.coeffs.iter().enumerate() {
            let sign = match (c < 0, k > 0) {
                (true, true) => " - ",
                (true, false) => "-",
                (false, true) => " + ",
                (false, false) => "",
            };
            let mag = if c.abs() == 1 { String::new() } else { format!("{}*", c.abs()) };
            lhs.push_str(&format!("{sign}{mag}theta_{}", v + 1));
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        format!("{lhs} = {}", self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConstraintSystem {
    pub n_vars: usize,
    pub resolution: i64,
    pub constraints: Vec<PhaseConstraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CloneVerdict {
    /// A grid solution with `theta_1 = 0`, in radians.
    Feasible { phases: Vec<f64> },
    /// The listed constraints, combined with the given integer weights,
    /// cancel on the left but not on the right.
    Infeasible { witness: Vec<usize>, weights: Vec<i64>, explanation: String },
}

impl CloneVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CloneVerdict::Feasible { .. })
    }
}

fn relation(terms: &[(usize, i64)], rhs: i64, kind: ConstraintKind) -> PhaseConstraint {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &(v, c) in terms {
        *acc.entry(v).or_default() += c;
    }
    PhaseConstraint {
        coeffs: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
        rhs,
        kind,
    }
}

impl PhaseConstraintSystem {
    /// Builds the relations for `target`.
    ///
    /// Diagonal block `b` holds phases `b n0 .. (b + 1) n0`. Each block edge
    /// `(i, j)` gives `theta_{b,j} - theta_{b,i} = r_ij`. Consecutive blocks
    /// are treated as adjacent in the other factor, so the off-diagonal
    /// block between them is populated; requiring the entries of its first
    /// row, and of the first row of its Hermitian partner, to rotate
    /// together gives `theta_{b',j} = theta_{b',0}` for every column `j`.
    pub fn build(target: &CloneTarget) -> Result<Self> {
        target.validate()?;
        let (n0, res) = (target.n0, target.resolution);
        let mut constraints = Vec::new();
        for b in 0..target.n_blocks {
            for (&(i, j), &r) in target.block_edges.iter().zip(&target.rotation_steps) {
                constraints.push(relation(
                    &[(b * n0 + j, 1), (b * n0 + i, -1)],
                    r.rem_euclid(res),
                    ConstraintKind::BlockIdentity { block: b, i, j },
                ));
            }
        }
        for b in 0..target.n_blocks - 1 {
            for (from, to) in [(b, b + 1), (b + 1, b)] {
                let row = from * n0;
                for j in 1..n0 {
                    // (theta_{to,j} - theta_row) - (theta_{to,0} - theta_row) = 0
                    constraints.push(relation(
                        &[(to * n0 + j, 1), (row, -1), (to * n0, -1), (row, 1)],
                        0,
                        ConstraintKind::StarInvariance { from, to, row: 0, col_a: 0, col_b: j },
                    ));
                }
            }
        }
        Ok(PhaseConstraintSystem {
            n_vars: n0 * target.n_blocks,
            resolution: res,
            constraints,
        })
    }

    fn check(&self, theta: &[i64]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: i64 = c.coeffs.iter().map(|&(v, k)| k * theta[v]).sum();
            (lhs - c.rhs).rem_euclid(self.resolution) == 0
        })
    }

    /// Exact feasibility on the torus.
    ///
    /// Unimodular integer row reduction of the coefficient matrix (with
    /// `theta_1` anchored at 0) yields a basis of the integer relations
    /// among the constraints; the system is solvable iff each relation
    /// annihilates the right-hand side modulo the resolution. Solutions are
    /// then read off by back substitution and confirmed on the grid when
    /// they land there.
    pub fn solve(&self) -> CloneVerdict {
        if let Some(v) = self.pairwise_conflict() {
            return v;
        }
        let m = self.constraints.len();
        let nv = self.n_vars;
        let res = self.resolution as i128;
        // rows: [coeffs over theta_2..theta_n | identity]
        let width = nv.saturating_sub(1);
        let mut rows: Vec<(Vec<i128>, Vec<i128>, i128)> = self
            .constraints
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut a = vec![0i128; width];
                for &(v, x) in &c.coeffs {
                    if v > 0 {
                        a[v - 1] += x as i128;
                    }
                }
                let mut e = vec![0i128; m];
                e[k] = 1;
                (a, e, c.rhs as i128)
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut top = 0;
        for col in 0..width {
            // gcd elimination on rows top.. in this column
            loop {
                let mut best: Option<usize> = None;
                for r in top..m {
                    if rows[r].0[col] != 0 && best.map_or(true, |b| rows[r].0[col].abs() < rows[b].0[col].abs()) {
                        best = Some(r);
                    }
                }
                let Some(b) = best else { break };
                rows.swap(top, b);
                let mut done = true;
                for r in top + 1..m {
                    if rows[r].0[col] != 0 {
                        let f = rows[r].0[col] / rows[top].0[col];
                        let (pa, pe, pr) = rows[top].clone();
                        let row = &mut rows[r];
                        for (x, y) in row.0.iter_mut().zip(&pa) {
                            *x -= f * y;
                        }
                        for (x, y) in row.1.iter_mut().zip(&pe) {
                            *x -= f * y;
                        }
                        row.2 -= f * pr;
                        if row.0[col] != 0 {
                            done = false;
                        }
                    }
                }
                if done {
                    pivots.push((top, col));
                    top += 1;
                    break;
                }
            }
            if top == m {
                break;
            }
        }
        for r in top..m {
            if rows[r].2.rem_euclid(res) != 0 {
                let weights: Vec<i64> = rows[r].1.iter().map(|&x| x as i64).collect();
                let witness: Vec<usize> = (0..m).filter(|&k| weights[k] != 0).collect();
                let explanation = format!(
                    "combining {} constraints cancels every phase but leaves {} grid steps",
                    witness.len(),
                    rows[r].2.rem_euclid(res)
                );
                return CloneVerdict::Infeasible {
                    witness,
                    weights: witness_weights(&weights),
                    explanation,
                };
            }
        }
        // back substitution in radians; free phases are 0
        let mut theta = vec![0.0f64; nv];
        let step = TAU / self.resolution as f64;
        for &(r, col) in pivots.iter().rev() {
            let (a, _, rhs) = &rows[r];
            let rest: f64 = (col + 1..width).map(|c| a[c] as f64 * theta[c + 1]).sum();
            theta[col + 1] = (*rhs as f64 * step - rest) / a[col] as f64;
        }
        CloneVerdict::Feasible { phases: theta }
    }

    /// Two constraints with the same left side (up to sign) and
    /// incompatible right sides.
    fn pairwise_conflict(&self) -> Option<CloneVerdict> {
        let res = self.resolution;
        let mut by_lhs: BTreeMap<Vec<(usize, i64)>, (usize, i64)> = BTreeMap::new();
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.is_empty() {
                if c.rhs.rem_euclid(res) != 0 {
                    return Some(CloneVerdict::Infeasible {
                        witness: vec![k],
                        weights: vec![1],
                        explanation: format!("{} cannot hold", c.describe()),
                    });
                }
                continue;
            }
            // normalise the sign so the first coefficient is positive
            let s = c.coeffs[0].1.signum();
            let key: Vec<(usize, i64)> = c.coeffs.iter().map(|&(v, x)| (v, x * s)).collect();
            let rhs = (c.rhs * s).rem_euclid(res);
            match by_lhs.get(&key) {
                Some(&(j, r)) if r != rhs => {
                    let sj = self.constraints[j].coeffs[0].1.signum();
                    return Some(CloneVerdict::Infeasible {
                        witness: vec![j, k],
                        weights: vec![sj, -s],
                        explanation: format!(
                            "{} contradicts {}",
                            self.constraints[j].describe(),
                            c.describe()
                        ),
                    });
                }
                Some(_) => {}
                None => {
                    by_lhs.insert(key, (k, rhs));
                }
            }
        }
        None
    }
}

fn witness_weights(w: &[i64]) -> Vec<i64> {
    w.iter().copied().filter(|&x| x != 0).collect()
}

/// Builds the constraint system for `target` and decides it.
pub fn no_cloning_check(target: &CloneTarget) -> Result<(PhaseConstraintSystem, CloneVerdict)> {
    let sys = PhaseConstraintSystem::build(target)?;
    let verdict = sys.solve();
    Ok((sys, verdict))
}

/// Exhaustive search for grid phases (`theta_1 = 0`) satisfying every
/// constraint, by backtracking in breadth-first order over the constraint
/// graph. Returns the grid steps of a solution.
pub fn grid_search(sys: &PhaseConstraintSystem) -> Option<Vec<i64>> {
    let n = sys.n_vars;
    if n == 0 {
        return Some(Vec::new());
    }
    let mut adj = vec![Vec::new(); n];
    for c in &sys.constraints {
        for &(a, _) in &c.coeffs {
            for &(b, _) in &c.coeffs {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    // constraints checked once their last variable (in search order) is set
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, c) in sys.constraints.iter().enumerate() {
        let last = c.coeffs.iter().map(|&(v, _)| pos[v]).max();
        match last {
            Some(p) => due[p].push(k),
            None if c.rhs.rem_euclid(sys.resolution) != 0 => return None,
            None => {}
        }
    }
    let mut theta = vec![0i64; n];
    fn rec(depth: usize, order: &[usize], due: &[Vec<usize>], sys: &PhaseConstraintSystem, theta: &mut [i64]) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        let choices: Vec<i64> = if v == 0 { vec![0] } else { (0..sys.resolution).collect() };
        for x in choices {
            theta[v] = x;
            let ok = due[depth].iter().all(|&k| {
                let c = &sys.constraints[k];
                let lhs: i64 = c.coeffs.iter().map(|&(u, a)| a * theta[u]).sum();
                (lhs - c.rhs).rem_euclid(sys.resolution) == 0
            });
            if ok && rec(depth + 1, order, due, sys, theta) {
                return true;
            }
        }
        false
    }
    if rec(0, &order, &due, sys, &mut theta) {
        debug_assert!(sys.check(&theta));
        Some(theta)
    } else {
        None
    }
}
