//! Seeded random instances.
//!
//! All randomness goes through ChaCha8 ([`rand_chacha::ChaCha8Rng`]), which
//! produces the same stream on every platform for a given seed and stream
//! number.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigenvalues, DenseMatrix};
use crate::tree::{is_positive_definite, RawEdge, WeightedTree};

/// Attempts before giving up on rejection sampling a constrained topology.
const MAX_REJECTIONS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// Diagonal entries uniform in `[0.5, 4]`.
    Diagonal,
    /// Quadratic polynomials in one shared symmetric positive definite matrix.
    Commuting,
    /// `GᵀG + 0.1 s I` for an independent random `G` per edge.
    General,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(WeightMode::Diagonal),
            "commuting" => Ok(WeightMode::Commuting),
            "general" => Ok(WeightMode::General),
            other => Err(Error::Config(format!("unknown weight mode '{other}'"))),
        }
    }
}

/// Which labeled trees to sample from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    /// Uniform over all `n^{n-2}` labeled trees.
    Uniform,
    /// Uniform over labeled trees without a degree-2 vertex.
    NoDeg2,
    /// Uniformly labeled paths.
    Path,
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "any" => Ok(TopologyKind::Uniform),
            "no-deg2" => Ok(TopologyKind::NoDeg2),
            "path" => Ok(TopologyKind::Path),
            other => Err(Error::Config(format!("unknown topology '{other}'"))),
        }
    }
}

impl TopologyKind {
    /// Whether some tree on `n` vertices has this shape.
    pub fn admits(&self, n: usize) -> bool {
        match self {
            TopologyKind::NoDeg2 => n >= 2 && n != 3,
            _ => n >= 2,
        }
    }
}

/// Oriented edge list on 0-based vertices. Edges point away from vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Decodes a Prüfer sequence over `0..n` (length `n - 2`) into edges.
pub fn prufer_decode(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &a in seq {
        degree[a] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &a in seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf, a));
        degree[a] -= 1;
        if degree[a] == 1 {
            leaves.push(Reverse(a));
        }
    }
    let Reverse(u) = leaves.pop().expect("two vertices remain");
    let Reverse(v) = leaves.pop().expect("two vertices remain");
    edges.push((u, v));
    edges
}

/// Reorients `edges` so that each points away from vertex 0; order is kept.
fn orient_from_root(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut depth = vec![usize::MAX; n];
    depth[0] = 0;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                stack.push(w);
            }
        }
    }
    edges
        .iter()
        .map(|&(a, b)| if depth[a] < depth[b] { (a, b) } else { (b, a) })
        .collect()
}

/// Uniform labeled tree on `n` vertices from a seed.
pub fn random_tree(n: usize, seed: u64) -> Result<Topology> {
    random_topology(n, TopologyKind::Uniform, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_topology<R: Rng + ?Sized>(n: usize, kind: TopologyKind, rng: &mut R) -> Result<Topology> {
    if n < 2 {
        return Err(Error::NTooSmall(n));
    }
    if !kind.admits(n) {
        return Err(Error::Config(format!("no tree on {n} vertices is {kind:?}")));
    }
    let edges = match kind {
        TopologyKind::Path => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            order.windows(2).map(|w| (w[0], w[1])).collect()
        }
        TopologyKind::Uniform if n == 2 => vec![(0, 1)],
        TopologyKind::Uniform => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            prufer_decode(&seq)
        }
        TopologyKind::NoDeg2 if n == 2 => vec![(0, 1)],
        TopologyKind::NoDeg2 => {
            // degree(v) = 1 + occurrences of v in the sequence
            let mut counts = vec![0usize; n];
            let mut found = None;
            for _ in 0..MAX_REJECTIONS {
                counts.iter_mut().for_each(|c| *c = 0);
                let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
                for &a in &seq {
                    counts[a] += 1;
                }
                if counts.iter().all(|&c| c != 1) {
                    found = Some(seq);
                    break;
                }
            }
            let seq = found.ok_or_else(|| {
                Error::Config(format!("rejection sampling for n={n} without degree-2 vertices gave up"))
            })?;
            prufer_decode(&seq)
        }
    };
    Ok(Topology {
        n,
        edges: orient_from_root(n, &edges),
    })
}

/// `m` positive definite `s x s` weights.
pub fn random_weights(m: usize, s: usize, mode: WeightMode, seed: u64) -> Vec<DenseMatrix> {
    random_weights_with(m, s, mode, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_weights_with<R: Rng + ?Sized>(m: usize, s: usize, mode: WeightMode, rng: &mut R) -> Vec<DenseMatrix> {
    match mode {
        WeightMode::Diagonal => (0..m)
            .map(|_| {
                let d: Vec<f64> = (0..s).map(|_| rng.gen_range(0.5..=4.0)).collect();
                DenseMatrix::diag(&d)
            })
            .collect(),
        WeightMode::Commuting => {
            let base = shifted_symmetric(s, rng);
            let base_sq = &base * &base;
            let eye = DenseMatrix::identity(s);
            (0..m)
                .map(|_| {
                    let a = rng.gen_range(0.0..1.0);
                    let b = rng.gen_range(0.0..1.0);
                    let c = rng.gen_range(0.5..2.0);
                    let w = &(&base_sq.scale(a) + &base.scale(b)) + &eye.scale(c);
                    enforce_pd(w.symmetrized())
                })
                .collect()
        }
        WeightMode::General => (0..m)
            .map(|_| {
                let g = uniform_matrix(s, rng);
                let w = &(&g.transpose() * &g) + &DenseMatrix::identity(s).scale(0.1 * s as f64);
                enforce_pd(w.symmetrized())
            })
            .collect(),
    }
}

fn uniform_matrix<R: Rng + ?Sized>(s: usize, rng: &mut R) -> DenseMatrix {
    let data: Vec<f64> = (0..s * s).map(|_| rng.gen_range(-1.0..1.0)).collect();
    DenseMatrix::new(s, s, data).expect("finite entries")
}

/// Random symmetric matrix shifted so its smallest eigenvalue is 0.5.
fn shifted_symmetric<R: Rng + ?Sized>(s: usize, rng: &mut R) -> DenseMatrix {
    let g = uniform_matrix(s, rng).symmetrized();
    let min = sym_eigenvalues(&g).expect("square")[0];
    &g + &DenseMatrix::identity(s).scale(0.5 - min)
}

/// Shifts `w` by a multiple of the identity until it passes the PD check.
fn enforce_pd(mut w: DenseMatrix) -> DenseMatrix {
    let s = w.rows();
    let mut shift = 0.1;
    while !is_positive_definite(&w) {
        w = &w + &DenseMatrix::identity(s).scale(shift);
        shift *= 2.0;
    }
    w
}

/// Validated weighted tree from a topology and weights in edge order.
pub fn assemble_tree(topology: &Topology, s: usize, weights: Vec<DenseMatrix>) -> Result<WeightedTree> {
    let raw = topology
        .edges
        .iter()
        .zip(weights)
        .map(|(&(a, b), weight)| RawEdge {
            tail: a + 1,
            head: b + 1,
            weight,
        })
        .collect();
    WeightedTree::validate(topology.n, s, raw)
}
