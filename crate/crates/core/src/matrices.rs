//! Block matrices attached to a matrix-weighted tree.
//!
//! Vertex blocks are `s x s`; vertex `i` (0-based) occupies rows
//! `i*s..(i+1)*s`. Edge blocks follow file order.

use crate::error::{Error, Result};
use crate::linalg::{assemble_blocks, kron, BlockIndex, DenseMatrix, Lu};
use crate::tree::WeightedTree;

/// Every matrix object derived from one tree, built in a single pass.
#[derive(Debug, Clone)]
pub struct TreeMatrices {
    /// Distance matrix, `ns x ns`.
    pub d: DenseMatrix,
    /// Squared distance matrix, `ns x ns`.
    pub delta: DenseMatrix,
    /// Laplacian, `ns x ns`.
    pub l: DenseMatrix,
    /// Lifted incidence matrix `Q ⊗ I_s`, `ns x (n-1)s`.
    pub qi: DenseMatrix,
    /// Lifted edge orientation matrix `H ⊗ I_s`.
    pub hi: DenseMatrix,
    /// Block diagonal of the edge weights.
    pub f: DenseMatrix,
    /// Block diagonal of the inverse edge weights.
    pub f_inv: DenseMatrix,
    /// Stacked weighted degrees, `ns x s`.
    pub delta_hat: DenseMatrix,
    /// `τ ⊗ I_s`, `ns x s`.
    pub tau_kron: DenseMatrix,
    /// `diag(τ) ⊗ I_s`.
    pub tau_tilde_kron: DenseMatrix,
    /// `diag(1/τ) ⊗ I_s`; absent when some vertex has degree 2.
    pub tau_hat_kron: Option<DenseMatrix>,
}

impl TreeMatrices {
    pub fn build(t: &WeightedTree) -> Self {
        let blocks = distance_blocks(t);
        let taus = tau_family(t);
        Self {
            d: assemble_distance(t, &blocks),
            delta: assemble_squared(t, &blocks),
            l: laplacian(t),
            qi: incidence(t),
            hi: edge_orientation(t),
            f: weight_blockdiag(t),
            f_inv: inverse_weight_blockdiag(t),
            delta_hat: weighted_degrees(t),
            tau_kron: taus.tau_kron,
            tau_tilde_kron: taus.tau_tilde_kron,
            tau_hat_kron: taus.tau_hat_kron,
        }
    }
}

/// The three τ carriers.
#[derive(Debug, Clone)]
pub struct TauFamily {
    pub tau_kron: DenseMatrix,
    pub tau_tilde_kron: DenseMatrix,
    pub tau_hat_kron: Option<DenseMatrix>,
}

/// `d(i, j)` for every ordered pair, as `s x s` blocks. One BFS per vertex,
/// upper triangle computed and mirrored so that the result is exactly
/// symmetric.
pub fn distance_blocks(t: &WeightedTree) -> Vec<Vec<DenseMatrix>> {
    let (n, s) = (t.n(), t.s());
    let mut out = vec![vec![DenseMatrix::zeros(s, s); n]; n];
    for i in 0..n {
        let parent = t.bfs_parents(i);
        let mut acc: Vec<Option<DenseMatrix>> = vec![None; n];
        acc[i] = Some(DenseMatrix::zeros(s, s));
        for v in t.bfs_order(i) {
            if let Some((p, e)) = parent[v] {
                let prev = acc[p].as_ref().expect("bfs order visits parents first");
                acc[v] = Some(prev + t.weight(e));
            }
        }
        for (j, block) in acc.into_iter().enumerate().skip(i + 1) {
            let block = block.expect("tree is connected");
            out[j][i] = block.clone();
            out[i][j] = block;
        }
    }
    out
}

fn assemble_distance(t: &WeightedTree, blocks: &[Vec<DenseMatrix>]) -> DenseMatrix {
    assemble_blocks(BlockIndex::new(t.n(), t.s()), |i, j| blocks[i][j].clone())
        .expect("distance blocks are s x s")
}

fn assemble_squared(t: &WeightedTree, blocks: &[Vec<DenseMatrix>]) -> DenseMatrix {
    let s = t.s();
    let n = t.n();
    let squares: Vec<Vec<DenseMatrix>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        DenseMatrix::zeros(s, s)
                    } else {
                        &blocks[i][j] * &blocks[i][j]
                    }
                })
                .collect()
        })
        .collect();
    assemble_blocks(BlockIndex::new(n, s), |i, j| {
        if i <= j {
            squares[i][j].clone()
        } else {
            squares[j][i].clone()
        }
    })
    .expect("squared blocks are s x s")
}

/// Block `(i, j)` is the sum of the weights on the `i`–`j` path.
pub fn distance_matrix(t: &WeightedTree) -> DenseMatrix {
    assemble_distance(t, &distance_blocks(t))
}

/// Block `(i, j)` is the matrix square `d(i, j)²`.
pub fn squared_distance_matrix(t: &WeightedTree) -> DenseMatrix {
    assemble_squared(t, &distance_blocks(t))
}

fn weight_inverse(w: &DenseMatrix) -> DenseMatrix {
    Lu::factor(w)
        .and_then(|lu| lu.solve(&DenseMatrix::identity(w.rows())))
        .expect("validated weights are positive definite")
}

/// Off-diagonal blocks `-W(i,j)⁻¹` on adjacent pairs; diagonal blocks sum
/// the inverse weights of incident edges.
pub fn laplacian(t: &WeightedTree) -> DenseMatrix {
    let s = t.s();
    let mut l = DenseMatrix::zeros(t.n() * s, t.n() * s);
    for e in t.edges() {
        let inv = weight_inverse(&e.weight);
        let (a, b) = (e.tail * s, e.head * s);
        l.add_submatrix(a, a, &inv);
        l.add_submatrix(b, b, &inv);
        l.add_submatrix(a, b, &-&inv);
        l.add_submatrix(b, a, &-&inv);
    }
    l
}

/// Unlifted `n x (n-1)` incidence matrix: `+1` at the tail, `-1` at the
/// head of each edge.
pub fn incidence_unlifted(t: &WeightedTree) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(t.n(), t.edge_count());
    for (k, e) in t.edges().iter().enumerate() {
        q[(e.tail, k)] = 1.0;
        q[(e.head, k)] = -1.0;
    }
    q
}

/// `Q ⊗ I_s`.
pub fn incidence(t: &WeightedTree) -> DenseMatrix {
    kron(&incidence_unlifted(t), &DenseMatrix::identity(t.s()))
}

/// Unlifted edge orientation matrix on the underlying unweighted tree.
/// Edges `(p→q)` and `(r→u)` are similarly oriented (`+1`) when
/// `hops(p, r) == hops(q, u)`; `-1` otherwise; the diagonal is `+1`.
pub fn edge_orientation_unlifted(t: &WeightedTree) -> DenseMatrix {
    let hops = t.hop_distances();
    let m = t.edge_count();
    let mut h = DenseMatrix::zeros(m, m);
    for (a, ea) in t.edges().iter().enumerate() {
        for (b, eb) in t.edges().iter().enumerate() {
            h[(a, b)] = if a == b || hops[ea.tail][eb.tail] == hops[ea.head][eb.head] {
                1.0
            } else {
                -1.0
            };
        }
    }
    h
}

/// `H ⊗ I_s`.
pub fn edge_orientation(t: &WeightedTree) -> DenseMatrix {
    kron(&edge_orientation_unlifted(t), &DenseMatrix::identity(t.s()))
}

/// Block diagonal `diag(W_1, …, W_{n-1})` in edge order.
pub fn weight_blockdiag(t: &WeightedTree) -> DenseMatrix {
    let s = t.s();
    let mut f = DenseMatrix::zeros(t.edge_count() * s, t.edge_count() * s);
    for (k, w) in t.weights().enumerate() {
        f.set_submatrix(k * s, k * s, w);
    }
    f
}

pub fn inverse_weight_blockdiag(t: &WeightedTree) -> DenseMatrix {
    let s = t.s();
    let mut f = DenseMatrix::zeros(t.edge_count() * s, t.edge_count() * s);
    for (k, w) in t.weights().enumerate() {
        f.set_submatrix(k * s, k * s, &weight_inverse(w));
    }
    f
}

/// Weighted degree of one vertex: sum of incident edge weights.
pub fn weighted_degree(t: &WeightedTree, v: usize) -> DenseMatrix {
    t.neighbours(v)
        .iter()
        .fold(DenseMatrix::zeros(t.s(), t.s()), |acc, &(_, e)| &acc + t.weight(e))
}

/// Stacked weighted degrees, `ns x s`.
pub fn weighted_degrees(t: &WeightedTree) -> DenseMatrix {
    let s = t.s();
    let mut out = DenseMatrix::zeros(t.n() * s, s);
    for v in 0..t.n() {
        out.set_submatrix(v * s, 0, &weighted_degree(t, v));
    }
    out
}

pub fn tau_family(t: &WeightedTree) -> TauFamily {
    let profile = t.degree_profile();
    let tau: Vec<f64> = profile.tau.iter().map(|&x| x as f64).collect();
    let eye = DenseMatrix::identity(t.s());
    TauFamily {
        tau_kron: kron(&DenseMatrix::column(&tau), &eye),
        tau_tilde_kron: kron(&DenseMatrix::diag(&tau), &eye),
        tau_hat_kron: tau_hat_kron(t).ok(),
    }
}

/// `diag(1/τ) ⊗ I_s`; fails when a vertex has degree 2.
pub fn tau_hat_kron(t: &WeightedTree) -> Result<DenseMatrix> {
    let profile = t.degree_profile();
    if let Some(&v) = profile.deg2_vertices.first() {
        return Err(Error::Degree2Present { vertex: v + 1 });
    }
    let recip: Vec<f64> = profile.tau.iter().map(|&x| 1.0 / x as f64).collect();
    Ok(kron(&DenseMatrix::diag(&recip), &DenseMatrix::identity(t.s())))
}
