//! Test-only oracles. Nothing here calls into the library's matrix
//! builders or its LU routine; trees are read only through their raw edge
//! lists.

#![allow(dead_code)]

use sqdist::{DenseMatrix, RawEdge, WeightedTree};

/// Determinant by the Leibniz permutation sum. Exponential; keep n <= 9.
pub fn leibniz_det(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert!(n <= 9, "leibniz oracle is exponential");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    permute(&mut perm, 0, a, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, a: &DenseMatrix, total: &mut f64) {
    let n = perm.len();
    if k == n {
        let sign = permutation_sign(perm);
        let prod: f64 = (0..n).map(|i| a[(i, perm[i])]).product();
        *total += sign * prod;
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, a, total);
        perm.swap(k, i);
    }
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Cofactor expansion along the first row.
pub fn cofactor_det(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    if n == 1 {
        return a[(0, 0)];
    }
    let mut total = 0.0;
    for c in 0..n {
        let minor_rows: Vec<Vec<f64>> = (1..n)
            .map(|r| (0..n).filter(|&k| k != c).map(|k| a[(r, k)]).collect())
            .collect();
        let minor = DenseMatrix::from_rows(&minor_rows).unwrap();
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * a[(0, c)] * cofactor_det(&minor);
    }
    total
}

/// Gauss–Jordan inverse with full pivoting.
pub fn gauss_jordan_inverse(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.extend((0..n).map(|c| if c == r { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs()))
            .unwrap();
        m.swap(k, p);
        let pivot = m[k][k];
        assert!(pivot.abs() > 1e-300, "oracle hit a zero pivot");
        for c in 0..2 * n {
            m[k][c] /= pivot;
        }
        for r in 0..n {
            if r != k {
                let f = m[r][k];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[k][c];
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = m.into_iter().map(|row| row[n..].to_vec()).collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

/// Naive edge-list view of a tree.
pub struct EdgeList {
    pub n: usize,
    pub s: usize,
    /// (tail, head, weight), 0-based.
    pub edges: Vec<(usize, usize, DenseMatrix)>,
}

impl EdgeList {
    pub fn of(t: &WeightedTree) -> Self {
        Self {
            n: t.n(),
            s: t.s(),
            edges: t
                .to_raw()
                .into_iter()
                .map(|RawEdge { tail, head, weight }| (tail - 1, head - 1, weight))
                .collect(),
        }
    }

    /// Edges on the `i`–`j` path by depth-first search on the edge list.
    pub fn path_edges(&self, i: usize, j: usize) -> Vec<usize> {
        fn dfs(list: &EdgeList, v: usize, target: usize, from: Option<usize>, acc: &mut Vec<usize>) -> bool {
            if v == target {
                return true;
            }
            for (k, (a, b, _)) in list.edges.iter().enumerate() {
                if Some(k) == from {
                    continue;
                }
                let next = if *a == v {
                    *b
                } else if *b == v {
                    *a
                } else {
                    continue;
                };
                acc.push(k);
                if dfs(list, next, target, Some(k), acc) {
                    return true;
                }
                acc.pop();
            }
            false
        }
        let mut acc = Vec::new();
        assert!(dfs(self, i, j, None, &mut acc));
        acc
    }

    pub fn dist(&self, i: usize, j: usize) -> DenseMatrix {
        self.path_edges(i, j)
            .into_iter()
            .fold(DenseMatrix::zeros(self.s, self.s), |acc, k| &acc + &self.edges[k].2)
    }

    pub fn hops(&self, i: usize, j: usize) -> usize {
        self.path_edges(i, j).len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()
    }

    fn block_matrix(&self, f: impl Fn(usize, usize) -> DenseMatrix) -> DenseMatrix {
        let s = self.s;
        let mut out = DenseMatrix::zeros(self.n * s, self.n * s);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set_submatrix(i * s, j * s, &f(i, j));
            }
        }
        out
    }

    pub fn distance(&self) -> DenseMatrix {
        self.block_matrix(|i, j| self.dist(i, j))
    }

    pub fn squared_distance(&self) -> DenseMatrix {
        self.block_matrix(|i, j| {
            let d = self.dist(i, j);
            &d * &d
        })
    }

    pub fn laplacian(&self) -> DenseMatrix {
        let s = self.s;
        self.block_matrix(|i, j| {
            let mut b = DenseMatrix::zeros(s, s);
            for (a, h, w) in &self.edges {
                let inv = gauss_jordan_inverse(w);
                if i == j && (*a == i || *h == i) {
                    b = &b + &inv;
                } else if (*a == i && *h == j) || (*a == j && *h == i) {
                    b = &b - &inv;
                }
            }
            b
        })
    }

    pub fn weighted_degree(&self, v: usize) -> DenseMatrix {
        self.edges
            .iter()
            .filter(|(a, b, _)| *a == v || *b == v)
            .fold(DenseMatrix::zeros(self.s, self.s), |acc, (_, _, w)| &acc + w)
    }

    pub fn tau(&self, v: usize) -> f64 {
        2.0 - self.degree(v) as f64
    }

    /// `Σ δ̂_i² / τ_i` evaluated term by term.
    pub fn beta(&self) -> DenseMatrix {
        (0..self.n).fold(DenseMatrix::zeros(self.s, self.s), |acc, v| {
            let d = self.weighted_degree(v);
            &acc + &(&d * &d).scale(1.0 / self.tau(v))
        })
    }

    /// `2τ⊗I − L(τ̂⊗I)δ̂`, block row by block row.
    pub fn eta(&self) -> DenseMatrix {
        let s = self.s;
        let l = self.laplacian();
        let mut out = DenseMatrix::zeros(self.n * s, s);
        for i in 0..self.n {
            let mut block = DenseMatrix::identity(s).scale(2.0 * self.tau(i));
            for k in 0..self.n {
                let lik = l.submatrix(i * s, k * s, s, s);
                let term = (&lik * &self.weighted_degree(k)).scale(1.0 / self.tau(k));
                block = &block - &term;
            }
            out.set_submatrix(i * s, 0, &block);
        }
        out
    }
}

pub fn tree(n: usize, s: usize, edges: Vec<(usize, usize, DenseMatrix)>) -> WeightedTree {
    let raw = edges
        .into_iter()
        .map(|(tail, head, weight)| RawEdge { tail, head, weight })
        .collect();
    WeightedTree::validate(n, s, raw).unwrap()
}

pub fn unit_scalar_tree(n: usize, pairs: &[(usize, usize)]) -> WeightedTree {
    tree(
        n,
        1,
        pairs
            .iter()
            .map(|&(a, b)| (a, b, DenseMatrix::identity(1)))
            .collect(),
    )
}

pub fn rel_fro(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).fro_norm() / a.fro_norm().max(b.fro_norm()).max(1.0)
}
