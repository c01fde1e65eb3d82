//! Trees with oriented edges and positive definite matrix weights.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, sym_eigenvalues, DenseMatrix};

/// Relative eigenvalue floor for the positive definiteness check.
pub const PD_TOL: f64 = 1e-10;
/// Relative asymmetry allowed before a weight is rejected.
pub const SYM_TOL: f64 = 1e-12;

/// Unvalidated edge as it appears in a file: 1-based endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEdge {
    pub tail: usize,
    pub head: usize,
    pub weight: DenseMatrix,
}

/// Validated edge, 0-based endpoints, directed `tail -> head`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: DenseMatrix,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }
}

/// A tree on vertices `0..n` whose edges carry symmetric positive definite
/// `s x s` weights. Immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    n: usize,
    s: usize,
    edges: Vec<Edge>,
    /// `adj[v]` lists `(neighbour, edge index)` in edge order.
    adj: Vec<Vec<(usize, usize)>>,
}

/// Vertex degrees and `tau_i = 2 - deg(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub delta: Vec<usize>,
    pub tau: Vec<i64>,
    /// 0-based vertices of degree 2, ascending.
    pub deg2_vertices: Vec<usize>,
}

impl DegreeProfile {
    pub fn has_deg2(&self) -> bool {
        !self.deg2_vertices.is_empty()
    }
}

impl WeightedTree {
    /// Checks topology, labels, weight shapes, symmetry and positive
    /// definiteness. Weights are stored symmetrized.
    pub fn validate(n: usize, s: usize, raw: Vec<RawEdge>) -> Result<Self> {
        if s == 0 {
            return Err(Error::BadWeightShape("weight order s must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::NotATree("tree has no vertices".into()));
        }
        if raw.len() + 1 != n {
            return Err(Error::NotATree(format!(
                "{} edges for {n} vertices, expected {}",
                raw.len(),
                n - 1
            )));
        }

        let mut uf = UnionFind::new(n);
        let mut edges = Vec::with_capacity(raw.len());
        for (k, e) in raw.into_iter().enumerate() {
            for v in [e.tail, e.head] {
                if v == 0 || v > n {
                    return Err(Error::BadLabels(format!(
                        "edge {} references vertex {v}, labels must lie in 1..={n}",
                        k + 1
                    )));
                }
            }
            if e.tail == e.head {
                return Err(Error::NotATree(format!("edge {} is a loop at vertex {}", k + 1, e.tail)));
            }
            if e.weight.shape() != (s, s) {
                return Err(Error::BadWeightShape(format!(
                    "edge {} weight is {}x{}, expected {s}x{s}",
                    k + 1,
                    e.weight.rows(),
                    e.weight.cols()
                )));
            }
            let (tail, head) = (e.tail - 1, e.head - 1);
            if !uf.union(tail, head) {
                return Err(Error::NotATree(format!(
                    "edge {} ({}-{}) closes a cycle",
                    k + 1,
                    e.tail,
                    e.head
                )));
            }
            let weight = check_weight(k, &e.weight)?;
            edges.push(Edge { tail, head, weight });
        }
        // n-1 edges without a cycle on n vertices is connected; keep the
        // explicit check for clarity of the error.
        if (1..n).any(|v| uf.find(v) != uf.find(0)) {
            return Err(Error::NotATree("graph is disconnected".into()));
        }

        let mut adj = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            adj[e.tail].push((e.head, k));
            adj[e.head].push((e.tail, k));
        }
        Ok(Self { n, s, edges, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, edge: usize) -> &DenseMatrix {
        &self.edges[edge].weight
    }

    pub fn weights(&self) -> impl Iterator<Item = &DenseMatrix> {
        self.edges.iter().map(|e| &e.weight)
    }

    /// `(neighbour, edge index)` pairs of vertex `v`.
    pub fn neighbours(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Same tree with every edge reversed.
    pub fn reversed(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                tail: e.head,
                head: e.tail,
                weight: e.weight.clone(),
            })
            .collect();
        Self {
            n: self.n,
            s: self.s,
            edges,
            adj: self.adj.clone(),
        }
    }

    /// Edges in file order as 1-based raw records.
    pub fn to_raw(&self) -> Vec<RawEdge> {
        self.edges
            .iter()
            .map(|e| RawEdge {
                tail: e.tail + 1,
                head: e.head + 1,
                weight: e.weight.clone(),
            })
            .collect()
    }

    /// Edge indices along the unique path from `i` to `j` (0-based
    /// vertices), in walking order. Empty when `i == j`.
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v + 1, n: self.n });
            }
        }
        let parent = self.bfs_parents(i);
        let mut out = Vec::new();
        let mut v = j;
        while v != i {
            let (p, e) = parent[v].expect("tree is connected");
            out.push(e);
            v = p;
        }
        out.reverse();
        Ok(out)
    }

    /// 1-based wrapper over [`path`](Self::path) for I/O boundaries.
    pub fn tree_path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        for v in [i, j] {
            if v == 0 || v > self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        self.path(i - 1, j - 1)
    }

    /// BFS tree from `root`: `parent[v] = Some((parent vertex, edge))`.
    pub fn bfs_parents(&self, root: usize) -> Vec<Option<(usize, usize)>> {
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// BFS visiting order from `root`.
    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n);
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Hop counts on the underlying unweighted tree.
    pub fn hop_distances(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|root| {
                let mut d = vec![usize::MAX; self.n];
                d[root] = 0;
                for v in self.bfs_order(root) {
                    for &(w, _) in &self.adj[v] {
                        if d[w] == usize::MAX {
                            d[w] = d[v] + 1;
                        }
                    }
                }
                d
            })
            .collect()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let delta: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        let tau = delta.iter().map(|&d| 2 - d as i64).collect();
        let deg2_vertices = (0..self.n).filter(|&v| delta[v] == 2).collect();
        DegreeProfile {
            delta,
            tau,
            deg2_vertices,
        }
    }
}

fn check_weight(edge: usize, w: &DenseMatrix) -> Result<DenseMatrix> {
    let scale = max_abs(w).max(1.0);
    let asymmetry = w.asymmetry();
    if asymmetry > SYM_TOL * scale {
        return Err(Error::NotSymmetric {
            edge: edge + 1,
            asymmetry,
        });
    }
    let w = w.symmetrized();
    let min_eigenvalue = sym_eigenvalues(&w)?[0];
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails too
    if !(min_eigenvalue > PD_TOL * scale) {
        return Err(Error::NotPositiveDefinite {
            edge: edge + 1,
            min_eigenvalue,
        });
    }
    Ok(w)
}

/// True when `w` passes the same symmetry and positive definiteness test
/// applied during validation.
pub fn is_positive_definite(w: &DenseMatrix) -> bool {
    w.is_square() && check_weight(0, w).is_ok()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
