//! Simple undirected graphs and the families used by the experiments.
//!
//! All public interfaces use 1-based vertex labels. Edges are kept as
//! `(j, k)` pairs with `j < k`, sorted lexicographically; this order is the
//! canonical edge order used by phase vectors.
//!
//! The 12-site switch uses a fixed labeling: input arm 1-2-3-4, the triangle
//! {4, 5, 6}, output arm 5-8-10-12 and the second arm 6-7-9-11. Any other
//! labeling consistent with the same picture is a vertex permutation and gives
//! the same observables after relabeling.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Result, WalkError};

/// Undirected simple graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge list. Pairs may be given in either
    /// orientation; self-loops, duplicates and out-of-range labels are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::InvalidGraph("vertex count must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(WalkError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(WalkError::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(WalkError::InvalidGraph(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
        }
        Ok(Self { n, edges: set.into_iter().collect() })
    }

    /// The `n`-cycle with edges `(j, j+1)` and `(1, n)`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(WalkError::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
        }
        Self::new(n, (1..=n).map(|j| (j, j % n + 1)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(WalkError::InvalidArgument(format!("complete graph needs n >= 2, got {n}")));
        }
        Self::new(n, (1..=n).flat_map(|j| (j + 1..=n).map(move |k| (j, k))))
    }

    /// The 12-site quantum switch (see the module docs for the labeling).
    pub fn switch() -> Self {
        const EDGES: [(usize, usize); 12] = [
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (4, 6),
            (5, 6),
            (5, 8),
            (8, 10),
            (10, 12),
            (6, 7),
            (7, 9),
            (9, 11),
        ];
        Self::new(12, EDGES).expect("switch edge list is valid")
    }

    /// Hypercube of dimension `dim`. Vertex `v` carries the binary label of
    /// `v - 1`; so vertex 1 is `00..0` and vertex `2^dim` is its antipode.
    pub fn hypercube(dim: u32) -> Result<Self> {
        if dim < 1 {
            return Err(WalkError::InvalidArgument("hypercube needs dim >= 1".into()));
        }
        if dim > 16 {
            return Err(WalkError::InvalidArgument(format!("hypercube dim {dim} is too large")));
        }
        let n = 1usize << dim;
        let edges = (0..n).flat_map(|v| {
            (0..dim).filter_map(move |b| {
                let w = v ^ (1 << b);
                (w > v).then_some((v + 1, w + 1))
            })
        });
        Self::new(n, edges)
    }

    /// Star with core vertex 1 and leaves `2..=n`.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(WalkError::InvalidArgument(format!("star needs n >= 2, got {n}")));
        }
        Self::new(n, (2..=n).map(|k| (1, k)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in canonical order, `j < k`, 1-based.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of the edge `{j, k}` in the canonical order.
    pub fn edge_index(&self, j: usize, k: usize) -> Option<usize> {
        let key = (j.min(k), j.max(k));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.edge_index(j, k).is_some()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(WalkError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(j, k) in &self.edges {
            d[j - 1] += 1;
            d[k - 1] += 1;
        }
        d
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(j, k)| j == v || k == v).count()
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degrees();
        d.iter().all(|&x| x == d[0])
    }

    /// Neighbour lists, 0-based, in ascending order.
    pub(crate) fn neighbors0(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(j, k) in &self.edges {
            adj[j - 1].push(k - 1);
            adj[k - 1].push(j - 1);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_parents().iter().all(|p| p.is_some())
    }

    /// Breadth-first spanning tree from vertex 1: `parents[v]` is
    /// `Some(parent)` (0-based) for every reached vertex, with the root
    /// mapped to itself.
    pub(crate) fn bfs_parents(&self) -> Vec<Option<usize>> {
        self.bfs_tree().1
    }

    /// Visit order and parent links of the breadth-first tree from vertex 1.
    pub(crate) fn bfs_tree(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let adj = self.neighbors0();
        let mut parent = vec![None; self.n];
        parent[0] = Some(0);
        let mut order = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if parent[w].is_none() {
                    parent[w] = Some(v);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        (order, parent)
    }

    /// Number of independent cycles, `|E| - n + 1`; this is the number of
    /// phases that gauge transformations cannot remove.
    pub fn free_phase_count(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(WalkError::Disconnected);
        }
        Ok(self.edges.len() + 1 - self.n)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(j, k) in &self.edges {
            a[(j - 1, k - 1)] = 1.0;
            a[(k - 1, j - 1)] = 1.0;
        }
        a
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for (v, d) in self.degrees().into_iter().enumerate() {
            l[(v, v)] = d as f64;
        }
        l
    }

    /// Applies a vertex relabeling `v -> perm[v - 1]` (1-based images).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(WalkError::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            self.check_vertex(p)?;
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(WalkError::InvalidArgument("relabeling is not a permutation".into()));
            }
        }
        Self::new(self.n, self.edges.iter().map(|&(j, k)| (perm[j - 1], perm[k - 1])))
    }
}

/// Plain-text edge list: `n <N>` followed by one `j k` pair per line.
/// Blank lines and `#` comments are ignored when parsing.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (j, k) in &self.edges {
            writeln!(f, "{j} {k}")?;
        }
        Ok(())
    }
}

impl FromStr for Graph {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| WalkError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (n, fields.as_slice()) {
                (None, ["n", count]) => {
                    n = Some(count.parse::<usize>().map_err(|e| parse_err(e.to_string()))?);
                }
                (None, _) => return Err(parse_err("expected header `n <N>`".into())),
                (Some(_), [a, b]) => {
                    let a = a.parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
                    let b = b.parse::<usize>().map_err(|e| parse_err(e.to_string()))?;
                    edges.push((a, b));
                }
                (Some(_), _) => return Err(parse_err(format!("expected `j k`, got `{line}`"))),
            }
        }
        let n = n.ok_or(WalkError::Parse { line: 0, message: "missing header".into() })?;
        Self::new(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_basics() {
        let g = Graph::cycle(3).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 3)]);
        let g = Graph::cycle(8).unwrap();
        assert_eq!(g.edge_count(), 8);
        assert!(g.degrees().iter().all(|&d| d == 2));
        let l = Graph::cycle(5).unwrap().laplacian();
        assert!((0..5).all(|v| l[(v, v)] == 2.0));
        assert!(Graph::cycle(2).is_err());
    }

    #[test]
    fn complete_basics() {
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        assert!(Graph::complete(13).unwrap().degrees().iter().all(|&d| d == 12));
        assert_eq!(Graph::complete(2).unwrap().edges(), &[(1, 2)]);
        assert!(Graph::complete(1).is_err());
    }

    #[test]
    fn switch_structure() {
        let g = Graph::switch();
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.degrees(), vec![1, 2, 2, 3, 3, 3, 2, 2, 2, 2, 1, 1]);
        assert_eq!(g.free_phase_count().unwrap(), 1);
        let l = g.laplacian();
        let diag: Vec<f64> = (0..12).map(|v| l[(v, v)]).collect();
        assert_eq!(diag, vec![1., 2., 2., 3., 3., 3., 2., 2., 2., 2., 1., 1.]);
    }

    #[test]
    fn switch_without_second_arm_is_a_chain() {
        let g = Graph::switch();
        let arm = [6, 7, 9, 11];
        let kept: Vec<_> =
            g.edges().iter().copied().filter(|(j, k)| !arm.contains(j) && !arm.contains(k)).collect();
        // 1-2-3-4-5-8-10-12
        assert_eq!(kept.len(), 7);
        let chain = [1, 2, 3, 4, 5, 8, 10, 12];
        for w in chain.windows(2) {
            assert!(kept.contains(&(w[0].min(w[1]), w[0].max(w[1]))));
        }
    }

    #[test]
    fn hypercube_basics() {
        let g = Graph::hypercube(3).unwrap();
        assert_eq!((g.n(), g.edge_count()), (8, 12));
        assert_eq!(Graph::hypercube(1).unwrap().edges(), &[(1, 2)]);
        let non_adjacent: Vec<usize> = (2..=8).filter(|&v| !g.has_edge(1, v)).collect();
        assert_eq!(non_adjacent, vec![4, 6, 7, 8]);
        assert!(Graph::hypercube(0).is_err());
    }

    #[test]
    fn star_basics() {
        let g = Graph::star(5).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degree(1), 4);
        assert_eq!(Graph::star(6).unwrap().free_phase_count().unwrap(), 0);
        assert!(Graph::star(1).is_err());
    }

    #[test]
    fn laplacian_and_adjacency() {
        let g = Graph::complete(3).unwrap();
        let l = g.laplacian();
        let expected = DMatrix::identity(3, 3) * 2.0 - g.adjacency();
        assert_eq!(l, expected);
        for r in 0..3 {
            assert_eq!(l.row(r).sum(), 0.0);
        }
        let k2 = Graph::complete(2).unwrap().laplacian();
        assert_eq!(k2, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn free_phase_counts() {
        assert_eq!(Graph::cycle(7).unwrap().free_phase_count().unwrap(), 1);
        assert_eq!(Graph::complete(4).unwrap().free_phase_count().unwrap(), 3);
        let split = Graph::new(4, [(1, 2), (3, 4)]).unwrap();
        assert_eq!(split.free_phase_count(), Err(WalkError::Disconnected));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::new(3, [(1, 1)]), Err(WalkError::InvalidGraph(_))));
        assert!(matches!(Graph::new(3, [(1, 2), (2, 1)]), Err(WalkError::InvalidGraph(_))));
        assert!(matches!(Graph::new(3, [(1, 4)]), Err(WalkError::VertexOutOfRange { .. })));
        assert!(matches!(Graph::new(3, [(0, 2)]), Err(WalkError::VertexOutOfRange { .. })));
    }

    #[test]
    fn edge_list_text() {
        let g = Graph::switch();
        let text = g.to_string();
        assert!(text.starts_with("n 12\n1 2\n"));
        assert_eq!(text.parse::<Graph>().unwrap(), g);
        let parsed: Graph = "# comment\nn 3\n2 1\n\n3 2 # trailing\n".parse().unwrap();
        assert_eq!(parsed.edges(), &[(1, 2), (2, 3)]);
        assert!("1 2\n".parse::<Graph>().is_err());
        assert!("n 3\n1 2 3\n".parse::<Graph>().is_err());
        assert!("n 3\n1 x\n".parse::<Graph>().is_err());
    }
}
