//! Weighted undirected graphs and basic structural operations.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One undirected edge. Stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A weighted undirected graph on vertices `0..n`.
///
/// Weights are strictly positive, the implied weight matrix is symmetric
/// with zero diagonal, and each unordered vertex pair appears at most once.
/// Edges are kept sorted by `(u, v)` so that equal graphs compare equal and
/// every edge-order-dependent choice downstream is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "graph must have at least one vertex".into(),
            ));
        }
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|a| (a.u, a.v));
        if let Some(pos) = list.windows(2).position(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v)) {
            let e = list[pos];
            return Err(Error::InvalidInput(format!(
                "duplicate edge ({}, {})",
                e.u, e.v
            )));
        }
        Ok(Graph { n, edges: list })
    }

    /// A graph with no edges.
    pub fn edgeless(n: usize) -> Result<Self> {
        Graph::new(n, std::iter::empty())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Neighbor lists sorted by neighbor index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_by_key(|a| a.0);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        d
    }

    /// Unnormalized Laplacian L = D - W as a dense matrix.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.v)] -= e.w;
            l[(e.v, e.u)] -= e.w;
            l[(e.u, e.u)] += e.w;
            l[(e.v, e.v)] += e.w;
        }
        l
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let adj = self.adjacency();
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Subgraph induced by `subset`, with vertices relabeled `0..subset.len()`
    /// in subset order. Edge weights are preserved.
    pub fn induced_subgraph(&self, subset: &[usize]) -> Result<Graph> {
        if subset.is_empty() {
            return Err(Error::InvalidInput("subset must be nonempty".into()));
        }
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in subset.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidInput(format!(
                    "subset vertex {v} out of range for {} vertices",
                    self.n
                )));
            }
            if pos[v] != usize::MAX {
                return Err(Error::InvalidInput(format!("duplicated vertex {v} in subset")));
            }
            pos[v] = i;
        }
        let edges = self.edges.iter().filter_map(|e| {
            let (pu, pv) = (pos[e.u], pos[e.v]);
            (pu != usize::MAX && pv != usize::MAX).then_some((pu, pv, e.w))
        });
        Graph::new(subset.len(), edges)
    }

    /// Vertices of a shortest path from `from` to `to` under edge weights as
    /// lengths (Dijkstra; ties resolved toward smaller vertex indices).
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        use std::cmp::Ordering;
        use std::collections::BinaryHeap;

        if from >= self.n || to >= self.n {
            return None;
        }

        #[derive(PartialEq)]
        struct State(f64, usize);
        impl Eq for State {}
        impl Ord for State {
            fn cmp(&self, other: &Self) -> Ordering {
                // min-heap on distance, then on vertex index
                other
                    .0
                    .total_cmp(&self.0)
                    .then_with(|| other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for State {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let adj = self.adjacency();
        let mut dist = vec![f64::INFINITY; self.n];
        let mut prev = vec![usize::MAX; self.n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(State(0.0, from));
        while let Some(State(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == to {
                break;
            }
            for &(v, w) in &adj[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(State(nd, v));
                }
            }
        }
        if dist[to].is_infinite() {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}
