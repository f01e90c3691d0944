//! Minimum spanning trees and the edge-swap spanning-tree family used by the
//! tree filterbank variant.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Which total weight the spanning tree optimizes. Weighted graphs in this
/// domain sometimes encode similarity (where a maximum tree is the natural
/// backbone) and sometimes cost, so both polarities are exposed; the default
/// everywhere is `Minimum`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreePolarity {
    #[default]
    Minimum,
    Maximum,
}

/// A subgraph together with its spanning trees: the base subgraph (when it is
/// not itself a tree), its MST, and one single-edge-swap tree per non-tree
/// edge, deduplicated by edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTreeFamily {
    members: Vec<Graph>,
    base: Option<usize>,
}

impl SpanningTreeFamily {
    pub fn members(&self) -> &[Graph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the member equal to the input subgraph; `None` when the input
    /// was itself a tree.
    pub fn base(&self) -> Option<usize> {
        self.base
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

impl Graph {
    /// Kruskal spanning tree with deterministic tie-breaking: candidate edges
    /// are taken in `(w, u, v)` order (descending weight for the maximum
    /// polarity).
    pub fn spanning_tree(&self, polarity: TreePolarity) -> Result<Graph> {
        if !self.is_connected() {
            return Err(Error::Disconnected(
                "spanning tree requested for a disconnected graph".into(),
            ));
        }
        let mut order: Vec<usize> = (0..self.edge_count()).collect();
        let edges = self.edges();
        order.sort_by(|&a, &b| {
            let (ea, eb) = (edges[a], edges[b]);
            let by_weight = match polarity {
                TreePolarity::Minimum => ea.w.total_cmp(&eb.w),
                TreePolarity::Maximum => eb.w.total_cmp(&ea.w),
            };
            by_weight.then((ea.u, ea.v).cmp(&(eb.u, eb.v)))
        });
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n);
        let mut picked = Vec::with_capacity(n.saturating_sub(1));
        for idx in order {
            let e = edges[idx];
            if uf.union(e.u, e.v) {
                picked.push((e.u, e.v, e.w));
                if picked.len() == n - 1 {
                    break;
                }
            }
        }
        Graph::new(n, picked)
    }

    pub fn minimum_spanning_tree(&self) -> Result<Graph> {
        self.spanning_tree(TreePolarity::Minimum)
    }

    /// The edge-swap family with the default (minimum) backbone.
    pub fn spanning_tree_family(&self) -> Result<SpanningTreeFamily> {
        self.spanning_tree_family_with(TreePolarity::Minimum)
    }

    /// Collects `{self, MST, one swap per non-tree edge}`, deduplicated.
    ///
    /// The MST is rooted at vertex 0; a non-tree edge `(u, v)` swaps in for
    /// the parent edge of its deeper endpoint (equal depths pick the larger
    /// vertex index), which always lies on the cycle the edge closes. A tree
    /// input collapses to a single-member family; otherwise the family has
    /// `|E| - n + 3` members.
    pub fn spanning_tree_family_with(&self, polarity: TreePolarity) -> Result<SpanningTreeFamily> {
        let mst = self.spanning_tree(polarity)?;
        let n = self.vertex_count();

        let input_is_tree = self.edge_count() == n - 1;
        if input_is_tree {
            return Ok(SpanningTreeFamily {
                members: vec![self.clone()],
                base: None,
            });
        }

        // Root the MST at vertex 0.
        let adj = mst.adjacency();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut stack = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    stack.push(v);
                }
            }
        }

        let in_mst: std::collections::BTreeSet<(usize, usize)> =
            mst.edges().iter().map(|e| (e.u, e.v)).collect();

        let mut members = vec![self.clone(), mst.clone()];
        for e in self.edges() {
            if in_mst.contains(&(e.u, e.v)) {
                continue;
            }
            let chosen = match depth[e.u].cmp(&depth[e.v]) {
                std::cmp::Ordering::Greater => e.u,
                std::cmp::Ordering::Less => e.v,
                std::cmp::Ordering::Equal => e.u.max(e.v),
            };
            let drop = (chosen.min(parent[chosen]), chosen.max(parent[chosen]));
            let swapped = mst
                .edges()
                .iter()
                .filter(|m| (m.u, m.v) != drop)
                .map(|m| (m.u, m.v, m.w))
                .chain(std::iter::once((e.u, e.v, e.w)));
            members.push(Graph::new(n, swapped)?);
        }

        // Dedup by edge set, keeping first occurrences.
        let mut seen_sets = std::collections::BTreeSet::new();
        let mut unique = Vec::new();
        for g in members {
            let key: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
            if seen_sets.insert(key) {
                unique.push(g);
            }
        }

        Ok(SpanningTreeFamily {
            members: unique,
            base: Some(0),
        })
    }
}
