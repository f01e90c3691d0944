//! Multi-graph partition trees: hierarchical vertex partitions where every
//! level carries a coarse graph on its clusters and every non-leaf node knows
//! the subgraph induced by its children.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::write_atomic;

/// One cluster in the hierarchy. Its index within its level is its `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterNode {
    /// Original-graph vertices in this cluster, ascending.
    pub members: Vec<usize>,
    /// Indices of child nodes on the next level, ascending. Empty for leaves.
    pub children: Vec<usize>,
}

/// A rooted hierarchy of vertex partitions over `0..n`.
///
/// Level 0 holds the single root cluster (all vertices), level `J` holds one
/// singleton leaf per vertex, and `coarse_graphs[j]` is the graph whose
/// vertices are the level-`j` clusters; `coarse_graphs[J]` is the original
/// graph itself.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraphPartitionTree {
    levels: Vec<Vec<ClusterNode>>,
    coarse_graphs: Vec<Graph>,
}

/// The subgraph a non-leaf node induces on the next level's coarse graph.
/// Vertex `t` of `subgraph` is the node's `t`-th child.
#[derive(Debug, Clone)]
pub struct SubgraphView {
    pub level: usize,
    pub index: usize,
    pub subgraph: Graph,
}

/// Outcome of one structural check.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub name: &'static str,
    pub passed: bool,
    /// `(level, index)` of offending nodes, or `(level, 0)` for level-wide
    /// failures.
    pub offending: Vec<(usize, usize)>,
}

/// Validation report: hard structural conditions plus an optional
/// connectivity flag list (disconnected induced subgraphs are legal unless
/// the caller demands otherwise).
#[derive(Debug, Clone)]
pub struct TreeValidation {
    pub checks: Vec<ConditionReport>,
    pub disconnected_subgraphs: Option<Vec<(usize, usize)>>,
}

impl TreeValidation {
    /// True when every hard structural condition holds.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// True when connectivity was checked and no node was flagged.
    pub fn connected_ok(&self) -> bool {
        self.disconnected_subgraphs
            .as_ref()
            .is_none_or(|v| v.is_empty())
    }
}

impl MultiGraphPartitionTree {
    /// Number of levels minus one (levels run `0..=depth`).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.original().vertex_count()
    }

    pub fn level(&self, j: usize) -> &[ClusterNode] {
        &self.levels[j]
    }

    pub fn node(&self, j: usize, k: usize) -> &ClusterNode {
        &self.levels[j][k]
    }

    pub fn coarse_graph(&self, j: usize) -> &Graph {
        &self.coarse_graphs[j]
    }

    pub fn original(&self) -> &Graph {
        &self.coarse_graphs[self.depth()]
    }

    pub fn is_leaf(&self, j: usize, _k: usize) -> bool {
        j == self.depth()
    }

    /// Assemble a tree from explicit levels and coarse graphs (e.g. a
    /// partition computed by an external tool), validating the structure.
    pub fn from_parts(levels: Vec<Vec<ClusterNode>>, coarse_graphs: Vec<Graph>) -> Result<Self> {
        if levels.is_empty() || coarse_graphs.len() != levels.len() {
            return Err(Error::InvalidInput(
                "tree needs one coarse graph per level".into(),
            ));
        }
        let tree = MultiGraphPartitionTree {
            levels,
            coarse_graphs,
        };
        let report = tree.validate(false);
        if !report.passed() {
            let failed: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            return Err(Error::InvalidInput(format!(
                "partition tree failed validation: {}",
                failed.join(", ")
            )));
        }
        Ok(tree)
    }

    /// Bottom-up greedy heavy-edge grouping.
    ///
    /// Each round groups up to `target_branching` mutually linked clusters of
    /// the current coarse graph, seeding at the heaviest edge and growing by
    /// largest cross-weight. Leftover singletons join the group of their
    /// heaviest neighbor, or the smallest group when they have no neighbor,
    /// so every non-leaf node ends up with at least two children. Ties break
    /// toward smaller indices throughout, making the tree reproducible.
    ///
    /// `connected_clusters` does not change the grouping (linked merges are
    /// always preferred); it logs any node whose induced subgraph still ends
    /// up disconnected, which can only happen on disconnected inputs.
    pub fn build(g: &Graph, target_branching: usize, connected_clusters: bool) -> Result<Self> {
        if target_branching < 2 {
            return Err(Error::Config(format!(
                "target branching must be at least 2, got {target_branching}"
            )));
        }
        let n = g.vertex_count();
        let leaves: Vec<ClusterNode> = (0..n)
            .map(|v| ClusterNode {
                members: vec![v],
                children: Vec::new(),
            })
            .collect();

        // Built leaf-first, reversed at the end.
        let mut levels_rev = vec![leaves];
        let mut coarse_rev = vec![g.clone()];

        let mut current = g.clone();
        while current.vertex_count() > 1 {
            let groups = group_once(&current, target_branching);
            let child_level = levels_rev.last().unwrap();
            let nodes: Vec<ClusterNode> = groups
                .iter()
                .map(|group| {
                    let mut members: Vec<usize> = group
                        .iter()
                        .flat_map(|&c| child_level[c].members.iter().copied())
                        .collect();
                    members.sort_unstable();
                    ClusterNode {
                        members,
                        children: group.clone(),
                    }
                })
                .collect();
            current = coarsen_graph(&current, &groups)?;
            levels_rev.push(nodes);
            coarse_rev.push(current.clone());
        }

        levels_rev.reverse();
        coarse_rev.reverse();
        let tree = MultiGraphPartitionTree {
            levels: levels_rev,
            coarse_graphs: coarse_rev,
        };

        if connected_clusters {
            let report = tree.validate(true);
            if let Some(flagged) = &report.disconnected_subgraphs {
                for &(j, k) in flagged {
                    log::warn!("cluster ({j}, {k}) induces a disconnected subgraph");
                }
            }
        }
        debug_assert!(tree.validate(false).passed());
        Ok(tree)
    }

    /// Check every structural condition; with `check_connectivity`, also flag
    /// nodes whose induced subgraph is disconnected.
    pub fn validate(&self, check_connectivity: bool) -> TreeValidation {
        let n = self.vertex_count();
        let depth = self.depth();
        let mut checks = Vec::new();

        // Root covers all vertices.
        let root_ok = self.levels[0].len() == 1
            && self.levels[0][0].members == (0..n).collect::<Vec<_>>();
        checks.push(ConditionReport {
            name: "root-covers-all-vertices",
            passed: root_ok,
            offending: if root_ok { vec![] } else { vec![(0, 0)] },
        });

        // Leaves are singletons, one per vertex.
        let mut leaf_bad = Vec::new();
        if self.levels[depth].len() != n {
            leaf_bad.push((depth, 0));
        } else {
            let mut seen = vec![false; n];
            for (k, node) in self.levels[depth].iter().enumerate() {
                match node.members.as_slice() {
                    [v] if *v < n && !seen[*v] => seen[*v] = true,
                    _ => leaf_bad.push((depth, k)),
                }
            }
        }
        checks.push(ConditionReport {
            name: "leaves-are-singletons",
            passed: leaf_bad.is_empty(),
            offending: leaf_bad,
        });

        // Each level partitions the vertex set.
        let mut partition_bad = Vec::new();
        for (j, level) in self.levels.iter().enumerate() {
            let mut count = vec![0usize; n];
            for node in level {
                for &v in &node.members {
                    if v < n {
                        count[v] += 1;
                    } else {
                        partition_bad.push((j, 0));
                    }
                }
            }
            if count.iter().any(|&c| c != 1) {
                partition_bad.push((j, 0));
            }
        }
        partition_bad.dedup();
        checks.push(ConditionReport {
            name: "levels-partition-vertices",
            passed: partition_bad.is_empty(),
            offending: partition_bad,
        });

        // Children refine parents: >= 2 children, each child used once,
        // members equal the union of children members.
        let mut refine_bad = Vec::new();
        for j in 0..depth {
            let next_len = self.levels[j + 1].len();
            let mut used = vec![false; next_len];
            for (k, node) in self.levels[j].iter().enumerate() {
                if node.children.len() < 2 {
                    refine_bad.push((j, k));
                    continue;
                }
                let mut union = Vec::new();
                let mut ok = true;
                for &c in &node.children {
                    if c >= next_len || used[c] {
                        ok = false;
                        break;
                    }
                    used[c] = true;
                    union.extend_from_slice(&self.levels[j + 1][c].members);
                }
                union.sort_unstable();
                if !ok || union != node.members {
                    refine_bad.push((j, k));
                }
            }
            if !used.iter().all(|&u| u) {
                refine_bad.push((j, 0));
            }
        }
        // Leaves must not declare children.
        for (k, node) in self.levels[depth].iter().enumerate() {
            if !node.children.is_empty() {
                refine_bad.push((depth, k));
            }
        }
        refine_bad.dedup();
        checks.push(ConditionReport {
            name: "children-refine-parent",
            passed: refine_bad.is_empty(),
            offending: refine_bad,
        });

        // Coarse graphs: one per level with matching vertex counts.
        let mut coarse_bad = Vec::new();
        for (j, cg) in self.coarse_graphs.iter().enumerate() {
            if cg.vertex_count() != self.levels[j].len() {
                coarse_bad.push((j, 0));
            }
        }
        checks.push(ConditionReport {
            name: "coarse-graph-sizes",
            passed: coarse_bad.is_empty(),
            offending: coarse_bad,
        });

        let disconnected_subgraphs = check_connectivity.then(|| {
            let mut flagged = Vec::new();
            for j in 0..depth {
                for k in 0..self.levels[j].len() {
                    if let Ok(view) = self.subgraph_of(j, k) {
                        if !view.subgraph.is_connected() {
                            flagged.push((j, k));
                        }
                    }
                }
            }
            flagged
        });

        TreeValidation {
            checks,
            disconnected_subgraphs,
        }
    }

    /// Subgraph of the level-`j+1` coarse graph induced by the children of
    /// node `(j, k)`, in children order.
    pub fn subgraph_of(&self, j: usize, k: usize) -> Result<SubgraphView> {
        if j >= self.depth() {
            return Err(Error::InvalidInput(format!(
                "node ({j}, {k}) is a leaf and induces no subgraph"
            )));
        }
        let node = self
            .levels
            .get(j)
            .and_then(|level| level.get(k))
            .ok_or_else(|| Error::InvalidInput(format!("no node ({j}, {k}) in tree")))?;
        let subgraph = self.coarse_graphs[j + 1].induced_subgraph(&node.children)?;
        Ok(SubgraphView {
            level: j,
            index: k,
            subgraph,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = TreeFile::from_tree(self);
        write_atomic(path, |out| {
            serde_json::to_writer_pretty(&mut *out, &file)?;
            out.write_all(b"\n")?;
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        let file: TreeFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        file.into_tree()
            .map_err(|e| Error::parse(path, 0, e.to_string()))
    }
}

/// Merge a partition of `g`'s vertices into super-nodes; the weight between
/// two super-nodes is the summed weight of all crossing edges.
pub fn coarsen_graph(g: &Graph, partition: &[Vec<usize>]) -> Result<Graph> {
    let n = g.vertex_count();
    let mut block = vec![usize::MAX; n];
    for (b, members) in partition.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::InvalidInput(format!("partition block {b} is empty")));
        }
        for &v in members {
            if v >= n {
                return Err(Error::InvalidInput(format!(
                    "partition vertex {v} out of range for {n} vertices"
                )));
            }
            if block[v] != usize::MAX {
                return Err(Error::InvalidInput(format!(
                    "vertex {v} appears in more than one partition block"
                )));
            }
            block[v] = b;
        }
    }
    if let Some(v) = block.iter().position(|&b| b == usize::MAX) {
        return Err(Error::InvalidInput(format!(
            "vertex {v} is missing from the partition"
        )));
    }

    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (block[e.u], block[e.v]);
        if a != b {
            *weights.entry((a.min(b), a.max(b))).or_insert(0.0) += e.w;
        }
    }
    Graph::new(
        partition.len(),
        weights.into_iter().map(|((a, b), w)| (a, b, w)),
    )
}

/// One grouping round of the greedy heavy-edge builder; returns groups of
/// current-node indices, each with at least two members, sorted by smallest
/// member.
fn group_once(h: &Graph, branching: usize) -> Vec<Vec<usize>> {
    let nc = h.vertex_count();
    debug_assert!(nc >= 2);
    let adj = h.adjacency();

    let mut order: Vec<usize> = (0..h.edge_count()).collect();
    let edges = h.edges();
    order.sort_by(|&a, &b| {
        edges[b]
            .w
            .total_cmp(&edges[a].w)
            .then((edges[a].u, edges[a].v).cmp(&(edges[b].u, edges[b].v)))
    });

    let mut group_of = vec![usize::MAX; nc];
    let mut groups: Vec<Vec<usize>> = Vec::new();

    // Seed at the heaviest free edge, then grow by largest cross-weight.
    for &idx in &order {
        let e = edges[idx];
        if group_of[e.u] != usize::MAX || group_of[e.v] != usize::MAX {
            continue;
        }
        let gid = groups.len();
        let mut group = vec![e.u, e.v];
        group_of[e.u] = gid;
        group_of[e.v] = gid;
        while group.len() < branching {
            let mut cross: BTreeMap<usize, f64> = BTreeMap::new();
            for &m in &group {
                for &(nb, w) in &adj[m] {
                    if group_of[nb] == usize::MAX {
                        *cross.entry(nb).or_insert(0.0) += w;
                    }
                }
            }
            let best = cross
                .into_iter()
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
            match best {
                Some((nb, _)) => {
                    group_of[nb] = gid;
                    group.push(nb);
                }
                None => break,
            }
        }
        groups.push(group);
    }

    // Leftovers: all their neighbors are grouped already (otherwise some
    // free edge would have seeded a group).
    for v in 0..nc {
        if group_of[v] != usize::MAX {
            continue;
        }
        let heaviest = adj[v]
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match heaviest {
            Some(&(nb, _)) => {
                let gid = group_of[nb];
                group_of[v] = gid;
                groups[gid].push(v);
            }
            None if !groups.is_empty() => {
                let gid = (0..groups.len())
                    .min_by_key(|&g| (groups[g].len(), g))
                    .unwrap();
                group_of[v] = gid;
                groups[gid].push(v);
            }
            None => {
                // Isolated vertex and no group exists yet: the graph has no
                // edges at all. Chunk in index order below.
                let gid = match groups.last() {
                    Some(last) if last.len() < branching => groups.len() - 1,
                    _ => {
                        groups.push(Vec::new());
                        groups.len() - 1
                    }
                };
                group_of[v] = gid;
                groups[gid].push(v);
            }
        }
    }

    // An edgeless chunking can leave one trailing singleton.
    if let Some(single) = groups.pop_if(|g| g.len() < 2) {
        groups.last_mut().unwrap().extend(single);
    }

    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    #[serde(rename = "J")]
    depth: usize,
    levels: Vec<Vec<NodeFile>>,
    coarse_graphs: Vec<GraphFile>,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    k: usize,
    members: Vec<usize>,
    children: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl TreeFile {
    fn from_tree(tree: &MultiGraphPartitionTree) -> Self {
        TreeFile {
            depth: tree.depth(),
            levels: tree
                .levels
                .iter()
                .map(|level| {
                    level
                        .iter()
                        .enumerate()
                        .map(|(k, node)| NodeFile {
                            k,
                            members: node.members.clone(),
                            children: node.children.clone(),
                        })
                        .collect()
                })
                .collect(),
            coarse_graphs: tree
                .coarse_graphs
                .iter()
                .map(|g| GraphFile {
                    n: g.vertex_count(),
                    edges: g.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
                })
                .collect(),
        }
    }

    fn into_tree(self) -> Result<MultiGraphPartitionTree> {
        if self.levels.len() != self.depth + 1 {
            return Err(Error::InvalidInput(format!(
                "J = {} but file has {} levels",
                self.depth,
                self.levels.len()
            )));
        }
        let mut levels = Vec::with_capacity(self.levels.len());
        for (j, level) in self.levels.into_iter().enumerate() {
            let mut nodes = Vec::with_capacity(level.len());
            for (pos, node) in level.into_iter().enumerate() {
                if node.k != pos {
                    return Err(Error::InvalidInput(format!(
                        "node at position {pos} of level {j} declares k = {}",
                        node.k
                    )));
                }
                nodes.push(ClusterNode {
                    members: node.members,
                    children: node.children,
                });
            }
            levels.push(nodes);
        }
        let coarse_graphs = self
            .coarse_graphs
            .into_iter()
            .map(|g| Graph::new(g.n, g.edges))
            .collect::<Result<Vec<_>>>()?;
        MultiGraphPartitionTree::from_parts(levels, coarse_graphs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn coarsen_identity_partition() {
        let g = unit_cycle(4);
        let parts: Vec<Vec<usize>> = (0..4).map(|v| vec![v]).collect();
        assert_eq!(coarsen_graph(&g, &parts).unwrap(), g);
    }

    #[test]
    fn coarsen_triangle_pair() {
        let g = Graph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let coarse = coarsen_graph(&g, &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(coarse.vertex_count(), 2);
        assert_eq!(coarse.edge_count(), 1);
        assert_eq!(coarse.edges()[0].w, 2.0);
    }

    #[test]
    fn coarsen_disconnected_pair_has_no_edge() {
        let g = Graph::edgeless(2).unwrap();
        let coarse = coarsen_graph(&g, &[vec![0, 1]]).unwrap();
        assert_eq!(coarse.vertex_count(), 1);
        assert_eq!(coarse.edge_count(), 0);
    }

    #[test]
    fn coarsen_rejects_bad_partition() {
        let g = unit_cycle(3);
        assert!(coarsen_graph(&g, &[vec![0, 1]]).is_err()); // missing 2
        assert!(coarsen_graph(&g, &[vec![0, 1], vec![1, 2]]).is_err()); // overlap
        assert!(coarsen_graph(&g, &[vec![0, 1, 2], vec![]]).is_err()); // empty block
    }

    #[test]
    fn coarsen_conserves_cross_weight() {
        let g = Graph::new(
            6,
            vec![
                (0, 1, 0.5),
                (1, 2, 1.5),
                (2, 3, 2.0),
                (3, 4, 0.25),
                (4, 5, 1.0),
                (0, 5, 3.0),
                (1, 4, 0.75),
            ],
        )
        .unwrap();
        let parts = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        let coarse = coarsen_graph(&g, &parts).unwrap();
        let intra = 0.5 + 2.0 + 1.0;
        let expected = g.total_weight() - intra;
        assert!((coarse.total_weight() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn build_single_vertex() {
        let g = Graph::edgeless(1).unwrap();
        let t = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
        assert_eq!(t.depth(), 0);
        assert_eq!(t.level(0).len(), 1);
        assert_eq!(t.node(0, 0).members, vec![0]);
        assert!(t.validate(false).passed());
    }

    #[test]
    fn build_four_cycle_binary() {
        let t = MultiGraphPartitionTree::build(&unit_cycle(4), 2, false).unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.level(1).len(), 2);
        assert_eq!(t.node(1, 0).members, vec![0, 1]);
        assert_eq!(t.node(1, 1).members, vec![2, 3]);
        assert_eq!(t.coarse_graph(1).edges()[0].w, 2.0);
        assert!(t.validate(false).passed());
    }

    #[test]
    fn build_handles_edgeless_graphs() {
        let g = Graph::edgeless(5).unwrap();
        let t = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
        assert!(t.validate(false).passed());
        let report = t.validate(true);
        assert!(!report.disconnected_subgraphs.unwrap().is_empty());
    }

    #[test]
    fn build_output_validates_on_varied_graphs() {
        for (n, b) in [(2, 2), (3, 2), (7, 2), (9, 3), (16, 4), (23, 2)] {
            let g = path(n);
            let t = MultiGraphPartitionTree::build(&g, b, true).unwrap();
            assert!(t.validate(true).passed(), "n={n} b={b}");
            assert!(t.validate(true).connected_ok(), "n={n} b={b}");
            // every group >= 2 forces at least halving per level
            assert!(
                t.depth() <= (n as f64).log2().ceil() as usize + 1,
                "depth {} too large for n={n}",
                t.depth()
            );
        }
    }

    #[test]
    fn hand_built_overlap_fails_disjointness() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let levels = vec![
            vec![ClusterNode {
                members: vec![0, 1],
                children: vec![0, 1],
            }],
            vec![
                ClusterNode {
                    members: vec![0],
                    children: vec![],
                },
                ClusterNode {
                    members: vec![0],
                    children: vec![],
                },
            ],
        ];
        let tree = MultiGraphPartitionTree {
            levels,
            coarse_graphs: vec![Graph::edgeless(1).unwrap(), g],
        };
        let report = tree.validate(false);
        assert!(!report.passed());
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert!(failed.contains(&"levels-partition-vertices"));
    }

    #[test]
    fn disconnected_cluster_is_flagged() {
        // Path 0-1-2-3 split into {0,2} and {1,3}: neither induced subgraph
        // has an edge.
        let g = path(4);
        let levels = vec![
            vec![ClusterNode {
                members: vec![0, 1, 2, 3],
                children: vec![0, 1],
            }],
            vec![
                ClusterNode {
                    members: vec![0, 2],
                    children: vec![0, 2],
                },
                ClusterNode {
                    members: vec![1, 3],
                    children: vec![1, 3],
                },
            ],
            (0..4)
                .map(|v| ClusterNode {
                    members: vec![v],
                    children: vec![],
                })
                .collect(),
        ];
        let coarse1 = coarsen_graph(&g, &[vec![0, 2], vec![1, 3]]).unwrap();
        let coarse0 = coarsen_graph(&coarse1, &[vec![0, 1]]).unwrap();
        let tree =
            MultiGraphPartitionTree::from_parts(levels, vec![coarse0, coarse1, g]).unwrap();
        let report = tree.validate(true);
        assert!(report.passed());
        assert_eq!(report.disconnected_subgraphs.unwrap(), vec![(1, 0), (1, 1)]);
    }

    #[test]
    fn subgraph_views() {
        let t = MultiGraphPartitionTree::build(&unit_cycle(4), 2, false).unwrap();
        // root of the 2-level tree sees the whole level-1 coarse graph
        let root_view = t.subgraph_of(0, 0).unwrap();
        assert_eq!(root_view.subgraph, *t.coarse_graph(1));
        // leaf parents with one linking edge form a 2-path
        let view = t.subgraph_of(1, 0).unwrap();
        assert_eq!(view.subgraph.vertex_count(), 2);
        assert_eq!(view.subgraph.edge_count(), 1);
        // leaves induce nothing
        assert!(t.subgraph_of(2, 0).is_err());
    }

    #[test]
    fn edgeless_children_induce_edgeless_subgraph() {
        let g = Graph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let t = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
        // level 1 has the two linked pairs; the root's children share no edge
        let root_view = t.subgraph_of(0, 0).unwrap();
        assert_eq!(root_view.subgraph.edge_count(), 0);
        assert!(!root_view.subgraph.is_connected());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for n in [1usize, 4, 11] {
            let g = if n == 1 {
                Graph::edgeless(1).unwrap()
            } else {
                path(n)
            };
            let t = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
            let file = dir.path().join(format!("t{n}.json"));
            t.save(&file).unwrap();
            let loaded = MultiGraphPartitionTree::load(&file).unwrap();
            assert_eq!(loaded, t);
        }
    }

    #[test]
    fn load_rejects_duplicate_vertex() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("bad.json");
        let json = r#"{
            "J": 1,
            "levels": [
                [{"k": 0, "members": [0, 1], "children": [0, 1]}],
                [{"k": 0, "members": [0], "children": []},
                 {"k": 1, "members": [0], "children": []}]
            ],
            "coarse_graphs": [
                {"n": 1, "edges": []},
                {"n": 2, "edges": [[0, 1, 1.0]]}
            ]
        }"#;
        std::fs::write(&file, json).unwrap();
        let err = MultiGraphPartitionTree::load(&file).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn load_accepts_singleton_tree() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("one.json");
        let json = r#"{
            "J": 0,
            "levels": [[{"k": 0, "members": [0], "children": []}]],
            "coarse_graphs": [{"n": 1, "edges": []}]
        }"#;
        std::fs::write(&file, json).unwrap();
        let t = MultiGraphPartitionTree::load(&file).unwrap();
        assert_eq!(t.depth(), 0);
    }
}
