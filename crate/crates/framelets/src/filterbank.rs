//! Per-node filter pairs `(A, B)` and the unitary-extension-principle check
//! they must satisfy: rows of `A` orthonormal, rows of `B` orthogonal to
//! rows of `A`, and `B^T B = I - A^T A`.

use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::MultiGraphPartitionTree;
use crate::spanning::TreePolarity;

/// Tolerance at which every generated pair is verified before use.
pub const UEP_TOL: f64 = 1e-8;

/// Filterbank construction variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Pairwise-difference rows; needs only cluster sizes.
    Haar,
    /// Rows split from the subgraph Laplacian eigenbasis.
    Eigen,
    /// Low-pass constant plus stacked spanning-tree eigenbases.
    Tree,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Haar => "haar",
            Variant::Eigen => "eigen",
            Variant::Tree => "tree",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(Variant::Haar),
            "eigen" => Ok(Variant::Eigen),
            "tree" => Ok(Variant::Tree),
            other => Err(Error::Config(format!(
                "unknown variant '{other}' (expected haar, eigen or tree)"
            ))),
        }
    }
}

/// A low-pass/high-pass matrix pair acting across the children of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    /// `r x c` low-pass filter with orthonormal rows.
    pub a: DMatrix<f64>,
    /// `m x c` high-pass filter.
    pub b: DMatrix<f64>,
    pub variant: Variant,
    /// `(level, index)` of the owning tree node, when generated per node.
    pub node: Option<(usize, usize)>,
}

impl FilterPair {
    /// Children count this pair acts on.
    pub fn width(&self) -> usize {
        self.a.ncols()
    }

    /// Low-pass row count `r`.
    pub fn low_rows(&self) -> usize {
        self.a.nrows()
    }

    /// High-pass row count `m`.
    pub fn high_rows(&self) -> usize {
        self.b.nrows()
    }
}

/// Maximum deviations from the three filter-pair conditions.
#[derive(Debug, Clone, Copy)]
pub struct UepReport {
    /// `max |A A^T - I|`.
    pub a_orthonormality: f64,
    /// `max |B A^T|`.
    pub cross: f64,
    /// `max |B^T B - (I - A^T A)|`.
    pub completion: f64,
}

impl UepReport {
    pub fn max_deviation(&self) -> f64 {
        self.a_orthonormality.max(self.cross).max(self.completion)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

/// Measure how far a pair is from satisfying the UEP condition.
pub fn verify_uep(pair: &FilterPair) -> UepReport {
    let c = pair.width();
    let r = pair.low_rows();
    let a_gram = &pair.a * pair.a.transpose();
    let a_orthonormality = (a_gram - DMatrix::<f64>::identity(r, r)).abs().max();
    let cross = if pair.high_rows() == 0 {
        0.0
    } else {
        (&pair.b * pair.a.transpose()).abs().max()
    };
    let target = DMatrix::<f64>::identity(c, c) - pair.a.transpose() * &pair.a;
    let completion = (pair.b.transpose() * &pair.b - target).abs().max();
    UepReport {
        a_orthonormality,
        cross,
        completion,
    }
}

/// Haar pair on a cluster of size `c`: `A` is the normalized constant row and
/// `B` has one signed-pair row per `s < t`, in `(s, t)` lexicographic order.
pub fn haar_filterbank(c: usize) -> Result<FilterPair> {
    if c < 2 {
        return Err(Error::InvalidInput(format!(
            "haar filterbank needs a cluster of at least 2, got {c}"
        )));
    }
    let scale = 1.0 / (c as f64).sqrt();
    let a = DMatrix::from_element(1, c, scale);
    let mut b = DMatrix::zeros(c * (c - 1) / 2, c);
    let mut row = 0;
    for s in 0..c {
        for t in s + 1..c {
            b[(row, s)] = scale;
            b[(row, t)] = -scale;
            row += 1;
        }
    }
    Ok(FilterPair {
        a,
        b,
        variant: Variant::Haar,
        node: None,
    })
}

/// Eigenvector pair on a subgraph: `A` takes the first `r` Laplacian
/// eigenvectors, `B` the remaining `c - r`. The full basis is orthonormal, so
/// this is the orthonormal (non-redundant) configuration.
pub fn eigen_filterbank(sub: &Graph, r: usize) -> Result<FilterPair> {
    let c = sub.vertex_count();
    if r < 1 || r > c.saturating_sub(1) {
        return Err(Error::InvalidInput(format!(
            "eigen filterbank needs 1 <= r <= {}, got {r}",
            c.saturating_sub(1)
        )));
    }
    let spectrum = sub.spectrum()?;
    Ok(FilterPair {
        a: spectrum.eigenvector_rows(0, r),
        b: spectrum.eigenvector_rows(r, c),
        variant: Variant::Eigen,
        node: None,
    })
}

/// Spanning-tree-enriched pair (`r = 1`): the non-constant eigenvectors of
/// every member of the subgraph's spanning-tree family, stacked and scaled by
/// `1/sqrt(N)`. Every member is connected on the same vertex set, so each
/// contributes the same complement projector and the stack stays tight.
pub fn tree_filterbank(sub: &Graph) -> Result<FilterPair> {
    tree_filterbank_with(sub, TreePolarity::Minimum)
}

pub fn tree_filterbank_with(sub: &Graph, polarity: TreePolarity) -> Result<FilterPair> {
    let c = sub.vertex_count();
    if c < 2 {
        return Err(Error::InvalidInput(format!(
            "tree filterbank needs a cluster of at least 2, got {c}"
        )));
    }
    if !sub.is_connected() {
        return Err(Error::Disconnected(
            "tree filterbank needs a connected subgraph".into(),
        ));
    }
    let family = sub.spanning_tree_family_with(polarity)?;
    let n_members = family.len();
    let scale = 1.0 / (n_members as f64).sqrt();
    let mut b = DMatrix::zeros(n_members * (c - 1), c);
    for (i, member) in family.members().iter().enumerate() {
        let spectrum = member.spectrum()?;
        let rows = spectrum.eigenvector_rows(1, c);
        b.rows_mut(i * (c - 1), c - 1).copy_from(&(scale * rows));
    }
    Ok(FilterPair {
        a: DMatrix::from_element(1, c, 1.0 / (c as f64).sqrt()),
        b,
        variant: Variant::Tree,
        node: None,
    })
}

/// Options for per-tree filterbank generation.
#[derive(Debug, Clone, Copy, Default)]
pub struct BankOptions {
    /// Accept the eigensolver's basis on disconnected subgraphs instead of
    /// rejecting them (the split is then basis-dependent but still tight).
    pub allow_disconnected_eigen: bool,
    /// Backbone polarity for the tree variant.
    pub polarity: TreePolarity,
}

/// One filter pair per non-leaf node of a partition tree.
#[derive(Debug, Clone)]
pub struct NodeFilterbanks {
    variant: Variant,
    r_schedule: Vec<usize>,
    levels: Vec<Vec<FilterPair>>,
}

impl NodeFilterbanks {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Effective per-level low-pass row counts (all ones for haar/tree).
    pub fn r_schedule(&self) -> &[usize] {
        &self.r_schedule
    }

    pub fn pair(&self, j: usize, k: usize) -> Option<&FilterPair> {
        self.levels.get(j).and_then(|level| level.get(k))
    }

    pub fn level(&self, j: usize) -> &[FilterPair] {
        &self.levels[j]
    }

    /// Number of non-leaf levels covered.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &FilterPair)> {
        self.levels.iter().enumerate().flat_map(|(j, level)| {
            level.iter().enumerate().map(move |(k, pair)| ((j, k), pair))
        })
    }
}

/// Generate filter pairs for every non-leaf node of `tree`.
///
/// For the eigen variant `r_schedule` must provide one `r` per non-leaf level
/// with `r[j] <= min cluster size at level j - 1`; haar and tree variants
/// ignore it (their `r` is fixed to 1).
pub fn make_filterbanks(
    tree: &MultiGraphPartitionTree,
    variant: Variant,
    r_schedule: &[usize],
) -> Result<NodeFilterbanks> {
    make_filterbanks_with(tree, variant, r_schedule, &BankOptions::default())
}

pub fn make_filterbanks_with(
    tree: &MultiGraphPartitionTree,
    variant: Variant,
    r_schedule: &[usize],
    options: &BankOptions,
) -> Result<NodeFilterbanks> {
    let depth = tree.depth();

    let effective: Vec<usize> = match variant {
        Variant::Haar | Variant::Tree => vec![1; depth],
        Variant::Eigen => {
            if r_schedule.len() != depth {
                return Err(Error::Config(format!(
                    "eigen variant needs one r per non-leaf level: expected {depth}, got {}",
                    r_schedule.len()
                )));
            }
            for (j, &r) in r_schedule.iter().enumerate() {
                let min_cluster = tree
                    .level(j)
                    .iter()
                    .map(|node| node.children.len())
                    .min()
                    .unwrap_or(0);
                if r < 1 || r + 1 > min_cluster {
                    return Err(Error::Config(format!(
                        "r_schedule[{j}] = {r} out of range: level {j} has minimum cluster size \
                         {min_cluster}, so r must lie in 1..={}",
                        min_cluster.saturating_sub(1)
                    )));
                }
            }
            r_schedule.to_vec()
        }
    };

    let mut levels = Vec::with_capacity(depth);
    for (j, &r_level) in effective.iter().enumerate() {
        let pairs: Vec<FilterPair> = (0..tree.level(j).len())
            .into_par_iter()
            .map(|k| -> Result<FilterPair> {
                let mut pair = match variant {
                    Variant::Haar => haar_filterbank(tree.node(j, k).children.len())?,
                    Variant::Eigen => {
                        let view = tree.subgraph_of(j, k)?;
                        if !options.allow_disconnected_eigen && !view.subgraph.is_connected() {
                            return Err(Error::Disconnected(format!(
                                "eigen filterbank at node ({j}, {k}): induced subgraph is \
                                 disconnected; use the haar variant or enable the permissive mode"
                            )));
                        }
                        eigen_filterbank(&view.subgraph, r_level)?
                    }
                    Variant::Tree => {
                        let view = tree.subgraph_of(j, k)?;
                        if !view.subgraph.is_connected() {
                            return Err(Error::Disconnected(format!(
                                "tree filterbank at node ({j}, {k}): induced subgraph is \
                                 disconnected"
                            )));
                        }
                        tree_filterbank_with(&view.subgraph, options.polarity)?
                    }
                };
                pair.node = Some((j, k));
                let report = verify_uep(&pair);
                if !report.passes(UEP_TOL) {
                    return Err(Error::Verification(format!(
                        "filter pair at node ({j}, {k}) violates the UEP condition \
                         (max deviation {:.3e})",
                        report.max_deviation()
                    )));
                }
                Ok(pair)
            })
            .collect::<Result<Vec<_>>>()?;
        levels.push(pairs);
    }

    Ok(NodeFilterbanks {
        variant,
        r_schedule: effective,
        levels,
    })
}

/// Debug dump: one dense MatrixMarket array file per filter matrix, named
/// `A_<j>_<k>.mtx` / `B_<j>_<k>.mtx`.
pub fn dump_filterbanks(banks: &NodeFilterbanks, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for ((j, k), pair) in banks.iter() {
        crate::io::write_mm_dense(&pair.a, &dir.join(format!("A_{j}_{k}.mtx")))?;
        crate::io::write_mm_dense(&pair.b, &dir.join(format!("B_{j}_{k}.mtx")))?;
    }
    Ok(())
}
