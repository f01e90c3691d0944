//! Frame assembly: the per-node decomposition step and the level sweep that
//! turns a partition tree plus filterbanks into a sparse tight frame.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{verify_uep, NodeFilterbanks, Variant, UEP_TOL};
use crate::io::{read_mm_coordinate, write_atomic, write_mm_coordinate};
use crate::partition::MultiGraphPartitionTree;
use crate::sparse::{CsrBuilder, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Low,
    High,
}

impl BlockKind {
    fn as_str(&self) -> &'static str {
        match self {
            BlockKind::Low => "low",
            BlockKind::High => "high",
        }
    }
}

/// The atoms one node contributes, stored over its support columns.
///
/// `vectors` has one column per entry of `support` (ascending original-graph
/// vertices); everything outside the support is a structural zero.
#[derive(Debug, Clone)]
pub struct AtomBlock {
    pub level: usize,
    pub index: usize,
    pub kind: BlockKind,
    pub vectors: DMatrix<f64>,
    pub support: Vec<usize>,
}

impl AtomBlock {
    /// Dense global-length copy of row `i`.
    pub fn global_row(&self, i: usize, n: usize) -> Vec<f64> {
        let mut row = vec![0.0; n];
        for (c, &v) in self.support.iter().enumerate() {
            row[v] = self.vectors[(i, c)];
        }
        row
    }
}

/// Location and support of one contiguous block of frame rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInfo {
    pub level: usize,
    pub index: usize,
    pub kind: BlockKind,
    pub first_row: usize,
    pub rows: usize,
    pub support: Vec<usize>,
}

/// Frame construction parameters, carried along for reproducibility.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub variant: Variant,
    /// Per-level low-pass row counts `r_0..r_{J-1}`.
    pub r_schedule: Vec<usize>,
    /// Cumulative products `R_j = r_j * ... * r_{J-1}` for `j = 0..=J`.
    pub r_values: Vec<usize>,
}

/// The assembled framelet system: the level-0 low-pass atoms followed by
/// every high-pass block, level by level, as rows of a sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameAtoms {
    n: usize,
    atoms: CsrMatrix,
    blocks: Vec<BlockInfo>,
    config: FrameConfig,
}

/// Per-node atom blocks retained for inspection, low and high per level.
#[derive(Debug, Clone)]
pub struct FrameBlocks {
    /// `low[j][k]` spans the node's low-pass subspace (only level 0 enters
    /// the frame).
    pub low: Vec<Vec<AtomBlock>>,
    /// `high[j][k]` are the framelets node `(j, k)` contributes.
    pub high: Vec<Vec<AtomBlock>>,
}

/// Tightness/structure report for an assembled frame.
#[derive(Debug, Clone)]
pub struct TightReport {
    /// `max |atoms^T atoms - I|`.
    pub gram_deviation: f64,
    /// Rows with a stored entry outside their block support.
    pub support_violations: Vec<usize>,
    /// Largest inner product between a low-pass atom and any high-pass atom.
    pub low_high_max_dot: f64,
}

impl TightReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.gram_deviation <= tol && self.support_violations.is_empty()
    }
}

impl FrameAtoms {
    /// Signal dimension `n`.
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Number of atoms `m`.
    pub fn atom_count(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn atoms(&self) -> &CsrMatrix {
        &self.atoms
    }

    pub fn blocks(&self) -> &[BlockInfo] {
        &self.blocks
    }

    pub fn config(&self) -> &FrameConfig {
        &self.config
    }

    /// `(level, index, kind, position-within-block)` for a frame row.
    pub fn atom_info(&self, row: usize) -> Option<(usize, usize, BlockKind, usize)> {
        if row >= self.atom_count() {
            return None;
        }
        let at = self
            .blocks
            .partition_point(|b| b.first_row + b.rows <= row);
        let block = &self.blocks[at];
        Some((block.level, block.index, block.kind, row - block.first_row))
    }

    /// Frame coefficients `atoms * f`.
    pub fn analyze_dense(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.atoms.matvec(f)
    }

    /// Adjoint reconstruction `atoms^T * coefficients`.
    pub fn synthesize_dense(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        self.atoms.matvec_transpose(coefficients)
    }

    /// Check tightness, per-atom supports and low/high orthogonality.
    pub fn verify_tight(&self) -> TightReport {
        let n = self.n;
        let m = self.atom_count();

        // Gram deviation in column stripes to bound memory on larger frames.
        let stripe = 2048.min(n).max(1);
        let mut gram_deviation: f64 = 0.0;
        let mut col0 = 0;
        while col0 < n {
            let width = stripe.min(n - col0);
            let mut buf = vec![0.0f64; width * n];
            for row in 0..m {
                let (cols, vals) = self.atoms.row(row);
                for (&c, &v) in cols.iter().zip(vals) {
                    if c >= col0 && c < col0 + width {
                        let base = (c - col0) * n;
                        for (&c2, &v2) in cols.iter().zip(vals) {
                            buf[base + c2] += v * v2;
                        }
                    }
                }
            }
            for local in 0..width {
                let col = col0 + local;
                for c2 in 0..n {
                    let target = if c2 == col { 1.0 } else { 0.0 };
                    gram_deviation = gram_deviation.max((buf[local * n + c2] - target).abs());
                }
            }
            col0 += width;
        }

        // Structural support check.
        let mut support_violations = Vec::new();
        for block in &self.blocks {
            for row in block.first_row..block.first_row + block.rows {
                let (cols, _) = self.atoms.row(row);
                let ok = cols.iter().all(|c| block.support.binary_search(c).is_ok());
                if !ok {
                    support_violations.push(row);
                }
            }
        }

        // Low-pass rows against every high-pass row.
        let mut low_high_max_dot: f64 = 0.0;
        let high_start = self
            .blocks
            .iter()
            .find(|b| b.kind == BlockKind::High)
            .map(|b| b.first_row)
            .unwrap_or(m);
        for block in self.blocks.iter().filter(|b| b.kind == BlockKind::Low) {
            for row in block.first_row..block.first_row + block.rows {
                let mut dense = vec![0.0; n];
                let (cols, vals) = self.atoms.row(row);
                for (&c, &v) in cols.iter().zip(vals) {
                    dense[c] = v;
                }
                let products = self.atoms.matvec(&dense).expect("dimensions match");
                for &p in &products[high_start..] {
                    low_high_max_dot = low_high_max_dot.max(p.abs());
                }
            }
        }

        TightReport {
            gram_deviation,
            support_violations,
            low_high_max_dot,
        }
    }

    /// Write the atoms as coordinate MatrixMarket plus a `<path>.index.json`
    /// sidecar holding the block index and configuration.
    pub fn export(&self, path: &Path) -> Result<()> {
        write_atomic(path, |out| {
            write_mm_coordinate(
                out,
                self.atom_count(),
                self.n,
                self.atoms.iter(),
                self.atoms.nnz(),
            )
        })?;
        let sidecar = FrameSidecar::from_frame(self);
        write_atomic(&sidecar_path(path), |out| {
            serde_json::to_writer_pretty(&mut *out, &sidecar)?;
            out.write_all(b"\n")?;
            Ok(())
        })
    }

    /// Load a frame previously written by [`FrameAtoms::export`].
    pub fn import(path: &Path) -> Result<Self> {
        let (m, n, triplets) = read_mm_coordinate(path)?;
        let side_path = sidecar_path(path);
        let text = std::fs::read_to_string(&side_path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", side_path.display()),
            ))
        })?;
        let sidecar: FrameSidecar = serde_json::from_str(&text)
            .map_err(|e| Error::parse(&side_path, e.line(), e.to_string()))?;
        sidecar.into_frame(m, n, triplets, path)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".index.json");
    path.with_file_name(name)
}

/// One decomposition step (the per-node CONCAT/split of the recursion).
///
/// `children` are matrices with the same shape `r x w`, orthonormal rows and
/// mutually orthogonal row spans. With an `r_out x m` low filter `a` and an
/// `m_out x m` high filter `b` (`m` = number of children), the outputs are
///
/// * `low`, `r_out * r` rows: row `p*r + i` is `sum_t a[p, t] * children[t][i, :]`,
/// * `high`, `m_out * r` rows: row `q*r + i` is `sum_t b[q, t] * children[t][i, :]`.
///
/// Rows are grouped by filter row with the basis index `i` running fastest,
/// matching the row-major vectorization the fast transform uses for its
/// coefficient vectors, so frame row order and coefficient order agree.
pub fn dec(
    children: &[DMatrix<f64>],
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = children.len();
    if m == 0 {
        return Err(Error::InvalidInput("dec needs at least one child".into()));
    }
    let (r, w) = children[0].shape();
    if r == 0 {
        return Err(Error::InvalidInput("child basis has no rows".into()));
    }
    if let Some(bad) = children.iter().find(|c| c.shape() != (r, w)) {
        return Err(Error::InvalidInput(format!(
            "child bases disagree in shape: expected {r}x{w}, found {}x{}",
            bad.nrows(),
            bad.ncols()
        )));
    }
    if a.ncols() != m || b.ncols() != m {
        return Err(Error::InvalidInput(format!(
            "filters must have {m} columns, got A: {}, B: {}",
            a.ncols(),
            b.ncols()
        )));
    }

    let mut low = DMatrix::zeros(a.nrows() * r, w);
    let mut high = DMatrix::zeros(b.nrows() * r, w);
    let mut stack = DMatrix::zeros(m, w);
    for i in 0..r {
        for (t, child) in children.iter().enumerate() {
            stack.row_mut(t).copy_from(&child.row(i));
        }
        let low_part = a * &stack;
        for p in 0..a.nrows() {
            low.row_mut(p * r + i).copy_from(&low_part.row(p));
        }
        let high_part = b * &stack;
        for q in 0..b.nrows() {
            high.row_mut(q * r + i).copy_from(&high_part.row(q));
        }
    }
    Ok((low, high))
}

/// Build the framelet system for `tree` from per-node filterbanks.
pub fn build_frame(tree: &MultiGraphPartitionTree, banks: &NodeFilterbanks) -> Result<FrameAtoms> {
    build_frame_detailed(tree, banks).map(|(frame, _)| frame)
}

/// As [`build_frame`], also returning every per-node atom block.
pub fn build_frame_detailed(
    tree: &MultiGraphPartitionTree,
    banks: &NodeFilterbanks,
) -> Result<(FrameAtoms, FrameBlocks)> {
    let depth = tree.depth();
    let n = tree.vertex_count();

    if banks.level_count() != depth {
        return Err(Error::Config(format!(
            "filterbanks cover {} levels but the tree has {depth} non-leaf levels",
            banks.level_count()
        )));
    }
    for j in 0..depth {
        if banks.level(j).len() != tree.level(j).len() {
            return Err(Error::Config(format!(
                "level {j} has {} nodes but {} filter pairs",
                tree.level(j).len(),
                banks.level(j).len()
            )));
        }
    }

    // R_j = r_j * ... * r_{J-1}, with R_J = 1.
    let mut r_values = vec![1usize; depth + 1];
    for j in (0..depth).rev() {
        r_values[j] = banks.r_schedule()[j] * r_values[j + 1];
    }

    // Leaf blocks: the canonical basis vector of each leaf's vertex.
    let mut current: Vec<AtomBlock> = tree
        .level(depth)
        .iter()
        .enumerate()
        .map(|(k, node)| AtomBlock {
            level: depth,
            index: k,
            kind: BlockKind::Low,
            vectors: DMatrix::from_element(1, 1, 1.0),
            support: node.members.clone(),
        })
        .collect();

    let mut lows: Vec<Vec<AtomBlock>> = Vec::with_capacity(depth + 1);
    let mut highs_rev: Vec<Vec<AtomBlock>> = Vec::with_capacity(depth);
    lows.push(current.clone());

    for j in (0..depth).rev() {
        let results: Vec<(AtomBlock, AtomBlock)> = (0..tree.level(j).len())
            .into_par_iter()
            .map(|k| -> Result<(AtomBlock, AtomBlock)> {
                let node = tree.node(j, k);
                let pair = banks.pair(j, k).ok_or_else(|| {
                    Error::Config(format!("missing filterbank for node ({j}, {k})"))
                })?;
                if pair.width() != node.children.len() {
                    return Err(Error::Config(format!(
                        "filter pair at ({j}, {k}) acts on {} children but the node has {}",
                        pair.width(),
                        node.children.len()
                    )));
                }
                let report = verify_uep(pair);
                if !report.passes(UEP_TOL) {
                    return Err(Error::Verification(format!(
                        "UEP condition fails at node ({j}, {k}): max deviation {:.3e}",
                        report.max_deviation()
                    )));
                }

                let support = &node.members;
                let embedded: Vec<DMatrix<f64>> = node
                    .children
                    .iter()
                    .map(|&child| {
                        let block = &current[child];
                        let mut wide =
                            DMatrix::zeros(block.vectors.nrows(), support.len());
                        for (c, &vertex) in block.support.iter().enumerate() {
                            let target = support
                                .binary_search(&vertex)
                                .expect("child support within parent support");
                            wide.column_mut(target).copy_from(&block.vectors.column(c));
                        }
                        wide
                    })
                    .collect();

                let (low, high) = dec(&embedded, &pair.a, &pair.b)?;
                Ok((
                    AtomBlock {
                        level: j,
                        index: k,
                        kind: BlockKind::Low,
                        vectors: low,
                        support: support.clone(),
                    },
                    AtomBlock {
                        level: j,
                        index: k,
                        kind: BlockKind::High,
                        vectors: high,
                        support: support.clone(),
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;

        let (low_blocks, high_blocks): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        current = low_blocks;
        lows.push(current.clone());
        highs_rev.push(high_blocks);
    }

    lows.reverse();
    highs_rev.reverse();
    let blocks = FrameBlocks {
        low: lows,
        high: highs_rev,
    };

    // Assemble rows: level-0 low block first, then highs level by level.
    let root_low = &blocks.low[0][0];
    let mut builder = CsrBuilder::new(n);
    let mut infos = Vec::new();
    let mut next_row = 0usize;
    let mut push_block = |builder: &mut CsrBuilder, block: &AtomBlock, next_row: &mut usize| {
        let rows = block.vectors.nrows();
        for i in 0..rows {
            let vals: Vec<f64> = (0..block.support.len())
                .map(|c| block.vectors[(i, c)])
                .collect();
            builder.push_row(&block.support, &vals);
        }
        infos.push(BlockInfo {
            level: block.level,
            index: block.index,
            kind: block.kind,
            first_row: *next_row,
            rows,
            support: block.support.clone(),
        });
        *next_row += rows;
    };

    push_block(&mut builder, root_low, &mut next_row);
    for level in &blocks.high {
        for block in level {
            push_block(&mut builder, block, &mut next_row);
        }
    }

    let atoms = builder.finish();
    debug_assert!(atoms.nrows() >= n, "tight frame needs at least n atoms");
    debug_assert_eq!(atoms.nrows(), expected_atom_count(tree, banks, &r_values));

    let frame = FrameAtoms {
        n,
        atoms,
        blocks: infos,
        config: FrameConfig {
            variant: banks.variant(),
            r_schedule: banks.r_schedule().to_vec(),
            r_values,
        },
    };
    Ok((frame, blocks))
}

fn expected_atom_count(
    tree: &MultiGraphPartitionTree,
    banks: &NodeFilterbanks,
    r_values: &[usize],
) -> usize {
    let mut m = r_values[0];
    for j in 0..tree.depth() {
        for k in 0..tree.level(j).len() {
            m += banks.pair(j, k).map_or(0, |p| p.high_rows()) * r_values[j + 1];
        }
    }
    m
}

#[derive(Serialize, Deserialize)]
struct FrameSidecar {
    n: usize,
    m: usize,
    variant: String,
    r_schedule: Vec<usize>,
    r_values: Vec<usize>,
    blocks: Vec<SidecarBlock>,
}

#[derive(Serialize, Deserialize)]
struct SidecarBlock {
    j: usize,
    k: usize,
    kind: String,
    row0: usize,
    rows: usize,
    support: Vec<usize>,
}

impl FrameSidecar {
    fn from_frame(frame: &FrameAtoms) -> Self {
        FrameSidecar {
            n: frame.n,
            m: frame.atom_count(),
            variant: frame.config.variant.to_string(),
            r_schedule: frame.config.r_schedule.clone(),
            r_values: frame.config.r_values.clone(),
            blocks: frame
                .blocks
                .iter()
                .map(|b| SidecarBlock {
                    j: b.level,
                    k: b.index,
                    kind: b.kind.as_str().to_string(),
                    row0: b.first_row,
                    rows: b.rows,
                    support: b.support.clone(),
                })
                .collect(),
        }
    }

    fn into_frame(
        self,
        m: usize,
        n: usize,
        triplets: Vec<(usize, usize, f64)>,
        path: &Path,
    ) -> Result<FrameAtoms> {
        if self.n != n || self.m != m {
            return Err(Error::parse(
                path,
                0,
                format!(
                    "matrix is {m}x{n} but the sidecar declares {}x{}",
                    self.m, self.n
                ),
            ));
        }
        if m < n {
            return Err(Error::parse(
                path,
                0,
                format!("a tight frame needs at least {n} atoms, found {m}"),
            ));
        }
        let variant: Variant = self.variant.parse()?;
        let mut blocks = Vec::with_capacity(self.blocks.len());
        let mut next_row = 0usize;
        for b in self.blocks {
            if b.row0 != next_row {
                return Err(Error::parse(
                    path,
                    0,
                    format!("sidecar blocks must tile the rows; gap at row {next_row}"),
                ));
            }
            let kind = match b.kind.as_str() {
                "low" => BlockKind::Low,
                "high" => BlockKind::High,
                other => {
                    return Err(Error::parse(path, 0, format!("unknown block kind '{other}'")))
                }
            };
            if b.support.iter().any(|&v| v >= n) || b.support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::parse(
                    path,
                    0,
                    format!("block ({}, {}) has an invalid support list", b.j, b.k),
                ));
            }
            blocks.push(BlockInfo {
                level: b.j,
                index: b.k,
                kind,
                first_row: b.row0,
                rows: b.rows,
                support: b.support,
            });
            next_row += b.rows;
        }
        if next_row != m {
            return Err(Error::parse(
                path,
                0,
                format!("sidecar blocks cover {next_row} rows but the matrix has {m}"),
            ));
        }
        let atoms = CsrMatrix::from_triplets(m, n, triplets)?;
        Ok(FrameAtoms {
            n,
            atoms,
            blocks,
            config: FrameConfig {
                variant,
                r_schedule: self.r_schedule,
                r_values: self.r_values,
            },
        })
    }
}
