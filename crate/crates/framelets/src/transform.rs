//! Fast analysis and synthesis sweeps over a partition tree, plus coefficient
//! file formats. The dense-oracle equivalents live on [`FrameAtoms`]
//! (`analyze_dense` / `synthesize_dense`).
//!
//! [`FrameAtoms`]: crate::frame::FrameAtoms

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::NodeFilterbanks;
use crate::io::write_atomic;
use crate::partition::MultiGraphPartitionTree;

const COEF_MAGIC: &[u8; 8] = b"FRAMCOEF";
const COEF_VERSION: u32 = 1;

/// Per-node coefficient vectors.
///
/// `c(j, k)` holds the low-pass coefficients of node `(j, k)` (length `R_j`);
/// `d(j, k)` the high-pass ones (length `m_{j,k} * R_{j+1}`). [`analyze`]
/// fills every level, with the deepest level holding the raw signal samples.
/// Loaded coefficient files populate only level 0 and the `d` vectors, which
/// is all synthesis needs.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTree {
    c: Vec<Vec<Vec<f64>>>,
    d: Vec<Vec<Vec<f64>>>,
}

impl CoefficientTree {
    /// Low-pass vector of node `(j, k)`, when that level is populated.
    pub fn c(&self, j: usize, k: usize) -> Option<&[f64]> {
        self.c.get(j)?.get(k).map(|v| v.as_slice())
    }

    /// High-pass vector of node `(j, k)`.
    pub fn d(&self, j: usize, k: usize) -> Option<&[f64]> {
        self.d.get(j)?.get(k).map(|v| v.as_slice())
    }

    /// The root low-pass vector `c^{(0)}`.
    pub fn root(&self) -> &[f64] {
        &self.c[0][0]
    }

    /// Concatenate into frame order: root low-pass first, then high-pass
    /// vectors level by level, node by node. Matches the frame's row order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = self.c[0][0].clone();
        for level in &self.d {
            for node in level {
                flat.extend_from_slice(node);
            }
        }
        flat
    }

    /// Rebuild from a flat vector in frame order.
    pub fn unflatten(
        flat: &[f64],
        tree: &MultiGraphPartitionTree,
        banks: &NodeFilterbanks,
    ) -> Result<Self> {
        let r_values = cumulative_r(banks);
        let mut pos = 0usize;
        let mut take = |len: usize| -> Result<Vec<f64>> {
            if pos + len > flat.len() {
                return Err(Error::InvalidInput(format!(
                    "flat coefficient vector too short: need {} values",
                    pos + len
                )));
            }
            let v = flat[pos..pos + len].to_vec();
            pos += len;
            Ok(v)
        };

        let c0 = take(r_values[0])?;
        let mut d = Vec::with_capacity(tree.depth());
        for j in 0..tree.depth() {
            let mut level = Vec::with_capacity(tree.level(j).len());
            for k in 0..tree.level(j).len() {
                let pair = banks
                    .pair(j, k)
                    .ok_or_else(|| Error::Config(format!("missing filterbank at ({j}, {k})")))?;
                level.push(take(pair.high_rows() * r_values[j + 1])?);
            }
            d.push(level);
        }
        if pos != flat.len() {
            return Err(Error::InvalidInput(format!(
                "flat coefficient vector has {} values but the schedule needs {pos}",
                flat.len()
            )));
        }

        let mut c = vec![Vec::new(); tree.depth() + 1];
        c[0] = vec![c0];
        Ok(CoefficientTree { c, d })
    }

    /// Write as JSON (`c0` plus per-node `d` arrays keyed `"j:k"`).
    pub fn save_json(&self, path: &Path) -> Result<()> {
        let mut d = BTreeMap::new();
        for (j, level) in self.d.iter().enumerate() {
            for (k, node) in level.iter().enumerate() {
                d.insert(format!("{j}:{k}"), node.clone());
            }
        }
        let file = CoefFile {
            c0: self.c[0][0].clone(),
            d,
        };
        write_atomic(path, |out| {
            serde_json::to_writer_pretty(&mut *out, &file)?;
            out.write_all(b"\n")?;
            Ok(())
        })
    }

    /// Write the flat vector as little-endian doubles behind a 16-byte header
    /// (8-byte magic, u32 version, u32 count).
    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let flat = self.flatten();
        write_atomic(path, |out| {
            out.write_all(COEF_MAGIC)?;
            out.write_all(&COEF_VERSION.to_le_bytes())?;
            let m = u32::try_from(flat.len()).map_err(|_| {
                Error::InvalidInput("coefficient vector too large for the binary header".into())
            })?;
            out.write_all(&m.to_le_bytes())?;
            for v in &flat {
                out.write_all(&v.to_le_bytes())?;
            }
            Ok(())
        })
    }

    /// Load either format, validating lengths against the tree and banks.
    pub fn load(
        path: &Path,
        tree: &MultiGraphPartitionTree,
        banks: &NodeFilterbanks,
    ) -> Result<Self> {
        let mut file = std::fs::File::open(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        let mut magic = [0u8; 8];
        let is_binary = match file.read_exact(&mut magic) {
            Ok(()) => &magic == COEF_MAGIC,
            Err(_) => false,
        };
        if is_binary {
            let mut header = [0u8; 8];
            file.read_exact(&mut header)
                .map_err(|_| Error::parse(path, 0, "truncated coefficient header"))?;
            let version = u32::from_le_bytes(header[0..4].try_into().unwrap());
            if version != COEF_VERSION {
                return Err(Error::parse(
                    path,
                    0,
                    format!("unsupported coefficient file version {version}"),
                ));
            }
            let m = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
            let mut bytes = Vec::new();
            file.read_to_end(&mut bytes)?;
            if bytes.len() != 8 * m {
                return Err(Error::parse(
                    path,
                    0,
                    format!("expected {m} doubles, found {} bytes", bytes.len()),
                ));
            }
            let flat: Vec<f64> = bytes
                .chunks_exact(8)
                .map(|chunk| f64::from_le_bytes(chunk.try_into().unwrap()))
                .collect();
            return Self::unflatten(&flat, tree, banks)
                .map_err(|e| Error::parse(path, 0, e.to_string()));
        }

        let text = std::fs::read_to_string(path)?;
        let parsed: CoefFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        let r_values = cumulative_r(banks);
        if parsed.c0.len() != r_values[0] {
            return Err(Error::parse(
                path,
                0,
                format!("c0 has {} values, expected {}", parsed.c0.len(), r_values[0]),
            ));
        }
        let mut d = Vec::with_capacity(tree.depth());
        for j in 0..tree.depth() {
            let mut level = Vec::with_capacity(tree.level(j).len());
            for k in 0..tree.level(j).len() {
                let pair = banks
                    .pair(j, k)
                    .ok_or_else(|| Error::Config(format!("missing filterbank at ({j}, {k})")))?;
                let expect = pair.high_rows() * r_values[j + 1];
                let node = parsed.d.get(&format!("{j}:{k}")).ok_or_else(|| {
                    Error::parse(path, 0, format!("missing d vector for node {j}:{k}"))
                })?;
                if node.len() != expect {
                    return Err(Error::parse(
                        path,
                        0,
                        format!("d vector {j}:{k} has {} values, expected {expect}", node.len()),
                    ));
                }
                level.push(node.clone());
            }
            d.push(level);
        }
        let mut c = vec![Vec::new(); tree.depth() + 1];
        c[0] = vec![parsed.c0];
        Ok(CoefficientTree { c, d })
    }
}

#[derive(Serialize, Deserialize)]
struct CoefFile {
    c0: Vec<f64>,
    d: BTreeMap<String, Vec<f64>>,
}

fn cumulative_r(banks: &NodeFilterbanks) -> Vec<usize> {
    let depth = banks.r_schedule().len();
    let mut r_values = vec![1usize; depth + 1];
    for j in (0..depth).rev() {
        r_values[j] = banks.r_schedule()[j] * r_values[j + 1];
    }
    r_values
}

/// Row-major reshape of a coefficient vector into `rows x cols`.
fn as_matrix(v: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    debug_assert_eq!(v.len(), rows * cols);
    DMatrix::from_row_slice(rows, cols, v)
}

/// Row-major vectorization.
fn vec_rows(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Bottom-up fast analysis: leaf coefficients are the signal samples; each
/// node then applies its filter pair to the stacked child vectors. The
/// resulting entries are exactly the inner products with the frame atoms, in
/// frame order.
pub fn analyze(
    f: &[f64],
    tree: &MultiGraphPartitionTree,
    banks: &NodeFilterbanks,
) -> Result<CoefficientTree> {
    let n = tree.vertex_count();
    if f.len() != n {
        return Err(Error::InvalidInput(format!(
            "signal has {} values but the graph has {n} vertices",
            f.len()
        )));
    }
    let depth = tree.depth();
    if banks.level_count() != depth {
        return Err(Error::Config(format!(
            "filterbanks cover {} levels but the tree has {depth}",
            banks.level_count()
        )));
    }
    let r_values = cumulative_r(banks);

    let mut c: Vec<Vec<Vec<f64>>> = vec![Vec::new(); depth + 1];
    let mut d: Vec<Vec<Vec<f64>>> = vec![Vec::new(); depth];

    c[depth] = tree
        .level(depth)
        .iter()
        .map(|leaf| vec![f[leaf.members[0]]])
        .collect();

    for j in (0..depth).rev() {
        let r_child = r_values[j + 1];
        let mut c_level = Vec::with_capacity(tree.level(j).len());
        let mut d_level = Vec::with_capacity(tree.level(j).len());
        for (k, node) in tree.level(j).iter().enumerate() {
            let pair = banks.pair(j, k).expect("level counts checked");
            let mut stacked = DMatrix::zeros(node.children.len(), r_child);
            for (t, &child) in node.children.iter().enumerate() {
                let child_c = &c[j + 1][child];
                for i in 0..r_child {
                    stacked[(t, i)] = child_c[i];
                }
            }
            c_level.push(vec_rows(&(&pair.a * &stacked)));
            d_level.push(vec_rows(&(&pair.b * &stacked)));
        }
        c[j] = c_level;
        d[j] = d_level;
    }

    Ok(CoefficientTree { c, d })
}

/// Top-down adjoint sweep reconstructing the signal from the root low-pass
/// vector and the per-node high-pass vectors.
pub fn synthesize(
    coef: &CoefficientTree,
    tree: &MultiGraphPartitionTree,
    banks: &NodeFilterbanks,
) -> Result<Vec<f64>> {
    let depth = tree.depth();
    if banks.level_count() != depth {
        return Err(Error::Config(format!(
            "filterbanks cover {} levels but the tree has {depth}",
            banks.level_count()
        )));
    }
    let r_values = cumulative_r(banks);

    let root = coef
        .c
        .first()
        .and_then(|level| level.first())
        .ok_or_else(|| Error::InvalidInput("coefficient tree has no root vector".into()))?;
    if root.len() != r_values[0] {
        return Err(Error::InvalidInput(format!(
            "root coefficient vector has {} values, expected {}",
            root.len(),
            r_values[0]
        )));
    }

    let mut current: Vec<Vec<f64>> = vec![root.clone()];
    for j in 0..depth {
        let r_child = r_values[j + 1];
        let mut next: Vec<Vec<f64>> = vec![Vec::new(); tree.level(j + 1).len()];
        for (k, node) in tree.level(j).iter().enumerate() {
            let pair = banks.pair(j, k).expect("level counts checked");
            let d_vec = coef.d(j, k).ok_or_else(|| {
                Error::InvalidInput(format!("missing d vector for node ({j}, {k})"))
            })?;
            if d_vec.len() != pair.high_rows() * r_child {
                return Err(Error::InvalidInput(format!(
                    "d vector at ({j}, {k}) has {} values, expected {}",
                    d_vec.len(),
                    pair.high_rows() * r_child
                )));
            }
            let c_mat = as_matrix(&current[k], pair.low_rows(), r_child);
            let mut stacked = pair.a.transpose() * c_mat;
            if pair.high_rows() > 0 {
                let d_mat = as_matrix(d_vec, pair.high_rows(), r_child);
                stacked += pair.b.transpose() * d_mat;
            }
            for (t, &child) in node.children.iter().enumerate() {
                next[child] = stacked.row(t).iter().copied().collect();
            }
        }
        current = next;
    }

    let n = tree.vertex_count();
    let mut f = vec![0.0; n];
    for (k, leaf) in tree.level(depth).iter().enumerate() {
        f[leaf.members[0]] = current[k][0];
    }
    Ok(f)
}
