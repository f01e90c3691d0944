//! File formats: whitespace edge lists, MatrixMarket matrices, plain-text
//! signals. All writers go through [`write_atomic`] so a failed run never
//! leaves a truncated file behind.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// On-disk graph encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// One `u v w` edge per line, 0-indexed vertices.
    EdgeList,
    /// MatrixMarket coordinate real symmetric.
    MatrixMarket,
}

/// Write `path` by first writing `path.tmp` and renaming on success.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let tmp = tmp_path(path);
    let result = (|| {
        let mut out = BufWriter::new(File::create(&tmp)?);
        write(&mut out)?;
        out.flush()?;
        Ok(())
    })();
    match result {
        Ok(()) => {
            std::fs::rename(&tmp, path)?;
            Ok(())
        }
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn tmp_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Load a graph, sniffing the format from the first line.
pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.starts_with("%%MatrixMarket") {
        read_graph_matrix_market(path, &first, reader)
    } else {
        read_graph_edge_list(path, &first, reader)
    }
}

pub fn save_graph(g: &Graph, path: &Path, format: GraphFormat) -> Result<()> {
    write_atomic(path, |out| match format {
        GraphFormat::EdgeList => {
            writeln!(out, "# vertices: {}", g.vertex_count())?;
            for e in g.edges() {
                writeln!(out, "{} {} {:e}", e.u, e.v, e.w)?;
            }
            Ok(())
        }
        GraphFormat::MatrixMarket => {
            writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
            writeln!(out, "{} {} {}", g.vertex_count(), g.vertex_count(), g.edge_count())?;
            for e in g.edges() {
                // lower triangle, 1-based
                writeln!(out, "{} {} {:e}", e.v + 1, e.u + 1, e.w)?;
            }
            Ok(())
        }
    })
}

fn read_graph_edge_list(path: &Path, first: &str, reader: impl BufRead) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut declared_n: Option<usize> = None;
    let mut max_vertex = None;

    let mut handle_line = |lineno: usize, line: &str| -> Result<()> {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            return Ok(());
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            // `# vertices: N` pins the vertex count so graphs with trailing
            // isolated vertices round-trip
            if let Some(rest) = comment.trim().strip_prefix("vertices:") {
                declared_n = Some(rest.trim().parse().map_err(|_| {
                    Error::parse(path, lineno, "invalid vertex count in '# vertices:' header")
                })?);
            }
            return Ok(());
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 'u v w', found {} fields", fields.len()),
            ));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid vertex index '{}'", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid vertex index '{}'", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("invalid weight '{}'", fields[2])))?;
        max_vertex = Some(max_vertex.unwrap_or(0).max(u).max(v));
        edges.push((u, v, w));
        Ok(())
    };

    handle_line(1, first)?;
    for (i, line) in reader.lines().enumerate() {
        handle_line(i + 2, &line?)?;
    }

    let n = match (declared_n, max_vertex) {
        (Some(n), _) => n,
        (None, Some(max)) => max + 1,
        (None, None) => {
            return Err(Error::parse(path, 1, "edge list is empty and declares no vertex count"))
        }
    };
    Graph::new(n, edges).map_err(|e| Error::parse(path, 0, e.to_string()))
}

fn read_graph_matrix_market(path: &Path, header: &str, reader: impl BufRead) -> Result<Graph> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
        || fields[3] != "real"
        || fields[4] != "symmetric"
    {
        return Err(Error::parse(
            path,
            1,
            "expected header '%%MatrixMarket matrix coordinate real symmetric'",
        ));
    }

    let mut dims: Option<(usize, usize)> = None; // (n, nnz)
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 2;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if dims.is_none() {
            if fields.len() != 3 {
                return Err(Error::parse(path, lineno, "expected 'rows cols nnz'"));
            }
            let rows: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(path, lineno, "invalid row count"))?;
            let cols: usize = fields[1]
                .parse()
                .map_err(|_| Error::parse(path, lineno, "invalid column count"))?;
            let nnz: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(path, lineno, "invalid entry count"))?;
            if rows != cols {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("weight matrix must be square, got {rows}x{cols}"),
                ));
            }
            dims = Some((rows, nnz));
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected 'i j value'"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "invalid row index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "invalid column index"))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "invalid value"))?;
        let (n, _) = dims.unwrap();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::parse(
                path,
                lineno,
                format!("entry ({i}, {j}) out of range for a {n}x{n} matrix"),
            ));
        }
        if i == j {
            return Err(Error::parse(
                path,
                lineno,
                "diagonal entries are not allowed in a graph weight matrix",
            ));
        }
        edges.push((i - 1, j - 1, w));
    }

    let (n, nnz) = dims.ok_or_else(|| Error::parse(path, 2, "missing size line"))?;
    if edges.len() != nnz {
        return Err(Error::parse(
            path,
            0,
            format!("declared {nnz} entries but found {}", edges.len()),
        ));
    }
    Graph::new(n, edges).map_err(|e| Error::parse(path, 0, e.to_string()))
}

/// Sparse coordinate MatrixMarket (general), used for frame exports.
pub(crate) fn write_mm_coordinate(
    out: &mut dyn Write,
    nrows: usize,
    ncols: usize,
    entries: impl Iterator<Item = (usize, usize, f64)>,
    nnz: usize,
) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{nrows} {ncols} {nnz}")?;
    for (r, c, v) in entries {
        writeln!(out, "{} {} {:e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

/// Shape and 0-based triplets of a coordinate MatrixMarket file.
pub(crate) type MmCoordinates = (usize, usize, Vec<(usize, usize, f64)>);

/// Reads a general coordinate MatrixMarket file into 0-based triplets.
pub(crate) fn read_mm_coordinate(path: &Path) -> Result<MmCoordinates> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5
        || fields[0] != "%%MatrixMarket"
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
        || fields[3] != "real"
        || fields[4] != "general"
    {
        return Err(Error::parse(
            path,
            1,
            "expected header '%%MatrixMarket matrix coordinate real general'",
        ));
    }

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, "expected three fields"));
        }
        if dims.is_none() {
            let r = fields[0].parse().map_err(|_| Error::parse(path, lineno, "invalid row count"))?;
            let c = fields[1].parse().map_err(|_| Error::parse(path, lineno, "invalid column count"))?;
            let z = fields[2].parse().map_err(|_| Error::parse(path, lineno, "invalid entry count"))?;
            dims = Some((r, c, z));
            continue;
        }
        let r: usize = fields[0].parse().map_err(|_| Error::parse(path, lineno, "invalid row index"))?;
        let c: usize = fields[1].parse().map_err(|_| Error::parse(path, lineno, "invalid column index"))?;
        let v: f64 = fields[2].parse().map_err(|_| Error::parse(path, lineno, "invalid value"))?;
        let (nr, nc, _) = dims.unwrap();
        if r == 0 || c == 0 || r > nr || c > nc {
            return Err(Error::parse(
                path,
                lineno,
                format!("entry ({r}, {c}) out of range for a {nr}x{nc} matrix"),
            ));
        }
        triplets.push((r - 1, c - 1, v));
    }
    let (nr, nc, nnz) = dims.ok_or_else(|| Error::parse(path, 2, "missing size line"))?;
    if triplets.len() != nnz {
        return Err(Error::parse(
            path,
            0,
            format!("declared {nnz} entries but found {}", triplets.len()),
        ));
    }
    Ok((nr, nc, triplets))
}

/// Dense MatrixMarket array format (column-major), for filterbank dumps.
pub fn write_mm_dense(mat: &DMatrix<f64>, path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        writeln!(out, "%%MatrixMarket matrix array real general")?;
        writeln!(out, "{} {}", mat.nrows(), mat.ncols())?;
        for c in 0..mat.ncols() {
            for r in 0..mat.nrows() {
                writeln!(out, "{:e}", mat[(r, c)])?;
            }
        }
        Ok(())
    })
}

/// Signal files: one value per line in vertex order.
pub fn read_signal(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let mut values = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        values.push(
            trimmed
                .parse()
                .map_err(|_| Error::parse(path, i + 1, format!("invalid value '{trimmed}'")))?,
        );
    }
    Ok(values)
}

pub fn write_signal(values: &[f64], path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        for v in values {
            writeln!(out, "{v}")?;
        }
        Ok(())
    })
}
