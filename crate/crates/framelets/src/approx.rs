//! Test-signal generation, best-K-term nonlinear approximation, and the
//! benchmark harness that sweeps (graph, variant, signal, K, seed) grids
//! into CSV tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{make_filterbanks, Variant};
use crate::frame::{build_frame, FrameAtoms};
use crate::io::{load_graph, write_atomic};
use crate::partition::MultiGraphPartitionTree;
use crate::transform::analyze;

/// Families of synthetic test signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalKind {
    /// A random constant per cluster at the tree's middle level.
    PiecewiseConstant,
    /// Random combination of the lowest global Laplacian eigenvectors.
    Bandlimited { modes: usize },
    /// Indicator of a random shortest path, optionally with white noise at
    /// the given SNR (dB).
    Path { snr_db: Option<f64> },
}

impl SignalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignalKind::PiecewiseConstant => "piecewise-constant",
            SignalKind::Bandlimited { .. } => "bandlimited",
            SignalKind::Path { .. } => "path",
        }
    }
}

impl std::fmt::Display for SignalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SignalKind::PiecewiseConstant => write!(f, "piecewise-constant"),
            SignalKind::Bandlimited { modes } => write!(f, "bandlimited:{modes}"),
            SignalKind::Path { snr_db: None } => write!(f, "path"),
            SignalKind::Path { snr_db: Some(snr) } => write!(f, "path:{snr}"),
        }
    }
}

impl std::str::FromStr for SignalKind {
    type Err = Error;

    /// `piecewise-constant`, `bandlimited[:modes]`, or `path[:snr_db]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (s, None),
        };
        match (name, arg) {
            ("piecewise-constant", None) => Ok(SignalKind::PiecewiseConstant),
            ("bandlimited", None) => Ok(SignalKind::Bandlimited { modes: 5 }),
            ("bandlimited", Some(arg)) => {
                let modes = arg.parse().map_err(|_| {
                    Error::Config(format!("invalid bandlimited mode count '{arg}'"))
                })?;
                Ok(SignalKind::Bandlimited { modes })
            }
            ("path", None) => Ok(SignalKind::Path { snr_db: None }),
            ("path", Some(arg)) => {
                let snr = arg
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid path SNR '{arg}'")))?;
                Ok(SignalKind::Path { snr_db: Some(snr) })
            }
            _ => Err(Error::Config(format!(
                "unknown signal kind '{s}' (expected piecewise-constant, bandlimited or path)"
            ))),
        }
    }
}

/// Deterministic synthetic signal on the tree's graph.
pub fn gen_signal(tree: &MultiGraphPartitionTree, kind: SignalKind, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = tree.original();
    let n = g.vertex_count();
    match kind {
        SignalKind::PiecewiseConstant => {
            let level = tree.depth().div_ceil(2);
            let mut f = vec![0.0; n];
            for node in tree.level(level) {
                let value = rng.gen_range(-1.0..1.0);
                for &v in &node.members {
                    f[v] = value;
                }
            }
            Ok(f)
        }
        SignalKind::Bandlimited { modes } => {
            if modes == 0 {
                return Err(Error::InvalidInput(
                    "bandlimited signal needs at least one mode".into(),
                ));
            }
            let modes = modes.min(n);
            let spectrum = g.spectrum()?;
            let mut f = vec![0.0; n];
            for i in 0..modes {
                let coef = rng.gen_range(-1.0..1.0);
                for (v, value) in f.iter_mut().enumerate() {
                    *value += coef * spectrum.eigenvectors()[(i, v)];
                }
            }
            Ok(f)
        }
        SignalKind::Path { snr_db } => {
            let from = rng.gen_range(0..n);
            let to = rng.gen_range(0..n);
            let mut f = vec![0.0; n];
            match g.shortest_path(from, to) {
                Some(path) if from != to => {
                    for v in path {
                        f[v] = 1.0;
                    }
                }
                // same endpoints or unreachable: a single-vertex path
                _ => f[from] = 1.0,
            }
            if let Some(snr) = snr_db {
                let signal_power: f64 = f.iter().map(|x| x * x).sum::<f64>() / n as f64;
                let sigma = (signal_power / 10f64.powf(snr / 10.0)).sqrt();
                for value in &mut f {
                    *value += sigma * gaussian(&mut rng);
                }
            }
            Ok(f)
        }
    }
}

/// Standard normal sample via Box-Muller.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Metrics of one best-K-term reconstruction.
#[derive(Debug, Clone)]
pub struct ApproxResult {
    pub k: usize,
    pub relative_error: f64,
    pub variant: Variant,
    pub frame_size: usize,
    pub elapsed_ms: f64,
}

/// Keep the `K` largest-magnitude canonical frame coefficients (ties resolve
/// toward lower atom indices), zero the rest, and reconstruct through the
/// adjoint.
pub fn nl_approx(f: &[f64], frame: &FrameAtoms, k: usize) -> Result<(Vec<f64>, ApproxResult)> {
    let coefficients = frame.analyze_dense(f)?;
    nl_approx_from_coefficients(f, &coefficients, frame, k)
}

/// As [`nl_approx`] with precomputed canonical coefficients (`atoms * f`).
pub fn nl_approx_from_coefficients(
    f: &[f64],
    coefficients: &[f64],
    frame: &FrameAtoms,
    k: usize,
) -> Result<(Vec<f64>, ApproxResult)> {
    let m = frame.atom_count();
    if k > m {
        return Err(Error::InvalidInput(format!(
            "K = {k} exceeds the frame size {m}"
        )));
    }
    if coefficients.len() != m {
        return Err(Error::InvalidInput(format!(
            "coefficient vector has {} entries, expected {m}",
            coefficients.len()
        )));
    }
    let start = Instant::now();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        coefficients[b]
            .abs()
            .total_cmp(&coefficients[a].abs())
            .then(a.cmp(&b))
    });
    let mut kept = vec![0.0; m];
    for &idx in order.iter().take(k) {
        kept[idx] = coefficients[idx];
    }
    let reconstruction = frame.synthesize_dense(&kept)?;
    let err_sq: f64 = f
        .iter()
        .zip(&reconstruction)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let norm_sq: f64 = f.iter().map(|x| x * x).sum();
    let relative_error = if norm_sq > 0.0 {
        (err_sq / norm_sq).sqrt()
    } else {
        0.0
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((
        reconstruction,
        ApproxResult {
            k,
            relative_error,
            variant: frame.config().variant,
            frame_size: m,
            elapsed_ms,
        },
    ))
}

/// A K-grid entry: an explicit count or the full frame size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSpec {
    Count(usize),
    Full,
}

impl KSpec {
    fn resolve(&self, m: usize) -> usize {
        match self {
            KSpec::Count(k) => *k,
            KSpec::Full => m,
        }
    }
}

impl Serialize for KSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KSpec::Count(k) => s.serialize_u64(*k as u64),
            KSpec::Full => s.serialize_str("m"),
        }
    }
}

impl<'de> Deserialize<'de> for KSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(k) => Ok(KSpec::Count(k)),
            Raw::Name(s) if s == "m" => Ok(KSpec::Full),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "invalid K entry '{s}' (expected an integer or \"m\")"
            ))),
        }
    }
}

/// Benchmark sweep definition, usually loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Graph files (edge list or MatrixMarket).
    pub graphs: Vec<PathBuf>,
    /// Variant names: `haar`, `eigen`, `tree`.
    pub variants: Vec<String>,
    /// Signal kind names, see [`SignalKind`].
    pub signals: Vec<String>,
    /// Retained-coefficient grid; `"m"` means the full frame.
    pub ks: Vec<KSpec>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_branching")]
    pub branching: usize,
    /// Uniform per-level `r` for the eigen variant.
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default)]
    pub connected: bool,
    /// When set, write one `K rel_error` plot file per curve here.
    #[serde(default)]
    pub plot_dir: Option<PathBuf>,
}

fn default_branching() -> usize {
    2
}

fn default_r() -> usize {
    1
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub graph: String,
    pub variant: Variant,
    pub signal: String,
    pub seed: u64,
    pub k: usize,
    pub frame_size: usize,
    pub rel_error: f64,
    pub analyze_ms: f64,
    pub build_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub graph: String,
    pub variant: Variant,
    pub build_tree_ms: f64,
    pub build_frame_ms: f64,
    pub analyze_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub timings: Vec<TimingRow>,
}

impl BenchReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |out| {
            writeln!(out, "graph,variant,signal,seed,K,m,rel_error,analyze_ms,build_ms")?;
            for r in &self.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{:.15e},{:.3},{:.3}",
                    r.graph,
                    r.variant,
                    r.signal,
                    r.seed,
                    r.k,
                    r.frame_size,
                    r.rel_error,
                    r.analyze_ms,
                    r.build_ms
                )?;
            }
            Ok(())
        })
    }

    pub fn write_timings_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, |out| {
            writeln!(out, "graph,variant,build_tree_ms,build_frame_ms,analyze_ms")?;
            for t in &self.timings {
                writeln!(
                    out,
                    "{},{},{:.3},{:.3},{:.3}",
                    t.graph, t.variant, t.build_tree_ms, t.build_frame_ms, t.analyze_ms
                )?;
            }
            Ok(())
        })
    }
}

struct CurveKey {
    graph: String,
    variant: Variant,
    signal: SignalKind,
    seed: u64,
}

type Curve = (CurveKey, Vec<(usize, f64)>);
type JobOutput = (TimingRow, Vec<BenchRow>, Vec<Curve>);

/// Run the full sweep. Rows come out in config order; work for identical
/// (graph, variant, signal, seed) combinations is computed once, so repeated
/// seeds produce byte-identical rows.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    let variants: Vec<Variant> = config
        .variants
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    let signals: Vec<SignalKind> = config
        .signals
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    if config.seeds.is_empty() || config.ks.is_empty() {
        return Err(Error::Config("benchmark needs seeds and a K grid".into()));
    }

    // Pair each graph with each variant; these jobs are independent.
    let jobs: Vec<(usize, usize)> = (0..config.graphs.len())
        .flat_map(|g| (0..variants.len()).map(move |v| (g, v)))
        .collect();

    let results: Vec<JobOutput> = jobs
        .par_iter()
        .map(|&(gi, vi)| -> Result<JobOutput> {
            let graph_path = &config.graphs[gi];
            let graph_name = graph_path.display().to_string();
            let variant = variants[vi];
            let g = load_graph(graph_path)?;

            let t0 = Instant::now();
            let tree = MultiGraphPartitionTree::build(&g, config.branching, config.connected)?;
            let build_tree_ms = t0.elapsed().as_secs_f64() * 1e3;

            let t1 = Instant::now();
            let schedule = vec![config.r; tree.depth()];
            let banks = make_filterbanks(&tree, variant, &schedule)?;
            let frame = build_frame(&tree, &banks)?;
            let build_frame_ms = t1.elapsed().as_secs_f64() * 1e3;
            let build_ms = build_tree_ms + build_frame_ms;
            let m = frame.atom_count();

            let mut rows = Vec::new();
            let mut curves = Vec::new();
            let mut analyze_total = 0.0;
            // memoized per (signal, seed) so duplicate grid entries reuse
            // both results and timings, keeping repeated rows byte-identical
            type SignalEntry = (Vec<f64>, Vec<f64>, f64);
            let mut cache: BTreeMap<(String, u64), SignalEntry> = BTreeMap::new();

            for &signal in &signals {
                for &seed in &config.seeds {
                    let key = (signal.to_string(), seed);
                    if !cache.contains_key(&key) {
                        let f = gen_signal(&tree, signal, seed)?;
                        let t2 = Instant::now();
                        let coef = analyze(&f, &tree, &banks)?;
                        let analyze_ms = t2.elapsed().as_secs_f64() * 1e3;
                        analyze_total += analyze_ms;
                        drop(coef);
                        // thresholding uses the canonical sparse product so
                        // results are reproducible from the exported frame
                        let coefficients = frame.analyze_dense(&f)?;
                        cache.insert(key.clone(), (f, coefficients, analyze_ms));
                    }
                    let (f, coefficients, analyze_ms) = &cache[&key];
                    let mut points = Vec::with_capacity(config.ks.len());
                    for kspec in &config.ks {
                        let k = kspec.resolve(m);
                        let (_, result) = nl_approx_from_coefficients(f, coefficients, &frame, k)?;
                        points.push((k, result.relative_error));
                        rows.push(BenchRow {
                            graph: graph_name.clone(),
                            variant,
                            signal: signal.to_string(),
                            seed,
                            k,
                            frame_size: m,
                            rel_error: result.relative_error,
                            analyze_ms: *analyze_ms,
                            build_ms,
                        });
                    }
                    curves.push((
                        CurveKey {
                            graph: graph_name.clone(),
                            variant,
                            signal,
                            seed,
                        },
                        points,
                    ));
                }
            }

            let timing = TimingRow {
                graph: graph_name.clone(),
                variant,
                build_tree_ms,
                build_frame_ms,
                analyze_ms: if cache.is_empty() {
                    0.0
                } else {
                    analyze_total / cache.len() as f64
                },
            };
            Ok((timing, rows, curves))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = BenchReport {
        rows: Vec::new(),
        timings: Vec::new(),
    };
    for (timing, rows, curves) in results {
        report.timings.push(timing);
        report.rows.extend(rows);
        if let Some(dir) = &config.plot_dir {
            std::fs::create_dir_all(dir)?;
            for (key, points) in curves {
                let stem = Path::new(&key.graph)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "graph".into());
                let name = format!(
                    "{stem}_{}_{}_s{}.txt",
                    key.variant,
                    key.signal.as_str(),
                    key.seed
                );
                write_atomic(&dir.join(name), |out| {
                    for (k, err) in &points {
                        writeln!(out, "{k} {err:.15e}")?;
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::io::{save_graph, GraphFormat};

    fn unit_cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    fn haar_frame(n: usize, branching: usize) -> (MultiGraphPartitionTree, FrameAtoms) {
        let tree = MultiGraphPartitionTree::build(&unit_cycle(n), branching, false).unwrap();
        let banks = make_filterbanks(&tree, Variant::Haar, &[]).unwrap();
        let frame = build_frame(&tree, &banks).unwrap();
        (tree, frame)
    }

    #[test]
    fn signal_kind_parsing() {
        assert_eq!(
            "piecewise-constant".parse::<SignalKind>().unwrap(),
            SignalKind::PiecewiseConstant
        );
        assert_eq!(
            "bandlimited".parse::<SignalKind>().unwrap(),
            SignalKind::Bandlimited { modes: 5 }
        );
        assert_eq!(
            "bandlimited:3".parse::<SignalKind>().unwrap(),
            SignalKind::Bandlimited { modes: 3 }
        );
        assert_eq!(
            "path".parse::<SignalKind>().unwrap(),
            SignalKind::Path { snr_db: None }
        );
        assert_eq!(
            "path:20".parse::<SignalKind>().unwrap(),
            SignalKind::Path { snr_db: Some(20.0) }
        );
        assert!("fourier".parse::<SignalKind>().is_err());
    }

    #[test]
    fn piecewise_constant_on_trivial_tree_is_constant() {
        let g = Graph::edgeless(1).unwrap();
        let tree = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
        let f = gen_signal(&tree, SignalKind::PiecewiseConstant, 9).unwrap();
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn piecewise_constant_is_constant_per_cluster() {
        let tree = MultiGraphPartitionTree::build(&unit_cycle(8), 2, false).unwrap();
        let f = gen_signal(&tree, SignalKind::PiecewiseConstant, 4).unwrap();
        let level = tree.depth().div_ceil(2);
        for node in tree.level(level) {
            let v0 = f[node.members[0]];
            assert!(node.members.iter().all(|&v| f[v] == v0));
        }
    }

    #[test]
    fn bandlimited_single_mode_is_constant_on_connected() {
        let tree = MultiGraphPartitionTree::build(&unit_cycle(6), 2, false).unwrap();
        let f = gen_signal(&tree, SignalKind::Bandlimited { modes: 1 }, 2).unwrap();
        for v in &f {
            assert!((v - f[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn path_signal_cases() {
        let g2 = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let tree = MultiGraphPartitionTree::build(&g2, 2, false).unwrap();
        for seed in 0..8 {
            let f = gen_signal(&tree, SignalKind::Path { snr_db: None }, seed).unwrap();
            let ones = f.iter().filter(|&&x| x == 1.0).count();
            let zeros = f.iter().filter(|&&x| x == 0.0).count();
            assert!(ones >= 1 && ones + zeros == 2);
        }
        // disconnected endpoints fall back to a single vertex
        let g = Graph::edgeless(2).unwrap();
        let tree = MultiGraphPartitionTree::build(&g, 2, false).unwrap();
        let f = gen_signal(&tree, SignalKind::Path { snr_db: None }, 1).unwrap();
        assert_eq!(f.iter().filter(|&&x| x == 1.0).count(), 1);
    }

    #[test]
    fn signals_are_deterministic_per_seed() {
        let tree = MultiGraphPartitionTree::build(&unit_cycle(12), 2, false).unwrap();
        for kind in [
            SignalKind::PiecewiseConstant,
            SignalKind::Bandlimited { modes: 4 },
            SignalKind::Path { snr_db: Some(10.0) },
        ] {
            let a = gen_signal(&tree, kind, 77).unwrap();
            let b = gen_signal(&tree, kind, 77).unwrap();
            assert_eq!(a, b);
            let c = gen_signal(&tree, kind, 78).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn nl_approx_endpoints() {
        let (tree, frame) = haar_frame(9, 3);
        let f = gen_signal(&tree, SignalKind::Path { snr_db: None }, 3).unwrap();
        let m = frame.atom_count();
        let (full, res_full) = nl_approx(&f, &frame, m).unwrap();
        assert!(res_full.relative_error <= 1e-8);
        assert_eq!(full.len(), 9);
        let (zero, res_zero) = nl_approx(&f, &frame, 0).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        assert!((res_zero.relative_error - 1.0).abs() <= 1e-12);
        assert!(nl_approx(&f, &frame, m + 1).is_err());
    }

    #[test]
    fn constant_signal_needs_one_haar_atom_on_binary_tree() {
        // all-binary tree on n = 2^J vertices
        let (_, frame) = haar_frame(8, 2);
        let f = vec![3.0; 8];
        let (_, res) = nl_approx(&f, &frame, 1).unwrap();
        assert!(res.relative_error <= 1e-8);
    }

    #[test]
    fn error_curve_is_monotone_and_bounded() {
        let (tree, frame) = haar_frame(12, 2);
        for seed in 0..6u64 {
            let f = gen_signal(&tree, SignalKind::Path { snr_db: Some(15.0) }, seed).unwrap();
            let mut last = f64::INFINITY;
            for k in 0..=frame.atom_count() {
                let (_, res) = nl_approx(&f, &frame, k).unwrap();
                assert!(res.relative_error <= last + 1e-10, "K={k} rose");
                assert!(res.relative_error <= 1.0 + 1e-12);
                last = res.relative_error;
            }
            assert!(last <= 1e-8);
        }
    }

    #[test]
    fn kspec_serde() {
        let parsed: Vec<KSpec> = serde_json::from_str(r#"[0, 5, "m"]"#).unwrap();
        assert_eq!(parsed, vec![KSpec::Count(0), KSpec::Count(5), KSpec::Full]);
        assert!(serde_json::from_str::<Vec<KSpec>>(r#"["all"]"#).is_err());
        assert_eq!(serde_json::to_string(&parsed).unwrap(), r#"[0,5,"m"]"#);
    }

    fn write_test_config(dir: &Path) -> BenchConfig {
        let g1 = dir.join("cycle8.mtx");
        save_graph(&unit_cycle(8), &g1, GraphFormat::MatrixMarket).unwrap();
        let g2 = dir.join("cycle6.txt");
        save_graph(&unit_cycle(6), &g2, GraphFormat::EdgeList).unwrap();
        BenchConfig {
            graphs: vec![g1, g2],
            variants: vec!["haar".into(), "eigen".into(), "tree".into()],
            signals: vec!["piecewise-constant".into(), "path".into()],
            ks: vec![KSpec::Count(0), KSpec::Count(3), KSpec::Full],
            seeds: vec![1, 2, 1],
            branching: 2,
            r: 1,
            connected: false,
            plot_dir: None,
        }
    }

    #[test]
    fn benchmark_endpoints_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let config = write_test_config(dir.path());
        let report = run_benchmark(&config).unwrap();
        // 2 graphs x 3 variants x 2 signals x 3 seeds x 3 Ks
        assert_eq!(report.rows.len(), 2 * 3 * 2 * 3 * 3);
        assert_eq!(report.timings.len(), 6);
        for row in &report.rows {
            if row.k == 0 {
                assert!((row.rel_error - 1.0).abs() <= 1e-12);
            }
            if row.k == row.frame_size {
                assert!(row.rel_error <= 1e-8);
            }
        }
        // duplicated seed 1 gives byte-identical rows, timing included
        for chunk in report.rows.chunks(9) {
            let first_seed1: Vec<&BenchRow> =
                chunk.iter().filter(|r| r.seed == 1).collect();
            assert_eq!(first_seed1.len(), 6);
            for i in 0..3 {
                assert_eq!(first_seed1[i], first_seed1[i + 3]);
            }
        }
        // a second run reproduces everything except wall times
        let again = run_benchmark(&config).unwrap();
        for (a, b) in report.rows.iter().zip(&again.rows) {
            assert_eq!(a.graph, b.graph);
            assert_eq!(a.variant, b.variant);
            assert_eq!(a.signal, b.signal);
            assert_eq!((a.seed, a.k, a.frame_size), (b.seed, b.k, b.frame_size));
            assert_eq!(a.rel_error, b.rel_error);
        }
    }

    #[test]
    fn benchmark_csv_and_plots() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = write_test_config(dir.path());
        config.graphs.truncate(1);
        config.variants = vec!["haar".into()];
        config.plot_dir = Some(dir.path().join("plots"));
        let report = run_benchmark(&config).unwrap();
        let csv = dir.path().join("out.csv");
        report.write_csv(&csv).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("graph,variant,signal,seed,K,m,rel_error,analyze_ms,build_ms\n"));
        assert_eq!(text.lines().count(), 1 + report.rows.len());
        report
            .write_timings_csv(&dir.path().join("out.timings.csv"))
            .unwrap();
        let plots: Vec<_> = std::fs::read_dir(dir.path().join("plots"))
            .unwrap()
            .collect();
        assert_eq!(plots.len(), 4); // 2 signals x 2 distinct seeds
    }

    #[test]
    fn benchmark_missing_graph_is_io_error() {
        let mut config = BenchConfig {
            graphs: vec![PathBuf::from("/nonexistent/g.mtx")],
            variants: vec!["haar".into()],
            signals: vec!["path".into()],
            ks: vec![KSpec::Full],
            seeds: vec![1],
            branching: 2,
            r: 1,
            connected: false,
            plot_dir: None,
        };
        let err = run_benchmark(&config).unwrap_err();
        assert!(err.is_io_or_parse(), "{err}");
        config.graphs.clear();
        config.seeds.clear();
        assert!(matches!(run_benchmark(&config), Err(Error::Config(_))));
    }
}
