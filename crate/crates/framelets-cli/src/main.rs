use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use framelets::frame::{build_frame, FrameAtoms};
use framelets::io::{load_graph, write_atomic, write_signal};
use framelets::transform::{analyze, synthesize, CoefficientTree};
use framelets::{
    nl_approx_from_coefficients, run_benchmark, BenchConfig, Error, Graph, KSpec,
    MultiGraphPartitionTree, NodeFilterbanks, Variant,
};

#[derive(Parser)]
#[command(
    name = "framelets",
    version,
    about = "Tight frames on weighted graphs from hierarchical partition trees",
    after_help = "Set RUST_LOG=debug for verbose logging."
)]
struct Cli {
    /// Cap the worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a partition tree for a graph and write it as JSON.
    BuildTree {
        /// Graph file (edge list or MatrixMarket).
        graph: PathBuf,
        /// Output tree file.
        #[arg(short, long)]
        output: PathBuf,
        /// Target cluster size per merge round.
        #[arg(long, default_value_t = 2)]
        branching: usize,
        /// Report clusters whose induced subgraph is disconnected.
        #[arg(long)]
        connected: bool,
    },
    /// Build a tight frame from a graph and a partition tree.
    BuildFrame {
        graph: PathBuf,
        tree: PathBuf,
        #[command(flatten)]
        bank: BankArgs,
        /// Output frame file (MatrixMarket plus a .index.json sidecar).
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check tightness and support structure of an exported frame.
    Verify {
        frame: PathBuf,
        /// Acceptance tolerance for the tightness deviation.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Transform a signal into framelet coefficients.
    Analyze {
        graph: PathBuf,
        tree: PathBuf,
        /// Signal file, one value per line in vertex order.
        signal: PathBuf,
        #[command(flatten)]
        bank: BankArgs,
        /// Output coefficient file.
        #[arg(short, long)]
        output: PathBuf,
        /// Write flat binary coefficients instead of JSON.
        #[arg(long)]
        binary: bool,
    },
    /// Reconstruct a signal from framelet coefficients.
    Synthesize {
        graph: PathBuf,
        tree: PathBuf,
        /// Coefficient file (JSON or flat binary).
        coefficients: PathBuf,
        #[command(flatten)]
        bank: BankArgs,
        /// Output signal file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Best-K-term approximation errors over a grid of K values.
    Nlapprox {
        graph: PathBuf,
        tree: PathBuf,
        signal: PathBuf,
        #[command(flatten)]
        bank: BankArgs,
        /// Comma-separated retained-coefficient counts; "m" = frame size.
        #[arg(short = 'K', long = "K", value_delimiter = ',', required = true)]
        k_grid: Vec<String>,
        /// Output CSV (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a benchmark sweep from a JSON config.
    Bench {
        config: PathBuf,
        /// Output CSV; a .timings.csv companion is written next to it.
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct BankArgs {
    /// Filterbank variant: haar, eigen or tree.
    #[arg(long)]
    variant: String,
    /// Low-pass row counts for the eigen variant: one value per non-leaf
    /// level, or a single value applied to every level.
    #[arg(long = "r", value_delimiter = ',')]
    r_schedule: Vec<usize>,
    /// Accept disconnected clusters under the eigen variant.
    #[arg(long)]
    permissive: bool,
}

impl BankArgs {
    fn build(&self, tree: &MultiGraphPartitionTree) -> Result<NodeFilterbanks, Error> {
        let variant: Variant = self.variant.parse()?;
        let depth = tree.depth();
        let schedule = match variant {
            Variant::Tree | Variant::Haar => {
                if self.r_schedule.iter().any(|&r| r != 1) {
                    return Err(Error::Config(format!(
                        "{} variant requires r = 1",
                        variant.as_str()
                    )));
                }
                vec![1; depth]
            }
            Variant::Eigen => match self.r_schedule.len() {
                0 => vec![1; depth],
                1 => vec![self.r_schedule[0]; depth],
                _ => self.r_schedule.clone(),
            },
        };
        let options = framelets::BankOptions {
            allow_disconnected_eigen: self.permissive,
            ..Default::default()
        };
        framelets::make_filterbanks_with(tree, variant, &schedule, &options)
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io_or_parse() { 2u8 } else { 1u8 })
        }
    }
}

/// Load the tree and cross-check it against the graph file the caller named.
fn load_checked(
    graph_path: &Path,
    tree_path: &Path,
) -> Result<(Graph, MultiGraphPartitionTree), Error> {
    let graph = load_graph(graph_path)?;
    let tree = MultiGraphPartitionTree::load(tree_path)?;
    if *tree.original() != graph {
        return Err(Error::InvalidInput(format!(
            "tree {} was not built for graph {}",
            tree_path.display(),
            graph_path.display()
        )));
    }
    Ok((graph, tree))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::BuildTree {
            graph,
            output,
            branching,
            connected,
        } => {
            let g = load_graph(&graph)?;
            let tree = MultiGraphPartitionTree::build(&g, branching, connected)?;
            let report = tree.validate(connected);
            if !report.passed() {
                return Err(Error::Verification(
                    "built tree failed structural validation".into(),
                ));
            }
            tree.save(&output)?;
            let sizes: Vec<usize> = (0..=tree.depth()).map(|j| tree.level(j).len()).collect();
            println!("tree: J={}, level sizes {:?}", tree.depth(), sizes);
            if connected {
                match report.disconnected_subgraphs.as_deref() {
                    Some([]) | None => println!("all clusters induce connected subgraphs"),
                    Some(flagged) => {
                        println!("{} cluster(s) induce disconnected subgraphs:", flagged.len());
                        for (j, k) in flagged {
                            println!("  node ({j}, {k})");
                        }
                    }
                }
            }
            Ok(())
        }
        Command::BuildFrame {
            graph,
            tree,
            bank,
            output,
        } => {
            let (_, tree) = load_checked(&graph, &tree)?;
            let banks = bank.build(&tree)?;
            let frame = build_frame(&tree, &banks)?;
            frame.export(&output)?;
            println!(
                "frame: m={}, n={}, redundancy={:.4}, variant={}",
                frame.atom_count(),
                frame.dimension(),
                frame.atom_count() as f64 / frame.dimension() as f64,
                frame.config().variant
            );
            Ok(())
        }
        Command::Verify { frame, tol } => {
            let fa = FrameAtoms::import(&frame)?;
            let report = fa.verify_tight();
            println!("tightness deviation: {:.3e}", report.gram_deviation);
            println!("support violations: {}", report.support_violations.len());
            println!("low/high max dot: {:.3e}", report.low_high_max_dot);
            if report.passes(tol) {
                println!("PASS (tol {tol:.1e})");
                Ok(())
            } else {
                Err(Error::Verification(format!(
                    "frame is not tight at tolerance {tol:.1e}"
                )))
            }
        }
        Command::Analyze {
            graph,
            tree,
            signal,
            bank,
            output,
            binary,
        } => {
            let (_, tree) = load_checked(&graph, &tree)?;
            let banks = bank.build(&tree)?;
            let f = framelets::io::read_signal(&signal)?;
            let coef = analyze(&f, &tree, &banks)?;
            if binary {
                coef.save_binary(&output)?;
            } else {
                coef.save_json(&output)?;
            }
            println!(
                "coefficients: {} values -> {}",
                coef.flatten().len(),
                output.display()
            );
            Ok(())
        }
        Command::Synthesize {
            graph,
            tree,
            coefficients,
            bank,
            output,
        } => {
            let (_, tree) = load_checked(&graph, &tree)?;
            let banks = bank.build(&tree)?;
            let coef = CoefficientTree::load(&coefficients, &tree, &banks)?;
            let f = synthesize(&coef, &tree, &banks)?;
            write_signal(&f, &output)?;
            println!("signal: {} values -> {}", f.len(), output.display());
            Ok(())
        }
        Command::Nlapprox {
            graph,
            tree,
            signal,
            bank,
            k_grid,
            output,
        } => {
            let (_, tree) = load_checked(&graph, &tree)?;
            let banks = bank.build(&tree)?;
            let frame = build_frame(&tree, &banks)?;
            let f = framelets::io::read_signal(&signal)?;
            let coefficients = frame.analyze_dense(&f)?;
            let ks = k_grid
                .iter()
                .map(|item| parse_k(item))
                .collect::<Result<Vec<_>, _>>()?;
            let mut lines = String::from("K,m,rel_error\n");
            for kspec in ks {
                let k = match kspec {
                    KSpec::Count(k) => k,
                    KSpec::Full => frame.atom_count(),
                };
                let (_, result) = nl_approx_from_coefficients(&f, &coefficients, &frame, k)?;
                lines.push_str(&format!(
                    "{k},{},{:.15e}\n",
                    frame.atom_count(),
                    result.relative_error
                ));
            }
            match output {
                Some(path) => write_atomic(&path, |out| {
                    out.write_all(lines.as_bytes())?;
                    Ok(())
                })?,
                None => print!("{lines}"),
            }
            Ok(())
        }
        Command::Bench { config, output } => {
            let config = BenchConfig::load(&config)?;
            let report = run_benchmark(&config)?;
            report.write_csv(&output)?;
            let timings = timings_path(&output);
            report.write_timings_csv(&timings)?;
            println!(
                "benchmark: {} rows -> {}, timings -> {}",
                report.rows.len(),
                output.display(),
                timings.display()
            );
            Ok(())
        }
    }
}

fn parse_k(item: &str) -> Result<KSpec, Error> {
    if item == "m" {
        return Ok(KSpec::Full);
    }
    item.parse::<usize>()
        .map(KSpec::Count)
        .map_err(|_| Error::Config(format!("invalid K value '{item}' (expected an integer or m)")))
}

fn timings_path(output: &Path) -> PathBuf {
    match output.extension() {
        Some(ext) => {
            let mut name = output.file_stem().unwrap_or_default().to_os_string();
            name.push(".timings.");
            name.push(ext);
            output.with_file_name(name)
        }
        None => {
            let mut name = output.file_name().unwrap_or_default().to_os_string();
            name.push(".timings");
            output.with_file_name(name)
        }
    }
}
