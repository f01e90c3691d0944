//! Compactly supported tight frames on weighted graphs.
//!
//! The construction runs in three stages:
//!
//! 1. [`MultiGraphPartitionTree`] — a hierarchy of vertex partitions where
//!    every level carries a coarse graph on its clusters,
//! 2. per-node filter pairs `(A, B)` satisfying a unitary-extension-principle
//!    condition (`B^T B = I - A^T A` with orthonormal `A` rows orthogonal to
//!    `B`), in three flavors: Haar pairwise differences, subgraph Laplacian
//!    eigenvectors, and spanning-tree-enriched stacks,
//! 3. a recursive decomposition that assembles the per-node filters into a
//!    sparse frame matrix whose rows resolve the identity: `T^T T = I`.
//!
//! Because every atom lives on one cluster, the frame is compactly supported,
//! and the same tree of filters drives fast analysis/synthesis transforms
//! ([`analyze`] / [`synthesize`]) without materializing the frame.
//!
//! ```
//! use framelets::{make_filterbanks, MultiGraphPartitionTree, Graph, Variant};
//! use framelets::frame::build_frame;
//!
//! let g = Graph::new(4, (0..4).map(|i| (i, (i + 1) % 4, 1.0)))?;
//! let tree = MultiGraphPartitionTree::build(&g, 2, false)?;
//! let banks = make_filterbanks(&tree, Variant::Haar, &[])?;
//! let frame = build_frame(&tree, &banks)?;
//! assert!(frame.verify_tight().passes(1e-8));
//!
//! let f = vec![1.0, 2.0, 0.5, -1.0];
//! let coef = framelets::analyze(&f, &tree, &banks)?;
//! let back = framelets::synthesize(&coef, &tree, &banks)?;
//! assert!(f.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-10));
//! # Ok::<(), framelets::Error>(())
//! ```

pub mod approx;
pub mod error;
pub mod filterbank;
pub mod frame;
pub mod graph;
pub mod io;
pub mod partition;
pub mod sparse;
pub mod spanning;
pub mod spectral;
pub mod transform;

pub use approx::{
    gen_signal, nl_approx, nl_approx_from_coefficients, run_benchmark, ApproxResult, BenchConfig,
    BenchReport, BenchRow, KSpec, SignalKind, TimingRow,
};
pub use error::{Error, Result};
pub use filterbank::{
    dump_filterbanks, eigen_filterbank, haar_filterbank, make_filterbanks, make_filterbanks_with,
    tree_filterbank, verify_uep, BankOptions, FilterPair, NodeFilterbanks, UepReport, Variant,
};
pub use frame::{
    build_frame, build_frame_detailed, dec, AtomBlock, BlockInfo, BlockKind, FrameAtoms,
    FrameBlocks, FrameConfig, TightReport,
};
pub use graph::{Edge, Graph};
pub use partition::{coarsen_graph, ClusterNode, MultiGraphPartitionTree, SubgraphView};
pub use spanning::{SpanningTreeFamily, TreePolarity};
pub use spectral::LaplacianSpectrum;
pub use transform::{analyze, synthesize, CoefficientTree};
