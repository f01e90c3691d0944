//! Dense symmetric eigendecomposition of graph Laplacians.
//!
//! Clusters in a partition tree are small by construction, so a full dense
//! solve per subgraph is the right tool; there is no iterative/sparse path.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Threshold below which a leading entry is not trusted to carry a sign.
const SIGN_EPS: f64 = 1e-12;

/// Full spectrum of an unnormalized graph Laplacian.
///
/// Eigenvalues are ascending and clamped to be nonnegative. Row `i` of
/// `eigenvectors` is the eigenvector of `eigenvalues[i]`, sign-fixed so that
/// the first entry larger than `1e-12` in absolute value is positive. Ties
/// between equal eigenvalues keep the eigensolver's stable order, which makes
/// repeated runs on the same graph bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl LaplacianSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as rows, ascending eigenvalue order.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Rows `lo..hi` of the eigenvector matrix as an owned matrix.
    pub fn eigenvector_rows(&self, lo: usize, hi: usize) -> DMatrix<f64> {
        self.eigenvectors.rows(lo, hi - lo).into_owned()
    }
}

impl Graph {
    /// Eigendecomposition of `self.laplacian()`.
    ///
    /// If the graph is connected the first eigenvalue is 0 with the constant
    /// eigenvector (entries `1/sqrt(n)`).
    pub fn spectrum(&self) -> Result<LaplacianSpectrum> {
        let n = self.vertex_count();
        let lap = self.laplacian();
        let eig = SymmetricEigen::try_new(lap, f64::EPSILON, 100_000 * n.max(1))
            .ok_or_else(|| {
                Error::Numerical(format!(
                    "symmetric eigensolver did not converge on a {n}x{n} Laplacian"
                ))
            })?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let lambda_max = order
            .last()
            .map(|&i| eig.eigenvalues[i].abs())
            .unwrap_or(0.0);
        let clamp_tol = 1e-8 * lambda_max.max(1.0);

        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (row, &src) in order.iter().enumerate() {
            let lambda = eig.eigenvalues[src];
            if lambda < -clamp_tol {
                return Err(Error::Numerical(format!(
                    "Laplacian eigenvalue {lambda} is negative beyond tolerance {clamp_tol}"
                )));
            }
            eigenvalues.push(lambda.max(0.0));
            let col = eig.eigenvectors.column(src);
            let flip = match col.iter().find(|x| x.abs() > SIGN_EPS) {
                Some(x) if *x < 0.0 => -1.0,
                _ => 1.0,
            };
            for j in 0..n {
                eigenvectors[(row, j)] = flip * col[j];
            }
        }

        Ok(LaplacianSpectrum {
            eigenvalues,
            eigenvectors,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn two_path_spectrum() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let s = g.spectrum().unwrap();
        assert_close(s.eigenvalues()[0], 0.0, 1e-12);
        assert_close(s.eigenvalues()[1], 2.0, 1e-12);
        let r = 1.0 / 2f64.sqrt();
        assert_close(s.eigenvectors()[(0, 0)], r, 1e-12);
        assert_close(s.eigenvectors()[(0, 1)], r, 1e-12);
    }

    #[test]
    fn three_path_spectrum() {
        let g = Graph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let s = g.spectrum().unwrap();
        for (got, want) in s.eigenvalues().iter().zip([0.0, 1.0, 3.0]) {
            assert_close(*got, want, 1e-10);
        }
        let want = [
            [1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt()],
            [1.0 / 2f64.sqrt(), 0.0, -1.0 / 2f64.sqrt()],
            [1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt()],
        ];
        for (i, row) in want.iter().enumerate() {
            for (j, &expect) in row.iter().enumerate() {
                assert_close(s.eigenvectors()[(i, j)], expect, 1e-10);
            }
        }
    }

    #[test]
    fn connected_graph_has_constant_first_eigenvector() {
        let g = Graph::new(5, vec![(0, 1, 2.0), (1, 2, 0.5), (2, 3, 1.0), (3, 4, 3.0), (0, 4, 1.0)])
            .unwrap();
        let s = g.spectrum().unwrap();
        assert_close(s.eigenvalues()[0], 0.0, 1e-10);
        let c = 1.0 / 5f64.sqrt();
        for j in 0..5 {
            assert_close(s.eigenvectors()[(0, j)], c, 1e-10);
        }
    }

    #[test]
    fn residual_and_orthonormality() {
        let g = Graph::new(6, vec![
            (0, 1, 1.5), (1, 2, 0.25), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 0.75), (0, 5, 1.25),
            (1, 4, 0.5),
        ])
        .unwrap();
        let s = g.spectrum().unwrap();
        let l = g.laplacian();
        for i in 0..6 {
            let u = s.eigenvectors().row(i).transpose();
            let resid = (&l * &u - s.eigenvalues()[i] * &u).norm();
            assert!(resid <= 1e-8 * s.eigenvalues()[i].max(1.0));
        }
        let gram = s.eigenvectors() * s.eigenvectors().transpose();
        let dev = (gram - DMatrix::<f64>::identity(6, 6)).abs().max();
        assert!(dev <= 1e-10);
    }

    #[test]
    fn spectrum_is_bit_deterministic() {
        let g = Graph::new(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        let a = g.spectrum().unwrap();
        let b = g.spectrum().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disconnected_zero_multiplicity() {
        let g = Graph::new(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let s = g.spectrum().unwrap();
        assert!(s.eigenvalues()[0].abs() <= 1e-12);
        assert!(s.eigenvalues()[1].abs() <= 1e-12);
        assert!(s.eigenvalues()[2] > 1e-6);
    }
}
