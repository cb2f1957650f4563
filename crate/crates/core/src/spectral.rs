//! Laplacians, orthonormal dictionaries on a single graph, and spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::signal::Signal;

/// Graph matrix whose eigenvectors define the Fourier basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianKind {
    /// `L = D − A`.
    #[default]
    Combinatorial,
}

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut l = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        l[(i, j)] = -1.0;
        l[(j, i)] = -1.0;
    }
    for v in 0..n {
        l[(v, v)] = g.degree(v) as f64;
    }
    l
}

pub fn graph_matrix(g: &Graph, kind: LaplacianKind) -> DMatrix<f64> {
    match kind {
        LaplacianKind::Combinatorial => laplacian(g),
    }
}

/// An orthonormal basis of signals on one graph, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalDictionary {
    atoms: DMatrix<f64>,
    eigenvalues: Option<Vec<f64>>,
}

impl OrthonormalDictionary {
    /// Wraps an arbitrary square matrix whose columns are claimed orthonormal.
    pub fn from_columns(atoms: DMatrix<f64>, eigenvalues: Option<Vec<f64>>) -> Result<Self> {
        if atoms.nrows() != atoms.ncols() {
            return Err(Error::InvalidParameter(format!(
                "dictionary must be square, got {}x{}",
                atoms.nrows(),
                atoms.ncols()
            )));
        }
        if let Some(ev) = &eigenvalues {
            if ev.len() != atoms.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: atoms.ncols(),
                    actual: ev.len(),
                });
            }
        }
        Ok(Self { atoms, eigenvalues })
    }

    /// Number of vertices (equal to the number of atoms).
    pub fn dim(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub fn atom(&self, k: usize) -> Signal {
        Signal::new(self.atoms.column(k).iter().copied().collect()).expect("finite atoms")
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.atoms.transpose() * &self.atoms;
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }
}

pub fn standard_basis(g: &Graph) -> OrthonormalDictionary {
    let n = g.vertex_count();
    OrthonormalDictionary {
        atoms: DMatrix::identity(n, n),
        eigenvalues: None,
    }
}

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 100_000;
const SIGN_THRESHOLD: f64 = 1e-9;

/// Ascending eigenpairs of a symmetric matrix. Ties keep solver order, and
/// each eigenvector is signed so that its first entry above `1e-9` in
/// magnitude is positive.
pub fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let sign = col
            .iter()
            .find(|v| v.abs() > SIGN_THRESHOLD)
            .map_or(1.0, |v| v.signum());
        vectors.set_column(dst, &(col * sign));
    }
    Ok((values, vectors))
}

pub fn fourier_basis(g: &Graph) -> Result<OrthonormalDictionary> {
    fourier_basis_with(g, LaplacianKind::Combinatorial)
}

pub fn fourier_basis_with(g: &Graph, kind: LaplacianKind) -> Result<OrthonormalDictionary> {
    let (values, vectors) = symmetric_eigen(graph_matrix(g, kind))?;
    Ok(OrthonormalDictionary {
        atoms: vectors,
        eigenvalues: Some(values),
    })
}

/// Sorted Laplacian eigenvalues.
pub fn spectrum(g: &Graph) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::try_new(laplacian(g), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `(1/n) Σ λᵢᵏ` over a spectrum.
pub fn moment_of(spectrum: &[f64], k: u32) -> f64 {
    if spectrum.is_empty() {
        return 0.0;
    }
    spectrum.iter().map(|l| l.powi(k as i32)).sum::<f64>() / spectrum.len() as f64
}

/// `(1/n) tr(Lᵏ)` from the eigendecomposition.
pub fn spectral_moment(g: &Graph, k: u32) -> Result<f64> {
    Ok(moment_of(&spectrum(g)?, k))
}

/// All pairwise sums `α + β`, sorted.
pub fn convolve_spectra(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| x + y))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}
