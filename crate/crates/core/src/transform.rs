//! The bundle transform.
//!
//! Each atom is a base atom weighted by `√ρ_U` and restricted to a cover set
//! `U`, tensored with a fiber atom on `U □ F`, then pushed into the total graph
//! through the trivialization `φ_U`:
//!
//! ```text
//! ψ_{b,f}^U = (φ_U)_* ((√ρ_U · ψ_b)|_U ⊗ ψ_f)
//! ```
//!
//! With orthonormal factor bases and a partition of unity the atoms form a
//! tight frame with bound 1, so synthesis is the plain adjoint of analysis.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::bundle::{trivialize, GraphBundle, Trivialization};
use crate::cover::{Cover, PartitionOfUnity};
use crate::error::{Error, Result};
use crate::signal::{pointwise_mul, pointwise_sqrt, pullback, Signal};
use crate::spectral::{symmetric_eigen, OrthonormalDictionary};

/// Atoms with squared norm below this are treated as zero.
pub const ZERO_ATOM_NORM: f64 = 1e-10;

/// A finite family of atoms on one graph, stored as matrix columns.
pub trait Frame {
    fn atom_matrix(&self) -> &DMatrix<f64>;

    fn dim(&self) -> usize {
        self.atom_matrix().nrows()
    }

    fn atom_count(&self) -> usize {
        self.atom_matrix().ncols()
    }

    /// `⟨x, ψ_k⟩` for every atom.
    fn coefficients(&self, x: &Signal) -> Result<DVector<f64>> {
        x.expect_len(self.dim())?;
        let xv = DVector::from_column_slice(x.values());
        Ok(self.atom_matrix().tr_mul(&xv))
    }

    /// `Σ c_k ψ_k`.
    fn combine(&self, c: &DVector<f64>) -> Result<Signal> {
        if c.len() != self.atom_count() {
            return Err(Error::DimensionMismatch {
                expected: self.atom_count(),
                actual: c.len(),
            });
        }
        Signal::new((self.atom_matrix() * c).iter().copied().collect())
    }

    fn atom_norms(&self) -> Vec<f64> {
        self.atom_matrix()
            .column_iter()
            .map(|c| c.norm())
            .collect()
    }

    /// `S = Σ ψ ψᵀ`.
    fn frame_operator(&self) -> DMatrix<f64> {
        let a = self.atom_matrix();
        a * a.transpose()
    }
}

impl Frame for OrthonormalDictionary {
    fn atom_matrix(&self) -> &DMatrix<f64> {
        self.matrix()
    }
}

/// Extreme eigenvalues `(A, B)` of the frame operator.
pub fn frame_bounds<F: Frame + ?Sized>(frame: &F) -> Result<(f64, f64)> {
    let (values, _) = symmetric_eigen(frame.frame_operator())?;
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Ok((0.0, 0.0)),
    }
}

/// Population mean and standard deviation of the atom norms.
pub fn atom_norm_stats<F: Frame + ?Sized>(frame: &F) -> (f64, f64) {
    let norms = frame.atom_norms();
    if norms.is_empty() {
        return (0.0, 0.0);
    }
    let n = norms.len() as f64;
    let mean = norms.iter().sum::<f64>() / n;
    let var = norms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoherenceMode {
    /// Correlations between ℓ2-normalized atoms; zero atoms are skipped.
    #[default]
    Normalized,
    /// Raw Gram entries.
    Raw,
}

const COHERENCE_BLOCK: usize = 256;

/// Cumulative coherence `μ₁(m)`: the largest, over atoms `i`, of the sum of
/// the `m` largest `|⟨ψ_i, ψ_j⟩|` with `j ≠ i`. Per-row top-`m` sums realize
/// the maximum over index sets exactly.
pub fn cumulative_coherence<F: Frame + ?Sized>(frame: &F, m: usize, mode: CoherenceMode) -> Result<f64> {
    let count = frame.atom_count();
    if m == 0 || m >= count {
        return Err(Error::InvalidParameter(format!(
            "sparsity {m} must lie in [1, {count})"
        )));
    }
    let atoms = frame.atom_matrix();
    let kept: Vec<usize> = match mode {
        CoherenceMode::Normalized => (0..count)
            .filter(|&k| atoms.column(k).norm_squared() > ZERO_ATOM_NORM)
            .collect(),
        CoherenceMode::Raw => (0..count).collect(),
    };
    let mut columns = DMatrix::zeros(atoms.nrows(), kept.len());
    for (dst, &src) in kept.iter().enumerate() {
        let col = atoms.column(src);
        match mode {
            CoherenceMode::Normalized => columns.set_column(dst, &(col / col.norm())),
            CoherenceMode::Raw => columns.set_column(dst, &col),
        }
    }
    let columns_t = columns.transpose();
    let n = kept.len();
    let starts: Vec<usize> = (0..n).step_by(COHERENCE_BLOCK).collect();
    let worst = starts
        .par_iter()
        .map(|&start| {
            let end = (start + COHERENCE_BLOCK).min(n);
            let block = columns_t.rows(start, end - start) * &columns;
            let mut row_buf = Vec::with_capacity(n);
            let mut best = 0.0_f64;
            for r in 0..block.nrows() {
                let i = start + r;
                row_buf.clear();
                row_buf.extend(
                    block
                        .row(r)
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, v)| v.abs()),
                );
                let take = m.min(row_buf.len());
                if take == 0 {
                    continue;
                }
                if take < row_buf.len() {
                    row_buf.select_nth_unstable_by(take - 1, |a, b| b.total_cmp(a));
                }
                let mut top = row_buf[..take].to_vec();
                top.sort_by(|a, b| b.total_cmp(a));
                best = best.max(top.iter().sum());
            }
            best
        })
        .collect::<Vec<f64>>();
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Position of an atom in the `(U, b, f)` index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomIndex {
    pub set: usize,
    pub base: usize,
    pub fiber: usize,
}

#[derive(Debug, Clone)]
pub struct BundleDictionary {
    bundle: GraphBundle,
    cover: Cover,
    partition: PartitionOfUnity,
    base_dict: OrthonormalDictionary,
    fiber_dict: OrthonormalDictionary,
    trivializations: Vec<Trivialization>,
    atoms: DMatrix<f64>,
}

impl Frame for BundleDictionary {
    fn atom_matrix(&self) -> &DMatrix<f64> {
        &self.atoms
    }
}

/// Builds every atom `ψ_{b,f}^U`, ordered lexicographically by `(U, b, f)`.
pub fn build_dictionary(
    bundle: &GraphBundle,
    cover: &Cover,
    partition: &PartitionOfUnity,
    base_dict: &OrthonormalDictionary,
    fiber_dict: &OrthonormalDictionary,
) -> Result<BundleDictionary> {
    let base_n = bundle.base().vertex_count();
    let fiber_n = bundle.fiber().vertex_count();
    if cover.base() != bundle.base() {
        return Err(Error::InvalidParameter(
            "cover is not a cover of the bundle's base".into(),
        ));
    }
    if base_dict.dim() != base_n {
        return Err(Error::DimensionMismatch {
            expected: base_n,
            actual: base_dict.dim(),
        });
    }
    if fiber_dict.dim() != fiber_n {
        return Err(Error::DimensionMismatch {
            expected: fiber_n,
            actual: fiber_dict.dim(),
        });
    }
    if partition.len() != cover.len() || partition.weights().iter().any(|w| w.len() != base_n) {
        return Err(Error::InvalidPartition(
            "partition shape does not match the cover".into(),
        ));
    }

    let trivializations = cover
        .sets()
        .par_iter()
        .map(|set| trivialize(bundle, set, None))
        .collect::<Result<Vec<_>>>()?;

    let (nb, nf) = (base_dict.len(), fiber_dict.len());
    let per_set = nb * nf;
    let n_total = bundle.total().vertex_count();
    let blocks: Vec<DMatrix<f64>> = trivializations
        .par_iter()
        .enumerate()
        .map(|(u, triv)| {
            let mut block = DMatrix::zeros(n_total, per_set);
            let base_atoms = base_dict.matrix();
            let fiber_atoms = fiber_dict.matrix();
            for b in 0..nb {
                for f in 0..nf {
                    let col = b * nf + f;
                    for (k, &w) in triv.vertices.iter().enumerate() {
                        let weighted = partition.weight(u, w).sqrt() * base_atoms[(w, b)];
                        if weighted == 0.0 {
                            continue;
                        }
                        for i in 0..fiber_n {
                            block[(triv.apply(k, i), col)] = weighted * fiber_atoms[(i, f)];
                        }
                    }
                }
            }
            block
        })
        .collect();

    let mut atoms = DMatrix::zeros(n_total, per_set * cover.len());
    for (u, block) in blocks.iter().enumerate() {
        atoms.columns_mut(u * per_set, per_set).copy_from(block);
    }

    Ok(BundleDictionary {
        bundle: bundle.clone(),
        cover: cover.clone(),
        partition: partition.clone(),
        base_dict: base_dict.clone(),
        fiber_dict: fiber_dict.clone(),
        trivializations,
        atoms,
    })
}

impl BundleDictionary {
    pub fn bundle(&self) -> &GraphBundle {
        &self.bundle
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.partition
    }

    pub fn base_dict(&self) -> &OrthonormalDictionary {
        &self.base_dict
    }

    pub fn fiber_dict(&self) -> &OrthonormalDictionary {
        &self.fiber_dict
    }

    pub fn trivializations(&self) -> &[Trivialization] {
        &self.trivializations
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.cover.len(), self.base_dict.len(), self.fiber_dict.len())
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn position(&self, idx: AtomIndex) -> usize {
        let (_, nb, nf) = self.shape();
        (idx.set * nb + idx.base) * nf + idx.fiber
    }

    pub fn index_of(&self, k: usize) -> AtomIndex {
        let (_, nb, nf) = self.shape();
        AtomIndex {
            set: k / (nb * nf),
            base: (k / nf) % nb,
            fiber: k % nf,
        }
    }

    pub fn atom(&self, idx: AtomIndex) -> Signal {
        let k = self.position(idx);
        Signal::new(self.atoms.column(k).iter().copied().collect()).expect("finite atoms")
    }

    /// `c_{b,f,U} = ⟨x, ψ_{b,f}^U⟩`.
    pub fn analyze(&self, x: &Signal) -> Result<BundleCoefficients> {
        Ok(BundleCoefficients {
            shape: self.shape(),
            values: self.coefficients(x)?.iter().copied().collect(),
        })
    }

    /// `Σ c_{b,f,U} ψ_{b,f}^U`.
    pub fn synthesize(&self, c: &BundleCoefficients) -> Result<Signal> {
        if c.shape != self.shape() {
            return Err(Error::InvalidParameter(format!(
                "coefficient shape {:?} does not match dictionary shape {:?}",
                c.shape,
                self.shape()
            )));
        }
        self.combine(&DVector::from_column_slice(&c.values))
    }
}

/// Bundle-transform coefficients, laid out in `(U, b, f)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleCoefficients {
    shape: (usize, usize, usize),
    values: Vec<f64>,
}

impl BundleCoefficients {
    pub fn zeros(shape: (usize, usize, usize)) -> Self {
        Self {
            shape,
            values: vec![0.0; shape.0 * shape.1 * shape.2],
        }
    }

    pub fn from_values(shape: (usize, usize, usize), values: Vec<f64>) -> Result<Self> {
        let expected = shape.0 * shape.1 * shape.2;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: AtomIndex) -> f64 {
        let (_, nb, nf) = self.shape;
        self.values[(idx.set * nb + idx.base) * nf + idx.fiber]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `(index, value)` pairs in layout order.
    pub fn iter(&self) -> impl Iterator<Item = (AtomIndex, f64)> + '_ {
        let (_, nb, nf) = self.shape;
        self.values.iter().enumerate().map(move |(k, &v)| {
            (
                AtomIndex {
                    set: k / (nb * nf),
                    base: (k / nf) % nb,
                    fiber: k % nf,
                },
                v,
            )
        })
    }
}

/// `x_U = π*√ρ_U · x` for every cover set.
pub fn localize(bundle: &GraphBundle, partition: &PartitionOfUnity, x: &Signal) -> Result<Vec<Signal>> {
    x.expect_len(bundle.total().vertex_count())?;
    partition
        .weights()
        .iter()
        .map(|w| {
            let rho = Signal::new(w.clone())?;
            let lifted = pullback(bundle.projection(), &pointwise_sqrt(&rho)?)?;
            pointwise_mul(&lifted, x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{build_bundle, Permutation, VoltageAssignment};
    use crate::cover::{inverse_multiplicity_partition, star_cover, trivial_cover};
    use crate::graph::{cycle_graph, path_graph};
    use crate::spectral::{fourier_basis, standard_basis};
    use rand::{Rng, SeedableRng};

    fn mobius() -> GraphBundle {
        let base = cycle_graph(5).unwrap();
        let fiber = path_graph(2).unwrap();
        let mut volt = VoltageAssignment::identity(&base, &fiber);
        volt.set(4, 0, Permutation::reversal(2)).unwrap();
        build_bundle(volt).unwrap()
    }

    fn mobius_star_dictionary() -> BundleDictionary {
        let m = mobius();
        let cover = star_cover(m.base());
        let part = inverse_multiplicity_partition(&cover);
        build_dictionary(
            &m,
            &cover,
            &part,
            &fourier_basis(m.base()).unwrap(),
            &fourier_basis(m.fiber()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn mobius_star_dictionary_shape() {
        let d = mobius_star_dictionary();
        assert_eq!(d.len(), 50);
        assert_eq!(d.dim(), 10);
        let (a, b) = frame_bounds(&d).unwrap();
        assert!((a - 1.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn analysis_is_parseval_and_synthesis_inverts() {
        let d = mobius_star_dictionary();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let x = Signal::new((0..10).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap();
            let c = d.analyze(&x).unwrap();
            assert!((c.norm() - x.norm()).abs() < 1e-10);
            let back = d.synthesize(&c).unwrap();
            assert!(back.max_abs_diff(&x).unwrap() < 1e-9);
        }
        let zero = d.analyze(&Signal::zeros(10)).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert_eq!(
            d.synthesize(&BundleCoefficients::zeros(d.shape())).unwrap(),
            Signal::zeros(10)
        );
        assert!(d.synthesize(&BundleCoefficients::zeros((1, 5, 2))).is_err());
        assert!(d.analyze(&Signal::zeros(9)).is_err());
    }

    #[test]
    fn atom_support_is_local() {
        let d = mobius_star_dictionary();
        for k in 0..d.len() {
            let idx = d.index_of(k);
            assert_eq!(d.position(idx), k);
            let image = d.trivializations()[idx.set].phi.image();
            let atom = d.atom(idx);
            for v in 0..10 {
                if !image.contains(&v) {
                    assert_eq!(atom.get(v), 0.0);
                }
            }
        }
    }

    #[test]
    fn orthonormal_coefficient_at_single_atom() {
        let base = cycle_graph(5).unwrap();
        let fiber = path_graph(2).unwrap();
        let b = GraphBundle::product(&base, &fiber);
        let cover = trivial_cover(&base).unwrap();
        let part = inverse_multiplicity_partition(&cover);
        let d = build_dictionary(
            &b,
            &cover,
            &part,
            &fourier_basis(&base).unwrap(),
            &fourier_basis(&fiber).unwrap(),
        )
        .unwrap();
        let idx = AtomIndex { set: 0, base: 3, fiber: 1 };
        let c = d.analyze(&d.atom(idx)).unwrap();
        for (j, v) in c.iter() {
            let expected = if j == idx { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12);
        }
        let (mean, std) = atom_norm_stats(&d);
        assert!((mean - 1.0).abs() < 1e-12 && std < 1e-12);
    }

    #[test]
    fn broken_partition_is_not_tight() {
        let m = mobius();
        let cover = star_cover(m.base());
        let mut weights = inverse_multiplicity_partition(&cover).weights().to_vec();
        // Vertex 0 appears in sets 0, 1, 4 with weight 1/3 each; halve its mass.
        for w in weights.iter_mut() {
            w[0] *= 0.5;
        }
        let broken = PartitionOfUnity::new_unchecked(weights);
        let d = build_dictionary(
            &m,
            &cover,
            &broken,
            &fourier_basis(m.base()).unwrap(),
            &fourier_basis(m.fiber()).unwrap(),
        )
        .unwrap();
        let (a, b) = frame_bounds(&d).unwrap();
        assert!(a < 1.0 - 1e-3);
        assert!((b - 1.0).abs() < 1e-9);
    }

    #[test]
    fn frame_bounds_of_orthonormal_basis() {
        let d = standard_basis(&cycle_graph(4).unwrap());
        assert_eq!(d.frame_operator(), DMatrix::identity(4, 4));
        assert_eq!(frame_bounds(&d).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn coherence_examples() {
        let d = fourier_basis(&cycle_graph(6).unwrap()).unwrap();
        for m in 1..6 {
            assert!(cumulative_coherence(&d, m, CoherenceMode::Normalized).unwrap() < 1e-12);
        }
        assert!(cumulative_coherence(&d, 6, CoherenceMode::Normalized).is_err());
        assert!(cumulative_coherence(&d, 0, CoherenceMode::Normalized).is_err());

        // Duplicated atom in a toy dictionary.
        struct Toy(DMatrix<f64>);
        impl Frame for Toy {
            fn atom_matrix(&self) -> &DMatrix<f64> {
                &self.0
            }
        }
        let toy = Toy(DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 0.0, 2.0]));
        assert_eq!(cumulative_coherence(&toy, 1, CoherenceMode::Normalized).unwrap(), 1.0);
        assert_eq!(cumulative_coherence(&toy, 2, CoherenceMode::Normalized).unwrap(), 1.0);
        assert_eq!(cumulative_coherence(&toy, 1, CoherenceMode::Raw).unwrap(), 1.0);
    }

    #[test]
    fn coherence_matches_brute_force_over_index_sets() {
        let d = mobius_star_dictionary();
        let a = d.atom_matrix();
        let kept: Vec<usize> = (0..d.len())
            .filter(|&k| a.column(k).norm_squared() > ZERO_ATOM_NORM)
            .collect();
        let m = 3;
        // Brute force: enumerate all index sets of size m for each atom.
        let mut brute = 0.0_f64;
        for &i in &kept {
            let ci = a.column(i) / a.column(i).norm();
            let others: Vec<f64> = kept
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| ci.dot(&(a.column(j) / a.column(j).norm())).abs())
                .collect();
            let n = others.len();
            for x in 0..n {
                for y in x + 1..n {
                    for z in y + 1..n {
                        brute = brute.max(others[x] + others[y] + others[z]);
                    }
                }
            }
        }
        let fast = cumulative_coherence(&d, m, CoherenceMode::Normalized).unwrap();
        assert!((fast - brute).abs() < 1e-12);
    }

    #[test]
    fn localize_is_an_isometry() {
        let m = mobius();
        let cover = star_cover(m.base());
        let part = inverse_multiplicity_partition(&cover);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x = Signal::new((0..10).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let parts = localize(&m, &part, &x).unwrap();
        let total: f64 = parts.iter().map(Signal::norm_squared).sum();
        assert!((total - x.norm_squared()).abs() < 1e-12);
    }
}
