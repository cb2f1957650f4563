//! Covers of the base graph and partitions of unity subordinate to them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Connected vertex sets of the base whose induced subgraphs jointly contain
/// every base vertex and every base edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    base: Graph,
    sets: Vec<Vec<usize>>,
}

impl Cover {
    pub fn new(base: &Graph, sets: Vec<Vec<usize>>) -> Result<Self> {
        let cover = Self::vertex_cover(base, sets)?;
        let uncovered_edges = cover.uncovered_edges().len();
        if uncovered_edges > 0 {
            return Err(Error::NotACover {
                uncovered_vertices: 0,
                uncovered_edges,
            });
        }
        Ok(cover)
    }

    /// Like [`Cover::new`] but only requires every vertex to be covered.
    /// A partition of unity needs no more than this, so lifted frames stay
    /// tight; it admits degenerate covers such as singletons.
    pub fn vertex_cover(base: &Graph, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(sets.len());
        for (k, mut set) in sets.into_iter().enumerate() {
            for &v in &set {
                base.check_vertex(v)?;
            }
            set.sort_unstable();
            set.dedup();
            if !base.is_connected_subset(&set) {
                return Err(Error::DisconnectedSet(k));
            }
            normalized.push(set);
        }
        let mut covered = vec![false; base.vertex_count()];
        for v in normalized.iter().flatten() {
            covered[*v] = true;
        }
        let uncovered_vertices = covered.iter().filter(|c| !**c).count();
        if uncovered_vertices > 0 {
            let cover = Self {
                base: base.clone(),
                sets: normalized,
            };
            return Err(Error::NotACover {
                uncovered_vertices,
                uncovered_edges: cover.uncovered_edges().len(),
            });
        }
        Ok(Self {
            base: base.clone(),
            sets: normalized,
        })
    }

    fn uncovered_edges(&self) -> Vec<(usize, usize)> {
        let mut membership = vec![Vec::new(); self.base.vertex_count()];
        for (k, set) in self.sets.iter().enumerate() {
            for &v in set {
                membership[v].push(k);
            }
        }
        self.base
            .edges()
            .iter()
            .copied()
            .filter(|&(i, j)| !membership[i].iter().any(|k| membership[j].contains(k)))
            .collect()
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Number of sets containing each base vertex.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.base.vertex_count()];
        for v in self.sets.iter().flatten() {
            m[*v] += 1;
        }
        m
    }
}

/// One closed neighborhood per base vertex.
pub fn star_cover(base: &Graph) -> Cover {
    let sets = (0..base.vertex_count())
        .map(|v| {
            let mut s = vec![v];
            s.extend_from_slice(base.neighbors(v));
            s
        })
        .collect();
    Cover::new(base, sets).expect("closed neighborhoods cover every vertex and edge")
}

/// The whole base as a single set.
pub fn trivial_cover(base: &Graph) -> Result<Cover> {
    Cover::new(base, vec![(0..base.vertex_count()).collect()])
}

/// One set per vertex. Covers vertices but no edges.
pub fn singleton_cover(base: &Graph) -> Result<Cover> {
    Cover::vertex_cover(base, (0..base.vertex_count()).map(|v| vec![v]).collect())
}

/// Balls of radius `reach` (BFS distance in the full base) centered at every
/// `stride`-th vertex of `cycle_order`.
///
/// Fails with [`Error::NotACover`] when the reach is too small for the stride.
pub fn stride_reach_cover(
    base: &Graph,
    cycle_order: &[usize],
    stride: usize,
    reach: usize,
) -> Result<Cover> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    let mut seen = vec![false; base.vertex_count()];
    for &v in cycle_order {
        base.check_vertex(v)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidParameter(format!(
                "vertex {v} repeated in cycle order"
            )));
        }
    }
    let sets = cycle_order
        .iter()
        .step_by(stride)
        .map(|&c| base.ball(c, reach))
        .collect();
    Cover::new(base, sets)
}

/// Nonnegative weights `ρ_U` on base vertices, supported in `U`, summing to
/// one at every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    weights: Vec<Vec<f64>>,
}

pub const PARTITION_TOLERANCE: f64 = 1e-12;

impl PartitionOfUnity {
    /// `weights[k][v]` is `ρ_{U_k}(v)`.
    pub fn new(cover: &Cover, weights: Vec<Vec<f64>>) -> Result<Self> {
        let n = cover.base().vertex_count();
        if weights.len() != cover.len() {
            return Err(Error::InvalidPartition(format!(
                "{} weight functions for {} cover sets",
                weights.len(),
                cover.len()
            )));
        }
        for (k, (w, set)) in weights.iter().zip(cover.sets()).enumerate() {
            if w.len() != n {
                return Err(Error::InvalidPartition(format!(
                    "weight function {k} has length {}, expected {n}",
                    w.len()
                )));
            }
            for (v, &value) in w.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::InvalidPartition(format!(
                        "weight {value} of set {k} at vertex {v} outside [0, 1]"
                    )));
                }
                if value != 0.0 && set.binary_search(&v).is_err() {
                    return Err(Error::InvalidPartition(format!(
                        "set {k} has weight at vertex {v} outside its support"
                    )));
                }
            }
        }
        for v in 0..n {
            let total: f64 = weights.iter().map(|w| w[v]).sum();
            if (total - 1.0).abs() > PARTITION_TOLERANCE {
                return Err(Error::InvalidPartition(format!(
                    "weights at vertex {v} sum to {total}"
                )));
            }
        }
        Ok(Self { weights })
    }

    /// Skips validation. Used for negative controls such as deliberately
    /// broken partitions; dictionaries built from these are not tight.
    pub fn new_unchecked(weights: Vec<Vec<f64>>) -> Self {
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, set: usize, v: usize) -> f64 {
        self.weights[set][v]
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }
}

/// `ρ_U(v) = 1 / #{W ∈ cover : v ∈ W}` for `v ∈ U`.
pub fn inverse_multiplicity_partition(cover: &Cover) -> PartitionOfUnity {
    let n = cover.base().vertex_count();
    let mult = cover.multiplicities();
    let weights = cover
        .sets()
        .iter()
        .map(|set| {
            let mut w = vec![0.0; n];
            for &v in set {
                w[v] = 1.0 / mult[v] as f64;
            }
            w
        })
        .collect();
    PartitionOfUnity::new(cover, weights).expect("inverse multiplicities form a partition")
}
