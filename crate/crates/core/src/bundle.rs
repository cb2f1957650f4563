//! Graph bundles generated by voltage assignments.
//!
//! A voltage assignment attaches an automorphism `σ_uv` of the fiber to every
//! oriented base edge `u → v`, with `σ_vu = σ_uv⁻¹`. The total graph has one
//! fiber copy per base vertex and cross edges `(u, i) ~ (v, σ_uv(i))`. Identity
//! voltages reproduce the Cartesian product; a nontrivial product of voltages
//! around a base cycle is a twist that no single trivialization can absorb.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    cartesian_product, induced_subgraph, neighborhood_star, Graph, GraphMap, LocalIsomorphism,
    ProductIndexing, Subgraph,
};
use crate::isomorphism::{find_isomorphism, is_automorphism};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// `i ↦ n - 1 - i`, the nontrivial automorphism of a path.
    pub fn reversal(n: usize) -> Self {
        Self((0..n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Permutation) -> Self {
        Self(inner.0.iter().map(|&i| self.0[i]).collect())
    }
}

/// One row of the voltage table: `perm` is `σ_uv` for `edge = [u, v]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoltageEntry {
    pub edge: [usize; 2],
    pub perm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoltageAssignment {
    base: Graph,
    fiber: Graph,
    /// `σ_uv` for each base edge `(u, v)` with `u < v`, aligned with `base.edges()`.
    forward: Vec<Permutation>,
}

impl VoltageAssignment {
    pub fn identity(base: &Graph, fiber: &Graph) -> Self {
        Self {
            base: base.clone(),
            fiber: fiber.clone(),
            forward: vec![Permutation::identity(fiber.vertex_count()); base.edge_count()],
        }
    }

    /// Builds an assignment from table rows; unlisted edges carry the identity.
    /// If both orientations of an edge are listed they must be mutually inverse.
    pub fn from_entries(base: &Graph, fiber: &Graph, entries: &[VoltageEntry]) -> Result<Self> {
        let mut out = Self::identity(base, fiber);
        let mut given: Vec<Option<Permutation>> = vec![None; base.edge_count()];
        for entry in entries {
            let [u, v] = entry.edge;
            let perm = Permutation::new(entry.perm.clone())?;
            let slot = out.edge_slot(u, v)?;
            let forward = if u < v { perm } else { perm.inverse() };
            if let Some(prev) = &given[slot] {
                if *prev != forward {
                    return Err(Error::InconsistentInverse(u.min(v), u.max(v)));
                }
            }
            out.set(u, v, if u < v { forward.clone() } else { forward.inverse() })?;
            given[slot] = Some(forward);
        }
        Ok(out)
    }

    fn edge_slot(&self, u: usize, v: usize) -> Result<usize> {
        let key = (u.min(v), u.max(v));
        self.base
            .edges()
            .binary_search(&key)
            .map_err(|_| Error::NotABaseEdge(u, v))
    }

    /// Sets `σ_uv = perm` (and implicitly `σ_vu = perm⁻¹`).
    pub fn set(&mut self, u: usize, v: usize, perm: Permutation) -> Result<()> {
        let slot = self.edge_slot(u, v)?;
        if perm.len() != self.fiber.vertex_count() || !is_automorphism(&self.fiber, perm.images())
        {
            return Err(Error::NotAnAutomorphism(u, v));
        }
        self.forward[slot] = if u < v { perm } else { perm.inverse() };
        Ok(())
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn fiber(&self) -> &Graph {
        &self.fiber
    }

    /// `σ_uv` for the oriented base edge `u → v`.
    pub fn voltage(&self, u: usize, v: usize) -> Result<Permutation> {
        let slot = self.edge_slot(u, v)?;
        let p = &self.forward[slot];
        Ok(if u < v { p.clone() } else { p.inverse() })
    }

    pub fn entries(&self) -> Vec<VoltageEntry> {
        self.base
            .edges()
            .iter()
            .zip(&self.forward)
            .map(|(&(u, v), p)| VoltageEntry {
                edge: [u, v],
                perm: p.images().to_vec(),
            })
            .collect()
    }

    /// Composed voltage along a closed walk `w[0] → w[1] → … → w[0]`.
    pub fn holonomy(&self, walk: &[usize]) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.fiber.vertex_count());
        for k in 0..walk.len() {
            let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
            acc = self.voltage(a, b)?.compose(&acc);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphBundle {
    total: Graph,
    base: Graph,
    fiber: Graph,
    indexing: ProductIndexing,
    projection: GraphMap,
    voltages: VoltageAssignment,
}

/// Total graph on `V(B) × V(F)` with fiber-copy edges and voltage-twisted
/// cross edges. Total vertex `(b, f)` has index `b · |V(F)| + f`.
pub fn build_bundle(voltages: VoltageAssignment) -> Result<GraphBundle> {
    let base = voltages.base.clone();
    let fiber = voltages.fiber.clone();
    let indexing = ProductIndexing::new(base.vertex_count(), fiber.vertex_count());
    for (&(u, v), p) in base.edges().iter().zip(&voltages.forward) {
        if !is_automorphism(&fiber, p.images()) {
            return Err(Error::NotAnAutomorphism(u, v));
        }
    }
    let mut edges = Vec::new();
    for b in 0..base.vertex_count() {
        for &(i, j) in fiber.edges() {
            edges.push((indexing.index(b, i), indexing.index(b, j)));
        }
    }
    for (&(u, v), sigma) in base.edges().iter().zip(&voltages.forward) {
        for i in 0..fiber.vertex_count() {
            edges.push((indexing.index(u, i), indexing.index(v, sigma.apply(i))));
        }
    }
    let total = Graph::new(indexing.len(), edges)?;
    let projection = indexing.first_projection(&total, &base)?;
    Ok(GraphBundle {
        total,
        base,
        fiber,
        indexing,
        projection,
        voltages,
    })
}

impl GraphBundle {
    /// The untwisted bundle `B □ F → B`.
    pub fn product(base: &Graph, fiber: &Graph) -> Self {
        build_bundle(VoltageAssignment::identity(base, fiber)).expect("identity voltages")
    }

    pub fn total(&self) -> &Graph {
        &self.total
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn fiber(&self) -> &Graph {
        &self.fiber
    }

    pub fn indexing(&self) -> &ProductIndexing {
        &self.indexing
    }

    pub fn projection(&self) -> &GraphMap {
        &self.projection
    }

    pub fn voltages(&self) -> &VoltageAssignment {
        &self.voltages
    }

    /// Total vertex with coordinates `(b, f)`.
    pub fn vertex(&self, b: usize, f: usize) -> usize {
        self.indexing.index(b, f)
    }

    pub fn coordinates(&self, v: usize) -> (usize, usize) {
        self.indexing.pair(v)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_bundle(
            &self.total,
            &self.base,
            self.projection.vertex_map(),
            &self.fiber,
        )
    }
}

/// A local isomorphism `φ_U: U □ F → G` with `p1 = π ∘ φ_U`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trivialization {
    /// Base vertices of `U` in ascending order; local vertex `k` is `vertices[k]`.
    pub vertices: Vec<usize>,
    pub local_base: Graph,
    pub indexing: ProductIndexing,
    /// Fiber identification `g_w` at each local vertex.
    pub gauges: Vec<Permutation>,
    pub phi: LocalIsomorphism,
}

impl Trivialization {
    /// Total vertex `φ_U(k, i)` for local base vertex `k` and fiber vertex `i`.
    pub fn apply(&self, local: usize, fiber: usize) -> usize {
        self.phi.apply(self.indexing.index(local, fiber))
    }
}

/// Trivializes the bundle over the subgraph induced on `set`.
///
/// Gauges are propagated along a BFS spanning tree (lowest index first) from
/// `root`, defaulting to the smallest vertex of the set; every non-tree edge
/// must agree with the propagated gauges.
pub fn trivialize(bundle: &GraphBundle, set: &[usize], root: Option<usize>) -> Result<Trivialization> {
    let sub = induced_subgraph(&bundle.base, set)?;
    let root_local = match root {
        None => 0,
        Some(r) => sub.embedding.binary_search(&r).map_err(|_| {
            Error::InvalidParameter(format!("root {r} is not in the trivialized set"))
        })?,
    };
    trivialize_subgraph(bundle, &sub, root_local)
}

fn trivialize_subgraph(bundle: &GraphBundle, sub: &Subgraph, root: usize) -> Result<Trivialization> {
    let local = &sub.graph;
    let n = local.vertex_count();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot trivialize an empty set".into()));
    }
    let fiber_n = bundle.fiber.vertex_count();
    let mut gauges: Vec<Option<Permutation>> = vec![None; n];
    gauges[root] = Some(Permutation::identity(fiber_n));
    let mut queue = VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        let gp = gauges[p].clone().expect("visited");
        for &w in local.neighbors(p) {
            if gauges[w].is_none() {
                let sigma = bundle
                    .voltages
                    .voltage(sub.embedding[p], sub.embedding[w])?;
                gauges[w] = Some(sigma.compose(&gp));
                queue.push_back(w);
            }
        }
    }
    let gauges: Vec<Permutation> = gauges
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidParameter("trivialized set is not connected".into()))?;

    for &(a, b) in local.edges() {
        let (ga, gb) = (sub.embedding[a], sub.embedding[b]);
        let sigma = bundle.voltages.voltage(ga, gb)?;
        if sigma.compose(&gauges[a]) != gauges[b] {
            return Err(Error::NonTrivializable(ga, gb));
        }
    }

    let (product, indexing) = cartesian_product(local, &bundle.fiber);
    let map: Vec<usize> = (0..indexing.len())
        .map(|v| {
            let (k, i) = indexing.pair(v);
            bundle.vertex(sub.embedding[k], gauges[k].apply(i))
        })
        .collect();
    let p1_matches = map
        .iter()
        .enumerate()
        .all(|(v, &w)| bundle.projection.apply(w) == sub.embedding[indexing.pair(v).0]);
    if !p1_matches {
        return Err(Error::NotLocalIsomorphism);
    }
    let phi = LocalIsomorphism::new(GraphMap::new(product, bundle.total.clone(), map)?)?;
    Ok(Trivialization {
        vertices: sub.embedding.clone(),
        local_base: local.clone(),
        indexing,
        gauges,
        phi,
    })
}

/// Outcome of checking the bundle axioms on a candidate `(G, π, F)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// `π` is a surjective graph map `G → B`.
    pub projection_ok: bool,
    /// Base vertices whose preimage is not isomorphic to `F`.
    pub fiber_failures: Vec<usize>,
    /// Base vertices whose star admits no local isomorphism `N_v □ F → G`.
    pub star_failures: Vec<usize>,
}

impl ValidationReport {
    pub fn fibers_ok(&self) -> bool {
        self.fiber_failures.is_empty()
    }

    pub fn stars_ok(&self) -> bool {
        self.star_failures.is_empty()
    }

    pub fn is_bundle(&self) -> bool {
        self.projection_ok && self.fibers_ok() && self.stars_ok()
    }
}

/// Checks the bundle axioms for a total graph with a vertex projection onto
/// `base`, without any voltage data.
///
/// Each preimage `π⁻¹(v)` is matched to `F` by exact search. For the star at
/// `v`, the cross edges to every neighbor's fiber must form a perfect matching
/// that extends the identification at `v`; the resulting map `N_v □ F → G` is
/// then tested as a local isomorphism. Any automorphism of `F` yields an
/// equivalent candidate, so one identification per vertex suffices.
pub fn validate_bundle(
    total: &Graph,
    base: &Graph,
    projection: &[usize],
    fiber: &Graph,
) -> ValidationReport {
    let base_n = base.vertex_count();
    let all_bad = ValidationReport {
        projection_ok: false,
        fiber_failures: (0..base_n).collect(),
        star_failures: (0..base_n).collect(),
    };
    if projection.len() != total.vertex_count() || projection.iter().any(|&b| b >= base_n) {
        return all_bad;
    }
    let projection_ok = GraphMap::new(total.clone(), base.clone(), projection.to_vec())
        .map(|m| m.is_surjective())
        .unwrap_or(false);

    let mut preimages = vec![Vec::new(); base_n];
    for (w, &b) in projection.iter().enumerate() {
        preimages[b].push(w);
    }

    // identification[v][i] = total vertex playing fiber vertex i over v
    let identification: Vec<Option<Vec<usize>>> = preimages
        .iter()
        .map(|pre| {
            let sub = induced_subgraph(total, pre).ok()?;
            let m = find_isomorphism(fiber, &sub.graph)?;
            Some(m.into_iter().map(|k| sub.embedding[k]).collect())
        })
        .collect();
    let fiber_failures: Vec<usize> = (0..base_n)
        .filter(|&v| identification[v].is_none())
        .collect();

    let star_failures = (0..base_n)
        .filter(|&v| !star_trivializes(total, base, projection, fiber, &identification, v))
        .collect();

    ValidationReport {
        projection_ok,
        fiber_failures,
        star_failures,
    }
}

fn star_trivializes(
    total: &Graph,
    base: &Graph,
    projection: &[usize],
    fiber: &Graph,
    identification: &[Option<Vec<usize>>],
    v: usize,
) -> bool {
    let Some(center_id) = &identification[v] else {
        return false;
    };
    let Ok(star) = neighborhood_star(base, v) else {
        return false;
    };
    let fiber_n = fiber.vertex_count();
    let (product, indexing) = cartesian_product(&star.graph, fiber);
    let mut map = vec![usize::MAX; indexing.len()];
    for (k, &u) in star.embedding.iter().enumerate() {
        for i in 0..fiber_n {
            let image = if u == v {
                Some(center_id[i])
            } else {
                let mut hits = total
                    .neighbors(center_id[i])
                    .iter()
                    .filter(|&&w| projection[w] == u);
                match (hits.next(), hits.next()) {
                    (Some(&w), None) => Some(w),
                    _ => None,
                }
            };
            match image {
                Some(w) => map[indexing.index(k, i)] = w,
                None => return false,
            }
        }
    }
    let p1_matches = map
        .iter()
        .enumerate()
        .all(|(x, &w)| projection[w] == star.embedding[indexing.pair(x).0]);
    p1_matches
        && GraphMap::new(product, total.clone(), map)
            .map(|m| crate::graph::is_local_isomorphism(&m))
            .unwrap_or(false)
}
