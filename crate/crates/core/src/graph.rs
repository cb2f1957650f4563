//! Finite simple undirected graphs and the maps between them.
//!
//! Vertices are dense indices `0..n`. Edges are stored as `(min, max)` pairs
//! in sorted order and adjacency lists are sorted, so every traversal in the
//! crate is deterministic.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wire form of a graph: `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges (in either
    /// orientation) and out-of-range endpoints.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canonical = Vec::new();
        for (i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        vertex_count: n,
                    });
                }
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            canonical.push((i.min(j), i.max(j)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &canonical {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: canonical,
            adjacency,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                vertex_count: self.n,
            })
        }
    }

    /// Returns a copy of this graph with additional edges.
    pub fn with_edges<I>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Graph::new(self.n, self.edges.iter().copied().chain(extra))
    }

    /// Breadth-first distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Sorted vertices within BFS distance `radius` of `center`.
    pub fn ball(&self, center: usize, radius: usize) -> Vec<usize> {
        self.bfs_distances(center)
            .into_iter()
            .enumerate()
            .filter_map(|(v, d)| d.filter(|&d| d <= radius).map(|_| v))
            .collect()
    }

    /// Whether the subgraph induced on `vertices` is connected. The empty set
    /// counts as disconnected.
    pub fn is_connected_subset(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let mut inside = vec![false; self.n];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        let distinct = {
            let mut s = vertices.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        count == distinct
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.is_connected_subset(&(0..self.n).collect::<Vec<_>>())
    }

    /// Number of triangles, by brute enumeration over edges.
    pub fn triangle_count(&self) -> usize {
        self.edges
            .iter()
            .map(|&(i, j)| {
                self.adjacency[i]
                    .iter()
                    .filter(|&&k| k > j && self.has_edge(j, k))
                    .count()
            })
            .sum()
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(value: GraphJson) -> Result<Self> {
        Graph::new(value.n, value.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle graph needs at least 3 vertices, got {n}"
        )));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Path on `n` vertices. "Path of length k" means k vertices throughout the
/// crate.
pub fn path_graph(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::InvalidParameter(
            "path graph needs at least 1 vertex".into(),
        ));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn complete_graph(n: usize) -> Graph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Graph::new(n, edges).expect("complete graph edges are valid")
}

/// A vertex map between two graphs satisfying the graph-map condition: every
/// source edge is either contracted to a vertex or sent to a target edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMap {
    source: Graph,
    target: Graph,
    vertex_map: Vec<usize>,
}

impl GraphMap {
    pub fn new(source: Graph, target: Graph, vertex_map: Vec<usize>) -> Result<Self> {
        if vertex_map.len() != source.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: source.vertex_count(),
                actual: vertex_map.len(),
            });
        }
        for &w in &vertex_map {
            target.check_vertex(w)?;
        }
        for &(i, j) in source.edges() {
            let (a, b) = (vertex_map[i], vertex_map[j]);
            if a != b && !target.has_edge(a, b) {
                return Err(Error::NotAGraphMap(i, j));
            }
        }
        Ok(Self {
            source,
            target,
            vertex_map,
        })
    }

    pub fn identity(g: &Graph) -> Self {
        Self {
            source: g.clone(),
            target: g.clone(),
            vertex_map: (0..g.vertex_count()).collect(),
        }
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn apply(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.vertex_count()];
        for &w in &self.vertex_map {
            hit[w] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Injective graph map whose image reflects adjacency exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIsomorphism {
    map: GraphMap,
    preimage: Vec<Option<usize>>,
}

impl LocalIsomorphism {
    pub fn new(map: GraphMap) -> Result<Self> {
        if !is_local_isomorphism(&map) {
            return Err(Error::NotLocalIsomorphism);
        }
        let mut preimage = vec![None; map.target.vertex_count()];
        for (v, &w) in map.vertex_map.iter().enumerate() {
            preimage[w] = Some(v);
        }
        Ok(Self { map, preimage })
    }

    pub fn map(&self) -> &GraphMap {
        &self.map
    }

    pub fn source(&self) -> &Graph {
        &self.map.source
    }

    pub fn target(&self) -> &Graph {
        &self.map.target
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map.vertex_map[v]
    }

    /// Source vertex mapped onto `w`, if `w` lies in the image.
    pub fn preimage(&self, w: usize) -> Option<usize> {
        self.preimage[w]
    }

    /// Image vertices, in source-vertex order.
    pub fn image(&self) -> &[usize] {
        &self.map.vertex_map
    }
}

/// True iff the vertex map is injective and `(φ(i), φ(j))` is a target edge
/// exactly when `(i, j)` is a source edge, for every pair of source vertices.
pub fn is_local_isomorphism(m: &GraphMap) -> bool {
    let n = m.source.vertex_count();
    let mut seen = vec![false; m.target.vertex_count()];
    for &w in &m.vertex_map {
        if std::mem::replace(&mut seen[w], true) {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mapped = m.target.has_edge(m.vertex_map[i], m.vertex_map[j]);
            if mapped != m.source.has_edge(i, j) {
                return false;
            }
        }
    }
    true
}

/// An induced or star subgraph together with its embedding into the parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgraph {
    pub graph: Graph,
    /// `embedding[k]` is the parent vertex of local vertex `k`.
    pub embedding: Vec<usize>,
}

impl Subgraph {
    pub fn embedding_map(&self, parent: &Graph) -> Result<GraphMap> {
        GraphMap::new(self.graph.clone(), parent.clone(), self.embedding.clone())
    }
}

fn sorted_unique(g: &Graph, vertices: &[usize]) -> Result<Vec<usize>> {
    let mut s = vertices.to_vec();
    for &v in &s {
        g.check_vertex(v)?;
    }
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// Subgraph induced on `vertices`; local vertices follow ascending parent order.
pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> Result<Subgraph> {
    let embedding = sorted_unique(g, vertices)?;
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (k, &v) in embedding.iter().enumerate() {
        local[v] = k;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(i, j)| local[i] != usize::MAX && local[j] != usize::MAX)
        .map(|&(i, j)| (local[i], local[j]));
    Ok(Subgraph {
        graph: Graph::new(embedding.len(), edges)?,
        embedding,
    })
}

/// Star on `v` and its neighbors. Only center-leaf edges are kept.
pub fn neighborhood_star(g: &Graph, v: usize) -> Result<Subgraph> {
    g.check_vertex(v)?;
    let mut embedding = vec![v];
    embedding.extend_from_slice(g.neighbors(v));
    embedding.sort_unstable();
    let center = embedding.binary_search(&v).expect("center present");
    let edges = (0..embedding.len())
        .filter(|&k| k != center)
        .map(|k| (center, k));
    Ok(Subgraph {
        graph: Graph::new(embedding.len(), edges)?,
        embedding,
    })
}

/// Row-major bijection between product vertices and `(base, fiber)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductIndexing {
    base_count: usize,
    fiber_count: usize,
}

impl ProductIndexing {
    pub fn new(base_count: usize, fiber_count: usize) -> Self {
        Self {
            base_count,
            fiber_count,
        }
    }

    pub fn base_count(&self) -> usize {
        self.base_count
    }

    pub fn fiber_count(&self) -> usize {
        self.fiber_count
    }

    pub fn len(&self) -> usize {
        self.base_count * self.fiber_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, base: usize, fiber: usize) -> usize {
        debug_assert!(base < self.base_count && fiber < self.fiber_count);
        base * self.fiber_count + fiber
    }

    pub fn pair(&self, v: usize) -> (usize, usize) {
        (v / self.fiber_count, v % self.fiber_count)
    }

    /// First-factor projection `p1` as a graph map from the product onto `base`.
    pub fn first_projection(&self, product: &Graph, base: &Graph) -> Result<GraphMap> {
        let map = (0..self.len()).map(|v| self.pair(v).0).collect();
        GraphMap::new(product.clone(), base.clone(), map)
    }
}

pub fn cartesian_product(base: &Graph, fiber: &Graph) -> (Graph, ProductIndexing) {
    let idx = ProductIndexing::new(base.vertex_count(), fiber.vertex_count());
    let mut edges = Vec::with_capacity(
        base.edge_count() * fiber.vertex_count() + base.vertex_count() * fiber.edge_count(),
    );
    for b in 0..base.vertex_count() {
        for &(i, j) in fiber.edges() {
            edges.push((idx.index(b, i), idx.index(b, j)));
        }
    }
    for &(a, b) in base.edges() {
        for f in 0..fiber.vertex_count() {
            edges.push((idx.index(a, f), idx.index(b, f)));
        }
    }
    let g = Graph::new(idx.len(), edges).expect("product edges are valid");
    (g, idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chorded_27() -> Graph {
        cycle_graph(27).unwrap().with_edges([(0, 12)]).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(matches!(
            Graph::new(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, .. })
        ));
    }

    #[test]
    fn constructors() {
        let c5 = cycle_graph(5).unwrap();
        assert_eq!((c5.vertex_count(), c5.edge_count()), (5, 5));
        assert_eq!(cycle_graph(15).unwrap().vertex_count(), 15);
        assert_eq!(cycle_graph(27).unwrap().edge_count(), 27);
        assert!(cycle_graph(2).is_err());

        let p2 = path_graph(2).unwrap();
        assert_eq!(p2.edges(), &[(0, 1)]);
        assert_eq!(path_graph(7).unwrap().edge_count(), 6);
        let p1 = path_graph(1).unwrap();
        assert_eq!((p1.vertex_count(), p1.edge_count()), (1, 0));
        assert!(path_graph(0).is_err());
    }

    #[test]
    fn induced_subgraph_examples() {
        let c5 = cycle_graph(5).unwrap();
        let sub = induced_subgraph(&c5, &[2, 0, 1]).unwrap();
        assert_eq!(sub.graph, path_graph(3).unwrap());
        assert_eq!(sub.embedding, vec![0, 1, 2]);

        let all = induced_subgraph(&c5, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(all.graph, c5);

        assert!(induced_subgraph(&c5, &[7]).is_err());
    }

    #[test]
    fn induced_ball_on_chorded_cycle() {
        let g = chorded_27();
        let ball = g.ball(0, 2);
        // Brute enumeration: distance-2 neighborhood via explicit adjacency.
        let mut expected: Vec<usize> = vec![0];
        for &a in g.neighbors(0) {
            expected.push(a);
            expected.extend_from_slice(g.neighbors(a));
        }
        expected.sort_unstable();
        expected.dedup();
        assert_eq!(ball, expected);
        assert_eq!(ball, vec![0, 1, 2, 11, 12, 13, 25, 26]);

        let sub = induced_subgraph(&g, &ball).unwrap();
        let mut brute = 0;
        for (a, &u) in ball.iter().enumerate() {
            for (b, &v) in ball.iter().enumerate().skip(a + 1) {
                let present = g.has_edge(u, v);
                assert_eq!(present, sub.graph.has_edge(a, b));
                brute += present as usize;
            }
        }
        assert_eq!(brute, sub.graph.edge_count());
        assert_eq!(brute, 7);
    }

    #[test]
    fn neighborhood_star_examples() {
        let c5 = cycle_graph(5).unwrap();
        let s = neighborhood_star(&c5, 0).unwrap();
        assert_eq!(s.embedding, vec![0, 1, 4]);
        assert_eq!(s.graph.edge_count(), 2);

        let k4 = complete_graph(4);
        let s = neighborhood_star(&k4, 2).unwrap();
        assert_eq!(s.graph.edge_count(), 3);
        assert!(!is_local_isomorphism(&s.embedding_map(&k4).unwrap()));

        let g = chorded_27();
        let s = neighborhood_star(&g, 0).unwrap();
        assert_eq!(s.embedding, vec![0, 1, 12, 26]);
        assert_eq!(s.graph.edge_count(), 3);
        assert!(is_local_isomorphism(&s.embedding_map(&g).unwrap()));
        assert!(neighborhood_star(&g, 27).is_err());
    }

    #[test]
    fn cartesian_product_counts() {
        let c5 = cycle_graph(5).unwrap();
        let p2 = path_graph(2).unwrap();
        let (cyl, idx) = cartesian_product(&c5, &p2);
        assert_eq!((cyl.vertex_count(), cyl.edge_count()), (10, 15));
        assert_eq!(idx.pair(idx.index(3, 1)), (3, 1));

        let (g, _) = cartesian_product(&chorded_27(), &path_graph(7).unwrap());
        assert_eq!(g.vertex_count(), 189);

        let (same, _) = cartesian_product(&c5, &path_graph(1).unwrap());
        assert_eq!(same, c5);
    }

    #[test]
    fn first_projection_contracts_fiber_edges() {
        let b = cycle_graph(4).unwrap();
        let f = path_graph(3).unwrap();
        let (g, idx) = cartesian_product(&b, &f);
        let p1 = idx.first_projection(&g, &b).unwrap();
        assert!(p1.is_surjective());
        assert!(!is_local_isomorphism(&p1));
    }

    #[test]
    fn graph_map_rejects_broken_edges() {
        let p3 = path_graph(3).unwrap();
        let p2 = path_graph(2).unwrap();
        // 0-1-2 onto 0-1 by 0->0, 1->1, 2->0 is fine; 1->1, 2->1 contracted is fine.
        assert!(GraphMap::new(p3.clone(), p2.clone(), vec![0, 1, 0]).is_ok());
        let e3 = Graph::empty(3);
        assert!(matches!(
            GraphMap::new(p3, e3, vec![0, 1, 2]),
            Err(Error::NotAGraphMap(0, 1))
        ));
    }

    #[test]
    fn json_round_trip_rejects_invalid() {
        let g: Graph = serde_json::from_str(r#"{"n":3,"edges":[[0,1],[2,1]]}"#).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        let back = serde_json::to_string(&g).unwrap();
        assert_eq!(back, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }

    #[test]
    fn triangles() {
        assert_eq!(complete_graph(4).triangle_count(), 4);
        assert_eq!(chorded_27().triangle_count(), 0);
    }
}
