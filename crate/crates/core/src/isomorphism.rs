//! Exact isomorphism search by backtracking. Intended for the small graphs
//! that appear as fibers, where exhaustive search is cheap.

use crate::graph::Graph;

/// Finds a vertex bijection `m` with `(i, j) ∈ E(g) ⇔ (m[i], m[j]) ∈ E(h)`.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut gd: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut hd: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let degrees_g = gd.clone();
    gd.sort_unstable();
    hd.sort_unstable();
    if gd != hd {
        return None;
    }

    // Assign high-degree, well-connected vertices first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degrees_g[v]), v));
    let mut state = Search {
        g,
        h,
        order,
        mapping: vec![usize::MAX; n],
        used: vec![false; n],
    };
    state.extend(0).then_some(state.mapping)
}

struct Search<'a> {
    g: &'a Graph,
    h: &'a Graph,
    order: Vec<usize>,
    mapping: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        for w in 0..self.h.vertex_count() {
            if self.used[w] || self.g.degree(v) != self.h.degree(w) {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&u| {
                self.g.has_edge(u, v) == self.h.has_edge(self.mapping[u], w)
            });
            if !consistent {
                continue;
            }
            self.mapping[v] = w;
            self.used[w] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[w] = false;
            self.mapping[v] = usize::MAX;
        }
        false
    }
}

pub fn are_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

/// Whether `perm` is a bijection on `V(g)` preserving adjacency both ways.
pub fn is_automorphism(g: &Graph, perm: &[usize]) -> bool {
    let n = g.vertex_count();
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return false;
        }
    }
    g.edges()
        .iter()
        .all(|&(i, j)| g.has_edge(perm[i], perm[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph};

    #[test]
    fn relabelled_cycle_is_found() {
        let c6 = cycle_graph(6).unwrap();
        let relabel = [3, 0, 4, 1, 5, 2];
        let h = Graph::new(6, c6.edges().iter().map(|&(i, j)| (relabel[i], relabel[j]))).unwrap();
        let m = find_isomorphism(&c6, &h).unwrap();
        for &(i, j) in c6.edges() {
            assert!(h.has_edge(m[i], m[j]));
        }
    }

    #[test]
    fn distinguishes_same_degree_sequences() {
        // Two triangles vs a hexagon: both 2-regular on 6 vertices.
        let two_triangles = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!(!are_isomorphic(&two_triangles, &cycle_graph(6).unwrap()));
        assert!(are_isomorphic(&complete_graph(3), &cycle_graph(3).unwrap()));
    }

    #[test]
    fn automorphisms_of_paths() {
        let p4 = path_graph(4).unwrap();
        assert!(is_automorphism(&p4, &[3, 2, 1, 0]));
        assert!(is_automorphism(&p4, &[0, 1, 2, 3]));
        assert!(!is_automorphism(&p4, &[1, 0, 2, 3]));
        assert!(!is_automorphism(&p4, &[0, 0, 2, 3]));
    }
}
