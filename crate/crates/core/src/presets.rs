//! Named bundles used by the experiments.

use crate::bundle::{build_bundle, GraphBundle, Permutation, VoltageAssignment};
use crate::graph::{cycle_graph, path_graph, Graph};

/// Chord closing the first loop of the glued base.
pub const GLUED_CHORD: (usize, usize) = (0, 12);
/// Base edge carrying the fiber reversal in the glued bundle. It lies on the
/// loop `12, 13, …, 26, 0`, so the loop `0, 1, …, 12` stays untwisted.
pub const GLUED_TWIST_EDGE: (usize, usize) = (19, 20);

fn twisted_cycle(base: Graph, fiber: Graph, edge: (usize, usize)) -> GraphBundle {
    let mut volt = VoltageAssignment::identity(&base, &fiber);
    volt.set(edge.0, edge.1, Permutation::reversal(fiber.vertex_count()))
        .expect("reversal is an automorphism of a path");
    build_bundle(volt).expect("valid preset")
}

/// Möbius graph: 5-cycle base, 2-vertex path fiber, one flip on edge (4, 0).
pub fn mobius() -> GraphBundle {
    twisted_cycle(cycle_graph(5).unwrap(), path_graph(2).unwrap(), (4, 0))
}

/// Cylinder `C5 □ P2`.
pub fn cylinder() -> GraphBundle {
    GraphBundle::product(&cycle_graph(5).unwrap(), &path_graph(2).unwrap())
}

/// 27-cycle with the chord (0, 12): two loops sharing that edge.
pub fn glued_base() -> Graph {
    cycle_graph(27)
        .unwrap()
        .with_edges([GLUED_CHORD])
        .expect("chord is new")
}

/// Cylinder and Möbius band glued along the chord: 7-vertex path fiber,
/// reversed across [`GLUED_TWIST_EDGE`]. 189 vertices.
pub fn glued() -> GraphBundle {
    twisted_cycle(glued_base(), path_graph(7).unwrap(), GLUED_TWIST_EDGE)
}

/// Vertex order of the 27-cycle used to place cover centers.
pub fn glued_cycle_order() -> Vec<usize> {
    (0..27).collect()
}

/// Möbius band for the pentane torsion landscape: 15-cycle base, 6-vertex
/// path fiber, fiber reversed across the edge (14, 0).
pub fn pentane() -> GraphBundle {
    twisted_cycle(cycle_graph(15).unwrap(), path_graph(6).unwrap(), (14, 0))
}

pub fn pentane_cycle_order() -> Vec<usize> {
    (0..15).collect()
}

/// Looks up a preset by name.
pub fn by_name(name: &str) -> Option<GraphBundle> {
    match name {
        "mobius" => Some(mobius()),
        "cylinder" => Some(cylinder()),
        "glued" => Some(glued()),
        "pentane" => Some(pentane()),
        _ => None,
    }
}
