//! Small fixed inputs used by the CLI `demo` command and by tests.

use std::collections::BTreeMap;

use crate::attention::GatTriple;
use crate::graph::{Graph, NodeId};
use crate::sheaf::Cochain0;

/// Path-like tree on `u, v, w, x` with edges `{u,w}, {v,w}, {w,x}`.
pub fn fig2_graph() -> Graph {
    Graph::from_strs(&["u", "v", "w", "x"], &[("u", "w"), ("v", "w"), ("w", "x")])
        .expect("static graph")
}

/// Star with center `u` and leaves `v, w, x, y`. The center sends weight 1 to
/// every leaf and each leaf sends 0.25 back, so incoming weights sum to 1
/// everywhere. Features are `(u, v, w, x, y) = (1, 4, 4, 4, 8)`: every edge
/// but `{u, y}` is harmonic.
pub fn fig4_triple() -> GatTriple {
    let graph = Graph::from_strs(
        &["u", "v", "w", "x", "y"],
        &[("u", "v"), ("u", "w"), ("u", "x"), ("u", "y")],
    )
    .expect("static graph");
    let id = |s: &str| NodeId::new(s).expect("static id");
    let features = Cochain0::new(
        [("u", 1.0), ("v", 4.0), ("w", 4.0), ("x", 4.0), ("y", 8.0)]
            .into_iter()
            .map(|(v, x)| (id(v), vec![x]))
            .collect(),
    );
    let mut weights = BTreeMap::new();
    for leaf in ["v", "w", "x", "y"] {
        weights.insert((id("u"), id(leaf)), 1.0);
        weights.insert((id(leaf), id("u")), 0.25);
    }
    GatTriple::new(graph, 1, features, weights).expect("static triple")
}
