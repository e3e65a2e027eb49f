//! Sheaves induced by graph-attention weights.
//!
//! A triple `(G, features, W)` holds a graph, one `d`-dimensional feature per
//! node and directed attention weights `w(from, to)` on edges. The induced
//! sheaf has `R^d` everywhere, and node `i` restricts into edge `{i, j}` by
//! scalar multiplication with `w(i, j)`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, Graph, NodeId};
use crate::sheaf::{mat_vec, CellularSheaf, Cochain0};

/// Incoming weights at a node should sum to 1 within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GatTriple {
    pub graph: Graph,
    pub feature_dim: usize,
    pub features: Cochain0,
    /// `(from, to) -> w`. Absent pairs are zero.
    pub weights: BTreeMap<(NodeId, NodeId), f64>,
}

impl GatTriple {
    /// Checks features and that weights reference known nodes. Whether the
    /// weights sit on edges is left to [`validate_triple`] and [`gat_sheaf`].
    pub fn new(
        graph: Graph,
        feature_dim: usize,
        features: Cochain0,
        weights: BTreeMap<(NodeId, NodeId), f64>,
    ) -> Result<Self> {
        if feature_dim < 1 {
            return Err(Error::InvalidDimension("feature_dim must be >= 1".into()));
        }
        if features.blocks.len() != graph.node_count()
            || graph
                .nodes()
                .iter()
                .any(|v| features.get(v).map(<[f64]>::len) != Some(feature_dim))
        {
            return Err(Error::DimensionMismatch(format!(
                "every node needs a feature vector of length {feature_dim}"
            )));
        }
        for (from, to) in weights.keys() {
            for v in [from, to] {
                if !graph.contains_node(v) {
                    return Err(Error::UnknownEndpoint(v.to_string()));
                }
            }
        }
        Ok(GatTriple {
            graph,
            feature_dim,
            features,
            weights,
        })
    }

    /// `w(from, to)`, zero when absent.
    pub fn weight(&self, from: &NodeId, to: &NodeId) -> f64 {
        self.weights
            .get(&(from.clone(), to.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    fn weight_idx(&self, from: usize, to: usize) -> f64 {
        let nodes = self.graph.nodes();
        self.weight(&nodes[from], &nodes[to])
    }

    /// Σ over incoming records `w(j, v)`.
    pub fn incoming_sum(&self, v: &NodeId) -> f64 {
        self.weights
            .iter()
            .filter(|((_, to), _)| to == v)
            .map(|(_, w)| w)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    WeightOffEdge { from: NodeId, to: NodeId },
    NonzeroDiagonal { node: NodeId, w: f64 },
    NormalizationViolation { node: NodeId, sum: f64 },
    WeightOutOfRange { from: NodeId, to: NodeId, w: f64 },
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        matches!(
            self,
            Diagnostic::WeightOffEdge { .. } | Diagnostic::NonzeroDiagonal { .. }
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::WeightOffEdge { from, to } => {
                write!(f, "error: weight ({from}, {to}) is not on an edge")
            }
            Diagnostic::NonzeroDiagonal { node, w } => {
                write!(f, "error: diagonal weight ({node}, {node}) = {w} must be 0")
            }
            Diagnostic::NormalizationViolation { node, sum } => {
                write!(f, "warning: incoming weights at {node} sum to {sum}, not 1")
            }
            Diagnostic::WeightOutOfRange { from, to, w } => {
                write!(f, "warning: weight ({from}, {to}) = {w} is outside [0, 1]")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub items: Vec<Diagnostic>,
}

impl Diagnostics {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(|d| d.is_error())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(|d| !d.is_error())
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

/// Structural errors plus soft warnings (normalization, range). Nodes of
/// degree 0 have no incoming weights and are not checked for normalization.
pub fn validate_triple(t: &GatTriple) -> Diagnostics {
    let mut items = Vec::new();
    for ((from, to), &w) in &t.weights {
        if from == to {
            if w != 0.0 {
                items.push(Diagnostic::NonzeroDiagonal {
                    node: from.clone(),
                    w,
                });
            }
            continue;
        }
        let on_edge = EdgeKey::new(from.clone(), to.clone())
            .map(|e| t.graph.contains_edge(&e))
            .unwrap_or(false);
        if !on_edge {
            items.push(Diagnostic::WeightOffEdge {
                from: from.clone(),
                to: to.clone(),
            });
        } else if !(0.0..=1.0).contains(&w) {
            items.push(Diagnostic::WeightOutOfRange {
                from: from.clone(),
                to: to.clone(),
                w,
            });
        }
    }
    for (vi, v) in t.graph.nodes().iter().enumerate() {
        if t.graph.degree(vi) == 0 {
            continue;
        }
        let sum = t.incoming_sum(v);
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            items.push(Diagnostic::NormalizationViolation {
                node: v.clone(),
                sum,
            });
        }
    }
    Diagnostics { items }
}

/// Sheaf with stalks `R^d` whose restriction of `v_i` into `{v_i, v_j}` is
/// `w(i, j) · I_d`.
pub fn gat_sheaf(t: &GatTriple) -> Result<CellularSheaf> {
    for ((from, to), &w) in &t.weights {
        if from == to {
            if w != 0.0 {
                return Err(Error::NonzeroDiagonal(from.to_string()));
            }
        } else if !t
            .graph
            .contains_edge(&EdgeKey::new(from.clone(), to.clone())?)
        {
            return Err(Error::WeightOffEdge {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
    }
    let d = t.feature_dim;
    let g = &t.graph;
    let id = DMatrix::<f64>::identity(d, d);
    let restrictions = (0..g.edge_count())
        .map(|ei| {
            let (lo, hi) = g.endpoints(ei);
            [&id * t.weight_idx(lo, hi), &id * t.weight_idx(hi, lo)]
        })
        .collect();
    CellularSheaf::from_parts(
        g.clone(),
        vec![d; g.node_count()],
        vec![d; g.edge_count()],
        restrictions,
    )
}

/// Attention aggregation: node `i` receives `Σ_j w(j, i) · R_j s_j` over its
/// neighbors, where `R_j` is the identity or, when a sheaf is given, the
/// restriction of `v_j` into `{v_i, v_j}`.
pub fn attention_aggregate(t: &GatTriple, sh: Option<&CellularSheaf>) -> Result<Cochain0> {
    let g = &t.graph;
    if let Some(sh) = sh {
        if sh.host() != g {
            return Err(Error::DimensionMismatch(
                "sheaf is defined on a different graph".into(),
            ));
        }
        if !sh.has_uniform_dim(t.feature_dim) {
            return Err(Error::DimensionMismatch(format!(
                "sheaf stalks must all have dimension {}",
                t.feature_dim
            )));
        }
    }
    let nodes = g.nodes();
    let mut out = Cochain0::default();
    for (i, v) in nodes.iter().enumerate() {
        let mut acc = vec![0.0; t.feature_dim];
        for &ei in g.incident_edges(i) {
            let (lo, hi) = g.endpoints(ei);
            let j = if lo == i { hi } else { lo };
            let w = t.weight_idx(j, i);
            let s_j = &t.features.blocks[&nodes[j]];
            let transferred = match sh {
                None => s_j.clone(),
                Some(sh) => mat_vec(sh.restriction_of(j, ei).unwrap(), s_j),
            };
            for (a, x) in acc.iter_mut().zip(transferred) {
                *a += w * x;
            }
        }
        out.blocks.insert(v.clone(), acc);
    }
    Ok(out)
}
