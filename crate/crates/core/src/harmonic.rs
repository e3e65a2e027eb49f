//! Harmonic and ε-harmonic substructures of a signal.
//!
//! An edge is ε-harmonic when its coboundary block has norm at most ε. A node
//! is ε-harmonic when it has degree 0 or touches an ε-harmonic edge. Exact
//! harmonicity uses the same rule with a small absolute threshold `eta`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, ElementSet, Graph, NodeId};
use crate::sheaf::{apply_coboundary, CellularSheaf, Cochain0};

/// Threshold below which a residual counts as zero.
pub const DEFAULT_ETA: f64 = 1e-9;

/// Per-edge residual norms `‖t_e‖₂` on a host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeResiduals {
    host: Graph,
    norms: BTreeMap<EdgeKey, f64>,
}

impl EdgeResiduals {
    /// Residuals must be finite and nonnegative. Keys outside the host graph
    /// are rejected; missing keys are allowed and reported later by
    /// consumers that need every edge.
    pub fn new(host: Graph, norms: BTreeMap<EdgeKey, f64>) -> Result<Self> {
        for (e, &r) in &norms {
            if !host.contains_edge(e) {
                return Err(Error::UnknownElement(format!("edge {e}")));
            }
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::InvalidResidual(e.to_string(), r));
            }
        }
        Ok(EdgeResiduals { host, norms })
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn norms(&self) -> &BTreeMap<EdgeKey, f64> {
        &self.norms
    }

    pub fn get(&self, e: &EdgeKey) -> Option<f64> {
        self.norms.get(e).copied()
    }

    /// Largest residual, 0 for an edgeless graph.
    pub fn max(&self) -> f64 {
        self.norms.values().copied().fold(0.0, f64::max)
    }

    fn require(&self, e: &EdgeKey) -> Result<f64> {
        self.get(e)
            .ok_or_else(|| Error::MissingResidual(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSet {
    pub epsilon: f64,
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeKey>,
}

impl HarmonicSet {
    pub fn to_element_set(&self) -> ElementSet {
        ElementSet::from_parts(self.nodes.iter().cloned(), self.edges.iter().cloned())
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HarmonicClassification {
    pub is_subgraph: bool,
    pub is_open: bool,
    pub is_full: bool,
    pub is_empty: bool,
    pub is_component_union: bool,
}

/// `‖F(hi ⊴ e) s_hi − F(lo ⊴ e) s_lo‖₂` for every edge.
pub fn edge_residuals(sh: &CellularSheaf, s: &Cochain0) -> Result<EdgeResiduals> {
    let t = apply_coboundary(sh, s)?;
    let norms = t
        .blocks
        .into_iter()
        .map(|(e, block)| (e, block.iter().map(|x| x * x).sum::<f64>().sqrt()))
        .collect();
    Ok(EdgeResiduals {
        host: sh.host().clone(),
        norms,
    })
}

/// Edges with residual `<= epsilon`, plus degree-0 nodes and the endpoints
/// of those edges.
pub fn epsilon_harmonic_set(r: &EdgeResiduals, epsilon: f64) -> Result<HarmonicSet> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    let g = &r.host;
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for (vi, v) in g.nodes().iter().enumerate() {
        if g.degree(vi) == 0 {
            nodes.insert(v.clone());
        }
    }
    for e in g.edges() {
        if r.require(e)? <= epsilon {
            nodes.insert(e.lo().clone());
            nodes.insert(e.hi().clone());
            edges.insert(e.clone());
        }
    }
    Ok(HarmonicSet {
        epsilon,
        nodes,
        edges,
    })
}

/// Harmonic set with residuals `<= eta` treated as zero. The returned set
/// reports `epsilon = 0`.
pub fn harmonic_set(sh: &CellularSheaf, s: &Cochain0, eta: f64) -> Result<HarmonicSet> {
    let r = edge_residuals(sh, s)?;
    let mut h = epsilon_harmonic_set(&r, eta)?;
    h.epsilon = 0.0;
    Ok(h)
}

pub fn classify_harmonic_set(g: &Graph, h: &HarmonicSet) -> Result<HarmonicClassification> {
    let set = h.to_element_set();
    Ok(HarmonicClassification {
        is_subgraph: g.is_closed(&set)?,
        is_open: g.is_open(&set)?,
        is_full: set == g.full_set(),
        is_empty: set.is_empty(),
        is_component_union: g.is_union_of_components(&set)?,
    })
}

/// Every edge residual is at most `eta`.
pub fn is_global_section(sh: &CellularSheaf, s: &Cochain0, eta: f64) -> Result<bool> {
    Ok(edge_residuals(sh, s)?.norms.values().all(|&r| r <= eta))
}
