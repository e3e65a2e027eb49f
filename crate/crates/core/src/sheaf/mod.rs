//! Cellular sheaves of real vector spaces on graphs.
//!
//! A sheaf assigns a stalk `R^k` to every node and edge and, for every
//! incident pair `v ⊴ e`, a restriction matrix of shape
//! `edge_dim(e) × node_dim(v)`. Maps for non-incident pairs are zero and are
//! not stored.

mod cochain;
mod operators;
mod sections;

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, Graph, NodeId};

pub use cochain::{Cochain0, Cochain1};
pub use operators::{
    apply_coboundary, coboundary, laplacian_spectrum, sheaf_laplacian, sheaf_norm,
    zero_eigenvalue_count, Coboundary,
};
pub use sections::{
    global_sections, kernel_basis, local_section_space, SectionBasis, DEFAULT_RANK_TOL,
};

/// Which end of an edge a node sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo = 0,
    Hi = 1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellularSheaf {
    host: Graph,
    node_dims: Vec<usize>,
    edge_dims: Vec<usize>,
    /// Per edge index: restriction of the lo endpoint, then of the hi endpoint.
    restrictions: Vec<[DMatrix<f64>; 2]>,
    node_offsets: Vec<usize>,
    edge_offsets: Vec<usize>,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    out.push(0);
    for d in dims {
        acc += d;
        out.push(acc);
    }
    out
}

impl CellularSheaf {
    /// Index-based constructor: dims and restrictions follow the host's
    /// canonical node and edge orders.
    pub fn from_parts(
        host: Graph,
        node_dims: Vec<usize>,
        edge_dims: Vec<usize>,
        restrictions: Vec<[DMatrix<f64>; 2]>,
    ) -> Result<Self> {
        if node_dims.len() != host.node_count() || edge_dims.len() != host.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} node dims and {} edge dims, got {} and {}",
                host.node_count(),
                host.edge_count(),
                node_dims.len(),
                edge_dims.len()
            )));
        }
        if restrictions.len() != host.edge_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} restriction pairs, got {}",
                host.edge_count(),
                restrictions.len()
            )));
        }
        if let Some(i) = node_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDimension(format!(
                "stalk of node {} has dimension 0",
                host.nodes()[i]
            )));
        }
        if let Some(i) = edge_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidDimension(format!(
                "stalk of edge {} has dimension 0",
                host.edges()[i]
            )));
        }
        for (ei, pair) in restrictions.iter().enumerate() {
            let (lo, hi) = host.endpoints(ei);
            for (vi, m) in [lo, hi].into_iter().zip(pair) {
                if m.shape() != (edge_dims[ei], node_dims[vi]) {
                    return Err(Error::DimensionMismatch(format!(
                        "restriction {} -> {} has shape {:?}, expected {:?}",
                        host.nodes()[vi],
                        host.edges()[ei],
                        m.shape(),
                        (edge_dims[ei], node_dims[vi])
                    )));
                }
            }
        }
        Ok(CellularSheaf {
            node_offsets: offsets(&node_dims),
            edge_offsets: offsets(&edge_dims),
            host,
            node_dims,
            edge_dims,
            restrictions,
        })
    }

    /// Keyed constructor. `restrictions` must hold exactly one matrix per
    /// incident `(node, edge)` pair.
    pub fn new(
        host: Graph,
        node_dims: &BTreeMap<NodeId, usize>,
        edge_dims: &BTreeMap<EdgeKey, usize>,
        restrictions: &BTreeMap<(NodeId, EdgeKey), DMatrix<f64>>,
    ) -> Result<Self> {
        let nd = host
            .nodes()
            .iter()
            .map(|v| {
                node_dims.get(v).copied().ok_or_else(|| {
                    Error::InvalidDimension(format!("no stalk dimension for node {v}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let ed = host
            .edges()
            .iter()
            .map(|e| {
                edge_dims.get(e).copied().ok_or_else(|| {
                    Error::InvalidDimension(format!("no stalk dimension for edge {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for v in node_dims.keys() {
            if !host.contains_node(v) {
                return Err(Error::UnknownElement(format!("node {v}")));
            }
        }
        for e in edge_dims.keys() {
            if !host.contains_edge(e) {
                return Err(Error::UnknownElement(format!("edge {e}")));
            }
        }
        for (v, e) in restrictions.keys() {
            if !host.contains_edge(e) || !e.contains(v) {
                return Err(Error::UnknownElement(format!(
                    "restriction for non-incident pair ({v}, {e})"
                )));
            }
        }
        let maps = host
            .edges()
            .iter()
            .map(|e| {
                let get = |v: &NodeId| {
                    restrictions
                        .get(&(v.clone(), e.clone()))
                        .cloned()
                        .ok_or_else(|| {
                            Error::DimensionMismatch(format!("missing restriction ({v}, {e})"))
                        })
                };
                Ok([get(e.lo())?, get(e.hi())?])
            })
            .collect::<Result<Vec<_>>>()?;
        CellularSheaf::from_parts(host, nd, ed, maps)
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn node_dim(&self, vi: usize) -> usize {
        self.node_dims[vi]
    }

    pub fn edge_dim(&self, ei: usize) -> usize {
        self.edge_dims[ei]
    }

    pub fn node_dims(&self) -> &[usize] {
        &self.node_dims
    }

    pub fn edge_dims(&self) -> &[usize] {
        &self.edge_dims
    }

    /// Start of node `vi`'s block in a flattened 0-cochain.
    pub fn node_offset(&self, vi: usize) -> usize {
        self.node_offsets[vi]
    }

    pub fn edge_offset(&self, ei: usize) -> usize {
        self.edge_offsets[ei]
    }

    /// Σ node stalk dimensions.
    pub fn total_node_dim(&self) -> usize {
        *self.node_offsets.last().unwrap()
    }

    /// Σ edge stalk dimensions.
    pub fn total_edge_dim(&self) -> usize {
        *self.edge_offsets.last().unwrap()
    }

    pub fn restriction_at(&self, ei: usize, side: Side) -> &DMatrix<f64> {
        &self.restrictions[ei][side as usize]
    }

    /// Restriction map of `v` into `e`; `None` unless `v` is an endpoint of `e`.
    pub fn restriction(&self, v: &NodeId, e: &EdgeKey) -> Option<&DMatrix<f64>> {
        let ei = self.host.edge_index(e)?;
        if e.lo() == v {
            Some(self.restriction_at(ei, Side::Lo))
        } else if e.hi() == v {
            Some(self.restriction_at(ei, Side::Hi))
        } else {
            None
        }
    }

    /// Restriction of node index `vi` into edge index `ei`, if incident.
    pub(crate) fn restriction_of(&self, vi: usize, ei: usize) -> Option<&DMatrix<f64>> {
        let (lo, hi) = self.host.endpoints(ei);
        if vi == lo {
            Some(self.restriction_at(ei, Side::Lo))
        } else if vi == hi {
            Some(self.restriction_at(ei, Side::Hi))
        } else {
            None
        }
    }

    /// True when every node and edge stalk has dimension `d`.
    pub fn has_uniform_dim(&self, d: usize) -> bool {
        self.node_dims
            .iter()
            .chain(&self.edge_dims)
            .all(|&k| k == d)
    }
}

/// Constant sheaf `R^d`: every stalk is `R^d` and every restriction the identity.
pub fn constant_sheaf(g: &Graph, d: usize) -> Result<CellularSheaf> {
    if d < 1 {
        return Err(Error::InvalidDimension(
            "constant sheaf needs d >= 1".into(),
        ));
    }
    let id = DMatrix::<f64>::identity(d, d);
    CellularSheaf::from_parts(
        g.clone(),
        vec![d; g.node_count()],
        vec![d; g.edge_count()],
        vec![[id.clone(), id]; g.edge_count()],
    )
}

/// `y = m · x` with a left-to-right accumulation per row, starting from `0.0`.
pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| {
            let mut acc = 0.0;
            for (c, xc) in x.iter().enumerate() {
                acc += m[(r, c)] * xc;
            }
            acc
        })
        .collect()
}
