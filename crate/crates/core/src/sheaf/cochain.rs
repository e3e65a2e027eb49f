use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CellularSheaf;
use crate::error::{Error, Result};
use crate::graph::{EdgeKey, Graph, NodeId};

/// A 0-cochain: one vector per node.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cochain0 {
    pub blocks: BTreeMap<NodeId, Vec<f64>>,
}

/// A 1-cochain: one vector per edge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Cochain1 {
    pub blocks: BTreeMap<EdgeKey, Vec<f64>>,
}

impl Cochain0 {
    pub fn new(blocks: BTreeMap<NodeId, Vec<f64>>) -> Self {
        Cochain0 { blocks }
    }

    /// Zero cochain matching the sheaf's node stalks.
    pub fn zeros(sh: &CellularSheaf) -> Self {
        let g = sh.host();
        Cochain0 {
            blocks: g
                .nodes()
                .iter()
                .enumerate()
                .map(|(vi, v)| (v.clone(), vec![0.0; sh.node_dim(vi)]))
                .collect(),
        }
    }

    /// Splits a flat vector into node blocks following the sheaf layout.
    pub fn from_flat(sh: &CellularSheaf, flat: &[f64]) -> Result<Self> {
        if flat.len() != sh.total_node_dim() {
            return Err(Error::DimensionMismatch(format!(
                "flat 0-cochain has length {}, expected {}",
                flat.len(),
                sh.total_node_dim()
            )));
        }
        let g = sh.host();
        Ok(Cochain0 {
            blocks: g
                .nodes()
                .iter()
                .enumerate()
                .map(|(vi, v)| {
                    let off = sh.node_offset(vi);
                    (v.clone(), flat[off..off + sh.node_dim(vi)].to_vec())
                })
                .collect(),
        })
    }

    /// Builds a cochain from scalar values given in canonical node order.
    pub fn from_scalars(g: &Graph, values: &[f64]) -> Result<Self> {
        if values.len() != g.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                g.node_count()
            )));
        }
        Ok(Cochain0 {
            blocks: g
                .nodes()
                .iter()
                .cloned()
                .zip(values.iter().map(|&x| vec![x]))
                .collect(),
        })
    }

    pub fn get(&self, v: &NodeId) -> Option<&[f64]> {
        self.blocks.get(v).map(Vec::as_slice)
    }

    /// Checks keys and block lengths against the sheaf.
    pub fn check(&self, sh: &CellularSheaf) -> Result<()> {
        let g = sh.host();
        if self.blocks.len() != g.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "0-cochain has {} blocks, graph has {} nodes",
                self.blocks.len(),
                g.node_count()
            )));
        }
        for (vi, v) in g.nodes().iter().enumerate() {
            match self.blocks.get(v) {
                None => {
                    return Err(Error::DimensionMismatch(format!(
                        "0-cochain has no block for {v}"
                    )))
                }
                Some(b) if b.len() != sh.node_dim(vi) => {
                    return Err(Error::DimensionMismatch(format!(
                        "block {v} has length {}, stalk has dimension {}",
                        b.len(),
                        sh.node_dim(vi)
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    /// Concatenation of the blocks in canonical node order.
    pub fn flatten(&self, sh: &CellularSheaf) -> Result<Vec<f64>> {
        self.check(sh)?;
        Ok(self.blocks.values().flatten().copied().collect())
    }

    pub fn scale(&self, factor: f64) -> Cochain0 {
        Cochain0 {
            blocks: self
                .blocks
                .iter()
                .map(|(v, b)| (v.clone(), b.iter().map(|x| factor * x).collect()))
                .collect(),
        }
    }

    /// Blockwise sum; both operands must have the same keys and lengths.
    pub fn add(&self, other: &Cochain0) -> Result<Cochain0> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::DimensionMismatch(
                "cochains have different supports".into(),
            ));
        }
        self.blocks
            .iter()
            .map(|(v, a)| match other.blocks.get(v) {
                Some(b) if b.len() == a.len() => {
                    Ok((v.clone(), a.iter().zip(b).map(|(x, y)| x + y).collect()))
                }
                _ => Err(Error::DimensionMismatch(format!(
                    "block {v} does not match"
                ))),
            })
            .collect::<Result<_>>()
            .map(Cochain0::new)
    }
}

impl Cochain1 {
    pub fn new(blocks: BTreeMap<EdgeKey, Vec<f64>>) -> Self {
        Cochain1 { blocks }
    }

    pub fn get(&self, e: &EdgeKey) -> Option<&[f64]> {
        self.blocks.get(e).map(Vec::as_slice)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.values().flatten().copied().collect()
    }

    /// Euclidean norm of the whole cochain.
    pub fn norm(&self) -> f64 {
        self.blocks
            .values()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}
