use nalgebra::{DMatrix, DVector, SVD};

use super::{coboundary, CellularSheaf, Cochain0};
use crate::error::{Error, Result};
use crate::graph::{Element, ElementSet};

/// Relative singular-value cutoff used when no tolerance is given.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Position of one element's block inside a flat section vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSlot {
    pub element: Element,
    pub offset: usize,
    pub dim: usize,
}

/// Orthonormal basis of a section space, stored as flat vectors over a
/// block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionBasis {
    layout: Vec<BlockSlot>,
    vectors: Vec<DVector<f64>>,
    tolerance: f64,
}

impl SectionBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn layout(&self) -> &[BlockSlot] {
        &self.layout
    }

    /// The rank cutoff the basis was computed with.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Block of basis vector `i` at `element`.
    pub fn block(&self, i: usize, element: &Element) -> Option<&[f64]> {
        let slot = self.layout.iter().find(|s| &s.element == element)?;
        let v = self.vectors.get(i)?;
        Some(&v.as_slice()[slot.offset..slot.offset + slot.dim])
    }

    /// Basis vector `i` as a 0-cochain. `None` if the layout has edge blocks.
    pub fn cochain(&self, i: usize) -> Option<Cochain0> {
        let v = self.vectors.get(i)?;
        let mut out = Cochain0::default();
        for slot in &self.layout {
            let Element::Node(node) = &slot.element else {
                return None;
            };
            out.blocks.insert(
                node.clone(),
                v.as_slice()[slot.offset..slot.offset + slot.dim].to_vec(),
            );
        }
        Some(out)
    }

    pub fn cochains(&self) -> Vec<Cochain0> {
        (0..self.dimension())
            .filter_map(|i| self.cochain(i))
            .collect()
    }
}

/// Orthonormal basis of `ker(m)`.
///
/// Singular values below `tol · σ_max` count as zero; if `σ_max` is zero the
/// whole domain is the kernel. Each vector is sign-normalized so its first
/// significant entry is positive.
pub fn kernel_basis(m: &DMatrix<f64>, tol: f64) -> Result<Vec<DVector<f64>>> {
    let n = m.ncols();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Pad short matrices so the SVD yields a full set of right singular vectors.
    let padded;
    let a = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), m.shape()).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = SVD::try_new(a.clone(), false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested v_t");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * sigma_max;
    let mut basis = Vec::new();
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma_max == 0.0 || sigma < cutoff {
            let mut v: DVector<f64> = v_t.row(k).transpose();
            let scale = v.amax();
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12 * scale) {
                if first < 0.0 {
                    v.neg_mut();
                }
            }
            basis.push(v);
        }
    }
    Ok(basis)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Basis of the global section space `ker C`.
pub fn global_sections(sh: &CellularSheaf, tol: f64) -> Result<SectionBasis> {
    check_tol(tol)?;
    let c = coboundary(sh);
    let layout = sh
        .host()
        .nodes()
        .iter()
        .enumerate()
        .map(|(vi, v)| BlockSlot {
            element: Element::Node(v.clone()),
            offset: sh.node_offset(vi),
            dim: sh.node_dim(vi),
        })
        .collect();
    Ok(SectionBasis {
        layout,
        vectors: kernel_basis(&c.matrix, tol)?,
        tolerance: tol,
    })
}

/// Basis of the local sections on an open set `u`.
///
/// Every element of `u` carries a block. For each edge `r ∈ u` and each
/// endpoint `p ∈ u` of `r` the block of `r` must equal `F(p ⊴ r) s_p`; an edge
/// with no endpoint in `u` is unconstrained.
pub fn local_section_space(sh: &CellularSheaf, u: &ElementSet, tol: f64) -> Result<SectionBasis> {
    check_tol(tol)?;
    let g = sh.host();
    if !g.is_open(u)? {
        return Err(Error::NotOpen);
    }
    let mut layout = Vec::with_capacity(u.len());
    let mut offset = 0;
    for element in u.elements() {
        let dim = match &element {
            Element::Node(v) => sh.node_dim(g.node_index(v).unwrap()),
            Element::Edge(e) => sh.edge_dim(g.edge_index(e).unwrap()),
        };
        layout.push(BlockSlot {
            element,
            offset,
            dim,
        });
        offset += dim;
    }
    let slot_of = |element: &Element| layout.iter().find(|s| &s.element == element);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for e in &u.edges {
        let ei = g.edge_index(e).unwrap();
        let edge_slot = slot_of(&Element::Edge(e.clone())).unwrap();
        for p in [e.lo(), e.hi()] {
            let Some(node_slot) = slot_of(&Element::Node(p.clone())) else {
                continue;
            };
            let map = sh.restriction_of(g.node_index(p).unwrap(), ei).unwrap();
            for r in 0..edge_slot.dim {
                let mut row = vec![0.0; offset];
                row[edge_slot.offset + r] = 1.0;
                for c in 0..node_slot.dim {
                    row[node_slot.offset + c] -= map[(r, c)];
                }
                rows.push(row);
            }
        }
    }
    let constraints = DMatrix::from_fn(rows.len(), offset, |r, c| rows[r][c]);
    Ok(SectionBasis {
        layout,
        vectors: kernel_basis(&constraints, tol)?,
        tolerance: tol,
    })
}
