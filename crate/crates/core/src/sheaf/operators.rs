use nalgebra::{DMatrix, SymmetricEigen};

use super::{CellularSheaf, Cochain0, Cochain1, Side};
use crate::error::Result;

/// Dense coboundary matrix with its block layout.
///
/// Rows are grouped by edge and columns by node, both in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Coboundary {
    pub matrix: DMatrix<f64>,
    /// Row offset of each edge block, plus the total row count.
    pub row_offsets: Vec<usize>,
    /// Column offset of each node block, plus the total column count.
    pub col_offsets: Vec<usize>,
}

impl Coboundary {
    /// Block for `(edge index, node index)`.
    pub fn block(&self, ei: usize, vi: usize) -> DMatrix<f64> {
        let (r0, r1) = (self.row_offsets[ei], self.row_offsets[ei + 1]);
        let (c0, c1) = (self.col_offsets[vi], self.col_offsets[vi + 1]);
        self.matrix.view((r0, c0), (r1 - r0, c1 - c0)).into_owned()
    }
}

/// Assembles the coboundary: block `(e, v)` is `[v:e] · F(v ⊴ e)` with
/// `[lo:e] = -1`, `[hi:e] = +1`.
pub fn coboundary(sh: &CellularSheaf) -> Coboundary {
    let g = sh.host();
    let mut m = DMatrix::zeros(sh.total_edge_dim(), sh.total_node_dim());
    for ei in 0..g.edge_count() {
        let (lo, hi) = g.endpoints(ei);
        let r0 = sh.edge_offset(ei);
        for (vi, side, sign) in [(lo, Side::Lo, -1.0), (hi, Side::Hi, 1.0)] {
            let c0 = sh.node_offset(vi);
            let map = sh.restriction_at(ei, side);
            for r in 0..map.nrows() {
                for c in 0..map.ncols() {
                    m[(r0 + r, c0 + c)] = sign * map[(r, c)];
                }
            }
        }
    }
    Coboundary {
        matrix: m,
        row_offsets: (0..=g.edge_count()).map(|ei| sh.edge_offset(ei)).collect(),
        col_offsets: (0..=g.node_count()).map(|vi| sh.node_offset(vi)).collect(),
    }
}

/// Blockwise coboundary: `t_e = F(hi ⊴ e) s_hi - F(lo ⊴ e) s_lo`.
///
/// Each row is accumulated over the signed lo block and then the hi block,
/// which is the column order of [`coboundary`], so the result matches a
/// left-to-right dense product exactly.
pub fn apply_coboundary(sh: &CellularSheaf, s: &Cochain0) -> Result<Cochain1> {
    s.check(sh)?;
    let g = sh.host();
    let blocks = g
        .edges()
        .iter()
        .enumerate()
        .map(|(ei, e)| {
            let lo_map = sh.restriction_at(ei, Side::Lo);
            let hi_map = sh.restriction_at(ei, Side::Hi);
            let s_lo = &s.blocks[e.lo()];
            let s_hi = &s.blocks[e.hi()];
            let t = (0..sh.edge_dim(ei))
                .map(|r| {
                    let mut acc = 0.0;
                    for (c, x) in s_lo.iter().enumerate() {
                        acc += -lo_map[(r, c)] * x;
                    }
                    for (c, x) in s_hi.iter().enumerate() {
                        acc += hi_map[(r, c)] * x;
                    }
                    acc
                })
                .collect();
            (e.clone(), t)
        })
        .collect();
    Ok(Cochain1::new(blocks))
}

/// Sheaf Laplacian `Cᵀ C`, assembled edge by edge.
///
/// Only the upper triangle is accumulated; the lower one is mirrored, so the
/// result is exactly symmetric.
pub fn sheaf_laplacian(sh: &CellularSheaf) -> DMatrix<f64> {
    let g = sh.host();
    let n = sh.total_node_dim();
    let mut l = DMatrix::zeros(n, n);
    for ei in 0..g.edge_count() {
        let (lo, hi) = g.endpoints(ei);
        let signed = [
            (sh.node_offset(lo), -sh.restriction_at(ei, Side::Lo)),
            (sh.node_offset(hi), sh.restriction_at(ei, Side::Hi).clone()),
        ];
        for (ca, a) in &signed {
            for (cb, b) in &signed {
                if ca > cb {
                    continue;
                }
                for i in 0..a.ncols() {
                    for j in 0..b.ncols() {
                        let (row, col) = (ca + i, cb + j);
                        if row > col {
                            continue;
                        }
                        let mut acc = 0.0;
                        for k in 0..a.nrows() {
                            acc += a[(k, i)] * b[(k, j)];
                        }
                        l[(row, col)] += acc;
                    }
                }
            }
        }
    }
    for row in 0..n {
        for col in 0..row {
            l[(row, col)] = l[(col, row)];
        }
    }
    l
}

/// Eigenvalues of the sheaf Laplacian in ascending order.
pub fn laplacian_spectrum(sh: &CellularSheaf) -> Vec<f64> {
    let l = sheaf_laplacian(sh);
    if l.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues at most `tol · λ_max` in an ascending spectrum. Every value
/// counts when `λ_max` is not positive.
pub fn zero_eigenvalue_count(spectrum: &[f64], tol: f64) -> usize {
    let max = spectrum.last().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return spectrum.len();
    }
    spectrum.iter().filter(|&&l| l <= tol * max).count()
}

/// `‖C s‖₂`, a seminorm on 0-cochains.
pub fn sheaf_norm(sh: &CellularSheaf, s: &Cochain0) -> Result<f64> {
    Ok(apply_coboundary(sh, s)?.norm())
}
