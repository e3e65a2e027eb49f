//! Cellular sheaves on graphs and their harmonic analysis.
//!
//! The crate builds sheaves on simple undirected graphs, assembles
//! coboundary and Laplacian operators, computes section spaces, extracts
//! harmonic substructures of a signal and tracks them through a residual
//! filtration as a persistence barcode. Graph attention layers enter through
//! [`attention::gat_sheaf`], which turns a weight matrix into restriction maps.

pub mod attention;
pub mod cli;
pub mod demo;
pub mod error;
pub mod filtration;
pub mod graph;
pub mod harmonic;
pub mod io;
pub mod sheaf;

pub use attention::{
    attention_aggregate, gat_sheaf, validate_triple, Diagnostic, Diagnostics, GatTriple,
};
pub use error::{Error, Result};
pub use filtration::{
    barcode, build_filtration, persistence_h0, persistence_h1, sublevel_set, Bar, Barcode,
    Filtration, FiltrationMode,
};
pub use graph::{EdgeKey, Element, ElementSet, Graph, NodeId};
pub use harmonic::{
    classify_harmonic_set, edge_residuals, epsilon_harmonic_set, harmonic_set, is_global_section,
    EdgeResiduals, HarmonicClassification, HarmonicSet,
};
pub use io::{parse_triple, write_barcode, write_triple, BarcodeFormat};
pub use sheaf::{
    apply_coboundary, coboundary, constant_sheaf, global_sections, laplacian_spectrum,
    local_section_space, sheaf_laplacian, sheaf_norm, CellularSheaf, Cochain0, Cochain1,
    SectionBasis,
};
