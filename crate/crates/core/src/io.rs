//! Triple documents, barcode output and the combined analysis report.
//!
//! A triple document is UTF-8 JSON:
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "nodes": ["u", "v"],
//!   "edges": [["u", "v"]],
//!   "feature_dim": 1,
//!   "features": {"u": [1.0], "v": [4.0]},
//!   "weights": [{"from": "u", "to": "v", "w": 1.0}, {"from": "v", "to": "u", "w": 1.0}]
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::attention::{gat_sheaf, validate_triple, GatTriple};
use crate::error::{Error, Result};
use crate::filtration::{barcode, build_filtration, Barcode, FiltrationMode};
use crate::graph::{EdgeKey, Graph, NodeId};
use crate::harmonic::{
    classify_harmonic_set, edge_residuals, epsilon_harmonic_set, HarmonicClassification,
};
use crate::sheaf::{
    constant_sheaf, global_sections, laplacian_spectrum, zero_eigenvalue_count, CellularSheaf,
    Cochain0,
};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightRecord {
    pub from: NodeId,
    pub to: NodeId,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    pub schema_version: String,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Vec<NodeId>>,
    pub feature_dim: usize,
    pub features: BTreeMap<String, Vec<f64>>,
    pub weights: Vec<WeightRecord>,
}

impl TripleDocument {
    pub fn from_triple(t: &GatTriple) -> Self {
        TripleDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            nodes: t.graph.nodes().to_vec(),
            edges: t
                .graph
                .edges()
                .iter()
                .map(|e| vec![e.lo().clone(), e.hi().clone()])
                .collect(),
            feature_dim: t.feature_dim,
            features: t
                .features
                .blocks
                .iter()
                .map(|(v, x)| (v.to_string(), x.clone()))
                .collect(),
            weights: t
                .weights
                .iter()
                .map(|((from, to), &w)| WeightRecord {
                    from: from.clone(),
                    to: to.clone(),
                    w,
                })
                .collect(),
        }
    }

    /// Structural conversion: graph, features and weight endpoints. Weight
    /// placement (edges, diagonal) is not checked here.
    pub fn into_triple(self) -> Result<GatTriple> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(
                "schema_version",
                format!(
                    "unsupported version {:?}, expected {SCHEMA_VERSION:?}",
                    self.schema_version
                ),
            ));
        }
        if self.feature_dim < 1 {
            return Err(Error::schema("feature_dim", "must be at least 1"));
        }
        let mut pairs = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.into_iter().enumerate() {
            let Ok([a, b]) = <[NodeId; 2]>::try_from(e) else {
                return Err(Error::schema(
                    format!("edges[{i}]"),
                    "an edge is a pair of node ids",
                ));
            };
            pairs.push((a, b));
        }
        let graph = Graph::build(self.nodes, pairs)?;
        let mut features = BTreeMap::new();
        for (key, x) in self.features {
            let field = format!("features.{key}");
            let v = NodeId::new(key).map_err(|e| Error::schema(&field, e.to_string()))?;
            if !graph.contains_node(&v) {
                return Err(Error::schema(field, "not a node of the graph"));
            }
            if x.len() != self.feature_dim {
                return Err(Error::schema(
                    field,
                    format!("has length {}, expected {}", x.len(), self.feature_dim),
                ));
            }
            features.insert(v, x);
        }
        if let Some(v) = graph.nodes().iter().find(|v| !features.contains_key(*v)) {
            return Err(Error::schema(
                format!("features.{v}"),
                "missing feature vector",
            ));
        }
        let mut weights = BTreeMap::new();
        for WeightRecord { from, to, w } in self.weights {
            if weights.contains_key(&(from.clone(), to.clone())) {
                return Err(Error::DuplicateWeight {
                    from: from.to_string(),
                    to: to.to_string(),
                });
            }
            weights.insert((from, to), w);
        }
        GatTriple::new(graph, self.feature_dim, Cochain0::new(features), weights)
    }
}

fn parse_error(e: &serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a document without running weight diagnostics.
pub fn parse_triple_unchecked(bytes: &[u8]) -> Result<GatTriple> {
    if let Err(e) = std::str::from_utf8(bytes) {
        return Err(Error::Parse {
            line: 0,
            column: e.valid_up_to(),
            message: "input is not valid UTF-8".into(),
        });
    }
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc: TripleDocument = match serde_path_to_error::deserialize(&mut de) {
        Ok(doc) => doc,
        Err(e) => {
            let path = e.path().to_string();
            let inner = e.into_inner();
            return Err(match inner.classify() {
                serde_json::error::Category::Data => Error::schema(path, inner.to_string()),
                _ => parse_error(&inner),
            });
        }
    };
    de.end().map_err(|e| parse_error(&e))?;
    doc.into_triple()
}

/// Parses and validates a triple; diagnostics that are errors fail the parse.
pub fn parse_triple(bytes: &[u8]) -> Result<GatTriple> {
    let t = parse_triple_unchecked(bytes)?;
    let diagnostics = validate_triple(&t);
    if diagnostics.has_errors() {
        return Err(Error::Validation(
            diagnostics.errors().map(ToString::to_string).collect(),
        ));
    }
    Ok(t)
}

/// Pretty-printed document with a trailing newline.
pub fn write_triple(t: &GatTriple) -> String {
    let mut s = serde_json::to_string_pretty(&TripleDocument::from_triple(t))
        .expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarcodeFormat {
    Json,
    Text,
}

fn fmt_value(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        x.to_string()
    }
}

/// JSON: compact array of `{dim, birth, death, representative?}` with
/// `death: null` for infinite bars. Text: one `H<dim> [birth, death)` line
/// per bar. Neither has a trailing newline.
pub fn write_barcode(b: &Barcode, format: BarcodeFormat) -> String {
    let sorted = Barcode::new(b.bars.clone());
    match format {
        BarcodeFormat::Json => serde_json::to_string(&sorted).expect("bars always serialize"),
        BarcodeFormat::Text => sorted
            .bars
            .iter()
            .map(|bar| {
                format!(
                    "H{} [{}, {})",
                    bar.dim,
                    fmt_value(bar.birth),
                    fmt_value(bar.death)
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SheafKind {
    Gat,
    Constant,
}

/// Sheaf used by analysis commands. A constant sheaf defaults to the feature
/// dimension.
pub fn sheaf_for(t: &GatTriple, kind: SheafKind, dim: Option<usize>) -> Result<CellularSheaf> {
    match (kind, dim) {
        (SheafKind::Gat, None) => gat_sheaf(t),
        (SheafKind::Gat, Some(_)) => Err(Error::InvalidParameter(
            "a dimension can only be chosen for the constant sheaf".into(),
        )),
        (SheafKind::Constant, d) => constant_sheaf(&t.graph, d.unwrap_or(t.feature_dim)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub edge: EdgeKey,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSummary {
    pub epsilon: f64,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeKey>,
    pub classification: HarmonicClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub sheaf: SheafKind,
    pub tolerance: f64,
    pub global_section_dim: usize,
    pub zero_eigenvalues: usize,
    pub spectrum: Vec<f64>,
    pub residuals: Vec<ResidualEntry>,
    pub harmonic: Vec<HarmonicSummary>,
    pub mode: FiltrationMode,
    pub barcode: Barcode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub sheaf: SheafKind,
    pub tolerance: f64,
    pub epsilons: Vec<f64>,
    pub mode: FiltrationMode,
    pub include_zero_bars: bool,
}

/// Runs every analysis on the triple's own features.
pub fn analyze(t: &GatTriple, params: &AnalysisParams) -> Result<AnalysisReport> {
    let sh = sheaf_for(t, params.sheaf, None)?;
    let sections = global_sections(&sh, params.tolerance)?;
    let spectrum = laplacian_spectrum(&sh);
    let residuals = edge_residuals(&sh, &t.features)?;
    let harmonic = params
        .epsilons
        .iter()
        .map(|&eps| {
            let h = epsilon_harmonic_set(&residuals, eps)?;
            Ok(HarmonicSummary {
                epsilon: eps,
                classification: classify_harmonic_set(&t.graph, &h)?,
                nodes: h.nodes.into_iter().collect(),
                edges: h.edges.into_iter().collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let f = build_filtration(&t.graph, &residuals, params.mode)?;
    Ok(AnalysisReport {
        sheaf: params.sheaf,
        tolerance: params.tolerance,
        global_section_dim: sections.dimension(),
        zero_eigenvalues: zero_eigenvalue_count(&spectrum, params.tolerance),
        spectrum,
        residuals: residuals
            .norms()
            .iter()
            .map(|(e, &r)| ResidualEntry {
                edge: e.clone(),
                residual: r,
            })
            .collect(),
        harmonic,
        mode: params.mode,
        barcode: barcode(&f, params.include_zero_bars)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::filtration::Bar;
    use crate::sheaf::coboundary;

    const FIG4: &str = r#"{
        "schema_version": "1",
        "nodes": ["u", "v", "w", "x", "y"],
        "edges": [["u", "v"], ["u", "w"], ["u", "x"], ["u", "y"]],
        "feature_dim": 1,
        "features": {"u": [1.0], "v": [4.0], "w": [4.0], "x": [4.0], "y": [8.0]},
        "weights": [
            {"from": "u", "to": "v", "w": 1.0}, {"from": "u", "to": "w", "w": 1.0},
            {"from": "u", "to": "x", "w": 1.0}, {"from": "u", "to": "y", "w": 1.0},
            {"from": "v", "to": "u", "w": 0.25}, {"from": "w", "to": "u", "w": 0.25},
            {"from": "x", "to": "u", "w": 0.25}, {"from": "y", "to": "u", "w": 0.25}
        ]
    }"#;

    #[test]
    fn parses_fig4_document() {
        let t = parse_triple(FIG4.as_bytes()).unwrap();
        assert_eq!(t.graph.node_count(), 5);
        assert_eq!(t.graph.edge_count(), 4);
        assert_eq!(t, demo::fig4_triple());
    }

    #[test]
    fn missing_feature_is_schema_error() {
        let doc = FIG4.replace(r#", "y": [8.0]"#, "");
        match parse_triple(doc.as_bytes()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "features.y"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn off_edge_weight_is_validation_error() {
        let doc = FIG4.replace(
            r#"{"from": "y", "to": "u", "w": 0.25}"#,
            r#"{"from": "y", "to": "u", "w": 0.25}, {"from": "v", "to": "x", "w": 0.5}"#,
        );
        match parse_triple(doc.as_bytes()) {
            Err(Error::Validation(msgs)) => assert!(msgs[0].contains("(v, x)")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_triple_unchecked(doc.as_bytes()).is_ok());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_triple(b"{\n  \"nodes\": [,]\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_triple(b"\xff\xfe"),
            Err(Error::Parse { .. })
        ));
        let trailing = format!("{FIG4} x");
        assert!(matches!(
            parse_triple(trailing.as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let doc = FIG4.replace(r#""feature_dim": 1,"#, r#""feature_dim": 1, "extra": 3,"#);
        assert!(matches!(
            parse_triple(doc.as_bytes()),
            Err(Error::Schema { .. })
        ));
        let doc = FIG4.replace(
            r#"{"from": "u", "to": "v", "w": 1.0}"#,
            r#"{"from": "u", "to": "v", "w": 1.0, "head": 0}"#,
        );
        match parse_triple(doc.as_bytes()) {
            Err(Error::Schema { field, .. }) => assert!(field.starts_with("weights[0]"), "{field}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_checks() {
        let doc = FIG4.replace(r#""schema_version": "1""#, r#""schema_version": "2""#);
        assert!(
            matches!(parse_triple(doc.as_bytes()), Err(Error::Schema { field, .. }) if field == "schema_version")
        );
        let doc = FIG4.replace(r#""v": [4.0]"#, r#""v": [4.0, 1.0]"#);
        assert!(
            matches!(parse_triple(doc.as_bytes()), Err(Error::Schema { field, .. }) if field == "features.v")
        );
        let doc = FIG4.replace(r#"["u", "y"]"#, r#"["u", "y", "v"]"#);
        assert!(
            matches!(parse_triple(doc.as_bytes()), Err(Error::Schema { field, .. }) if field == "edges[3]")
        );
        let doc = FIG4.replace(r#""u", "v", "w""#, r#""u", "u", "v", "w""#);
        assert!(matches!(
            parse_triple(doc.as_bytes()),
            Err(Error::DuplicateNode(_))
        ));
        let doc = FIG4.replace(
            r#"{"from": "u", "to": "w", "w": 1.0}"#,
            r#"{"from": "u", "to": "v", "w": 1.0}"#,
        );
        assert!(matches!(
            parse_triple(doc.as_bytes()),
            Err(Error::DuplicateWeight { .. })
        ));
    }

    #[test]
    fn write_then_parse_preserves_coboundary_bits() {
        let mut t = demo::fig4_triple();
        t.weights.insert(
            (NodeId::new("u").unwrap(), NodeId::new("v").unwrap()),
            0.1 + 0.2,
        );
        let back = parse_triple_unchecked(write_triple(&t).as_bytes()).unwrap();
        let a = coboundary(&gat_sheaf(&t).unwrap()).matrix;
        let b = coboundary(&gat_sheaf(&back).unwrap()).matrix;
        assert!(a
            .iter()
            .zip(b.iter())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn barcode_json() {
        let b = Barcode::new(vec![Bar::new(0, 0.0, f64::INFINITY)]);
        assert_eq!(
            write_barcode(&b, BarcodeFormat::Json),
            r#"[{"dim":0,"birth":0.0,"death":null}]"#
        );
        assert_eq!(
            write_barcode(&Barcode::default(), BarcodeFormat::Json),
            "[]"
        );
    }

    #[test]
    fn barcode_text() {
        let b = Barcode::new(vec![
            Bar::new(1, 1.0, f64::INFINITY),
            Bar::new(0, 0.0, f64::INFINITY),
        ]);
        assert_eq!(
            write_barcode(&b, BarcodeFormat::Text),
            "H0 [0, inf)\nH1 [1, inf)"
        );
        let finite = Barcode::new(vec![Bar::new(0, 0.5, 0.75)]);
        assert_eq!(
            write_barcode(&finite, BarcodeFormat::Text),
            "H0 [0.5, 0.75)"
        );
    }

    #[test]
    fn analysis_report_is_consistent() {
        let t = demo::fig4_triple();
        let report = analyze(
            &t,
            &AnalysisParams {
                sheaf: SheafKind::Gat,
                tolerance: 1e-10,
                epsilons: vec![0.0, 1.0],
                mode: FiltrationMode::Full,
                include_zero_bars: false,
            },
        )
        .unwrap();
        assert_eq!(report.global_section_dim, 1);
        assert_eq!(report.zero_eigenvalues, 1);
        assert_eq!(report.spectrum.len(), 5);
        assert_eq!(report.residuals.len(), 4);
        assert!(!report.harmonic[0].classification.is_open);
        assert!(report.harmonic[1].classification.is_full);
        assert_eq!(report.barcode.bars.len(), 1);
    }

    #[test]
    fn constant_sheaf_dim_choice() {
        let t = demo::fig4_triple();
        assert_eq!(
            sheaf_for(&t, SheafKind::Constant, Some(3))
                .unwrap()
                .total_node_dim(),
            15
        );
        assert!(sheaf_for(&t, SheafKind::Gat, Some(2)).is_err());
    }
}
