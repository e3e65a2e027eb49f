//! Multiscale harmonic filtrations and their persistence barcodes.
//!
//! Each element gets a birth value; the sublevel set at ε holds every element
//! born at or before ε. Dimension-0 bars follow components with the elder
//! rule, dimension-1 bars record independent cycles, which never die since a
//! graph has no 2-cells.
//!
//! Elements sharing a birth value enter together. Nodes born at the same value
//! and joined by edges of that value form a single new component; a new
//! component that is swallowed by an older one at its own birth yields a
//! zero-length bar, which is only reported on request.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{EdgeKey, Element, ElementSet, Graph, NodeId};
use crate::harmonic::EdgeResiduals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationMode {
    /// Full ε-harmonic sets: degree-0 nodes at 0, other nodes at their
    /// smallest incident residual, edges at their residual.
    Full,
    /// Closures of the ε-harmonic edge sets; degree-0 nodes never enter.
    EdgeClosure,
    /// ε-harmonic node sets only; edges never enter.
    NodesOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    host: Graph,
    mode: FiltrationMode,
    node_births: Vec<Option<f64>>,
    edge_births: Vec<Option<f64>>,
    critical_values: Vec<f64>,
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl Filtration {
    /// Filtration from explicit finite births. Elements without a birth never
    /// enter. Monotonicity is not checked here; see [`Filtration::check_monotone`].
    pub fn from_births(
        host: Graph,
        mode: FiltrationMode,
        node_births: &BTreeMap<NodeId, f64>,
        edge_births: &BTreeMap<EdgeKey, f64>,
    ) -> Result<Self> {
        for v in node_births.keys() {
            host.check_member(&Element::Node(v.clone()))?;
        }
        for e in edge_births.keys() {
            host.check_member(&Element::Edge(e.clone()))?;
        }
        for (name, b) in node_births
            .iter()
            .map(|(v, b)| (v.to_string(), b))
            .chain(edge_births.iter().map(|(e, b)| (e.to_string(), b)))
        {
            if !b.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "birth of {name} is not finite"
                )));
            }
        }
        let nb = host
            .nodes()
            .iter()
            .map(|v| node_births.get(v).copied())
            .collect();
        let eb = host
            .edges()
            .iter()
            .map(|e| edge_births.get(e).copied())
            .collect();
        Ok(Self::assemble(host, mode, nb, eb))
    }

    fn assemble(
        host: Graph,
        mode: FiltrationMode,
        node_births: Vec<Option<f64>>,
        edge_births: Vec<Option<f64>>,
    ) -> Self {
        let critical_values =
            sorted_unique(node_births.iter().chain(&edge_births).flatten().copied());
        Filtration {
            host,
            mode,
            node_births,
            edge_births,
            critical_values,
        }
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn mode(&self) -> FiltrationMode {
        self.mode
    }

    /// Sorted distinct finite birth values.
    pub fn critical_values(&self) -> &[f64] {
        &self.critical_values
    }

    pub fn node_birth(&self, vi: usize) -> Option<f64> {
        self.node_births[vi]
    }

    pub fn edge_birth(&self, ei: usize) -> Option<f64> {
        self.edge_births[ei]
    }

    pub fn birth(&self, element: &Element) -> Option<f64> {
        match element {
            Element::Node(v) => self.host.node_index(v).and_then(|i| self.node_births[i]),
            Element::Edge(e) => self.host.edge_index(e).and_then(|i| self.edge_births[i]),
        }
    }

    /// Every edge that enters does so no earlier than both of its endpoints.
    pub fn check_monotone(&self) -> Result<()> {
        for (ei, birth) in self.edge_births.iter().enumerate() {
            let Some(b) = *birth else { continue };
            let (lo, hi) = self.host.endpoints(ei);
            for vi in [lo, hi] {
                match self.node_births[vi] {
                    Some(nb) if nb <= b => {}
                    _ => {
                        return Err(Error::NonMonotoneFiltration(format!(
                            "edge {} enters at {b} before node {}",
                            self.host.edges()[ei],
                            self.host.nodes()[vi]
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// Births from edge residuals according to `mode`.
pub fn build_filtration(g: &Graph, r: &EdgeResiduals, mode: FiltrationMode) -> Result<Filtration> {
    let edge_res = g
        .edges()
        .iter()
        .map(|e| {
            r.get(e)
                .ok_or_else(|| Error::MissingResidual(e.to_string()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let node_births = (0..g.node_count())
        .map(|vi| {
            let min_incident = g
                .incident_edges(vi)
                .iter()
                .map(|&ei| edge_res[ei])
                .min_by(f64::total_cmp);
            match (min_incident, mode) {
                (Some(m), _) => Some(m),
                (None, FiltrationMode::EdgeClosure) => None,
                (None, _) => Some(0.0),
            }
        })
        .collect();
    let edge_births = match mode {
        FiltrationMode::NodesOnly => vec![None; g.edge_count()],
        _ => edge_res.into_iter().map(Some).collect(),
    };
    Ok(Filtration::assemble(
        g.clone(),
        mode,
        node_births,
        edge_births,
    ))
}

/// Elements born at or before `epsilon`.
pub fn sublevel_set(f: &Filtration, epsilon: f64) -> ElementSet {
    let g = &f.host;
    ElementSet::from_parts(
        g.nodes()
            .iter()
            .zip(&f.node_births)
            .filter(|(_, b)| b.is_some_and(|b| b <= epsilon))
            .map(|(v, _)| v.clone()),
        g.edges()
            .iter()
            .zip(&f.edge_births)
            .filter(|(_, b)| b.is_some_and(|b| b <= epsilon))
            .map(|(e, _)| e.clone()),
    )
}

fn serialize_death<S: Serializer>(death: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if death.is_finite() {
        s.serialize_f64(*death)
    } else {
        s.serialize_none()
    }
}

/// One persistence interval. An infinite death is `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bar {
    pub dim: u8,
    pub birth: f64,
    #[serde(serialize_with = "serialize_death")]
    pub death: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<Element>,
}

impl Bar {
    pub fn new(dim: u8, birth: f64, death: f64) -> Self {
        Bar {
            dim,
            birth,
            death,
            representative: None,
        }
    }

    pub fn with_representative(mut self, element: Element) -> Self {
        self.representative = Some(element);
        self
    }

    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    fn order(&self, other: &Bar) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
            .then_with(|| self.representative.cmp(&other.representative))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Barcode {
    pub bars: Vec<Bar>,
}

impl Barcode {
    /// Sorts by dimension, birth, death, then representative.
    pub fn new(mut bars: Vec<Bar>) -> Self {
        bars.sort_by(Bar::order);
        Barcode { bars }
    }

    pub fn dim(&self, dim: u8) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links two distinct roots and returns the new root.
    fn link(&mut self, a: usize, b: usize) -> usize {
        let (hi, lo) = if self.rank[a] >= self.rank[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        hi
    }
}

/// Component identity used by the elder rule: older birth first, then the
/// smaller node index.
#[derive(Debug, Clone, Copy)]
struct Origin {
    birth: f64,
    node: usize,
}

impl Origin {
    fn is_older_than(&self, other: &Origin) -> bool {
        self.birth
            .total_cmp(&other.birth)
            .then(self.node.cmp(&other.node))
            .is_lt()
    }
}

struct Sweep {
    h0: Vec<Bar>,
    h1: Vec<Bar>,
}

fn sweep(f: &Filtration, include_zero_bars: bool) -> Result<Sweep> {
    f.check_monotone()?;
    let g = &f.host;
    let mut uf = UnionFind::new(g.node_count());
    let mut origin: Vec<Option<Origin>> = vec![None; g.node_count()];
    let mut h0 = Vec::new();
    let mut h1 = Vec::new();

    let mut nodes_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut edges_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let level = |b: f64| f.critical_values.binary_search_by(|c| c.total_cmp(&b)).ok();
    for (vi, b) in f.node_births.iter().enumerate() {
        if let Some(k) = b.and_then(level) {
            nodes_at.entry(k).or_default().push(vi);
        }
    }
    for (ei, b) in f.edge_births.iter().enumerate() {
        if let Some(k) = b.and_then(level) {
            edges_at.entry(k).or_default().push(ei);
        }
    }

    for (k, &value) in f.critical_values.iter().enumerate() {
        let new_nodes = nodes_at.remove(&k).unwrap_or_default();
        for &vi in &new_nodes {
            origin[vi] = Some(Origin {
                birth: value,
                node: vi,
            });
        }
        let edges = edges_at.remove(&k).unwrap_or_default();
        let is_new = |vi: usize| f.node_births[vi] == Some(value);
        // New-new edges first: they glue fresh nodes into one fresh component.
        let (fresh, bridging): (Vec<usize>, Vec<usize>) = edges.into_iter().partition(|&ei| {
            let (lo, hi) = g.endpoints(ei);
            is_new(lo) && is_new(hi)
        });
        for (ei, glue_silently) in fresh
            .into_iter()
            .map(|e| (e, true))
            .chain(bridging.into_iter().map(|e| (e, false)))
        {
            let (lo, hi) = g.endpoints(ei);
            let (ra, rb) = (uf.find(lo), uf.find(hi));
            if ra == rb {
                h1.push(
                    Bar::new(1, value, f64::INFINITY)
                        .with_representative(Element::Edge(g.edges()[ei].clone())),
                );
                continue;
            }
            let oa = origin[ra].expect("entered node has an origin");
            let ob = origin[rb].expect("entered node has an origin");
            let (elder, younger) = if oa.is_older_than(&ob) {
                (oa, ob)
            } else {
                (ob, oa)
            };
            let root = uf.link(ra, rb);
            origin[root] = Some(elder);
            if glue_silently {
                continue;
            }
            if younger.birth < value || include_zero_bars {
                h0.push(
                    Bar::new(0, younger.birth, value)
                        .with_representative(Element::Node(g.nodes()[younger.node].clone())),
                );
            }
        }
    }

    for (vi, birth) in f.node_births.iter().enumerate() {
        if birth.is_some() && uf.find(vi) == vi {
            let o = origin[vi].expect("entered node has an origin");
            h0.push(
                Bar::new(0, o.birth, f64::INFINITY)
                    .with_representative(Element::Node(g.nodes()[o.node].clone())),
            );
        }
    }
    Ok(Sweep { h0, h1 })
}

/// Dimension-0 bars, elder rule. Zero-length bars only with `include_zero_bars`.
pub fn persistence_h0(f: &Filtration, include_zero_bars: bool) -> Result<Vec<Bar>> {
    let mut bars = sweep(f, include_zero_bars)?.h0;
    bars.sort_by(Bar::order);
    Ok(bars)
}

/// Dimension-1 bars: one `[birth, ∞)` per edge that closes a cycle.
pub fn persistence_h1(f: &Filtration) -> Result<Vec<Bar>> {
    let mut bars = sweep(f, false)?.h1;
    bars.sort_by(Bar::order);
    Ok(bars)
}

pub fn barcode(f: &Filtration, include_zero_bars: bool) -> Result<Barcode> {
    let Sweep { mut h0, h1 } = sweep(f, include_zero_bars)?;
    h0.extend(h1);
    Ok(Barcode::new(h0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::gat_sheaf;
    use crate::demo;
    use crate::harmonic::{edge_residuals, epsilon_harmonic_set};

    fn n(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn e(a: &str, b: &str) -> EdgeKey {
        EdgeKey::parse(a, b).unwrap()
    }

    fn fig4_residuals() -> EdgeResiduals {
        let t = demo::fig4_triple();
        edge_residuals(&gat_sheaf(&t).unwrap(), &t.features).unwrap()
    }

    fn triangle_residuals() -> EdgeResiduals {
        let g = Graph::from_strs(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]).unwrap();
        EdgeResiduals::new(
            g,
            [(e("a", "b"), 0.0), (e("a", "c"), 1.0), (e("b", "c"), 1.0)].into(),
        )
        .unwrap()
    }

    fn spans(bars: &[Bar]) -> Vec<(u8, f64, f64)> {
        bars.iter().map(|b| (b.dim, b.birth, b.death)).collect()
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn fig4_full_births() {
        let r = fig4_residuals();
        let f = build_filtration(r.host(), &r, FiltrationMode::Full).unwrap();
        for v in ["u", "v", "w", "x"] {
            assert_eq!(f.birth(&Element::Node(n(v))), Some(0.0));
        }
        assert_eq!(f.birth(&Element::Node(n("y"))), Some(1.0));
        assert_eq!(f.birth(&Element::Edge(e("u", "x"))), Some(0.0));
        assert_eq!(f.birth(&Element::Edge(e("u", "y"))), Some(1.0));
        assert_eq!(f.critical_values(), &[0.0, 1.0]);
    }

    #[test]
    fn triangle_edge_closure_births() {
        let r = triangle_residuals();
        let f = build_filtration(r.host(), &r, FiltrationMode::EdgeClosure).unwrap();
        let b = |x: Element| f.birth(&x).unwrap();
        assert_eq!(b(Element::Node(n("a"))), 0.0);
        assert_eq!(b(Element::Node(n("b"))), 0.0);
        assert_eq!(b(Element::Node(n("c"))), 1.0);
        assert_eq!(b(Element::Edge(e("a", "b"))), 0.0);
        assert_eq!(b(Element::Edge(e("a", "c"))), 1.0);
        assert_eq!(b(Element::Edge(e("b", "c"))), 1.0);
    }

    #[test]
    fn isolated_node_births() {
        let g = Graph::from_strs(&["a", "b", "z"], &[("a", "b")]).unwrap();
        let r = EdgeResiduals::new(g.clone(), [(e("a", "b"), 0.5)].into()).unwrap();
        let full = build_filtration(&g, &r, FiltrationMode::Full).unwrap();
        assert_eq!(full.birth(&Element::Node(n("z"))), Some(0.0));
        assert_eq!(full.birth(&Element::Node(n("a"))), Some(0.5));
        assert_eq!(full.birth(&Element::Edge(e("a", "b"))), Some(0.5));
        let closure = build_filtration(&g, &r, FiltrationMode::EdgeClosure).unwrap();
        assert_eq!(closure.birth(&Element::Node(n("z"))), None);
        let nodes = build_filtration(&g, &r, FiltrationMode::NodesOnly).unwrap();
        assert_eq!(nodes.birth(&Element::Edge(e("a", "b"))), None);
        assert_eq!(nodes.birth(&Element::Node(n("z"))), Some(0.0));
    }

    #[test]
    fn missing_residual() {
        let g = Graph::from_strs(&["a", "b"], &[("a", "b")]).unwrap();
        let r = EdgeResiduals::new(g.clone(), BTreeMap::new()).unwrap();
        assert!(matches!(
            build_filtration(&g, &r, FiltrationMode::Full),
            Err(Error::MissingResidual(_))
        ));
    }

    #[test]
    fn sublevel_sets() {
        let r = fig4_residuals();
        let f = build_filtration(r.host(), &r, FiltrationMode::Full).unwrap();
        let s0 = sublevel_set(&f, 0.0);
        assert_eq!(
            s0,
            ElementSet::from_parts(
                ["u", "v", "w", "x"].map(n),
                [e("u", "v"), e("u", "w"), e("u", "x")]
            )
        );
        assert_eq!(s0, epsilon_harmonic_set(&r, 0.0).unwrap().to_element_set());
        assert!(sublevel_set(&f, -1.0).is_empty());
        assert_eq!(sublevel_set(&f, INF), r.host().full_set());
    }

    #[test]
    fn fig4_h0() {
        let r = fig4_residuals();
        let f = build_filtration(r.host(), &r, FiltrationMode::Full).unwrap();
        assert_eq!(
            spans(&persistence_h0(&f, false).unwrap()),
            vec![(0, 0.0, INF)]
        );
        let with_zero = persistence_h0(&f, true).unwrap();
        assert_eq!(spans(&with_zero), vec![(0, 0.0, INF), (0, 1.0, 1.0)]);
        assert_eq!(with_zero[1].representative, Some(Element::Node(n("y"))));
        assert!(persistence_h1(&f).unwrap().is_empty());
    }

    #[test]
    fn triangle_bars() {
        let r = triangle_residuals();
        let f = build_filtration(r.host(), &r, FiltrationMode::EdgeClosure).unwrap();
        assert_eq!(
            spans(&persistence_h0(&f, true).unwrap()),
            vec![(0, 0.0, INF), (0, 1.0, 1.0)]
        );
        assert_eq!(spans(&persistence_h1(&f).unwrap()), vec![(1, 1.0, INF)]);
        assert_eq!(
            spans(&barcode(&f, true).unwrap().bars),
            vec![(0, 0.0, INF), (0, 1.0, 1.0), (1, 1.0, INF)]
        );
    }

    #[test]
    fn isolated_nodes_never_merge() {
        let g = Graph::from_strs(&["a", "b"], &[]).unwrap();
        let r = EdgeResiduals::new(g.clone(), BTreeMap::new()).unwrap();
        let f = build_filtration(&g, &r, FiltrationMode::NodesOnly).unwrap();
        assert_eq!(
            spans(&persistence_h0(&f, true).unwrap()),
            vec![(0, 0.0, INF), (0, 0.0, INF)]
        );
    }

    #[test]
    fn two_triangles_have_two_cycles() {
        let g = Graph::from_strs(
            &["a", "b", "c", "d", "e", "f"],
            &[
                ("a", "b"),
                ("b", "c"),
                ("a", "c"),
                ("d", "e"),
                ("e", "f"),
                ("d", "f"),
            ],
        )
        .unwrap();
        let r = EdgeResiduals::new(
            g.clone(),
            g.edges().iter().map(|e| (e.clone(), 0.0)).collect(),
        )
        .unwrap();
        let f = build_filtration(&g, &r, FiltrationMode::Full).unwrap();
        assert_eq!(
            spans(&persistence_h1(&f).unwrap()),
            vec![(1, 0.0, INF), (1, 0.0, INF)]
        );
        assert_eq!(spans(&persistence_h0(&f, true).unwrap()).len(), 2);
    }

    #[test]
    fn elder_rule_kills_the_younger_component() {
        // a-b at 0.2, c-d at 0.5, bridge b-c at 0.9
        let g =
            Graph::from_strs(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d"), ("b", "c")]).unwrap();
        let r = EdgeResiduals::new(
            g.clone(),
            [(e("a", "b"), 0.2), (e("c", "d"), 0.5), (e("b", "c"), 0.9)].into(),
        )
        .unwrap();
        let f = build_filtration(&g, &r, FiltrationMode::Full).unwrap();
        let bars = persistence_h0(&f, false).unwrap();
        assert_eq!(spans(&bars), vec![(0, 0.2, INF), (0, 0.5, 0.9)]);
        assert_eq!(bars[1].representative, Some(Element::Node(n("c"))));
    }

    #[test]
    fn empty_graph_barcode() {
        let g = Graph::empty();
        let r = EdgeResiduals::new(g.clone(), BTreeMap::new()).unwrap();
        let f = build_filtration(&g, &r, FiltrationMode::Full).unwrap();
        assert!(barcode(&f, true).unwrap().bars.is_empty());
    }

    #[test]
    fn non_monotone_filtration_is_rejected() {
        let g = Graph::from_strs(&["a", "b"], &[("a", "b")]).unwrap();
        let f = Filtration::from_births(
            g,
            FiltrationMode::Full,
            &[(n("a"), 0.0), (n("b"), 2.0)].into(),
            &[(e("a", "b"), 1.0)].into(),
        )
        .unwrap();
        assert!(matches!(
            f.check_monotone(),
            Err(Error::NonMonotoneFiltration(_))
        ));
        assert!(persistence_h0(&f, false).is_err());
        assert!(persistence_h1(&f).is_err());
        assert!(barcode(&f, false).is_err());
    }
}
