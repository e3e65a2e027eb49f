//! Finite simple undirected graphs viewed as posets under the face relation.
//!
//! A graph is the disjoint union of its nodes and edges, with `v ⊴ e` whenever
//! `v` is an endpoint of `e`. Open sets of the Alexandrov topology are the
//! upward-closed subsets; closed sets are exactly the subgraphs.
//!
//! Nodes are totally ordered by byte-lexicographic order of their ids. Every
//! matrix and vector layout in this crate follows that order.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a node: a non-empty token without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidNodeId(id));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for NodeId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        NodeId::new(value)
    }
}

impl From<NodeId> for String {
    fn from(id: NodeId) -> String {
        id.0
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NodeId::new(s)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An undirected edge stored as the ordered pair `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeKey {
    /// Normalizes an unordered pair. Fails on `a == b`.
    pub fn new(a: NodeId, b: NodeId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(EdgeKey { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(EdgeKey { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfLoop(a.0)),
        }
    }

    /// Convenience constructor from string slices.
    pub fn parse(a: &str, b: &str) -> Result<Self> {
        EdgeKey::new(NodeId::new(a)?, NodeId::new(b)?)
    }

    pub fn lo(&self) -> &NodeId {
        &self.lo
    }

    pub fn hi(&self) -> &NodeId {
        &self.hi
    }

    pub fn contains(&self, v: &NodeId) -> bool {
        &self.lo == v || &self.hi == v
    }

    /// The endpoint opposite to `v`, if `v` is an endpoint.
    pub fn other(&self, v: &NodeId) -> Option<&NodeId> {
        if &self.lo == v {
            Some(&self.hi)
        } else if &self.hi == v {
            Some(&self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl Serialize for EdgeKey {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        [&self.lo, &self.hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EdgeKey {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[NodeId; 2]>::deserialize(deserializer)?;
        EdgeKey::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// A single poset element: a node or an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Node(NodeId),
    Edge(EdgeKey),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Node(v) => write!(f, "node {v}"),
            Element::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

impl From<NodeId> for Element {
    fn from(v: NodeId) -> Self {
        Element::Node(v)
    }
}

impl From<EdgeKey> for Element {
    fn from(e: EdgeKey) -> Self {
        Element::Edge(e)
    }
}

/// A set of graph elements. Membership in a particular host graph is checked
/// by the operations that take one, not here.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSet {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeKey>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = EdgeKey>,
    ) -> Self {
        ElementSet {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, element: Element) -> bool {
        match element {
            Element::Node(v) => self.nodes.insert(v),
            Element::Edge(e) => self.edges.insert(e),
        }
    }

    pub fn contains(&self, element: &Element) -> bool {
        match element {
            Element::Node(v) => self.nodes.contains(v),
            Element::Edge(e) => self.edges.contains(e),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.nodes.is_subset(&other.nodes) && self.edges.is_subset(&other.edges)
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet {
            nodes: self.nodes.union(&other.nodes).cloned().collect(),
            edges: self.edges.union(&other.edges).cloned().collect(),
        }
    }

    pub fn extend(&mut self, other: &ElementSet) {
        self.nodes.extend(other.nodes.iter().cloned());
        self.edges.extend(other.edges.iter().cloned());
    }

    /// Nodes first, then edges, each in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.nodes
            .iter()
            .cloned()
            .map(Element::Node)
            .chain(self.edges.iter().cloned().map(Element::Edge))
    }
}

/// Finite simple undirected graph with canonical node and edge orders.
///
/// Nodes and edges are also addressable by dense indices (`0..node_count()`,
/// `0..edge_count()`) in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<NodeId>,
    node_index: BTreeMap<NodeId, usize>,
    edges: Vec<EdgeKey>,
    edge_index: BTreeMap<EdgeKey, usize>,
    endpoints: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a canonical graph. Edge pairs are unordered; repeated pairs
    /// collapse to one edge.
    pub fn build<N, P>(node_ids: N, edge_pairs: P) -> Result<Self>
    where
        N: IntoIterator<Item = NodeId>,
        P: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut node_set = BTreeSet::new();
        for v in node_ids {
            if node_set.contains(&v) {
                return Err(Error::DuplicateNode(v.0));
            }
            node_set.insert(v);
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edge_pairs {
            if a == b {
                return Err(Error::SelfLoop(a.0));
            }
            for end in [&a, &b] {
                if !node_set.contains(end) {
                    return Err(Error::UnknownEndpoint(end.0.clone()));
                }
            }
            edge_set.insert(EdgeKey::new(a, b)?);
        }
        Ok(Self::from_sets(node_set, edge_set))
    }

    /// Same as [`Graph::build`] but from string slices.
    pub fn from_strs(node_ids: &[&str], edge_pairs: &[(&str, &str)]) -> Result<Self> {
        let nodes = node_ids
            .iter()
            .map(|s| NodeId::new(*s))
            .collect::<Result<Vec<_>>>()?;
        let pairs = edge_pairs
            .iter()
            .map(|(a, b)| Ok((NodeId::new(*a)?, NodeId::new(*b)?)))
            .collect::<Result<Vec<_>>>()?;
        Graph::build(nodes, pairs)
    }

    /// The null graph.
    pub fn empty() -> Self {
        Self::from_sets(BTreeSet::new(), BTreeSet::new())
    }

    fn from_sets(node_set: BTreeSet<NodeId>, edge_set: BTreeSet<EdgeKey>) -> Self {
        let nodes: Vec<NodeId> = node_set.into_iter().collect();
        let node_index: BTreeMap<NodeId, usize> = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let edges: Vec<EdgeKey> = edge_set.into_iter().collect();
        let edge_index = edges
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let mut incident = vec![Vec::new(); nodes.len()];
        let endpoints = edges
            .iter()
            .enumerate()
            .map(|(ei, e)| {
                let lo = node_index[&e.lo];
                let hi = node_index[&e.hi];
                incident[lo].push(ei);
                incident[hi].push(ei);
                (lo, hi)
            })
            .collect();
        Graph {
            nodes,
            node_index,
            edges,
            edge_index,
            endpoints,
            incident,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, v: &NodeId) -> Option<usize> {
        self.node_index.get(v).copied()
    }

    pub fn edge_index(&self, e: &EdgeKey) -> Option<usize> {
        self.edge_index.get(e).copied()
    }

    pub fn contains_node(&self, v: &NodeId) -> bool {
        self.node_index.contains_key(v)
    }

    pub fn contains_edge(&self, e: &EdgeKey) -> bool {
        self.edge_index.contains_key(e)
    }

    pub fn contains(&self, element: &Element) -> bool {
        match element {
            Element::Node(v) => self.contains_node(v),
            Element::Edge(e) => self.contains_edge(e),
        }
    }

    /// `(lo, hi)` node indices of edge `ei`.
    pub fn endpoints(&self, ei: usize) -> (usize, usize) {
        self.endpoints[ei]
    }

    /// Indices of the edges incident to node `vi`, ascending.
    pub fn incident_edges(&self, vi: usize) -> &[usize] {
        &self.incident[vi]
    }

    pub fn degree(&self, vi: usize) -> usize {
        self.incident[vi].len()
    }

    /// Neighbor node indices of `vi`, ordered by the incident edge order.
    pub fn neighbors(&self, vi: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[vi].iter().map(move |&ei| {
            let (lo, hi) = self.endpoints[ei];
            if lo == vi {
                hi
            } else {
                lo
            }
        })
    }

    /// The whole graph as an element set.
    pub fn full_set(&self) -> ElementSet {
        ElementSet::from_parts(self.nodes.iter().cloned(), self.edges.iter().cloned())
    }

    pub(crate) fn check_member(&self, element: &Element) -> Result<()> {
        if self.contains(element) {
            Ok(())
        } else {
            Err(Error::UnknownElement(element.to_string()))
        }
    }

    pub(crate) fn check_subset(&self, s: &ElementSet) -> Result<()> {
        if let Some(v) = s.nodes.iter().find(|v| !self.contains_node(v)) {
            return Err(Error::UnknownElement(Element::Node(v.clone()).to_string()));
        }
        if let Some(e) = s.edges.iter().find(|e| !self.contains_edge(e)) {
            return Err(Error::UnknownElement(Element::Edge(e.clone()).to_string()));
        }
        Ok(())
    }

    /// Minimal open neighborhood of an element: `{e}` for an edge, the node
    /// together with its incident edges for a node.
    pub fn star_open_set(&self, element: &Element) -> Result<ElementSet> {
        self.check_member(element)?;
        let mut out = ElementSet::new();
        match element {
            Element::Edge(e) => {
                out.edges.insert(e.clone());
            }
            Element::Node(v) => {
                let vi = self.node_index[v];
                out.nodes.insert(v.clone());
                out.edges
                    .extend(self.incident[vi].iter().map(|&ei| self.edges[ei].clone()));
            }
        }
        Ok(out)
    }

    /// Smallest closed set containing `s`: adds the endpoints of every edge.
    pub fn closure(&self, s: &ElementSet) -> Result<ElementSet> {
        self.check_subset(s)?;
        let mut out = s.clone();
        for e in &s.edges {
            out.nodes.insert(e.lo.clone());
            out.nodes.insert(e.hi.clone());
        }
        Ok(out)
    }

    /// Upward closed: every node in `s` brings all its incident edges.
    pub fn is_open(&self, s: &ElementSet) -> Result<bool> {
        self.check_subset(s)?;
        Ok(s.nodes.iter().all(|v| {
            self.incident[self.node_index[v]]
                .iter()
                .all(|&ei| s.edges.contains(&self.edges[ei]))
        }))
    }

    /// Downward closed, i.e. `s` is a subgraph.
    pub fn is_closed(&self, s: &ElementSet) -> Result<bool> {
        self.check_subset(s)?;
        Ok(s.edges
            .iter()
            .all(|e| s.nodes.contains(&e.lo) && s.nodes.contains(&e.hi)))
    }

    /// Complement of `s` in the graph.
    pub fn complement(&self, s: &ElementSet) -> Result<ElementSet> {
        self.check_subset(s)?;
        Ok(ElementSet::from_parts(
            self.nodes.iter().filter(|v| !s.nodes.contains(*v)).cloned(),
            self.edges.iter().filter(|e| !s.edges.contains(*e)).cloned(),
        ))
    }

    /// Component label per node index; labels are assigned in order of the
    /// smallest node of each component.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.nodes.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.nodes.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Maximal connected subgraphs, ordered by their smallest node.
    pub fn connected_components(&self) -> Vec<ElementSet> {
        let (label, count) = self.component_labels();
        let mut comps = vec![ElementSet::new(); count];
        for (vi, v) in self.nodes.iter().enumerate() {
            comps[label[vi]].nodes.insert(v.clone());
        }
        for (ei, e) in self.edges.iter().enumerate() {
            comps[label[self.endpoints[ei].0]].edges.insert(e.clone());
        }
        comps
    }

    /// True iff `s` is a union of (possibly zero) connected components.
    pub fn is_union_of_components(&self, s: &ElementSet) -> Result<bool> {
        self.check_subset(s)?;
        let (label, count) = self.component_labels();
        // per component: (elements in s, total elements)
        let mut hit = vec![(0usize, 0usize); count];
        for (vi, v) in self.nodes.iter().enumerate() {
            let c = &mut hit[label[vi]];
            c.1 += 1;
            c.0 += usize::from(s.nodes.contains(v));
        }
        for (ei, e) in self.edges.iter().enumerate() {
            let c = &mut hit[label[self.endpoints[ei].0]];
            c.1 += 1;
            c.0 += usize::from(s.edges.contains(e));
        }
        Ok(hit
            .iter()
            .all(|&(inside, total)| inside == 0 || inside == total))
    }
}
