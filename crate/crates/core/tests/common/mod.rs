//! Seeded generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sheafharm::filtration::{Bar, Filtration};
use sheafharm::graph::{EdgeKey, Graph, NodeId};
use sheafharm::sheaf::{CellularSheaf, Cochain0};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node_name(i: usize) -> String {
    format!("n{i:02}")
}

/// Erdős–Rényi graph on `n` nodes with edge probability `p`.
pub fn gnp(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::new(node_name(i)).unwrap()).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                pairs.push((nodes[i].clone(), nodes[j].clone()));
            }
        }
    }
    Graph::build(nodes, pairs).unwrap()
}

/// Random graph with between `min_n` and `max_n` nodes and a random density,
/// so both sparse (often disconnected) and dense graphs show up.
pub fn random_graph(rng: &mut impl Rng, min_n: usize, max_n: usize) -> Graph {
    let n = rng.random_range(min_n..=max_n);
    let p = rng.random_range(0.05..0.7);
    gnp(rng, n, p)
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut impl Rng, min_n: usize, max_n: usize) -> Graph {
    let n = rng.random_range(min_n..=max_n);
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::new(node_name(i)).unwrap()).collect();
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        pairs.push((nodes[i].clone(), nodes[j].clone()));
    }
    let p = rng.random_range(0.0..0.4);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                pairs.push((nodes[i].clone(), nodes[j].clone()));
            }
        }
    }
    Graph::build(nodes, pairs).unwrap()
}

/// Small integer in `-2..=2`, exact in floating point.
fn small_int(rng: &mut impl Rng) -> f64 {
    rng.random_range(-2i32..=2) as f64
}

/// Random sheaf with stalk dims in `1..=max_dim`. With `integer` the
/// restriction entries are small integers so exact identities hold in
/// floating point; otherwise they are uniform in `[-1, 1]`. Some restrictions
/// are deliberately zero or rank one.
pub fn random_sheaf(rng: &mut impl Rng, g: &Graph, max_dim: usize, integer: bool) -> CellularSheaf {
    let node_dims: Vec<usize> = (0..g.node_count())
        .map(|_| rng.random_range(1..=max_dim))
        .collect();
    let edge_dims: Vec<usize> = (0..g.edge_count())
        .map(|_| rng.random_range(1..=max_dim))
        .collect();
    let mut restrictions = Vec::new();
    for (ei, &de) in edge_dims.iter().enumerate() {
        let (lo, hi) = g.endpoints(ei);
        let mut pair = [lo, hi].map(|vi| {
            let dv = node_dims[vi];
            DMatrix::from_fn(de, dv, |_, _| {
                if integer {
                    small_int(rng)
                } else {
                    rng.random_range(-1.0..=1.0)
                }
            })
        });
        for m in &mut pair {
            match rng.random_range(0..10) {
                0 => m.fill(0.0),
                1 => {
                    let row = m.row(0).clone_owned();
                    for r in 0..m.nrows() {
                        let scale = if integer {
                            small_int(rng)
                        } else {
                            rng.random_range(-1.0..=1.0)
                        };
                        m.set_row(r, &(&row * scale));
                    }
                }
                _ => {}
            }
        }
        restrictions.push(pair);
    }
    CellularSheaf::from_parts(g.clone(), node_dims, edge_dims, restrictions).unwrap()
}

pub fn random_signal(rng: &mut impl Rng, sh: &CellularSheaf, integer: bool) -> Cochain0 {
    let flat: Vec<f64> = (0..sh.total_node_dim())
        .map(|_| {
            if integer {
                small_int(rng)
            } else {
                rng.random_range(-1.0..=1.0)
            }
        })
        .collect();
    Cochain0::from_flat(sh, &flat).unwrap()
}

/// Exact rank by Gaussian elimination over the rationals. Every finite f64
/// is a dyadic rational, so the conversion is lossless.
pub fn exact_rank(m: &DMatrix<f64>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| BigRational::from_float(m[(i, j)]).unwrap())
                .collect()
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn exact_nullity(m: &DMatrix<f64>) -> usize {
    m.ncols() - exact_rank(m)
}

/// Dense `D - A` from adjacency.
pub fn degree_minus_adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for ei in 0..g.edge_count() {
        let (a, b) = g.endpoints(ei);
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
    }
    l
}

/// Component labels of the subgraph on `nodes` using `edges`, by BFS.
pub fn bfs_components(
    g: &Graph,
    nodes: &BTreeSet<usize>,
    edges: &BTreeSet<usize>,
) -> BTreeMap<usize, usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = nodes.iter().map(|&v| (v, Vec::new())).collect();
    for &ei in edges {
        let (a, b) = g.endpoints(ei);
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }
    let mut label = BTreeMap::new();
    let mut next = 0;
    for &start in nodes {
        if label.contains_key(&start) {
            continue;
        }
        label.insert(start, next);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if let std::collections::btree_map::Entry::Vacant(slot) = label.entry(w) {
                    slot.insert(next);
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

fn present(f: &Filtration, level: f64) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let g = f.host();
    let nodes = (0..g.node_count())
        .filter(|&v| f.node_birth(v).is_some_and(|b| b <= level))
        .collect();
    let edges = (0..g.edge_count())
        .filter(|&e| f.edge_birth(e).is_some_and(|b| b <= level))
        .collect();
    (nodes, edges)
}

/// Dimension-0 bars reconstructed from scratch at every critical value.
///
/// At level `c`, each component of the sublevel subgraph either contains
/// components from the previous level (the eldest survives, the others die
/// at `c` with their own birth, and every group of brand-new nodes joining
/// it is a zero-length bar) or consists solely of new nodes (born at `c`).
/// A component's birth is the smallest birth of its nodes.
pub fn oracle_h0(f: &Filtration, include_zero_bars: bool) -> Vec<(f64, f64)> {
    let g = f.host();
    let mut bars = Vec::new();
    let mut prev_nodes = BTreeSet::new();
    let mut prev_label: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in f.critical_values() {
        let (nodes, edges) = present(f, c);
        let label = bfs_components(g, &nodes, &edges);
        let new_nodes: BTreeSet<usize> = nodes.difference(&prev_nodes).copied().collect();
        let new_edges: BTreeSet<usize> = edges
            .iter()
            .copied()
            .filter(|&e| {
                let (a, b) = g.endpoints(e);
                new_nodes.contains(&a) && new_nodes.contains(&b)
            })
            .collect();
        let new_label = bfs_components(g, &new_nodes, &new_edges);

        let mut old_in: BTreeMap<usize, BTreeMap<usize, (f64, usize)>> = BTreeMap::new();
        for &v in &prev_nodes {
            let birth = f.node_birth(v).unwrap();
            let entry = old_in
                .entry(label[&v])
                .or_default()
                .entry(prev_label[&v])
                .or_insert((birth, v));
            if (birth, v) < *entry {
                *entry = (birth, v);
            }
        }
        let mut new_in: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &v in &new_nodes {
            new_in.entry(label[&v]).or_default().insert(new_label[&v]);
        }
        let components: BTreeSet<usize> = label.values().copied().collect();
        for k in components {
            let olds: Vec<(f64, usize)> = old_in
                .get(&k)
                .map(|m| m.values().copied().collect())
                .unwrap_or_default();
            let news = new_in.get(&k).map_or(0, BTreeSet::len);
            if olds.is_empty() {
                assert_eq!(
                    news, 1,
                    "a fresh component is connected through fresh edges"
                );
                continue;
            }
            let eldest = *olds
                .iter()
                .min_by(|a, b| a.partial_cmp(b).unwrap())
                .unwrap();
            for &(birth, v) in &olds {
                if (birth, v) != eldest {
                    bars.push((birth, c));
                }
            }
            if include_zero_bars {
                bars.extend(std::iter::repeat_n((c, c), news));
            }
        }
        prev_nodes = nodes;
        prev_label = label;
    }
    let mut survivors: BTreeMap<usize, f64> = BTreeMap::new();
    for &v in &prev_nodes {
        let b = f.node_birth(v).unwrap();
        let e = survivors.entry(prev_label[&v]).or_insert(b);
        *e = e.min(b);
    }
    bars.extend(survivors.values().map(|&b| (b, f64::INFINITY)));
    sorted(bars)
}

/// `m' - n' + c'` for the subgraph of every element that eventually enters.
pub fn final_cycle_rank(f: &Filtration) -> usize {
    let (nodes, edges) = present(f, f64::INFINITY);
    let label = bfs_components(f.host(), &nodes, &edges);
    let c = label.values().collect::<BTreeSet<_>>().len();
    edges.len() + c - nodes.len()
}

pub fn sorted(mut bars: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    bars.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bars
}

pub fn bar_pairs<'a>(bars: impl IntoIterator<Item = &'a Bar>) -> Vec<(f64, f64)> {
    sorted(bars.into_iter().map(|b| (b.birth, b.death)).collect())
}

/// Random residuals on a coarse grid so ties are common.
pub fn random_residuals(rng: &mut impl Rng, g: &Graph) -> BTreeMap<EdgeKey, f64> {
    let levels = rng.random_range(1..=6);
    g.edges()
        .iter()
        .map(|e| (e.clone(), rng.random_range(0..levels) as f64 * 0.25))
        .collect()
}
