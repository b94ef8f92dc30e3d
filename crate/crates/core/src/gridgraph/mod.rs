//! Torus grid graphs, Tseitin instances over them, and the connectivity
//! machinery used by closures: components, bridges, niceness, independence.

mod closure;
mod connectivity;
mod local;
mod tseitin;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boolcore::VarId;
use crate::error::{Error, Result};

pub use closure::{
    closure_restriction, closure_set, forced_bridge_value, is_independent, is_nice, pushes_contradiction,
    restrict_charge,
};
pub use connectivity::{bridges, components, giant_component, Components};
pub use tseitin::{dimacs, sample_uniform_solution, tseitin_clauses, Clause};

pub(crate) use closure::closure_with_graph;
pub(crate) use local::{bridge_splits, split};

/// An undirected multigraph with dense vertex and edge indices.
#[derive(Clone, Debug)]
pub struct Graph {
    ends: Vec<[u32; 2]>,
    adj_off: Vec<u32>,
    adj: Vec<(u32, u32)>,
    torus_side: Option<usize>,
}

impl Graph {
    /// Builds a graph from an edge list; edge `i` gets `VarId(i)`.
    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut deg = vec![0u32; num_vertices + 1];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut adj_off = vec![0u32; num_vertices + 1];
        for v in 0..num_vertices {
            adj_off[v + 1] = adj_off[v] + deg[v];
        }
        let mut fill = adj_off.clone();
        let mut adj = vec![(0u32, 0u32); adj_off[num_vertices] as usize];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adj[fill[u] as usize] = (v as u32, i as u32);
            fill[u] += 1;
            adj[fill[v] as usize] = (u as u32, i as u32);
            fill[v] += 1;
        }
        let ends = edges.iter().map(|&(u, v)| [u as u32, v as u32]).collect();
        Graph { ends, adj_off, adj, torus_side: None }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj_off.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn ends(&self, e: VarId) -> (usize, usize) {
        let [u, v] = self.ends[e.index()];
        (u as usize, v as usize)
    }

    /// `(neighbour, edge)` pairs around `v`, including removed edges.
    pub fn incident(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_off[v] as usize..self.adj_off[v + 1] as usize]
    }

    pub fn torus_side(&self) -> Option<usize> {
        self.torus_side
    }

    pub fn check_var(&self, e: VarId) -> Result<()> {
        if e.index() < self.num_edges() {
            Ok(())
        } else {
            Err(Error::VarOutOfRange(e, self.num_edges()))
        }
    }
}

/// Direction of an edge leaving a vertex in the canonical edge table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Right,
    Down,
}

/// The `n × n` torus: vertex `(i, j)` has index `i·n + j`, edge
/// `2·(i·n + j) + d` joins it to its right (`d = 0`) or lower (`d = 1`)
/// neighbour, all coordinates mod `n`.
#[derive(Clone, Debug)]
pub struct TorusGrid {
    n: usize,
    graph: Arc<Graph>,
}

/// Builds the torus of odd side `n ≥ 3`, the setting in which the all-one
/// charge is unsatisfiable.
pub fn build_grid(n: usize) -> Result<TorusGrid> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::BadGridSide(n));
    }
    TorusGrid::with_side(n)
}

impl TorusGrid {
    /// Any side `n ≥ 3`; grids carved into subgrids of even side are even.
    pub fn with_side(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::BadGridSide(n));
        }
        let mut edges = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                edges.push((i * n + j, i * n + (j + 1) % n));
                edges.push((i * n + j, ((i + 1) % n) * n + j));
            }
        }
        let mut graph = Graph::from_edges(n * n, &edges);
        graph.torus_side = Some(n);
        Ok(TorusGrid { n, graph: Arc::new(graph) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        (i % self.n) * self.n + (j % self.n)
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n)
    }

    pub fn edge(&self, i: usize, j: usize, dir: Dir) -> VarId {
        let d = match dir {
            Dir::Right => 0,
            Dir::Down => 1,
        };
        VarId((2 * self.vertex(i, j) + d) as u32)
    }

    /// The edge between two adjacent vertices, if they are adjacent.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<VarId> {
        self.graph.incident(a).iter().find(|&&(w, _)| w as usize == b).map(|&(_, e)| VarId(e))
    }

    /// The four edges at `(i, j)` in the order right, down, left, up.
    pub fn edges_at(&self, i: usize, j: usize) -> [VarId; 4] {
        let n = self.n;
        [
            self.edge(i, j, Dir::Right),
            self.edge(i, j, Dir::Down),
            self.edge(i, (j + n - 1) % n, Dir::Right),
            self.edge((i + n - 1) % n, j, Dir::Down),
        ]
    }

    pub fn full(&self) -> LiveGraph {
        LiveGraph::new(self.graph.clone())
    }

    /// The charge that is one everywhere, except that for even `n` the vertex
    /// `(0, 0)` gets zero so the total stays odd.
    pub fn standard_charge(&self) -> Charge {
        let mut c = Charge::ones(self.n * self.n);
        if self.n % 2 == 0 {
            c.values[0] = false;
        }
        c
    }
}

/// A set of edges stored as a bitmask plus a sorted list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    bits: Vec<u64>,
    list: Vec<VarId>,
}

impl EdgeSet {
    pub fn with_capacity(num_edges: usize) -> Self {
        EdgeSet { bits: vec![0; num_edges.div_ceil(64)], list: Vec::new() }
    }

    pub fn contains(&self, e: VarId) -> bool {
        let i = e.index();
        self.bits.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn insert(&mut self, e: VarId) -> bool {
        let i = e.index();
        if i / 64 >= self.bits.len() {
            self.bits.resize(i / 64 + 1, 0);
        }
        if self.contains(e) {
            return false;
        }
        self.bits[i / 64] |= 1 << (i % 64);
        let pos = self.list.binary_search(&e).unwrap_err();
        self.list.insert(pos, e);
        true
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.list.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.list
    }
}

/// A base graph minus a set of removed edges.
#[derive(Clone, Debug)]
pub struct LiveGraph {
    base: Arc<Graph>,
    removed: EdgeSet,
}

impl LiveGraph {
    pub fn new(base: Arc<Graph>) -> Self {
        let removed = EdgeSet::with_capacity(base.num_edges());
        LiveGraph { base, removed }
    }

    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Self {
        LiveGraph::new(Arc::new(Graph::from_edges(num_vertices, edges)))
    }

    pub fn base(&self) -> &Arc<Graph> {
        &self.base
    }

    pub fn removed(&self) -> &EdgeSet {
        &self.removed
    }

    pub fn num_vertices(&self) -> usize {
        self.base.num_vertices()
    }

    pub fn is_live(&self, e: VarId) -> bool {
        e.index() < self.base.num_edges() && !self.removed.contains(e)
    }

    pub fn live_edges(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.base.num_edges() as u32).map(VarId).filter(|e| !self.removed.contains(*e))
    }

    /// Live `(neighbour, edge)` pairs around `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, VarId)> + '_ {
        self.base
            .incident(v)
            .iter()
            .filter(|(_, e)| !self.removed.contains(VarId(*e)))
            .map(|&(w, e)| (w as usize, VarId(e)))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// `G − S`. Edges of `S` must be edges of the base graph.
    pub fn minus(&self, s: impl IntoIterator<Item = VarId>) -> Result<LiveGraph> {
        let mut out = self.clone();
        for e in s {
            self.base.check_var(e)?;
            out.removed.insert(e);
        }
        Ok(out)
    }
}

/// A Z2 value per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Charge {
    pub values: Vec<bool>,
}

impl Charge {
    pub fn ones(len: usize) -> Self {
        Charge { values: vec![true; len] }
    }

    pub fn zeros(len: usize) -> Self {
        Charge { values: vec![false; len] }
    }

    pub fn get(&self, v: usize) -> bool {
        self.values[v]
    }

    pub fn toggle(&mut self, v: usize) {
        self.values[v] = !self.values[v];
    }

    pub fn total_parity(&self) -> bool {
        self.values.iter().filter(|b| **b).count() % 2 == 1
    }

    pub fn parity_over(&self, vertices: &[usize]) -> bool {
        vertices.iter().filter(|&&v| self.values[v]).count() % 2 == 1
    }
}

/// A live graph together with a charge: the parity system
/// `Σ_{e ∋ v} x_e = α(v)` for every vertex.
#[derive(Clone, Debug)]
pub struct TseitinInstance {
    pub graph: LiveGraph,
    pub charge: Charge,
}

impl TseitinInstance {
    pub fn new(graph: LiveGraph, charge: Charge) -> Result<Self> {
        if charge.values.len() != graph.num_vertices() {
            return Err(Error::Invariant("charge length differs from vertex count".into()));
        }
        Ok(TseitinInstance { graph, charge })
    }

    /// Satisfiable iff every component carries even total charge.
    pub fn is_satisfiable(&self) -> bool {
        let comps = components(&self.graph);
        let mut par = vec![false; comps.sizes.len()];
        for v in 0..self.graph.num_vertices() {
            if self.charge.get(v) {
                let c = comps.label[v] as usize;
                par[c] = !par[c];
            }
        }
        par.iter().all(|p| !p)
    }

    /// Whether a full assignment (indexed by edge) satisfies every vertex.
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        (0..self.graph.num_vertices()).all(|v| self.vertex_satisfied(v, values))
    }

    pub fn vertex_satisfied(&self, v: usize, values: &[bool]) -> bool {
        let s = self.graph.neighbors(v).filter(|(_, e)| values[e.index()]).count() % 2 == 1;
        s == self.charge.get(v)
    }
}
