//! Directed acyclic graphs with integer capacities, plus the flow and path
//! machinery the coding schemes are built on.

mod derive;
mod flow;
mod minimal;
mod overlap;
mod structure;

pub use derive::Derivation;
pub use flow::{cut_value, edge_disjoint_paths, max_flow, max_flow_masked, simple_paths, EdgeMask};
pub(crate) use flow::{edge_disjoint_paths_masked, greedy_prune};
pub use minimal::{connectivity_of, is_minimal_for, minimize, minimize_to};
pub use overlap::{last_overlap_segment, overlap_segments, segments_along, OverlapSegment};
pub use structure::{structure, Structured};

use std::collections::BTreeSet;

use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge} references unknown node {node}")]
    DanglingEndpoint { edge: EdgeId, node: NodeId },
    #[error("edge {0} has zero capacity")]
    ZeroCapacity(EdgeId),
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("graph contains a cycle through node `{0}`")]
    Cycle(String),
    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: u32,
}

/// An immutable DAG. Edge ids are dense indices; parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    topo: Vec<NodeId>,
    topo_pos: Vec<usize>,
}

impl Dag {
    pub fn new(names: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(GraphError::DuplicateNode(name.clone()));
            }
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node >= n {
                    return Err(GraphError::DanglingEndpoint { edge: id, node });
                }
            }
            if e.capacity == 0 {
                return Err(GraphError::ZeroCapacity(id));
            }
            if e.tail == e.head {
                return Err(GraphError::SelfLoop(id));
            }
            out_edges[e.tail].push(id);
            in_edges[e.head].push(id);
        }
        // Kahn's algorithm, always releasing the smallest ready node.
        let mut indeg: Vec<usize> = in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<NodeId> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &e in &out_edges[v] {
                let h = edges[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n)
                .find(|&v| indeg[v] > 0)
                .expect("some node is on a cycle");
            return Err(GraphError::Cycle(names[stuck].clone()));
        }
        let mut topo_pos = vec![0; n];
        for (i, &v) in topo.iter().enumerate() {
            topo_pos[v] = i;
        }
        Ok(Dag {
            names,
            edges,
            out_edges,
            in_edges,
            topo,
            topo_pos,
        })
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.edges[e].tail
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        self.edges[e].head
    }

    pub fn capacity(&self, e: EdgeId) -> u32 {
        self.edges[e].capacity
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.in_edges[v].len() + self.out_edges[v].len()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    /// Nodes in topological order (smallest index first among ties).
    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    pub fn topo_pos(&self, v: NodeId) -> usize {
        self.topo_pos[v]
    }

    /// Edges ordered by the topological position of their tails, then heads,
    /// then id. Every edge appears after all edges entering its tail.
    pub fn edges_in_topo_order(&self) -> Vec<EdgeId> {
        let mut ids: Vec<EdgeId> = (0..self.edges.len()).collect();
        ids.sort_by_key(|&e| {
            (
                self.topo_pos[self.edges[e].tail],
                self.topo_pos[self.edges[e].head],
                e,
            )
        });
        ids
    }

    pub fn is_unit(&self) -> bool {
        self.edges.iter().all(|e| e.capacity == 1)
    }

    /// Nodes reachable from `v` (including `v`), restricted to active edges.
    pub fn reachable_from(&self, v: NodeId, mask: Option<&EdgeMask>) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.out_edges[u] {
                if mask.is_some_and(|m| !m[e]) {
                    continue;
                }
                let h = self.edges[e].head;
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// Nodes from which `v` is reachable (including `v`).
    pub fn reaching(&self, v: NodeId, mask: Option<&EdgeMask>) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &e in &self.in_edges[u] {
                if mask.is_some_and(|m| !m[e]) {
                    continue;
                }
                let t = self.edges[e].tail;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Whether a directed path leads from the head of `a` to the tail of `b`
    /// (so `b` is downstream of `a`), or `a == b`.
    pub fn edge_reaches(&self, a: EdgeId, b: EdgeId) -> bool {
        a == b || self.reachable_from(self.head(a), None)[self.tail(b)]
    }

    /// Keeps the edges flagged in `keep` and all nodes. Returns the subgraph
    /// and, for each new edge, the id of the edge it came from.
    pub fn subgraph(&self, keep: &[bool]) -> (Dag, Vec<EdgeId>) {
        let kept: Vec<EdgeId> = (0..self.edges.len()).filter(|&e| keep[e]).collect();
        let edges = kept.iter().map(|&e| self.edges[e]).collect();
        let dag = Dag::new(self.names.clone(), edges).expect("subgraph of a DAG is a DAG");
        (dag, kept)
    }

    /// Replaces every edge of capacity `c` by `c` parallel unit edges. Returns
    /// the split graph and, for each new edge, its original edge.
    pub fn unit_split(&self) -> (Dag, Vec<EdgeId>) {
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            for _ in 0..e.capacity {
                edges.push(Edge { capacity: 1, ..*e });
                origin.push(id);
            }
        }
        (
            Dag::new(self.names.clone(), edges).expect("split of a DAG is a DAG"),
            origin,
        )
    }

    /// Each edge replaced by `t` parallel copies; copy `k` of edge `e` gets id
    /// `e * t + k`.
    pub fn time_expand(&self, t: usize) -> Dag {
        assert!(t >= 1, "time expansion needs at least one time unit");
        let mut edges = Vec::with_capacity(self.edges.len() * t);
        for e in &self.edges {
            for _ in 0..t {
                edges.push(*e);
            }
        }
        Dag::new(self.names.clone(), edges).expect("expansion of a DAG is a DAG")
    }
}

/// A path given as a chain of edges, tagged with a caller-chosen id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub id: usize,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn new(id: usize, edges: Vec<EdgeId>) -> Self {
        Path { id, edges }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    pub fn first(&self) -> EdgeId {
        self.edges[0]
    }

    pub fn last(&self) -> EdgeId {
        *self.edges.last().expect("paths are nonempty")
    }

    /// Whether consecutive edges chain head-to-tail.
    pub fn is_chain(&self, g: &Dag) -> bool {
        !self.edges.is_empty() && self.edges.windows(2).all(|w| g.head(w[0]) == g.tail(w[1]))
    }

    /// Internal nodes (heads of all but the last edge).
    pub fn internal_nodes(&self, g: &Dag) -> Vec<NodeId> {
        self.edges[..self.edges.len().saturating_sub(1)]
            .iter()
            .map(|&e| g.head(e))
            .collect()
    }
}

/// An ordered collection of paths.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathSet {
    pub paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Self {
        PathSet { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Path> {
        self.paths.iter()
    }

    pub fn by_id(&self, id: usize) -> Option<&Path> {
        self.paths.iter().find(|p| p.id == id)
    }

    /// Path containing edge `e`, if any.
    pub fn path_with_edge(&self, e: EdgeId) -> Option<&Path> {
        self.paths.iter().find(|p| p.contains(e))
    }

    pub fn all_chains(&self, g: &Dag) -> bool {
        self.paths.iter().all(|p| p.is_chain(g))
    }

    pub fn edge_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.paths
            .iter()
            .flat_map(|p| p.edges.iter())
            .all(|&e| seen.insert(e))
    }

    /// No internal node shared between two different paths.
    pub fn vertex_disjoint(&self, g: &Dag) -> bool {
        let mut seen = BTreeSet::new();
        self.paths.iter().all(|p| {
            let nodes: BTreeSet<NodeId> = p.internal_nodes(g).into_iter().collect();
            nodes.into_iter().all(|v| seen.insert(v))
        })
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.paths
            .iter()
            .flat_map(|p| p.edges.iter().copied())
            .collect()
    }
}
