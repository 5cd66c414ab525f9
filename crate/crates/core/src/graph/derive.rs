use super::{Dag, EdgeId, NodeId};

/// How a derived graph relates to the graph it was built from.
///
/// Every derived node stands for one parent node. A derived edge is either
/// the image of exactly one parent edge (with endpoints standing for that
/// edge's endpoints) or internal to the region of a single parent node.
/// Parent edges without an image were deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub node_parent: Vec<NodeId>,
    pub edge_parent: Vec<Option<EdgeId>>,
    pub parent_nodes: usize,
    pub parent_edges: usize,
}

impl Derivation {
    pub fn identity(g: &Dag) -> Self {
        Derivation {
            node_parent: (0..g.node_count()).collect(),
            edge_parent: (0..g.edge_count()).map(Some).collect(),
            parent_nodes: g.node_count(),
            parent_edges: g.edge_count(),
        }
    }

    /// Derivation of an edge subgraph on the same node set; `kept[i]` is the
    /// parent id of child edge `i`.
    pub fn subgraph(parent: &Dag, kept: &[EdgeId]) -> Self {
        Derivation {
            node_parent: (0..parent.node_count()).collect(),
            edge_parent: kept.iter().map(|&e| Some(e)).collect(),
            parent_nodes: parent.node_count(),
            parent_edges: parent.edge_count(),
        }
    }

    /// `self` maps child to mid, `outer` maps mid to parent; the result maps
    /// child to parent.
    pub fn then(&self, outer: &Derivation) -> Derivation {
        assert_eq!(
            self.parent_nodes,
            outer.node_parent.len(),
            "derivations do not chain"
        );
        assert_eq!(
            self.parent_edges,
            outer.edge_parent.len(),
            "derivations do not chain"
        );
        Derivation {
            node_parent: self
                .node_parent
                .iter()
                .map(|&m| outer.node_parent[m])
                .collect(),
            edge_parent: self
                .edge_parent
                .iter()
                .map(|pe| pe.and_then(|m| outer.edge_parent[m]))
                .collect(),
            parent_nodes: outer.parent_nodes,
            parent_edges: outer.parent_edges,
        }
    }

    /// The same relation between the `t`-fold time expansions of both graphs.
    pub fn time_expand(&self, t: usize) -> Derivation {
        let mut edge_parent = Vec::with_capacity(self.edge_parent.len() * t);
        for pe in &self.edge_parent {
            for k in 0..t {
                edge_parent.push(pe.map(|e| e * t + k));
            }
        }
        Derivation {
            node_parent: self.node_parent.clone(),
            edge_parent,
            parent_nodes: self.parent_nodes,
            parent_edges: self.parent_edges * t,
        }
    }

    /// For each parent edge, its image in the child graph.
    pub fn images(&self) -> Vec<Option<EdgeId>> {
        let mut img = vec![None; self.parent_edges];
        for (c, pe) in self.edge_parent.iter().enumerate() {
            if let Some(p) = pe {
                assert!(img[*p].is_none(), "parent edge {p} has two images");
                img[*p] = Some(c);
            }
        }
        img
    }

    /// Checks the endpoint conventions against both graphs.
    pub fn is_consistent(&self, child: &Dag, parent: &Dag) -> bool {
        if self.node_parent.len() != child.node_count()
            || self.edge_parent.len() != child.edge_count()
        {
            return false;
        }
        let mut seen = vec![false; parent.edge_count()];
        child.edges().iter().zip(&self.edge_parent).all(|(ce, pe)| {
            let (pt, ph) = (self.node_parent[ce.tail], self.node_parent[ce.head]);
            match pe {
                Some(p) => {
                    let fresh = !std::mem::replace(&mut seen[*p], true);
                    fresh && parent.tail(*p) == pt && parent.head(*p) == ph
                }
                None => pt == ph,
            }
        })
    }
}
