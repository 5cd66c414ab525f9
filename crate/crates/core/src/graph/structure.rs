use super::{Dag, Derivation, Edge, EdgeId, NodeId};

/// A structured graph and its relation to the input graph.
#[derive(Debug, Clone)]
pub struct Structured {
    pub dag: Dag,
    pub derivation: Derivation,
}

struct Builder {
    names: Vec<String>,
    node_parent: Vec<NodeId>,
    internal: Vec<Edge>,
}

impl Builder {
    fn node(&mut self, name: String, parent: NodeId) -> NodeId {
        self.names.push(name);
        self.node_parent.push(parent);
        self.names.len() - 1
    }

    fn edge(&mut self, tail: NodeId, head: NodeId) {
        self.internal.push(Edge {
            tail,
            head,
            capacity: 1,
        });
    }

    /// Binary merge tree rooted at `root` (whose single out-edge is added by
    /// the caller); returns `count` entry slots, each taking one edge.
    fn fan_in(&mut self, root: NodeId, count: usize, parent: NodeId, label: &str) -> Vec<NodeId> {
        if count <= 2 {
            return vec![root; count];
        }
        let left = count / 2;
        let a = self.node(format!("{label}.a"), parent);
        let b = self.node(format!("{label}.b"), parent);
        self.edge(a, root);
        self.edge(b, root);
        let mut slots = self.fan_in(a, left, parent, &format!("{label}.a"));
        slots.extend(self.fan_in(b, count - left, parent, &format!("{label}.b")));
        slots
    }

    /// Binary split tree from `root` (which has a single in-edge) to
    /// `targets`.
    fn fan_out(&mut self, root: NodeId, targets: &[NodeId], parent: NodeId, label: &str) {
        if targets.len() <= 2 {
            for &t in targets {
                self.edge(root, t);
            }
            return;
        }
        let left = targets.len() / 2;
        let a = self.node(format!("{label}.a"), parent);
        let b = self.node(format!("{label}.b"), parent);
        self.edge(root, a);
        self.edge(root, b);
        self.fan_out(a, &targets[..left], parent, &format!("{label}.a"));
        self.fan_out(b, &targets[left..], parent, &format!("{label}.b"));
    }
}

/// Rewrites a unit-capacity graph so that every node outside `exempt` has
/// in-degree plus out-degree at most three.
///
/// A node `v` with `p` in-edges and `q` out-edges and `p + q > 3` becomes a
/// gadget: in-port `x_i` per in-edge, out-port `y_j` per out-edge, a binary
/// split tree from each `x_i` and a binary merge tree into each `y_j`, with
/// one connecting edge per pair `(i, j)`. Any unit of flow through `v` pairs
/// one in-edge with one out-edge and crosses the gadget through its own
/// trees, so max-flows are preserved and edge-disjoint paths through `v`
/// become vertex-disjoint. Original edges keep their ids; gadget edges follow.
pub fn structure(g: &Dag, exempt: &[NodeId]) -> Structured {
    assert!(g.is_unit(), "structuring expects a unit-capacity graph");
    let n = g.node_count();
    let mut b = Builder {
        names: g.names().to_vec(),
        node_parent: (0..n).collect(),
        internal: Vec::new(),
    };
    // in_port[e] / out_port[e]: child endpoints of the image of parent edge e.
    let mut in_port: Vec<NodeId> = (0..g.edge_count()).map(|e| g.head(e)).collect();
    let mut out_port: Vec<NodeId> = (0..g.edge_count()).map(|e| g.tail(e)).collect();
    for v in 0..n {
        if exempt.contains(&v) || g.degree(v) <= 3 {
            continue;
        }
        let ins = g.in_edges(v).to_vec();
        let outs = g.out_edges(v).to_vec();
        let name = g.name(v).to_string();
        let xs: Vec<NodeId> = ins
            .iter()
            .enumerate()
            .map(|(i, _)| {
                if i == 0 {
                    v
                } else {
                    b.node(format!("{name}~in{i}"), v)
                }
            })
            .collect();
        if let Some(first) = b.names.get_mut(v) {
            *first = format!("{name}~in0");
        }
        let ys: Vec<NodeId> = (0..outs.len())
            .map(|j| b.node(format!("{name}~out{j}"), v))
            .collect();
        for (i, &e) in ins.iter().enumerate() {
            in_port[e] = xs[i];
        }
        for (j, &e) in outs.iter().enumerate() {
            out_port[e] = ys[j];
        }
        let slots: Vec<Vec<NodeId>> = ys
            .iter()
            .enumerate()
            .map(|(j, &y)| b.fan_in(y, ins.len(), v, &format!("{name}~m{j}")))
            .collect();
        for (i, &x) in xs.iter().enumerate() {
            let targets: Vec<NodeId> = slots.iter().map(|s| s[i]).collect();
            b.fan_out(x, &targets, v, &format!("{name}~s{i}"));
        }
    }
    let mut edges: Vec<Edge> = (0..g.edge_count())
        .map(|e| Edge {
            tail: out_port[e],
            head: in_port[e],
            capacity: 1,
        })
        .collect();
    let images = edges.len();
    edges.extend(b.internal.iter().copied());
    let mut edge_parent: Vec<Option<EdgeId>> = (0..images).map(Some).collect();
    edge_parent.extend(std::iter::repeat_n(None, b.internal.len()));
    let derivation = Derivation {
        node_parent: b.node_parent,
        edge_parent,
        parent_nodes: n,
        parent_edges: g.edge_count(),
    };
    let dag = Dag::new(b.names, edges).expect("gadgets preserve acyclicity");
    Structured { dag, derivation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::max_flow;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Dag {
        Dag::new(
            (0..n).map(|i| format!("v{i}")).collect(),
            edges
                .iter()
                .map(|&(tail, head)| Edge {
                    tail,
                    head,
                    capacity: 1,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn low_degree_graph_is_unchanged() {
        let g = dag(3, &[(0, 1), (1, 2)]);
        let s = structure(&g, &[0, 2]);
        assert_eq!(s.dag, g);
    }

    #[test]
    fn two_by_two_node_becomes_gadget() {
        // Sources 0,1 -> hub 2 -> terminals 3,4.
        let g = dag(5, &[(0, 2), (1, 2), (2, 3), (2, 4)]);
        let s = structure(&g, &[0, 1, 3, 4]);
        for v in 0..s.dag.node_count() {
            if ![0, 1, 3, 4].contains(&v) {
                assert!(s.dag.degree(v) <= 3, "node {v} too wide");
            }
        }
        for (a, b) in [(0, 3), (0, 4), (1, 3), (1, 4)] {
            assert_eq!(max_flow(&s.dag, a, b), max_flow(&g, a, b));
        }
        assert!(s.derivation.is_consistent(&s.dag, &g));
    }
}
