use std::collections::VecDeque;

use super::{Dag, EdgeId, NodeId, Path, PathSet};

/// Per-edge activity flags; inactive edges are treated as deleted.
pub type EdgeMask = Vec<bool>;

/// Maximum `s`–`t` flow value.
pub fn max_flow(g: &Dag, s: NodeId, t: NodeId) -> u32 {
    max_flow_masked(g, s, t, None, None).0
}

/// Maximum flow over the active edges, stopping once `limit` is reached.
/// Returns the value and the per-edge flow.
pub fn max_flow_masked(
    g: &Dag,
    s: NodeId,
    t: NodeId,
    mask: Option<&EdgeMask>,
    limit: Option<u32>,
) -> (u32, Vec<u32>) {
    let mut flow = vec![0u32; g.edge_count()];
    if s == t {
        return (0, flow);
    }
    let active = |e: EdgeId| mask.is_none_or(|m| m[e]);
    let mut value = 0u32;
    // parent[v] = (edge, forward?) used to reach v in the residual graph.
    let mut parent: Vec<Option<(EdgeId, bool)>> = vec![None; g.node_count()];
    loop {
        if limit.is_some_and(|l| value >= l) {
            break;
        }
        parent.iter_mut().for_each(|p| *p = None);
        let mut visited = vec![false; g.node_count()];
        visited[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &e in g.out_edges(u) {
                let h = g.head(e);
                if active(e) && !visited[h] && flow[e] < g.capacity(e) {
                    visited[h] = true;
                    parent[h] = Some((e, true));
                    queue.push_back(h);
                }
            }
            for &e in g.in_edges(u) {
                let tl = g.tail(e);
                if active(e) && !visited[tl] && flow[e] > 0 {
                    visited[tl] = true;
                    parent[tl] = Some((e, false));
                    queue.push_back(tl);
                }
            }
        }
        if !visited[t] {
            break;
        }
        let mut bottleneck = u32::MAX;
        let mut v = t;
        while v != s {
            let (e, fwd) = parent[v].expect("path back to source");
            if fwd {
                bottleneck = bottleneck.min(g.capacity(e) - flow[e]);
                v = g.tail(e);
            } else {
                bottleneck = bottleneck.min(flow[e]);
                v = g.head(e);
            }
        }
        if let Some(l) = limit {
            bottleneck = bottleneck.min(l - value);
        }
        let mut v = t;
        while v != s {
            let (e, fwd) = parent[v].expect("path back to source");
            if fwd {
                flow[e] += bottleneck;
                v = g.tail(e);
            } else {
                flow[e] -= bottleneck;
                v = g.head(e);
            }
        }
        value += bottleneck;
    }
    (value, flow)
}

/// `k` edge-disjoint `s`–`t` paths obtained by decomposing a flow of value
/// `k`, or `None` when the max-flow is smaller. On capacitated graphs an edge
/// may appear in up to `capacity` paths. Paths get ids `0..k`.
pub fn edge_disjoint_paths(g: &Dag, s: NodeId, t: NodeId, k: u32) -> Option<PathSet> {
    edge_disjoint_paths_masked(g, s, t, k, None)
}

pub(crate) fn edge_disjoint_paths_masked(
    g: &Dag,
    s: NodeId,
    t: NodeId,
    k: u32,
    mask: Option<&EdgeMask>,
) -> Option<PathSet> {
    let (value, mut flow) = max_flow_masked(g, s, t, mask, Some(k));
    if value < k {
        return None;
    }
    let mut paths = Vec::with_capacity(k as usize);
    for id in 0..k as usize {
        let mut edges = Vec::new();
        let mut v = s;
        while v != t {
            let e = *g
                .out_edges(v)
                .iter()
                .find(|&&e| flow[e] > 0)
                .expect("flow conservation leads to the sink");
            flow[e] -= 1;
            edges.push(e);
            v = g.head(e);
        }
        paths.push(Path::new(id, edges));
    }
    Some(PathSet::new(paths))
}

/// Total capacity of edges leaving `node_set`.
pub fn cut_value(g: &Dag, node_set: &[NodeId]) -> u64 {
    let mut inside = vec![false; g.node_count()];
    for &v in node_set {
        inside[v] = true;
    }
    g.edges()
        .iter()
        .filter(|e| inside[e.tail] && !inside[e.head])
        .map(|e| e.capacity as u64)
        .sum()
}

/// Greedy edge deletion in reverse topological order: an edge is removed
/// whenever `keep_ok` still holds without it. Only edges with
/// `candidate[e]` set are considered. Returns the resulting mask.
pub(crate) fn greedy_prune(
    g: &Dag,
    mut mask: EdgeMask,
    candidate: impl Fn(EdgeId) -> bool,
    mut keep_ok: impl FnMut(&EdgeMask) -> bool,
) -> EdgeMask {
    let mut order = g.edges_in_topo_order();
    order.reverse();
    for e in order {
        if !mask[e] || !candidate(e) {
            continue;
        }
        mask[e] = false;
        if !keep_ok(&mask) {
            mask[e] = true;
        }
    }
    mask
}

/// All `s -> t` paths inside `mask` in depth-first order, at most `cap` of
/// them. The second value is false when the cap cut the listing short.
pub fn simple_paths(
    g: &Dag,
    s: NodeId,
    t: NodeId,
    mask: &EdgeMask,
    cap: usize,
) -> (Vec<Vec<EdgeId>>, bool) {
    let reaches = g.reaching(t, Some(mask));
    let mut out = Vec::new();
    let mut stack: Vec<(NodeId, Vec<EdgeId>)> = vec![(s, Vec::new())];
    while let Some((v, path)) = stack.pop() {
        if v == t {
            if out.len() == cap {
                return (out, false);
            }
            out.push(path);
            continue;
        }
        for &e in g.out_edges(v).iter().rev() {
            if mask[e] && reaches[g.head(e)] {
                let mut next = path.clone();
                next.push(e);
                stack.push((g.head(e), next));
            }
        }
    }
    (out, true)
}

/// Whether every pair `(s, t)` still has flow at least its target.
pub(crate) fn flows_meet(
    g: &Dag,
    pairs: &[(NodeId, NodeId)],
    target: &[u32],
    mask: &EdgeMask,
) -> bool {
    pairs
        .iter()
        .zip(target)
        .all(|(&(s, t), &k)| max_flow_masked(g, s, t, Some(mask), Some(k)).0 >= k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn dag(n: usize, edges: &[(usize, usize, u32)]) -> Dag {
        Dag::new(
            (0..n).map(|i| format!("v{i}")).collect(),
            edges
                .iter()
                .map(|&(tail, head, capacity)| Edge {
                    tail,
                    head,
                    capacity,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_edge_flow() {
        assert_eq!(max_flow(&dag(2, &[(0, 1, 1)]), 0, 1), 1);
        assert_eq!(max_flow(&dag(2, &[(0, 1, 1)]), 1, 0), 0);
    }

    #[test]
    fn diamond_decomposes_into_two_paths() {
        // s=0, a=1, b=2, t=3
        let g = dag(4, &[(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)]);
        let ps = edge_disjoint_paths(&g, 0, 3, 2).unwrap();
        let mut got: Vec<Vec<EdgeId>> = ps.paths.iter().map(|p| p.edges.clone()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 1], vec![2, 3]]);
        assert!(edge_disjoint_paths(&g, 0, 3, 3).is_none());
    }

    #[test]
    fn flow_needs_reverse_augmentation() {
        // Classic trap: the greedy path 0-1-2-3 must be undone.
        let g = dag(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 2, 1), (1, 3, 1)]);
        assert_eq!(max_flow(&g, 0, 3), 2);
    }

    #[test]
    fn cut_of_full_set_is_zero() {
        let g = dag(3, &[(0, 1, 2), (1, 2, 5)]);
        assert_eq!(cut_value(&g, &[0, 1, 2]), 0);
        assert_eq!(cut_value(&g, &[0, 1]), 5);
    }
}
