use super::flow::{flows_meet, greedy_prune, max_flow_masked};
use super::{Dag, Derivation, NodeId};

/// Per-pair max-flow values.
pub fn connectivity_of(g: &Dag, pairs: &[(NodeId, NodeId)]) -> Vec<u32> {
    pairs
        .iter()
        .map(|&(s, t)| max_flow_masked(g, s, t, None, None).0)
        .collect()
}

/// Deletes edges in reverse topological order while every pair keeps at
/// least its `target` flow. Flow is monotone in the edge set, so one pass
/// leaves no removable edge.
pub fn minimize_to(g: &Dag, pairs: &[(NodeId, NodeId)], target: &[u32]) -> (Dag, Derivation) {
    assert_eq!(pairs.len(), target.len());
    let mask = greedy_prune(
        g,
        vec![true; g.edge_count()],
        |_| true,
        |m| flows_meet(g, pairs, target, m),
    );
    let (dag, kept) = g.subgraph(&mask);
    let derivation = Derivation::subgraph(g, &kept);
    (dag, derivation)
}

/// A subgraph with the same connectivity vector in which deleting any edge
/// lowers some component.
pub fn minimize(g: &Dag, pairs: &[(NodeId, NodeId)]) -> (Dag, Derivation) {
    minimize_to(g, pairs, &connectivity_of(g, pairs))
}

/// Whether removing any single edge lowers some pair's flow below `target`
/// while the full graph meets it.
pub fn is_minimal_for(g: &Dag, pairs: &[(NodeId, NodeId)], target: &[u32]) -> bool {
    let mut mask = vec![true; g.edge_count()];
    if !flows_meet(g, pairs, target, &mask) {
        return false;
    }
    (0..g.edge_count()).all(|e| {
        mask[e] = false;
        let breaks = !flows_meet(g, pairs, target, &mask);
        mask[e] = true;
        breaks
    })
}
