//! Candidate unit-rate structures inside a capacitated network.

use std::collections::BTreeSet;
use std::fmt;

use super::model::PackingModel;
use super::PackingError;
use crate::construction::{
    construct_125, construct_133, construct_224, ConstructionError, ConstructionResult,
};
use crate::field::Field;
use crate::graph::{
    edge_disjoint_paths_masked, greedy_prune, max_flow_masked, simple_paths, Dag, Edge, EdgeId,
    EdgeMask, PathSet,
};
use crate::instance::UnicastInstance;

/// Default number of embeddings kept per class.
pub const EMBEDDING_CAP: usize = 512;

/// Path systems combined per class and assignment before giving up.
const COMBINATION_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureClass {
    C133,
    C224,
    C125,
}

impl StructureClass {
    pub const ALL: [StructureClass; 3] = [
        StructureClass::C133,
        StructureClass::C224,
        StructureClass::C125,
    ];

    pub fn connectivity(self) -> [u32; 3] {
        match self {
            StructureClass::C133 => [1, 3, 3],
            StructureClass::C224 => [2, 2, 4],
            StructureClass::C125 => [1, 2, 5],
        }
    }

    fn construct(self, inst: &UnicastInstance) -> Result<ConstructionResult, ConstructionError> {
        let field = Field::new(257).expect("prime");
        match self {
            StructureClass::C133 => construct_133(inst, field, 0),
            StructureClass::C224 => construct_224(inst, field, 0),
            StructureClass::C125 => construct_125(inst, field, 0),
        }
    }
}

impl fmt::Display for StructureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.connectivity();
        write!(f, "[{a} {b} {c}]")
    }
}

/// A minimal edge set on which the sessions reach the connectivities of
/// `class` (in the order given by `assignment`) and on which that class's
/// code was built and verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureEmbedding {
    pub class: StructureClass,
    /// Connectivity demanded of each session.
    pub assignment: [u32; 3],
    /// Edge-disjoint paths realizing each session's demand.
    pub paths: Vec<PathSet>,
    /// Sorted edges; each carries one unit per activation.
    pub edges: Vec<EdgeId>,
    /// Whether fractional routing alone reaches rate 1 on these edges, in
    /// which case activating the structure never beats routing.
    pub routable: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingList {
    pub embeddings: Vec<StructureEmbedding>,
    /// Classes whose listing hit a cap.
    pub truncated: Vec<StructureClass>,
    /// Candidate edge sets on which the class constructor failed.
    pub rejected: usize,
}

impl EmbeddingList {
    pub fn count(&self, class: StructureClass) -> usize {
        self.embeddings.iter().filter(|e| e.class == class).count()
    }
}

pub fn enumerate_embeddings(inst: &UnicastInstance) -> Result<EmbeddingList, PackingError> {
    enumerate_embeddings_capped(inst, EMBEDDING_CAP)
}

pub fn enumerate_embeddings_capped(
    inst: &UnicastInstance,
    cap: usize,
) -> Result<EmbeddingList, PackingError> {
    if inst.sessions().len() != 3 {
        return Err(PackingError::SessionCount(inst.sessions().len()));
    }
    let unit = unit_copy(inst);
    let mut out = EmbeddingList::default();
    for class in StructureClass::ALL {
        let mut seen: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
        let mut kept = 0;
        let mut truncated = false;
        'assign: for assignment in assignments(class.connectivity()) {
            let (sets, complete) = minimal_sets(&unit, assignment);
            truncated |= !complete;
            for edges in sets {
                if !seen.insert(edges.clone()) {
                    continue;
                }
                if kept == cap {
                    truncated = true;
                    break 'assign;
                }
                match embedding(&unit, class, assignment, edges)? {
                    Some(e) => {
                        out.embeddings.push(e);
                        kept += 1;
                    }
                    None => out.rejected += 1,
                }
            }
        }
        if truncated {
            out.truncated.push(class);
        }
    }
    Ok(out)
}

fn unit_copy(inst: &UnicastInstance) -> UnicastInstance {
    let g = inst.dag();
    let edges = g
        .edges()
        .iter()
        .map(|e| Edge { capacity: 1, ..*e })
        .collect();
    let dag = Dag::new(g.names().to_vec(), edges).expect("same shape");
    inst.with_dag(dag)
}

/// Distinct orderings of a connectivity vector.
fn assignments(class: [u32; 3]) -> Vec<[u32; 3]> {
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let set: BTreeSet<[u32; 3]> = perms
        .iter()
        .map(|p| [class[p[0]], class[p[1]], class[p[2]]])
        .collect();
    set.into_iter().collect()
}

fn meets(unit: &UnicastInstance, target: [u32; 3], mask: &EdgeMask) -> bool {
    let g = unit.dag();
    unit.sessions()
        .iter()
        .zip(target)
        .all(|(s, k)| max_flow_masked(g, s.source, s.terminal, Some(mask), Some(k)).0 >= k)
}

/// Sets of `k` pairwise edge-disjoint paths from a path list.
fn disjoint_systems(paths: &[Vec<EdgeId>], k: usize, edge_count: usize) -> Vec<EdgeMask> {
    fn go(
        paths: &[Vec<EdgeId>],
        from: usize,
        k: usize,
        mask: &mut EdgeMask,
        out: &mut Vec<EdgeMask>,
    ) {
        if k == 0 {
            out.push(mask.clone());
            return;
        }
        for i in from..paths.len() {
            if paths[i].iter().any(|&e| mask[e]) {
                continue;
            }
            paths[i].iter().for_each(|&e| mask[e] = true);
            go(paths, i + 1, k - 1, mask, out);
            paths[i].iter().for_each(|&e| mask[e] = false);
        }
    }
    let mut out = Vec::new();
    go(paths, 0, k, &mut vec![false; edge_count], &mut out);
    out
}

/// Minimal edge sets meeting `target`, obtained by pruning unions of one
/// path system per session. The flag is false when a cap was hit.
fn minimal_sets(unit: &UnicastInstance, target: [u32; 3]) -> (Vec<Vec<EdgeId>>, bool) {
    let g = unit.dag();
    let full = vec![true; g.edge_count()];
    if !meets(unit, target, &full) {
        return (Vec::new(), true);
    }
    let mut complete = true;
    let systems: Vec<Vec<EdgeMask>> = unit
        .sessions()
        .iter()
        .zip(target)
        .map(|(s, k)| {
            let (paths, done) = simple_paths(g, s.source, s.terminal, &full, COMBINATION_CAP);
            complete &= done;
            disjoint_systems(&paths, k as usize, g.edge_count())
        })
        .collect();
    let mut found: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    let mut tried = 0usize;
    for a in &systems[0] {
        for b in &systems[1] {
            for c in &systems[2] {
                if tried == COMBINATION_CAP {
                    return (found.into_iter().collect(), false);
                }
                tried += 1;
                let union: EdgeMask = (0..g.edge_count()).map(|e| a[e] || b[e] || c[e]).collect();
                let pruned = greedy_prune(g, union, |_| true, |m| meets(unit, target, m));
                found.insert((0..g.edge_count()).filter(|&e| pruned[e]).collect());
            }
        }
    }
    (found.into_iter().collect(), complete)
}

/// Validates a candidate edge set by building and verifying the class's
/// code on the unit-capacity network it spans.
fn embedding(
    unit: &UnicastInstance,
    class: StructureClass,
    assignment: [u32; 3],
    edges: Vec<EdgeId>,
) -> Result<Option<StructureEmbedding>, PackingError> {
    let g = unit.dag();
    let mut mask = vec![false; g.edge_count()];
    edges.iter().for_each(|&e| mask[e] = true);
    let (sub, _) = unit.subinstance(&mask);
    if class.construct(&sub).is_err() {
        return Ok(None);
    }
    let paths = unit
        .sessions()
        .iter()
        .zip(assignment)
        .map(|(s, k)| {
            edge_disjoint_paths_masked(g, s.source, s.terminal, k, Some(&mask))
                .expect("minimal set meets demand")
        })
        .collect();
    let routed = PackingModel::new(&sub, Vec::new())?.routing();
    Ok(Some(StructureEmbedding {
        class,
        assignment,
        paths,
        edges,
        routable: routed >= super::lp::q(1),
    }))
}
