//! The skeleton subgraph that decides which `[1 2 5]` scheme applies.
//!
//! The skeleton holds one `s1 -> t1` path, two disjoint `s2 -> t2` paths and,
//! when they exist in the whole graph, a crossing path `s1 -> t2` and a
//! crossing path `s2 -> t1`, with no removable edge. Its shape decides
//! whether plain random coding with precoding suffices or the recoding
//! scheme is needed.

use std::fmt;

use super::ConstructionError;
use crate::graph::{
    edge_disjoint_paths_masked, greedy_prune, max_flow_masked, simple_paths, EdgeId, EdgeMask,
    NodeId, Path,
};
use crate::instance::UnicastInstance;

/// Relative placement of the four marker edges when the session-1 path
/// avoids both session-2 paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Both crossings meet the same session-2 path, the `s2 -> t1` crossing
    /// leaving it above where the `s1 -> t2` crossing joins.
    SerialHost,
    /// The crossings use different session-2 paths and the `s2 -> t1`
    /// crossing joins the session-1 path below where the other leaves it.
    ParallelHosts,
    /// The crossings share a stretch of the session-1 path.
    SharedStretch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GprimeCase {
    /// No path from `s1` to `t2` anywhere in the graph.
    NoCrossToSecond,
    /// No path from `s2` to `t1` anywhere in the graph.
    NoCrossToFirst,
    /// The session-1 path shares edges with a session-2 path.
    Overlapping,
    /// Both crossings exist and the session-1 path avoids both session-2
    /// paths.
    Disjoint(Topology),
}

impl GprimeCase {
    /// Whether random coding with source precoding handles this shape.
    pub fn is_general(self) -> bool {
        !matches!(
            self,
            GprimeCase::Disjoint(Topology::ParallelHosts | Topology::SharedStretch)
        )
    }
}

impl fmt::Display for GprimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GprimeCase::NoCrossToSecond => f.write_str("no s1-t2 path"),
            GprimeCase::NoCrossToFirst => f.write_str("no s2-t1 path"),
            GprimeCase::Overlapping => f.write_str("session-1 path overlaps a session-2 path"),
            GprimeCase::Disjoint(t) => write!(f, "disjoint, {t:?}"),
        }
    }
}

/// A skeleton subgraph of a role-ordered `[1 2 5]` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gprime {
    /// Skeleton edges as a mask over the instance's edges.
    pub keep: EdgeMask,
    pub p11: Path,
    pub p2: [Path; 2],
    pub cross12: Option<Path>,
    pub cross21: Option<Path>,
    pub case: GprimeCase,
    /// In the disjoint case: the last edge shared by the `s1 -> t2` crossing
    /// and `p11`, the last edge shared by the `s2 -> t1` crossing and a
    /// session-2 path, the first edge shared by the `s2 -> t1` crossing and
    /// `p11`, and the first edge shared by the `s1 -> t2` crossing and a
    /// session-2 path.
    pub marks: Option<[EdgeId; 4]>,
}

/// Most candidate session-2 paths tried while looking for an overlapping
/// skeleton.
const CANDIDATE_CAP: usize = 512;

struct Roles {
    s1: NodeId,
    t1: NodeId,
    s2: NodeId,
    t2: NodeId,
    cross12: bool,
    cross21: bool,
}

impl Roles {
    fn holds(&self, inst: &UnicastInstance, mask: &EdgeMask) -> bool {
        let g = inst.dag();
        let flow = |s, t, k| max_flow_masked(g, s, t, Some(mask), Some(k)).0 >= k;
        flow(self.s1, self.t1, 1)
            && flow(self.s2, self.t2, 2)
            && (!self.cross12 || flow(self.s1, self.t2, 1))
            && (!self.cross21 || flow(self.s2, self.t1, 1))
    }
}

fn path_in(inst: &UnicastInstance, s: NodeId, t: NodeId, mask: &EdgeMask) -> Option<Path> {
    if s == t {
        return Some(Path::new(0, Vec::new()));
    }
    edge_disjoint_paths_masked(inst.dag(), s, t, 1, Some(mask)).map(|mut ps| ps.paths.remove(0))
}

fn shrink(inst: &UnicastInstance, roles: &Roles, start: EdgeMask) -> EdgeMask {
    let candidate = start.clone();
    greedy_prune(
        inst.dag(),
        start,
        |e| candidate[e],
        |m| roles.holds(inst, m),
    )
}

/// Builds the skeleton paths inside `keep` and classifies them.
fn describe(
    inst: &UnicastInstance,
    roles: &Roles,
    keep: EdgeMask,
) -> Result<Gprime, ConstructionError> {
    let g = inst.dag();
    let p11 = path_in(inst, roles.s1, roles.t1, &keep)
        .ok_or_else(|| topo("skeleton lost the s1-t1 path"))?;
    let mut two = edge_disjoint_paths_masked(g, roles.s2, roles.t2, 2, Some(&keep))
        .ok_or_else(|| topo("skeleton lost the s2-t2 paths"))?
        .paths;
    let p22 = two.pop().expect("two paths");
    let p21 = two.pop().expect("two paths");
    let cross12 = if roles.cross12 {
        path_in(inst, roles.s1, roles.t2, &keep)
    } else {
        None
    };
    let cross21 = if roles.cross21 {
        path_in(inst, roles.s2, roles.t1, &keep)
    } else {
        None
    };
    let overlapping = p11
        .edges
        .iter()
        .any(|&e| p21.contains(e) || p22.contains(e));
    let mut gp = Gprime {
        keep,
        p11,
        p2: [p21, p22],
        cross12,
        cross21,
        case: GprimeCase::Overlapping,
        marks: None,
    };
    gp.case = if !roles.cross12 {
        GprimeCase::NoCrossToSecond
    } else if !roles.cross21 {
        GprimeCase::NoCrossToFirst
    } else if overlapping {
        GprimeCase::Overlapping
    } else {
        let (topology, marks) = disjoint_shape(&gp)?;
        gp.marks = Some(marks);
        GprimeCase::Disjoint(topology)
    };
    Ok(gp)
}

fn topo(msg: &str) -> ConstructionError {
    ConstructionError::Topology(msg.to_string())
}

fn disjoint_shape(gp: &Gprime) -> Result<(Topology, [EdgeId; 4]), ConstructionError> {
    let plus = gp.cross12.as_ref().expect("crossing exists");
    let minus = gp.cross21.as_ref().expect("crossing exists");
    let on_p2 = |e: EdgeId| gp.p2.iter().position(|q| q.contains(e));
    let e1 = *plus
        .edges
        .iter()
        .rev()
        .find(|&&e| gp.p11.contains(e))
        .ok_or_else(|| topo("s1-t2 crossing avoids p11"))?;
    let e4 = *plus
        .edges
        .iter()
        .find(|&&e| on_p2(e).is_some())
        .ok_or_else(|| topo("s1-t2 crossing avoids session 2"))?;
    let e3 = *minus
        .edges
        .iter()
        .find(|&&e| gp.p11.contains(e))
        .ok_or_else(|| topo("s2-t1 crossing avoids p11"))?;
    let e2 = *minus
        .edges
        .iter()
        .rev()
        .find(|&&e| on_p2(e).is_some())
        .ok_or_else(|| topo("s2-t1 crossing avoids session 2"))?;
    let (h2, h4) = (on_p2(e2).expect("on p2"), on_p2(e4).expect("on p2"));
    let pos = |e: EdgeId| gp.p11.position(e).expect("on p11");
    let topology = if pos(e3) > pos(e1) {
        if h2 == h4 {
            let host = &gp.p2[h2];
            if host.position(e4) <= host.position(e2) {
                return Err(topo(
                    "s1-t2 crossing joins its host above the s2-t1 crossing's exit",
                ));
            }
            Topology::SerialHost
        } else {
            Topology::ParallelHosts
        }
    } else {
        if h2 == h4 {
            return Err(topo(
                "crossings sharing a stretch of p11 use one session-2 path",
            ));
        }
        Topology::SharedStretch
    };
    Ok((topology, [e1, e2, e3, e4]))
}

/// Finds a skeleton for an instance whose sessions are ordered by
/// connectivity `1, 2, 5`. Skeletons in which the session-1 path meets a
/// session-2 path are searched first; failing that, the whole graph is
/// pruned down and classified.
pub fn find_gprime(inst: &UnicastInstance) -> Result<Gprime, ConstructionError> {
    let g = inst.dag();
    let (a, b) = (inst.session(0), inst.session(1));
    let roles = Roles {
        s1: a.source,
        t1: a.terminal,
        s2: b.source,
        t2: b.terminal,
        cross12: g.reachable_from(a.source, None)[b.terminal],
        cross21: g.reachable_from(b.source, None)[a.terminal],
    };
    let full = vec![true; g.edge_count()];
    if !roles.holds(inst, &full) {
        return Err(topo("instance lacks the skeleton's paths"));
    }
    if roles.cross12 && roles.cross21 {
        let from_s1 = g.reachable_from(roles.s1, None);
        let to_t1 = g.reaching(roles.t1, None);
        for q in simple_paths(g, roles.s2, roles.t2, &full, CANDIDATE_CAP).0 {
            let Some(&e) = q.iter().find(|&&e| from_s1[g.tail(e)] && to_t1[g.head(e)]) else {
                continue;
            };
            let mut rest = full.clone();
            q.iter().for_each(|&x| rest[x] = false);
            let Some(q2) = path_in(inst, roles.s2, roles.t2, &rest) else {
                continue;
            };
            let (Some(pre), Some(post)) = (
                path_in(inst, roles.s1, g.tail(e), &full),
                path_in(inst, g.head(e), roles.t1, &full),
            ) else {
                continue;
            };
            let mut start = vec![false; g.edge_count()];
            for &x in q
                .iter()
                .chain(&q2.edges)
                .chain(&pre.edges)
                .chain(&post.edges)
            {
                start[x] = true;
            }
            start[e] = true;
            if !roles.holds(inst, &start) {
                continue;
            }
            let gp = describe(inst, &roles, shrink(inst, &roles, start))?;
            if gp.case == GprimeCase::Overlapping {
                return Ok(gp);
            }
        }
    }
    describe(inst, &roles, shrink(inst, &roles, full))
}
