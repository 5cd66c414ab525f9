//! Small instances that admit no solution, with checkable certificates.
//!
//! The first two are ruled out by a cut whose capacity is below the demand
//! crossing it. The other two pass every cut test; for them the certificate
//! is an exhaustive search over all linear codes at a fixed field size and
//! number of time units.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{cut_value, NodeId};
use crate::instance::{parse_instance, UnicastInstance};
use crate::verify::{brute_force_linear_feasibility, BruteForceError, Budget, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Three sessions of connectivity two squeezed through two shared edges.
    Fig222,
    /// Two unit sessions sharing one edge next to a three-path session.
    Fig113,
    /// Two sessions with connectivity `[2 3]` that cannot carry rates 2 and 1.
    Fig23Rate21,
    /// The same graph as three unit sessions with connectivity `[2 3 2]`,
    /// the first and third sharing source and terminal.
    Corollary232,
}

impl FamilyId {
    pub const ALL: [FamilyId; 4] = [
        FamilyId::Fig222,
        FamilyId::Fig113,
        FamilyId::Fig23Rate21,
        FamilyId::Corollary232,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Fig222 => "Fig222",
            FamilyId::Fig113 => "Fig113",
            FamilyId::Fig23Rate21 => "Fig23Rate21",
            FamilyId::Corollary232 => "Corollary232",
        }
    }

    /// Connectivity vector of the generated instance.
    pub fn connectivity(self) -> Vec<u32> {
        match self {
            FamilyId::Fig222 => vec![2, 2, 2],
            FamilyId::Fig113 => vec![1, 1, 3],
            FamilyId::Fig23Rate21 => vec![2, 3],
            FamilyId::Corollary232 => vec![2, 3, 2],
        }
    }

    /// The source-side node set of the violated cut, when there is one.
    pub fn named_cut(self) -> Option<&'static [&'static str]> {
        match self {
            FamilyId::Fig222 => Some(&["s1", "s2", "s3", "v1", "v2"]),
            FamilyId::Fig113 => Some(&["s1", "s2", "v1"]),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = CounterexampleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CounterexampleError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterexampleError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error(transparent)]
    BruteForce(#[from] BruteForceError),
    #[error("{0} is not certified: the check found no obstruction")]
    NotCertified(FamilyId),
}

const FIG222: &str = "\
nodes s1 s2 s3 v1 v2 w1 w2 t1 t2 t3
edge s1 v1 1
edge s1 v2 1
edge s2 v1 1
edge s2 v2 1
edge s3 v1 1
edge s3 v2 1
edge v1 w1 1
edge v2 w2 1
edge w1 t1 1
edge w1 t2 1
edge w1 t3 1
edge w2 t1 1
edge w2 t2 1
edge w2 t3 1
session s1 t1 1
session s2 t2 1
session s3 t3 1
";

const FIG113: &str = "\
nodes s1 s2 s3 v1 w a1 a2 a3 t1 t2 t3
edge s1 v1 1
edge s2 v1 1
edge v1 w 1
edge w t1 1
edge w t2 1
edge s3 a1 1
edge s3 a2 1
edge s3 a3 1
edge a1 t3 1
edge a2 t3 1
edge a3 t3 1
session s1 t1 1
session s2 t2 1
session s3 t3 1
";

// Edge names in comments follow the symbols each edge carries:
// y11 = u->h (also h->v, h->t2), y12 = v->x (also x->y, x->t1),
// y20 = s1->y, y21 = y->z (also z->w, z->t2), y22 = w->r (also r->t1, r->t2).
const FIG23_GRAPH: &str = "\
nodes s1 s2 u h v x y z w r t1 t2
edge s1 u 1
edge s1 y 1
edge s2 u 1
edge s2 v 1
edge s2 w 1
edge u h 1
edge h t2 1
edge h v 1
edge v x 1
edge x t1 1
edge x y 1
edge y z 1
edge z t2 1
edge z w 1
edge w r 1
edge r t1 1
edge r t2 1
";

/// The instance for `family`, with node names `s1, t1, ...` for endpoints.
pub fn generate(family: FamilyId) -> UnicastInstance {
    let text = match family {
        FamilyId::Fig222 => FIG222.to_string(),
        FamilyId::Fig113 => FIG113.to_string(),
        FamilyId::Fig23Rate21 => format!("{FIG23_GRAPH}session s1 t1 2\nsession s2 t2 1\n"),
        FamilyId::Corollary232 => {
            format!("{FIG23_GRAPH}session s1 t1 1\nsession s2 t2 1\nsession s1 t1 1\n")
        }
    };
    parse_instance(&text).expect("built-in instances parse")
}

/// Evidence that an instance has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// Sessions with source inside `nodes` and terminal outside demand more
    /// than the capacity leaving `nodes`.
    Cut {
        nodes: Vec<String>,
        capacity: u64,
        demand: u64,
    },
    /// No linear code over GF(p) on `t` time units lets every terminal decode.
    LinearInfeasible {
        p: u32,
        t: usize,
        method: Method,
        explored: u64,
    },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Cut {
                nodes,
                capacity,
                demand,
            } => {
                write!(
                    f,
                    "cut {{{}}} capacity {capacity} demand {demand}",
                    nodes.join(",")
                )
            }
            Certificate::LinearInfeasible {
                p,
                t,
                method,
                explored,
            } => {
                write!(
                    f,
                    "linear-infeasible p {p} time-units {t} method {method} explored {explored}"
                )
            }
        }
    }
}

/// Total rate of sessions separated by the source-side set `side`.
pub fn cut_demand(inst: &UnicastInstance, side: &[NodeId]) -> u64 {
    inst.sessions()
        .iter()
        .filter(|s| side.contains(&s.source) && !side.contains(&s.terminal))
        .map(|s| s.rate as u64)
        .sum()
}

/// Searches all node subsets (graphs of at most 20 nodes) for a cut whose
/// demand exceeds its capacity; picks the largest deficit, then the
/// smallest set, then the first in subset order.
pub fn find_violated_cut(inst: &UnicastInstance) -> Option<Certificate> {
    let g = inst.dag();
    let n = g.node_count();
    assert!(n <= 20, "cut enumeration is limited to 20 nodes");
    let mut best: Option<(i64, usize, Vec<NodeId>, u64, u64)> = None;
    for mask in 1u32..(1 << n) {
        let side: Vec<NodeId> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let demand = cut_demand(inst, &side);
        if demand == 0 {
            continue;
        }
        let capacity = cut_value(g, &side);
        let deficit = demand as i64 - capacity as i64;
        if deficit <= 0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some((d, len, ..)) => deficit > *d || (deficit == *d && side.len() < *len),
        };
        if better {
            best = Some((deficit, side.len(), side, capacity, demand));
        }
    }
    best.map(|(_, _, side, capacity, demand)| Certificate::Cut {
        nodes: side.iter().map(|&v| g.name(v).to_string()).collect(),
        capacity,
        demand,
    })
}

/// Certificate for `family`: its named cut for the cut families, exhaustive
/// linear search at `(p, t)` for the others.
pub fn certify(
    family: FamilyId,
    p: u32,
    t: usize,
    budget: &Budget,
) -> Result<Certificate, CounterexampleError> {
    let inst = generate(family);
    if let Some(names) = family.named_cut() {
        let g = inst.dag();
        let side: Vec<NodeId> = names
            .iter()
            .map(|n| g.node_by_name(n).expect("named cut nodes exist"))
            .collect();
        let capacity = cut_value(g, &side);
        let demand = cut_demand(&inst, &side);
        if demand <= capacity {
            return Err(CounterexampleError::NotCertified(family));
        }
        return Ok(Certificate::Cut {
            nodes: names.iter().map(|s| s.to_string()).collect(),
            capacity,
            demand,
        });
    }
    let out = brute_force_linear_feasibility(&inst, p, t, budget)?;
    if out.is_feasible() {
        return Err(CounterexampleError::NotCertified(family));
    }
    Ok(Certificate::LinearInfeasible {
        p,
        t,
        method: out.method,
        explored: out.explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_matches_labels() {
        for f in FamilyId::ALL {
            assert_eq!(generate(f).connectivity(), f.connectivity(), "{f}");
        }
    }

    #[test]
    fn named_cuts_are_violated() {
        let b = Budget::default();
        assert_eq!(
            certify(FamilyId::Fig222, 2, 1, &b).unwrap(),
            Certificate::Cut {
                nodes: vec![
                    "s1".into(),
                    "s2".into(),
                    "s3".into(),
                    "v1".into(),
                    "v2".into()
                ],
                capacity: 2,
                demand: 3
            }
        );
        let Certificate::Cut {
            capacity, demand, ..
        } = certify(FamilyId::Fig113, 2, 1, &b).unwrap()
        else {
            panic!("cut family")
        };
        assert_eq!((capacity, demand), (1, 2));
    }

    #[test]
    fn rate_family_passes_every_cut() {
        assert!(find_violated_cut(&generate(FamilyId::Fig23Rate21)).is_none());
        assert!(find_violated_cut(&generate(FamilyId::Fig222)).is_some());
    }

    #[test]
    fn family_names_parse() {
        for f in FamilyId::ALL {
            assert_eq!(f.name().parse::<FamilyId>().unwrap(), f);
        }
        assert!("fig999".parse::<FamilyId>().is_err());
    }
}
