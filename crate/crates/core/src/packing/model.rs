//! Routing and packing programs over enumerated session paths.
//!
//! Variables are the common rate `r`, one activation count per embedding and
//! one flow per session path. Every embedding delivers one unit to each
//! session per activation and consumes one unit on each of its edges.

use num_traits::{ToPrimitive, Zero};

use super::lp::{q, Lp, LpOutcome, LpSolution, Q};
use super::{PackingError, StructureEmbedding};
use crate::graph::{simple_paths, EdgeId};
use crate::instance::UnicastInstance;

/// Most paths listed per session before the path formulation is refused.
pub const PATH_CAP: usize = 20_000;

/// Default branch-and-bound node budget.
pub const NODE_BUDGET: usize = 20_000;

#[derive(Debug, Clone)]
pub struct PackingModel {
    capacity: Vec<i64>,
    /// `paths[i]` lists the edge sequences of session `i`.
    paths: Vec<Vec<Vec<EdgeId>>>,
    /// Edge sets of the embeddings with integer activations.
    embeddings: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedResult {
    pub rate: Q,
    /// Pure routing rate, the search's starting incumbent.
    pub routed: Q,
    /// Activation count per embedding, in input order.
    pub activations: Vec<u32>,
    /// False when the node budget ran out before the search finished.
    pub optimal: bool,
    pub nodes: usize,
}

impl PackingModel {
    pub fn new(inst: &UnicastInstance, embeddings: Vec<Vec<EdgeId>>) -> Result<Self, PackingError> {
        let g = inst.dag();
        let full = vec![true; g.edge_count()];
        let mut paths = Vec::with_capacity(inst.sessions().len());
        for (i, s) in inst.sessions().iter().enumerate() {
            let (list, complete) = simple_paths(g, s.source, s.terminal, &full, PATH_CAP);
            if !complete {
                return Err(PackingError::TooManyPaths {
                    session: i,
                    cap: PATH_CAP,
                });
            }
            paths.push(list);
        }
        Ok(PackingModel {
            capacity: g.edges().iter().map(|e| i64::from(e.capacity)).collect(),
            paths,
            embeddings,
        })
    }

    pub fn embedding_count(&self) -> usize {
        self.embeddings.len()
    }

    /// Most activations embedding `k` can receive on its own.
    pub fn activation_bound(&self, k: usize) -> u32 {
        self.embeddings[k]
            .iter()
            .map(|&e| self.capacity[e])
            .min()
            .unwrap_or(0)
            .try_into()
            .expect("capacities fit u32")
    }

    fn path_vars(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }

    /// The fractional relaxation with activation `k` confined to
    /// `lower[k] ..= upper[k]`. Variable 0 is the rate, then activations
    /// shifted by their lower bounds, then path flows. `None` when the
    /// lower bounds alone overrun some capacity.
    pub fn relaxation(&self, lower: &[u32], upper: &[u32]) -> Option<Lp> {
        let m = self.embeddings.len();
        let first_path = 1 + m;
        let mut lp = Lp::new(first_path + self.path_vars());
        lp.objective[0] = q(1);
        let mut residual = self.capacity.clone();
        let mut terms: Vec<Vec<(usize, Q)>> = vec![Vec::new(); residual.len()];
        for (k, edges) in self.embeddings.iter().enumerate() {
            for &e in edges {
                residual[e] -= i64::from(lower[k]);
                terms[e].push((1 + k, q(1)));
            }
        }
        if residual.iter().any(|&c| c < 0) {
            return None;
        }
        let mut var = first_path;
        let mut session_terms = Vec::with_capacity(self.paths.len());
        for list in &self.paths {
            let mut st = vec![(0, q(1))];
            for path in list {
                for &e in path {
                    terms[e].push((var, q(1)));
                }
                st.push((var, q(-1)));
                var += 1;
            }
            session_terms.push(st);
        }
        for (e, t) in terms.into_iter().enumerate() {
            if !t.is_empty() {
                lp.add_row(t, q(residual[e]));
            }
        }
        let base: i64 = lower.iter().map(|&l| i64::from(l)).sum();
        for mut st in session_terms {
            st.extend((0..m).map(|k| (1 + k, q(-1))));
            lp.add_row(st, q(base));
        }
        for k in 0..m {
            lp.add_row(
                [(1 + k, q(1))],
                q(i64::from(upper[k]) - i64::from(lower[k])),
            );
        }
        Some(lp)
    }

    /// Pure fractional routing on capacities reduced by `used`, with each
    /// session already served `base` units.
    pub fn residual_routing(&self, used: &[i64], base: i64) -> Option<Lp> {
        let mut lp = Lp::new(1 + self.path_vars());
        lp.objective[0] = q(1);
        let mut terms: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.capacity.len()];
        let mut var = 1;
        let mut sessions = Vec::new();
        for list in &self.paths {
            let mut st = vec![(0, q(1))];
            for path in list {
                path.iter().for_each(|&e| terms[e].push((var, q(1))));
                st.push((var, q(-1)));
                var += 1;
            }
            sessions.push(st);
        }
        for (e, t) in terms.into_iter().enumerate() {
            let room = self.capacity[e] - used[e];
            if room < 0 {
                return None;
            }
            if !t.is_empty() {
                lp.add_row(t, q(room));
            }
        }
        for st in sessions {
            lp.add_row(st, q(base));
        }
        Some(lp)
    }

    pub fn routing(&self) -> Q {
        let lp = self
            .residual_routing(&vec![0; self.capacity.len()], 0)
            .expect("no usage");
        optimum(&lp).value
    }

    /// Integer activations plus fractional routing, by depth-first
    /// branch-and-bound on the activation counts.
    pub fn packed(&self, budget: usize) -> PackedResult {
        let m = self.embeddings.len();
        let routed = self.routing();
        let mut best = PackedResult {
            rate: routed.clone(),
            routed,
            activations: vec![0; m],
            optimal: true,
            nodes: 0,
        };
        let upper: Vec<u32> = (0..m).map(|k| self.activation_bound(k)).collect();
        let mut stack = vec![(vec![0u32; m], upper)];
        while let Some((lo, hi)) = stack.pop() {
            if best.nodes == budget {
                best.optimal = false;
                break;
            }
            best.nodes += 1;
            let Some(lp) = self.relaxation(&lo, &hi) else {
                continue;
            };
            let sol = optimum(&lp);
            if sol.value <= best.rate {
                continue;
            }
            let counts: Vec<Q> = (0..m)
                .map(|k| &sol.x[1 + k] + q(i64::from(lo[k])))
                .collect();
            match counts.iter().position(|a| !a.is_integer()) {
                None => {
                    best.rate = sol.value;
                    best.activations = counts
                        .iter()
                        .map(|a| a.to_integer().to_u32().expect("small"))
                        .collect();
                }
                Some(k) => {
                    let floor = counts[k].floor().to_integer().to_u32().expect("small");
                    let mut down = (lo.clone(), hi.clone());
                    down.1[k] = floor;
                    let mut up = (lo, hi);
                    up.0[k] = floor + 1;
                    stack.push(down);
                    stack.push(up);
                }
            }
        }
        best
    }

    /// Best packing found by trying every activation vector within the
    /// per-embedding bounds and routing on what is left. `None` when there
    /// are more than `limit` vectors.
    pub fn exhaustive(&self, limit: usize) -> Option<(Q, Vec<u32>)> {
        let bounds: Vec<u32> = (0..self.embeddings.len())
            .map(|k| self.activation_bound(k))
            .collect();
        let mut points: usize = 1;
        for &b in &bounds {
            points = points.checked_mul(b as usize + 1).filter(|&p| p <= limit)?;
        }
        let mut a = vec![0u32; bounds.len()];
        let mut best: Option<(Q, Vec<u32>)> = None;
        loop {
            let mut used = vec![0i64; self.capacity.len()];
            for (k, edges) in self.embeddings.iter().enumerate() {
                edges.iter().for_each(|&e| used[e] += i64::from(a[k]));
            }
            let base: i64 = a.iter().map(|&x| i64::from(x)).sum();
            if let Some(lp) = self.residual_routing(&used, base) {
                let v = optimum(&lp).value;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, a.clone()));
                }
            }
            // Odometer step.
            let mut k = 0;
            loop {
                if k == a.len() {
                    return best;
                }
                if a[k] < bounds[k] {
                    a[k] += 1;
                    break;
                }
                a[k] = 0;
                k += 1;
            }
        }
    }
}

/// Every program built here is bounded (the rate is capped by path
/// capacities and activation bounds) and feasible at the origin.
pub(crate) fn optimum(lp: &Lp) -> LpSolution {
    match lp.solve() {
        LpOutcome::Optimal(s) => s,
        other => panic!("packing program is bounded and feasible, got {other:?}"),
    }
}

pub fn routing_throughput(inst: &UnicastInstance) -> Result<Q, PackingError> {
    Ok(PackingModel::new(inst, Vec::new())?.routing())
}

/// Packs the embeddings that routing cannot already match; the others are
/// reported with zero activations.
pub fn packed_throughput(
    inst: &UnicastInstance,
    embeddings: &[StructureEmbedding],
) -> Result<PackedResult, PackingError> {
    packed_throughput_with_budget(inst, embeddings, NODE_BUDGET)
}

pub fn packed_throughput_with_budget(
    inst: &UnicastInstance,
    embeddings: &[StructureEmbedding],
    budget: usize,
) -> Result<PackedResult, PackingError> {
    let useful: Vec<usize> = (0..embeddings.len())
        .filter(|&k| !embeddings[k].routable)
        .collect();
    let model = PackingModel::new(
        inst,
        useful
            .iter()
            .map(|&k| embeddings[k].edges.clone())
            .collect(),
    )?;
    let inner = model.packed(budget);
    let mut activations = vec![0; embeddings.len()];
    for (&k, &a) in useful.iter().zip(&inner.activations) {
        activations[k] = a;
    }
    Ok(PackedResult {
        activations,
        ..inner
    })
}

/// Relative gain of `packed` over `routed`.
pub fn improvement(routed: &Q, packed: &Q) -> Q {
    if routed.is_zero() {
        return Q::zero();
    }
    (packed - routed) / routed
}
