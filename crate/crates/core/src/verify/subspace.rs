use std::collections::HashSet;

use super::packed::{Packed, MAX_COORDS, MAX_PRIME};
use super::{verify_decoding, BruteForceError, BruteForceOutcome, Feasibility, Method};
use crate::coding::NetworkCode;
use crate::field::{Field, FieldMatrix};
use crate::graph::{EdgeId, NodeId};
use crate::instance::{Input, UnicastInstance};

/// All `d`-dimensional subspaces of the span of `basis` (independent
/// vectors), each as a canonical echelon basis.
fn subspaces(k: Packed, p: u32, basis: &[u64], d: usize) -> Vec<Vec<u64>> {
    let s = basis.len();
    if d == s {
        return vec![k.echelon(basis)];
    }
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // Free entries of a reduced echelon d x s matrix with these pivots.
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| {
                ((pivots[r] + 1)..s)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut vals = vec![0u32; free.len()];
        loop {
            let mut rows: Vec<u64> = pivots.iter().map(|&c| basis[c]).collect();
            for (&(r, c), &v) in free.iter().zip(&vals) {
                rows[r] = k.axpy(rows[r], v as u64, basis[c]);
            }
            out.push(k.echelon(&rows));
            if !super::odometer::next_digits(&mut vals, p) {
                break;
            }
        }
        // Next combination of pivot columns.
        let Some(i) = (0..d).rev().find(|&i| pivots[i] < s - d + i) else {
            break;
        };
        pivots[i] += 1;
        for j in i + 1..d {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
    out
}

/// Failed states kept for pruning; beyond this the search still completes,
/// only slower.
const MEMO_LIMIT: usize = 2_000_000;

struct Search<'a> {
    inst: &'a UnicastInstance,
    expanded: UnicastInstance,
    k: Packed,
    p: u32,
    t: usize,
    order: Vec<EdgeId>,
    pos_of: Vec<usize>,
    /// Nodes whose assigned in-edges still matter before assigning
    /// `order[pos]`: they have pending out-edges or are open terminals.
    live: Vec<Vec<NodeId>>,
    /// Message vectors of nodes that still have unassigned out-edges.
    pending_messages: Vec<Vec<u64>>,
    /// Sessions whose terminal is not yet complete before `order[pos]`.
    open_terminals: Vec<Vec<usize>>,
    checks: Vec<Vec<usize>>,
    spaces: Vec<Vec<u64>>,
    failed: Vec<HashSet<Vec<u64>>>,
    remembered: usize,
    explored: u64,
    budget: u64,
}

impl Search<'_> {
    fn messages_at(&self, v: usize) -> Vec<u64> {
        self.expanded
            .inputs(v)
            .iter()
            .filter_map(|inp| match *inp {
                Input::Message(m) => Some(self.k.unit(m)),
                Input::Edge(_) => None,
            })
            .collect()
    }

    fn available(&self, e: EdgeId) -> Vec<u64> {
        let g = self.inst.dag();
        let v = g.tail(e);
        let mut vs = self.messages_at(v);
        for &ie in g.in_edges(v) {
            vs.extend_from_slice(&self.spaces[ie]);
        }
        self.k.echelon(&vs)
    }

    /// Messages wanted at session `i`'s terminal, pooled over all sessions
    /// ending there: each session decodes exactly when all of them lie in
    /// the received span.
    fn desired(&self, i: usize) -> impl Iterator<Item = u64> + '_ {
        let t = self.inst.session(i).terminal;
        (0..self.inst.sessions().len())
            .filter(move |&j| self.inst.session(j).terminal == t)
            .flat_map(move |j| self.expanded.message_range(j))
            .map(|m| self.k.unit(m))
    }

    fn terminal_decodes(&self, i: usize) -> bool {
        let t = self.inst.session(i).terminal;
        let vs: Vec<u64> = self
            .inst
            .dag()
            .in_edges(t)
            .iter()
            .flat_map(|&e| self.spaces[e].clone())
            .collect();
        let basis = self.k.echelon(&vs);
        self.desired(i).all(|d| self.k.contains(&basis, d))
    }

    /// Span of the in-edges of `v` assigned before position `pos`.
    fn incoming(&self, v: NodeId, pos: usize) -> Vec<u64> {
        let vs: Vec<u64> = self
            .inst
            .dag()
            .in_edges(v)
            .iter()
            .filter(|&&e| self.pos_of[e] < pos)
            .flat_map(|&e| self.spaces[e].iter().copied())
            .collect();
        self.k.echelon(&vs)
    }

    /// Everything the rest of the search depends on: the incoming span of
    /// each live node, plus the space of a parallel predecessor edge.
    fn key(&self, pos: usize) -> Vec<u64> {
        let mut key = Vec::new();
        for &v in &self.live[pos] {
            let span = self.incoming(v, pos);
            key.push(span.len() as u64);
            key.extend_from_slice(&span);
        }
        if let Some(prev) = self.parallel_predecessor(pos) {
            key.push(u64::MAX);
            key.extend_from_slice(&self.spaces[prev]);
        }
        key
    }

    fn parallel_predecessor(&self, pos: usize) -> Option<EdgeId> {
        let g = self.inst.dag();
        let e = *self.order.get(pos)?;
        (pos > 0)
            .then(|| self.order[pos - 1])
            .filter(|&prev| g.tail(prev) == g.tail(e) && g.head(prev) == g.head(e))
    }

    /// Later edges carry vectors from the span of the live incoming spans and
    /// the messages at nodes with pending out-edges, and an open terminal
    /// gains at most `t` dimensions per unassigned in-edge.
    fn bound_allows(&self, pos: usize) -> bool {
        let mut vs = self.pending_messages[pos].clone();
        for &v in &self.live[pos] {
            vs.extend(self.incoming(v, pos));
        }
        let upper = self.k.echelon(&vs);
        self.open_terminals[pos].iter().all(|&i| {
            if !self.desired(i).all(|d| self.k.contains(&upper, d)) {
                return false;
            }
            let t = self.inst.session(i).terminal;
            let mut have = self.incoming(t, pos);
            let base = have.len();
            for d in self.desired(i) {
                self.k.insert(&mut have, d);
            }
            let missing_edges = self
                .inst
                .dag()
                .in_edges(t)
                .iter()
                .filter(|&&e| self.pos_of[e] >= pos)
                .count();
            have.len() - base <= missing_edges * self.t
        })
    }

    fn dfs(&mut self, pos: usize) -> Result<bool, BruteForceError> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(BruteForceError::BudgetExceeded {
                size: self.explored as u128,
                budget: self.budget as u128,
            });
        }
        if pos == self.order.len() {
            return Ok(true);
        }
        if !self.bound_allows(pos) {
            return Ok(false);
        }
        let key = self.key(pos);
        if self.failed[pos].contains(&key) {
            return Ok(false);
        }
        let e = self.order[pos];
        let avail = self.available(e);
        let d = avail.len().min(self.t);
        // Parallel edges are interchangeable; keep their spaces sorted.
        let floor = self
            .parallel_predecessor(pos)
            .map(|prev| self.spaces[prev].clone());
        for w in subspaces(self.k, self.p, &avail, d) {
            if floor.as_ref().is_some_and(|f| &w < f) {
                continue;
            }
            self.spaces[e] = w;
            let ok = self.checks[pos]
                .clone()
                .into_iter()
                .all(|i| self.terminal_decodes(i));
            if ok && self.dfs(pos + 1)? {
                return Ok(true);
            }
        }
        self.spaces[e].clear();
        if self.remembered < MEMO_LIMIT {
            self.remembered += 1;
            self.failed[pos].insert(key);
        }
        Ok(false)
    }

    /// Turns the chosen spaces into local coefficients on the expansion:
    /// copy `k` of an edge carries the `k`-th basis vector of its space.
    fn witness(&self, field: Field) -> NetworkCode {
        let ex = &self.expanded;
        let n = ex.message_count();
        let mut code = NetworkCode::unassigned(field, ex.dag().edge_count());
        let mut global: Vec<Vec<u32>> = vec![vec![0; n]; ex.dag().edge_count()];
        for &e in &self.order {
            let v = self.inst.dag().tail(e);
            let cols: Vec<Vec<u32>> = ex
                .inputs(v)
                .iter()
                .map(|inp| match *inp {
                    Input::Message(m) => {
                        let mut u = vec![0; n];
                        u[m] = 1;
                        u
                    }
                    Input::Edge(ie) => global[ie].clone(),
                })
                .collect();
            let a = FieldMatrix::from_rows_with_cols(field, &cols, n).transpose();
            for copy in 0..self.t {
                let id = e * self.t + copy;
                let row = match self.spaces[e].get(copy) {
                    Some(&w) => {
                        let target = self.k.to_vec(w);
                        let x = a
                            .solve(&FieldMatrix::column_vector(field, &target))
                            .expect("chosen space lies in the available span");
                        global[id] = target;
                        (0..a.cols()).map(|r| x.get(r, 0)).collect()
                    }
                    None => vec![0; a.cols()],
                };
                code.set_row(id, row);
            }
        }
        code
    }
}

/// Exact linear feasibility on the `t`-fold expansion of `inst` by choosing,
/// edge by edge in topological order, the subspace spanned by the edge's `t`
/// copies. Only subspaces of the largest possible dimension are tried: a
/// larger space at an edge leaves every downstream node strictly more to
/// work with, so some optimal code uses them. Failed search states are
/// remembered, parallel edges are taken in sorted order, and a prefix is cut
/// when some terminal's messages already lie outside everything still
/// reachable.
pub fn subspace_search(
    inst: &UnicastInstance,
    p: u32,
    t: usize,
    budget: u64,
) -> Result<BruteForceOutcome, BruteForceError> {
    let field = Field::new(p).map_err(|_| BruteForceError::Unsupported)?;
    let expanded = inst.time_expand(t);
    if p > MAX_PRIME || expanded.message_count() > MAX_COORDS {
        return Err(BruteForceError::Unsupported);
    }
    let g = inst.dag();
    let order = g.edges_in_topo_order();
    let m = order.len();
    let mut pos_of = vec![0; m];
    for (i, &e) in order.iter().enumerate() {
        pos_of[e] = i;
    }
    let k = Packed::new(p, expanded.message_count());
    let terminal_of: Vec<Option<usize>> = (0..g.node_count())
        .map(|v| inst.sessions().iter().position(|s| s.terminal == v))
        .collect();
    let last_out = |v: usize| {
        g.out_edges(v)
            .iter()
            .map(|&e| pos_of[e] as isize)
            .max()
            .unwrap_or(-1)
    };
    let last_in = |v: usize| {
        g.in_edges(v)
            .iter()
            .map(|&e| pos_of[e] as isize)
            .max()
            .unwrap_or(-1)
    };
    let mut search = Search {
        inst,
        expanded,
        k,
        p,
        t,
        order: order.clone(),
        pos_of: pos_of.clone(),
        live: Vec::new(),
        pending_messages: Vec::new(),
        open_terminals: Vec::new(),
        checks: vec![Vec::new(); m],
        spaces: vec![Vec::new(); m],
        failed: vec![HashSet::new(); m + 1],
        remembered: 0,
        explored: 0,
        budget,
    };
    let mut completion = Vec::new();
    for (i, s) in inst.sessions().iter().enumerate() {
        let l = last_in(s.terminal);
        if l < 0 {
            return Ok(BruteForceOutcome {
                feasibility: Feasibility::Infeasible,
                method: Method::Subspace,
                explored: 0,
            });
        }
        search.checks[l as usize].push(i);
        completion.push(l);
    }
    for pos in 0..=m {
        let live: Vec<NodeId> = (0..g.node_count())
            .filter(|&v| g.in_edges(v).iter().any(|&e| pos_of[e] < pos))
            .filter(|&v| {
                last_out(v) >= pos as isize
                    || (terminal_of[v].is_some() && last_in(v) >= pos as isize)
            })
            .collect();
        let msgs: Vec<u64> = (0..g.node_count())
            .filter(|&v| last_out(v) >= pos as isize)
            .flat_map(|v| search.messages_at(v))
            .collect();
        let open: Vec<usize> = (0..inst.sessions().len())
            .filter(|&i| completion[i] >= pos as isize)
            .collect();
        search.live.push(live);
        search.pending_messages.push(msgs);
        search.open_terminals.push(open);
    }
    let found = search.dfs(0)?;
    let feasibility = if found {
        let code = search.witness(field);
        debug_assert!(verify_decoding(&search.expanded, &code).is_ok_and(|r| r.all_decodable()));
        Feasibility::Feasible(code)
    } else {
        Feasibility::Infeasible
    };
    Ok(BruteForceOutcome {
        feasibility,
        method: Method::Subspace,
        explored: search.explored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_gaussian_binomials() {
        let k = Packed::new(2, 4);
        let basis: Vec<u64> = (0..4).map(|i| k.unit(i)).collect();
        // [4 choose 2]_2 = 35, [4 choose 1]_2 = 15.
        assert_eq!(subspaces(k, 2, &basis, 2).len(), 35);
        assert_eq!(subspaces(k, 2, &basis, 1).len(), 15);
        let all: HashSet<Vec<u64>> = subspaces(k, 2, &basis, 2).into_iter().collect();
        assert_eq!(all.len(), 35);
        let k3 = Packed::new(3, 3);
        let b3: Vec<u64> = (0..3).map(|i| k3.unit(i)).collect();
        // [3 choose 1]_3 = 13.
        assert_eq!(subspaces(k3, 3, &b3, 1).len(), 13);
    }
}
