use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::packed::{Packed, MAX_COORDS, MAX_PRIME};
use super::{BruteForceError, BruteForceOutcome, Feasibility, Method};
use crate::coding::NetworkCode;
use crate::field::Field;
use crate::graph::EdgeId;
use crate::instance::{Input, UnicastInstance};

/// `p` raised to the total number of local coefficients, saturating.
pub(super) fn space_size(inst: &UnicastInstance, p: u32) -> u128 {
    let coeffs: usize = (0..inst.dag().edge_count()).map(|e| inst.row_len(e)).sum();
    u32::try_from(coeffs)
        .ok()
        .and_then(|c| (p as u128).checked_pow(c))
        .unwrap_or(u128::MAX)
}

struct Walk<'a> {
    inst: &'a UnicastInstance,
    k: Packed,
    p: u32,
    order: Vec<EdgeId>,
    /// Sessions whose terminal is complete once `order[pos]` is assigned.
    checks: Vec<Vec<usize>>,
    explored: AtomicU64,
}

impl Walk<'_> {
    fn input_vectors(&self, e: EdgeId, global: &[u64]) -> Vec<u64> {
        self.inst
            .inputs(self.inst.dag().tail(e))
            .iter()
            .map(|inp| match *inp {
                Input::Message(m) => self.k.unit(m),
                Input::Edge(ie) => global[ie],
            })
            .collect()
    }

    fn terminal_decodes(&self, i: usize, global: &[u64]) -> bool {
        let t = self.inst.session(i).terminal;
        let received: Vec<u64> = self
            .inst
            .dag()
            .in_edges(t)
            .iter()
            .map(|&e| global[e])
            .collect();
        let basis = self.k.echelon(&received);
        self.inst
            .message_range(i)
            .all(|m| self.k.contains(&basis, self.k.unit(m)))
    }

    /// Assigns `row` to `order[pos]`; returns false if a completed terminal
    /// fails.
    fn apply(&self, pos: usize, row: &[u32], inputs: &[u64], global: &mut [u64]) -> bool {
        let v = row
            .iter()
            .zip(inputs)
            .fold(0, |acc, (&c, &x)| self.k.axpy(acc, c as u64, x));
        global[self.order[pos]] = v;
        self.checks[pos]
            .iter()
            .all(|&i| self.terminal_decodes(i, global))
    }

    fn dfs(&self, pos: usize, global: &mut [u64], rows: &mut [Vec<u32>]) -> bool {
        self.explored.fetch_add(1, Ordering::Relaxed);
        if pos == self.order.len() {
            return true;
        }
        let e = self.order[pos];
        let inputs = self.input_vectors(e, global);
        let mut row = vec![0u32; inputs.len()];
        loop {
            if self.apply(pos, &row, &inputs, global) && self.dfs(pos + 1, global, rows) {
                rows[e] = row;
                return true;
            }
            if !next_digits(&mut row, self.p) {
                return false;
            }
        }
    }
}

/// Advances `row` as a base-`p` odometer, last digit fastest.
pub(super) fn next_digits(row: &mut [u32], p: u32) -> bool {
    for d in row.iter_mut().rev() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

/// Walks every coefficient assignment of `inst` (already time-expanded) in
/// topological edge order, abandoning a prefix as soon as a terminal whose
/// in-edges are all assigned cannot decode. The rows of the first edge are
/// split across worker threads.
pub fn odometer_search(
    inst: &UnicastInstance,
    p: u32,
    budget: u128,
) -> Result<BruteForceOutcome, BruteForceError> {
    let field = Field::new(p).map_err(|_| BruteForceError::Unsupported)?;
    if p > MAX_PRIME || inst.message_count() > MAX_COORDS {
        return Err(BruteForceError::Unsupported);
    }
    let size = space_size(inst, p);
    if size > budget {
        return Err(BruteForceError::BudgetExceeded { size, budget });
    }
    let g = inst.dag();
    let order = g.edges_in_topo_order();
    let mut checks = vec![Vec::new(); order.len()];
    for (i, s) in inst.sessions().iter().enumerate() {
        let last = g
            .in_edges(s.terminal)
            .iter()
            .map(|&e| order.iter().position(|&x| x == e).unwrap())
            .max();
        match last {
            Some(pos) => checks[pos].push(i),
            None => {
                return Ok(BruteForceOutcome {
                    feasibility: Feasibility::Infeasible,
                    method: Method::Odometer,
                    explored: 0,
                })
            }
        }
    }
    let walk = Walk {
        inst,
        k: Packed::new(p, inst.message_count()),
        p,
        order,
        checks,
        explored: AtomicU64::new(0),
    };
    let edges = g.edge_count();
    let found = if walk.order.is_empty() {
        Some(Vec::new())
    } else {
        let first = walk.order[0];
        let inputs = walk.input_vectors(first, &vec![0; edges]);
        let mut first_rows = Vec::new();
        let mut row = vec![0u32; inputs.len()];
        loop {
            first_rows.push(row.clone());
            if !next_digits(&mut row, p) {
                break;
            }
        }
        first_rows.into_par_iter().find_map_first(|row| {
            let mut global = vec![0u64; edges];
            let mut rows = vec![Vec::new(); edges];
            walk.explored.fetch_add(1, Ordering::Relaxed);
            if walk.apply(0, &row, &inputs, &mut global) && walk.dfs(1, &mut global, &mut rows) {
                rows[first] = row;
                Some(rows)
            } else {
                None
            }
        })
    };
    let feasibility = match found {
        Some(rows) => {
            let mut code = NetworkCode::unassigned(field, edges);
            for (e, r) in rows.into_iter().enumerate() {
                code.set_row(e, r);
            }
            Feasibility::Feasible(code)
        }
        None => Feasibility::Infeasible,
    };
    Ok(BruteForceOutcome {
        feasibility,
        method: Method::Odometer,
        explored: walk.explored.into_inner(),
    })
}
