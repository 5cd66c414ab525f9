//! Rates 1 and `m` over connectivity `[1, m+1]`.
//!
//! The `m+1` paths of session 2 that touch session 1's path carry a coded
//! part of session 2; the remaining paths route the rest. The precoding
//! zeroes the coded signal on the session-2 path whose last shared segment
//! with session 1's path comes last, which is exactly the signal that also
//! reaches terminal 1.

use super::util::{
    count_vectors, in_edges, input_pos, mask_of, out_edges, randomize, retry, route_path, transfer,
    unit_row, Attempt,
};
use super::{check_connectivity, ConstructionError, Ctx};
use crate::coding::{lift_code, NetworkCode};
use crate::field::FieldMatrix;
use crate::graph::{edge_disjoint_paths, last_overlap_segment, overlap_segments, PathSet};
use crate::instance::{Input, UnicastInstance};

/// Code for a two-session instance with rates `(1, m)` and connectivity at
/// least `[1, m+1]`; internal nodes must have degree at most three and
/// session endpoints must be private. The code lives on `inst`.
pub(super) fn solve(
    inst: &UnicastInstance,
    ctx: &mut Ctx,
) -> Result<NetworkCode, ConstructionError> {
    let m = inst.session(1).rate;
    let target = [1, m + 1];
    check_connectivity(inst, &target)?;
    let (min, d) = inst.minimize_to(&target);
    let code = solve_minimal(&min, ctx)?;
    let ids: Vec<usize> = (0..inst.message_count()).collect();
    Ok(lift_code(&min, &code, &d, inst, &ids))
}

fn solve_minimal(inst: &UnicastInstance, ctx: &mut Ctx) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let f = ctx.field;
    let (a, b) = (inst.session(0), inst.session(1));
    let m = b.rate as usize;
    let p1 = edge_disjoint_paths(g, a.source, a.terminal, 1)
        .expect("connectivity checked")
        .paths
        .remove(0);
    let p2 =
        edge_disjoint_paths(g, b.source, b.terminal, m as u32 + 1).expect("connectivity checked");
    let (overlapping, free): (Vec<_>, Vec<_>) = p2
        .iter()
        .cloned()
        .partition(|q| !overlap_segments(&p1, q).is_empty());
    let n = overlapping.len();
    let x1 = inst.message_range(0).start;
    let x2: Vec<usize> = inst.message_range(1).collect();

    let mut base = NetworkCode::zero(inst, f);
    if n == 0 {
        ctx.note("session-1 path is overlap free: routing every message");
        route_path(&mut base, inst, &p1, x1)?;
        for (q, &msg) in free.iter().zip(&x2) {
            route_path(&mut base, inst, q, msg)?;
        }
        return Ok(base);
    }
    // The first n-1 session-2 messages are coded, the rest are routed.
    let coded = &x2[..n - 1];
    for (q, &msg) in free.iter().zip(&x2[n - 1..]) {
        route_path(&mut base, inst, q, msg)?;
    }
    if n < m + 1 {
        ctx.note(format!(
            "{} of {} session-2 paths are overlap free: routing {} messages, coding {}",
            m + 1 - n,
            m + 1,
            m + 1 - n,
            n - 1
        ));
    }

    let overlapping = PathSet::new(overlapping);
    let last = last_overlap_segment(&p1, &overlapping).expect("n > 0");
    let host = overlapping
        .by_id(last.paths.1)
        .expect("segment names its path");
    let on_host =
        last_overlap_segment(host, &PathSet::new(vec![p1.clone()])).expect("host overlaps");
    if on_host.edges != last.edges {
        return Err(ConstructionError::Topology(
            "last shared segment on the session-1 path is not last on its host path".into(),
        ));
    }
    let r0 = overlapping
        .iter()
        .position(|q| q.id == host.id)
        .expect("host is overlapping");
    ctx.note(format!(
        "zero row {r0} of {n} aligns the coded signal away from terminal 1"
    ));

    let coded_mask = mask_of(
        g.edge_count(),
        std::iter::once(&p1).chain(overlapping.iter()),
    );
    let mut injected = vec![p1.first()];
    injected.extend(overlapping.iter().map(|q| q.first()));
    let t1_in = in_edges(inst, a.terminal);
    let t2_rows: Vec<_> = overlapping.iter().map(|q| q.last()).collect();
    let random_edges: Vec<_> = (0..g.edge_count())
        .filter(|&e| coded_mask[e] && !injected.contains(&e))
        .collect();

    // Target for M22 * Theta: zero at the host row, identity elsewhere.
    let mut target = FieldMatrix::zeros(f, n, n - 1);
    for (k, r) in (0..n).filter(|&r| r != r0).enumerate() {
        target.set(r, k, 1);
    }

    let (code, theta, m22) = retry(ctx, |_, rng| -> Attempt<_> {
        let mut code = base.clone();
        randomize(&mut code, inst, random_edges.iter().copied(), rng);
        let t1 = transfer(inst, &code, &injected, &t1_in)?;
        if t1.get(0, 0) == 0 {
            return Ok(Err("terminal-1 gain"));
        }
        let m22 = transfer(inst, &code, &injected, &t2_rows)?.col_block(1..n + 1);
        if m22.rank() < n {
            return Ok(Err("session-2 transfer rank"));
        }
        let theta = m22.solve(&target).expect("full-rank system");
        let leak = t1.col_block(1..n + 1).mul(&theta);
        if !leak.is_zero() {
            return Err(ConstructionError::Topology(
                "precoding leaks into terminal 1".into(),
            ));
        }
        Ok(Ok((code, theta, m22)))
    })?;

    let mut code = code;
    code.set_row(p1.first(), unit_row(inst, p1.first(), Input::Message(x1))?);
    let src_out = out_edges(inst, b.source);
    for (j, q) in overlapping.iter().enumerate() {
        let e = q.first();
        debug_assert!(src_out.contains(&e));
        let mut row = vec![0; inst.row_len(e)];
        for (k, &msg) in coded.iter().enumerate() {
            let pos = input_pos(inst, e, Input::Message(msg)).expect("source reads its messages");
            row[pos] = theta.get(j, k);
        }
        code.set_row(e, row);
    }

    if ctx.count_choices() {
        let q = f.modulus() as usize;
        for k in 0..n - 1 {
            let row = (0..n).filter(|&r| r != r0).nth(k).expect("column row");
            let count = count_vectors(f, n, |th| {
                let img = m22.mul_vec(th);
                img.iter().enumerate().all(|(r, &v)| (r == row) == (v != 0))
            });
            ctx.record("two-unicast-1-m column", count, q - 1, true);
        }
    }
    Ok(code)
}
