//! Rates 2 and 1 over connectivity `[2, 4]`.
//!
//! Session 1 has paths `P11`, `P12` carrying `X1`, `X2`; session 2 sends
//! `theta_j X3` on its four paths. `theta` is taken from the null space of
//! terminal 1's interference block, and among those the first vector whose
//! image at terminal 2 escapes the span of the session-1 columns wins.
//! When the last shared segments of `P11` and `P12` sit on one session-2
//! path, the downstream one is recoded to repeat its session-1 input so that
//! it carries the same signal as the previous segment along that path.

use super::one_m;
use super::util::{
    count_vectors, downstream_mask, escapes_span, first_in_span, in_edges, input_pos, qpow,
    randomize, retry, route_path, transfer, unit_row, Attempt,
};
use super::{check_connectivity, ConstructionError, Ctx};
use crate::coding::{lift_code, merge_codes, NetworkCode};
use crate::graph::{
    edge_disjoint_paths, last_overlap_segment, overlap_segments, segments_along, EdgeId,
    OverlapSegment, Path, PathSet,
};
use crate::instance::{Input, Session, UnicastInstance};

/// Code for a two-session instance with rates `(2, 1)` and connectivity at
/// least `[2, 4]` on a graph with internal degree at most three and private
/// session endpoints. The code lives on `inst`.
pub(super) fn solve(
    inst: &UnicastInstance,
    ctx: &mut Ctx,
) -> Result<NetworkCode, ConstructionError> {
    let target = [2, 4];
    check_connectivity(inst, &target)?;
    let (min, d) = inst.minimize_to(&target);
    let code = solve_minimal(&min, ctx)?;
    let ids: Vec<usize> = (0..inst.message_count()).collect();
    Ok(lift_code(&min, &code, &d, inst, &ids))
}

struct Setup<'a> {
    inst: &'a UnicastInstance,
    p1: [Path; 2],
    p2: PathSet,
    x: [usize; 2],
    x3: usize,
}

impl Setup<'_> {
    fn p1_set(&self) -> PathSet {
        PathSet::new(self.p1.to_vec())
    }

    fn overlap_free(&self, q: &Path) -> bool {
        self.p1.iter().all(|p| overlap_segments(p, q).is_empty())
    }

    /// `X1`, `X2` on their paths and `X3` on the overlap-free path `q`.
    fn route_all(&self, ctx: &mut Ctx, q: &Path) -> Result<NetworkCode, ConstructionError> {
        ctx.note(format!(
            "session-2 path {} is overlap free: routing every message",
            q.id
        ));
        let mut code = NetworkCode::zero(self.inst, ctx.field);
        route_path(&mut code, self.inst, &self.p1[0], self.x[0])?;
        route_path(&mut code, self.inst, &self.p1[1], self.x[1])?;
        route_path(&mut code, self.inst, q, self.x3)?;
        Ok(code)
    }

    /// Routes `X_k` on `P1k` and solves the rate `(1, 1)` problem for the
    /// other session-1 message on the edges in `keep`.
    fn split(
        &self,
        ctx: &mut Ctx,
        k: usize,
        keep: &[bool],
    ) -> Result<NetworkCode, ConstructionError> {
        let inst = self.inst;
        let mut routed = NetworkCode::zero(inst, ctx.field);
        route_path(&mut routed, inst, &self.p1[k], self.x[k])?;
        let (sub, d) = inst.subinstance(keep);
        let a = inst.session(0);
        let sub = sub.with_sessions(vec![Session { rate: 1, ..a }, inst.session(1)])?;
        let code = one_m::solve(&sub, ctx)?;
        let lifted = lift_code(&sub, &code, &d, inst, &[self.x[1 - k], self.x3]);
        Ok(merge_codes(inst, &[routed, lifted]))
    }
}

/// Neighboring segments along a session-1 path never share a session-2 path.
fn check_neighbors(p1: &[Path; 2], p2: &PathSet) -> Result<(), ConstructionError> {
    for p in p1 {
        let segs = segments_along(p, p2);
        if segs.windows(2).any(|w| w[0].paths.1 == w[1].paths.1) {
            return Err(ConstructionError::Topology(format!(
                "neighboring shared segments on session-1 path {} lie on one session-2 path",
                p.id
            )));
        }
    }
    Ok(())
}

fn solve_minimal(inst: &UnicastInstance, ctx: &mut Ctx) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let (a, b) = (inst.session(0), inst.session(1));
    let mut ps = edge_disjoint_paths(g, a.source, a.terminal, 2)
        .expect("connectivity checked")
        .paths;
    let p12 = ps.pop().expect("two paths");
    let p11 = ps.pop().expect("two paths");
    let p2 = edge_disjoint_paths(g, b.source, b.terminal, 4).expect("connectivity checked");
    let r = inst.message_range(0);
    let s = Setup {
        inst,
        p1: [p11, p12],
        p2,
        x: [r.start, r.start + 1],
        x3: inst.message_range(1).start,
    };
    check_neighbors(&s.p1, &s.p2)?;

    let last: Vec<Option<OverlapSegment>> =
        s.p1.iter()
            .map(|p| last_overlap_segment(p, &s.p2))
            .collect();
    for (k, seg) in last.iter().enumerate() {
        if seg.is_none() {
            ctx.note(format!(
                "session-1 path {} is overlap free: routing X{} and reducing the rest",
                k + 1,
                k + 1
            ));
            let keep: Vec<bool> = (0..g.edge_count()).map(|e| !s.p1[k].contains(e)).collect();
            return s.split(ctx, k, &keep);
        }
    }
    let er = last[0].clone().expect("checked");
    let eb = last[1].clone().expect("checked");
    if er.paths.1 != eb.paths.1 {
        distinct_hosts(&s, ctx, er, eb)
    } else {
        shared_host(&s, ctx, er, eb)
    }
}

fn last_of(s: &Setup, j: usize) -> Option<OverlapSegment> {
    last_overlap_segment(s.p2.by_id(j).expect("path id"), &s.p1_set())
}

fn distinct_hosts(
    s: &Setup,
    ctx: &mut Ctx,
    er: OverlapSegment,
    eb: OverlapSegment,
) -> Result<NetworkCode, ConstructionError> {
    let (hr, hb) = (er.paths.1, eb.paths.1);
    ctx.note(format!(
        "last shared segments of P11 and P12 lie on session-2 paths {hr} and {hb}"
    ));
    let others: Vec<&Path> = s.p2.iter().filter(|q| q.id != hr && q.id != hb).collect();
    if let Some(q) = others.iter().find(|q| s.overlap_free(q)) {
        return s.route_all(ctx, q);
    }
    let first_ok = last_of(s, hr).is_some_and(|x| x.edges == er.edges);
    let second_ok = last_of(s, hb).is_some_and(|x| x.edges == eb.edges);
    if !first_ok && !second_ok {
        return Err(ConstructionError::Topology(
            "neither last session-1 segment is last on its host".into(),
        ));
    }
    ctx.note(if first_ok {
        "the P11 segment is also last on its host"
    } else {
        "the P12 segment is also last on its host"
    });
    let mut check = vec![er.last(), eb.last()];
    check.extend(
        others
            .iter()
            .map(|q| last_of(s, q.id).expect("not overlap free").last()),
    );
    precode(
        s,
        ctx,
        &NetworkCode::zero(s.inst, ctx.field),
        &[],
        &check,
        "two-unicast-2-4 distinct hosts",
    )
}

fn shared_host(
    s: &Setup,
    ctx: &mut Ctx,
    er: OverlapSegment,
    eb: OverlapSegment,
) -> Result<NetworkCode, ConstructionError> {
    let inst = s.inst;
    let g = inst.dag();
    let host = s.p2.by_id(er.paths.1).expect("path id");
    // d indexes the session-1 path whose last segment is further down the host.
    let d = if host.position(eb.first()) > host.position(er.first()) {
        1
    } else {
        0
    };
    let u = 1 - d;
    let (down, up) = if d == 1 { (eb, er) } else { (er, eb) };
    ctx.note(format!(
        "last shared segments of P11 and P12 share session-2 path {}; P1{} is downstream",
        host.id,
        d + 1
    ));
    if last_overlap_segment(host, &s.p1_set()).map(|x| x.edges) != Some(down.edges.clone()) {
        return Err(ConstructionError::Topology(
            "downstream segment is not last on the shared host".into(),
        ));
    }
    let along = segments_along(&s.p1[d], &s.p2);
    let idx = along
        .iter()
        .position(|x| x.edges == down.edges)
        .expect("segment lies on its path");
    if idx == 0 {
        ctx.note(format!(
            "P1{} has a single shared segment: routing X{} and reducing the rest",
            d + 1,
            d + 1
        ));
        let keep: Vec<bool> = (0..g.edge_count())
            .map(|e| s.p1[u].contains(e) || s.p2.iter().any(|q| q.id != host.id && q.contains(e)))
            .collect();
        return s.split(ctx, d, &keep);
    }
    let prev = &along[idx - 1];
    if prev.paths.1 == host.id {
        return Err(ConstructionError::Topology(
            "previous segment shares the host path".into(),
        ));
    }
    let others: Vec<&Path> =
        s.p2.iter()
            .filter(|q| q.id != host.id && q.id != prev.paths.1)
            .collect();
    if let Some(q) = others.iter().find(|q| s.overlap_free(q)) {
        return s.route_all(ctx, q);
    }
    ctx.note(format!(
        "recoding the downstream segment to repeat P1{}",
        d + 1
    ));

    // Fixed rows: the downstream segment copies its session-1 input; every
    // edge below it forwards its single input.
    let pos = s.p1[d].position(down.first()).expect("segment on path");
    let feed = s.p1[d].edges[pos - 1];
    let mut fixed = NetworkCode::zero(inst, ctx.field);
    let below = downstream_mask(g, down.first());
    let mut fixed_edges = Vec::new();
    for e in (0..g.edge_count()).filter(|&e| below[e]) {
        let row = if e == down.first() {
            unit_row(inst, e, Input::Edge(feed))?
        } else if inst.row_len(e) == 1 {
            vec![1]
        } else {
            return Err(ConstructionError::Topology(format!(
                "edge {e} below the recoded segment merges signals"
            )));
        };
        fixed.set_row(e, row);
        fixed_edges.push(e);
    }
    let mut check = vec![up.last(), prev.last()];
    check.extend(
        others
            .iter()
            .map(|q| last_of(s, q.id).expect("not overlap free").last()),
    );
    precode(
        s,
        ctx,
        &fixed,
        &fixed_edges,
        &check,
        "two-unicast-2-4 shared host",
    )
}

/// Random rows everywhere except the source edges and `fixed_edges`, then
/// the precoding search. `check` lists four edges, one per session-2 path,
/// whose session-2 block must be invertible.
fn precode(
    s: &Setup,
    ctx: &mut Ctx,
    fixed: &NetworkCode,
    fixed_edges: &[EdgeId],
    check: &[EdgeId],
    label: &'static str,
) -> Result<NetworkCode, ConstructionError> {
    let inst = s.inst;
    let g = inst.dag();
    let f = ctx.field;
    let mut injected = vec![s.p1[0].first(), s.p1[1].first()];
    injected.extend(s.p2.iter().map(|q| q.first()));
    let random_edges: Vec<EdgeId> = (0..g.edge_count())
        .filter(|e| !injected.contains(e) && !fixed_edges.contains(e))
        .collect();
    let t1_in = in_edges(inst, inst.session(0).terminal);
    let t2_in = in_edges(inst, inst.session(1).terminal);

    let (mut code, theta, m12, m21, m22) = retry(ctx, |_, rng| -> Attempt<_> {
        let mut code = fixed.clone();
        randomize(&mut code, inst, random_edges.iter().copied(), rng);
        let t1 = transfer(inst, &code, &injected, &t1_in)?;
        if t1.col_block(0..2).rank() < 2 {
            return Ok(Err("terminal-1 direct rank"));
        }
        if transfer(inst, &code, &injected, check)?
            .col_block(2..6)
            .rank()
            < 4
        {
            return Ok(Err("session-2 rank at last segments"));
        }
        let m12 = t1.col_block(2..6);
        let t2 = transfer(inst, &code, &injected, &t2_in)?;
        let (m21, m22) = (t2.col_block(0..2), t2.col_block(2..6));
        let null = m12.null_space();
        match first_in_span(f, &null, |th| escapes_span(&m21, &m22.mul_vec(th))) {
            Some(theta) => Ok(Ok((code, theta, m12, m21, m22))),
            None => Ok(Err("terminal-2 span exclusion")),
        }
    })?;
    ctx.note(format!("theta = {theta:?}"));

    for k in 0..2 {
        let e = s.p1[k].first();
        code.set_row(e, unit_row(inst, e, Input::Message(s.x[k]))?);
    }
    for (q, &t) in s.p2.iter().zip(&theta) {
        let e = q.first();
        let mut row = vec![0; inst.row_len(e)];
        row[input_pos(inst, e, Input::Message(s.x3)).expect("source reads X3")] = t;
        code.set_row(e, row);
    }
    if ctx.count_choices() {
        let count = count_vectors(f, 4, |th| {
            m12.mul_vec(th).iter().all(|&v| v == 0) && escapes_span(&m21, &m22.mul_vec(th))
        });
        ctx.record(label, count, qpow(f, 2) - qpow(f, 1) - 1, false);
    }
    Ok(code)
}
