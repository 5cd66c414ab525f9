//! Three unit sessions with connectivity `[1 2 5]`.
//!
//! Session 2's symbol is precoded so that its interference at terminal 1
//! vanishes, and session 3's precoding keeps its interference at terminal 2
//! aligned with session 1's. When the skeleton shows the two crossings on
//! separate session-2 paths, one edge of session 2's second path is recoded
//! to cancel session 1 at terminal 2 instead.

use rand_chacha::ChaCha8Rng;

use super::gprime::{find_gprime, Gprime};
use super::util::{
    count_vectors, escapes_span, first_in_span, in_edges, input_pos, out_edges, qpow, randomize,
    retry, transfer, Attempt,
};
use super::{check_connectivity, finish, ConstructionError, ConstructionResult, Ctx, Scheme};
use crate::coding::{lift_code, NetworkCode};
use crate::field::{dot, Field, FieldMatrix};
use crate::graph::{
    edge_disjoint_paths_masked, greedy_prune, max_flow_masked, Derivation, EdgeId, EdgeMask, Path,
};
use crate::instance::{Input, UnicastInstance};
use crate::verify::verify_decoding;

const BASE: [u32; 3] = [1, 2, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Aligned,
    Recoded,
}

pub(super) fn construct(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    let class = inst.classify()?;
    let mut target = vec![0; 3];
    for (k, &i) in class.order.iter().enumerate() {
        target[i] = BASE[k];
    }
    check_connectivity(inst, &target)?;
    let prepared = inst.prepare(&target);
    let mut ctx = Ctx::new(field, seed);
    let sessions = class
        .order
        .iter()
        .map(|&i| prepared.instance.session(i))
        .collect();
    let roles = prepared.instance.with_sessions(sessions)?;
    ctx.note(format!(
        "sessions by connectivity {:?}",
        class.order.map(|i| i + 1)
    ));

    let gp = find_gprime(&roles)?;
    ctx.note(format!("skeleton: {}", gp.case));
    let primary = if gp.case.is_general() {
        Variant::Aligned
    } else {
        Variant::Recoded
    };
    let code = match attempt(&roles, &gp, &mut ctx, primary) {
        Ok(code) => code,
        Err(first) => {
            let other = match primary {
                Variant::Aligned => Variant::Recoded,
                Variant::Recoded => Variant::Aligned,
            };
            ctx.note(format!(
                "{primary:?} scheme failed ({first}); trying {other:?}"
            ));
            attempt(&roles, &gp, &mut ctx, other).map_err(|_| first)?
        }
    };

    let map: Vec<usize> = class
        .order
        .iter()
        .map(|&i| prepared.instance.message_range(i).start)
        .collect();
    let code = lift_code(
        &roles,
        &code,
        &Derivation::identity(roles.dag()),
        &prepared.instance,
        &map,
    );
    let ids: Vec<usize> = (0..inst.message_count()).collect();
    finish(&prepared, &code, &ids, Scheme::Scheme125, 1, ctx)
}

fn attempt(
    inst: &UnicastInstance,
    gp: &Gprime,
    ctx: &mut Ctx,
    variant: Variant,
) -> Result<NetworkCode, ConstructionError> {
    let code = match variant {
        Variant::Aligned => aligned(inst, ctx)?,
        Variant::Recoded => recoded(inst, gp, ctx)?,
    };
    let report = verify_decoding(inst, &code)?;
    if report.all_decodable() {
        Ok(code)
    } else {
        Err(ConstructionError::VerificationFailed(report))
    }
}

/// Source out-edges in session order: 1, 2 and 5 of them.
fn injected_edges(inst: &UnicastInstance) -> Result<Vec<EdgeId>, ConstructionError> {
    let mut out = Vec::new();
    for (i, want) in BASE.iter().enumerate() {
        let edges = out_edges(inst, inst.session(i).source);
        if edges.len() != *want as usize {
            return Err(ConstructionError::Topology(format!(
                "source {} has {} out-edges, expected {want}",
                i + 1,
                edges.len()
            )));
        }
        out.extend(edges);
    }
    Ok(out)
}

/// Transfer blocks seen by one terminal: session 1, 2 and 3 columns.
struct Blocks {
    m1: FieldMatrix,
    m2: FieldMatrix,
    m3: FieldMatrix,
}

impl Blocks {
    fn of(m: FieldMatrix) -> Blocks {
        Blocks {
            m1: m.col_block(0..1),
            m2: m.col_block(1..3),
            m3: m.col_block(3..8),
        }
    }
}

/// Precoding for session 2: the kernel of terminal 1's session-2 gain, or
/// any vector when that gain is zero.
fn xi_basis(field: Field, beta: &FieldMatrix) -> FieldMatrix {
    if beta.is_zero() {
        FieldMatrix::identity(field, 2)
    } else {
        beta.null_space()
    }
}

fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Terminal 3 must see session 3 outside the span of the interference.
fn t3_ok(t3: &Blocks, xi: &[u32], theta: &[u32]) -> bool {
    let interference = t3.m1.hstack(&FieldMatrix::column_vector(
        t3.m1.field(),
        &t3.m2.mul_vec(xi),
    ));
    escapes_span(&interference, &t3.m3.mul_vec(theta))
}

fn set_sources(
    code: &mut NetworkCode,
    inst: &UnicastInstance,
    injected: &[EdgeId],
    xi: &[u32],
    theta: &[u32],
) -> Result<(), ConstructionError> {
    let coefs = std::iter::once((0usize, 1u32))
        .chain(xi.iter().map(|&c| (1, c)))
        .chain(theta.iter().map(|&c| (2, c)));
    for (&e, (session, c)) in injected.iter().zip(coefs) {
        let msg = inst.message_range(session).start;
        let pos = input_pos(inst, e, Input::Message(msg)).ok_or_else(|| {
            ConstructionError::Topology(format!("edge {e} cannot read session {}", session + 1))
        })?;
        let mut row = vec![0; inst.row_len(e)];
        row[pos] = c;
        code.set_row(e, row);
    }
    Ok(())
}

/// Random coding everywhere, with session 3 precoded so that its signal
/// at terminal 2 lies in the span of session 1's.
fn aligned(inst: &UnicastInstance, ctx: &mut Ctx) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let f = ctx.field;
    let injected = injected_edges(inst)?;
    let t_in: Vec<Vec<EdgeId>> = (0..3)
        .map(|i| in_edges(inst, inst.session(i).terminal))
        .collect();
    let random_edges: Vec<EdgeId> = (0..g.edge_count())
        .filter(|e| !injected.contains(e))
        .collect();

    struct Found {
        code: NetworkCode,
        xi: Vec<u32>,
        theta: Vec<u32>,
        constraints: FieldMatrix,
        t3: Blocks,
        note: String,
    }

    let found = retry(ctx, |_, rng: &mut ChaCha8Rng| -> Attempt<Found> {
        let mut code = NetworkCode::zero(inst, f);
        randomize(&mut code, inst, random_edges.iter().copied(), rng);
        let [t1, t2, t3] =
            [0, 1, 2].map(|i| transfer(inst, &code, &injected, &t_in[i]).map(Blocks::of));
        let (t1, t2, t3) = (t1?, t2?, t3?);
        if t1.m1.is_zero() {
            return Ok(Err("terminal-1 gain"));
        }
        let m21_zero = t2.m1.is_zero();
        let Some(xi) = first_in_span(f, &xi_basis(f, &t1.m2), |xi| {
            let d = t2.m2.mul_vec(xi);
            if m21_zero {
                !is_zero(&d)
            } else {
                t2.m1.hstack(&FieldMatrix::column_vector(f, &d)).rank() == 2
            }
        }) else {
            return Ok(Err("terminal-2 desired rank"));
        };
        let (second, note) = if m21_zero {
            let d = t2.m2.mul_vec(&xi);
            let r = d.iter().position(|&x| x != 0).expect("nonzero");
            (
                t2.m3.row(r).to_vec(),
                format!("no session-1 signal at terminal 2: session 3 silenced on its row {r}"),
            )
        } else {
            let u = t2.m1.left_null_space();
            (u.mul(&t2.m3).row(0).to_vec(), String::new())
        };
        let constraints = FieldMatrix::from_rows(f, &[t1.m3.row(0).to_vec(), second]);
        let Some(theta) = first_in_span(f, &constraints.null_space(), |th| t3_ok(&t3, &xi, th))
        else {
            return Ok(Err("terminal-3 span exclusion"));
        };
        let note = if note.is_empty() {
            let signal = t2.m3.mul_vec(&theta);
            let row = if t2.m1.get(1, 0) != 0 { 1 } else { 0 };
            let c = f.mul(signal[row], f.inv(t2.m1.get(row, 0)).expect("nonzero"));
            let swap = if row == 0 { " (rows swapped)" } else { "" };
            format!("session 3 aligned with session 1 at terminal 2 with factor {c}{swap}")
        } else {
            note
        };
        Ok(Ok(Found {
            code,
            xi,
            theta,
            constraints,
            t3,
            note,
        }))
    })?;

    ctx.note(found.note.clone());
    let mut code = found.code;
    set_sources(&mut code, inst, &injected, &found.xi, &found.theta)?;
    if ctx.count_choices() {
        let aligned = |th: &[u32]| is_zero(&found.constraints.mul_vec(th));
        let before = count_vectors(f, 5, aligned);
        ctx.record(
            "three-session aligned before terminal 3",
            before,
            qpow(f, 3) - 1,
            false,
        );
        let fin = count_vectors(f, 5, |th| aligned(th) && t3_ok(&found.t3, &found.xi, th));
        ctx.record(
            "three-session aligned final",
            fin,
            qpow(f, 3) - qpow(f, 2) - 1,
            false,
        );
    }
    Ok(code)
}

/// The pieces of the recoding scheme fixed by the graph alone.
struct Plan {
    active: EdgeMask,
    /// The recoded edge and its two inputs: off-path, then on-path.
    recode: EdgeId,
    inputs: [EdgeId; 2],
}

fn topo(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::Topology(msg.into())
}

fn plan(inst: &UnicastInstance, gp: &Gprime) -> Result<Plan, ConstructionError> {
    let g = inst.dag();
    let [_, e2, _, _] = gp
        .marks
        .ok_or_else(|| topo("skeleton has no crossing marks"))?;
    let (s1, t1) = (inst.session(0).source, inst.session(0).terminal);
    let (s3, t3) = (inst.session(2).source, inst.session(2).terminal);
    let t2 = inst.session(1).terminal;
    let host = gp
        .p2
        .iter()
        .position(|q| q.contains(e2))
        .expect("mark lies on session 2");
    let (p21, p22) = (&gp.p2[host], &gp.p2[1 - host]);
    let p3 = edge_disjoint_paths_masked(g, s3, t3, 5, None)
        .ok_or_else(|| topo("session 3 lacks five paths"))?;
    let on_p3 = |e: EdgeId| p3.iter().any(|q| q.contains(e));

    // (i) cut the host path below the s2-t1 crossing's exit, sparing session 3.
    let mut active = vec![true; g.edge_count()];
    let cut = p21.position(e2).expect("on host");
    for &e in &p21.edges[cut + 1..] {
        if !on_p3(e) {
            active[e] = false;
        }
    }

    // (ii) first edge of the other path that session 1 can reach.
    let reach1 = g.reachable_from(s1, Some(&active));
    let first_pos = p22
        .edges
        .iter()
        .position(|&e| reach1[g.tail(e)])
        .ok_or_else(|| topo("session 1 cannot reach the second session-2 path"))?;
    let e_first = p22.edges[first_pos];

    // (iii) prune below it while keeping a route to t2 and the other sessions.
    let below = {
        let reach = g.reachable_from(g.head(e_first), None);
        move |e: EdgeId| reach[g.tail(e)]
    };
    let keeps = |m: &EdgeMask| {
        g.reachable_from(g.head(e_first), Some(m))[t2]
            && max_flow_masked(g, s3, t3, Some(m), Some(5)).0 >= 5
            && max_flow_masked(g, s1, t1, Some(m), Some(1)).0 >= 1
    };
    if !keeps(&active) {
        return Err(topo("cutting the host path disconnects a session"));
    }
    let active = greedy_prune(g, active, below, keeps);
    let head = g.head(e_first);
    let tail_path = if head == t2 {
        Vec::new()
    } else {
        edge_disjoint_paths_masked(g, head, t2, 1, Some(&active))
            .expect("pruning kept the route")
            .paths
            .remove(0)
            .edges
    };
    let mut edges = p22.edges[..=first_pos].to_vec();
    edges.extend(tail_path);
    let p22 = Path::new(p22.id, edges);

    // (iv) the edge closest to t2 whose tail merges a session-1 signal.
    let reach1 = g.reachable_from(s1, Some(&active));
    let mut chosen = None;
    for k in (first_pos.max(1)..p22.edges.len()).rev() {
        let e = p22.edges[k];
        let prev = p22.edges[k - 1];
        let live: Vec<EdgeId> = g
            .in_edges(g.tail(e))
            .iter()
            .copied()
            .filter(|&x| active[x])
            .collect();
        let off: Vec<EdgeId> = live
            .iter()
            .copied()
            .filter(|&x| x != prev && reach1[g.tail(x)])
            .collect();
        if let Some(&other) = off.first() {
            if live.len() != 2 {
                return Err(topo(format!(
                    "recoded edge {e} has {} live inputs",
                    live.len()
                )));
            }
            chosen = Some((e, [other, prev]));
            break;
        }
    }
    let (recode, inputs) =
        chosen.ok_or_else(|| topo("no merge point on the second session-2 path"))?;
    if g.reachable_from(g.head(recode), Some(&active))[t1] {
        return Err(topo("recoded edge reaches terminal 1"));
    }
    Ok(Plan {
        active,
        recode,
        inputs,
    })
}

/// Recodes one edge of session 2's second path so that session 1 cancels
/// at terminal 2, after cutting session 2's first path below its crossing.
fn recoded(
    inst: &UnicastInstance,
    gp: &Gprime,
    ctx: &mut Ctx,
) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let f = ctx.field;
    let plan = plan(inst, gp)?;
    let injected = injected_edges(inst)?;
    let t1_in = in_edges(inst, inst.session(0).terminal);
    let t2_in: Vec<EdgeId> = in_edges(inst, inst.session(1).terminal)
        .into_iter()
        .filter(|&e| plan.active[e])
        .collect();
    if t2_in.len() != 1 {
        return Err(topo(format!(
            "terminal 2 keeps {} live inputs",
            t2_in.len()
        )));
    }
    let t3_in = in_edges(inst, inst.session(2).terminal);
    let random_edges: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| plan.active[e] && e != plan.recode && !injected.contains(&e))
        .collect();
    let [off, on] = plan.inputs;
    ctx.note(format!(
        "recoding edge {} from inputs {off} and {on}",
        plan.recode
    ));

    struct Found {
        code: NetworkCode,
        xi: Vec<u32>,
        theta: Vec<u32>,
        constraints: FieldMatrix,
        t3: Blocks,
        weights: [u32; 2],
    }

    let found = retry(ctx, |_, rng: &mut ChaCha8Rng| -> Attempt<Found> {
        let mut code = NetworkCode::zero(inst, f);
        randomize(&mut code, inst, random_edges.iter().copied(), rng);
        let t1 = Blocks::of(transfer(inst, &code, &injected, &t1_in)?);
        if t1.m1.is_zero() {
            return Ok(Err("terminal-1 gain"));
        }
        let inputs = transfer(inst, &code, &injected, &plan.inputs)?;
        let (a1, a2) = (inputs.get(0, 0), inputs.get(1, 0));
        if a1 == 0 && a2 == 0 {
            return Ok(Err("session-1 signal at the recoded edge"));
        }
        let weights = [a2, f.neg(a1)];
        let x2_gain = |xi: &[u32]| {
            let v0 = dot(f, &inputs.row(0)[1..3], xi);
            let v1 = dot(f, &inputs.row(1)[1..3], xi);
            f.add(f.mul(weights[0], v0), f.mul(weights[1], v1))
        };
        let Some(xi) = first_in_span(f, &xi_basis(f, &t1.m2), |xi| x2_gain(xi) != 0) else {
            return Ok(Err("session-2 signal at the recoded edge"));
        };
        let mut row = vec![0; inst.row_len(plan.recode)];
        for (k, &e) in plan.inputs.iter().enumerate() {
            let pos =
                input_pos(inst, plan.recode, Input::Edge(e)).expect("inputs feed the recoded edge");
            row[pos] = weights[k];
        }
        code.set_row(plan.recode, row);
        let cancelled = transfer(inst, &code, &injected, &[plan.recode])?;
        if cancelled.get(0, 0) != 0 {
            return Err(topo("recoded edge still carries session 1"));
        }
        let t2 = Blocks::of(transfer(inst, &code, &injected, &t2_in)?);
        if !t2.m1.is_zero() {
            return Err(topo("session 1 reaches terminal 2 around the recoded edge"));
        }
        if is_zero(&t2.m2.mul_vec(&xi)) {
            return Ok(Err("terminal-2 desired gain"));
        }
        let t3 = Blocks::of(transfer(inst, &code, &injected, &t3_in)?);
        let constraints =
            FieldMatrix::from_rows(f, &[t1.m3.row(0).to_vec(), t2.m3.row(0).to_vec()]);
        let Some(theta) = first_in_span(f, &constraints.null_space(), |th| t3_ok(&t3, &xi, th))
        else {
            return Ok(Err("terminal-3 span exclusion"));
        };
        Ok(Ok(Found {
            code,
            xi,
            theta,
            constraints,
            t3,
            weights,
        }))
    })?;

    ctx.note(format!(
        "session 1 cancelled on the recoded edge with weights {:?}",
        found.weights
    ));
    let mut code = found.code;
    set_sources(&mut code, inst, &injected, &found.xi, &found.theta)?;
    if ctx.count_choices() {
        let count = count_vectors(f, 5, |th| {
            is_zero(&found.constraints.mul_vec(th)) && t3_ok(&found.t3, &found.xi, th)
        });
        ctx.record(
            "three-session recoded final",
            count,
            qpow(f, 2) - f.modulus() as usize - 1,
            false,
        );
    }
    Ok(code)
}
