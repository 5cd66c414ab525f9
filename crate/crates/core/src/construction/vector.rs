//! Three unit sessions coded over several time units: every edge becomes
//! parallel copies and each copy carries an independent two-session code
//! (or plain routing).

use super::util::route_path;
use super::{
    check_connectivity, finish, one_m, two_four, ConstructionError, ConstructionResult, Ctx, Scheme,
};
use crate::coding::{lift_code, merge_codes, NetworkCode};
use crate::field::Field;
use crate::graph::edge_disjoint_paths_masked;
use crate::instance::{Session, UnicastInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Kind {
    Routing,
    OneThreeThree,
    TwoTwoFour,
}

impl Kind {
    fn base(self) -> [u32; 3] {
        match self {
            Kind::Routing => [3, 3, 3],
            Kind::OneThreeThree => [1, 3, 3],
            Kind::TwoTwoFour => [2, 2, 4],
        }
    }

    fn time_units(self) -> usize {
        match self {
            Kind::Routing => 3,
            _ => 2,
        }
    }

    fn scheme(self) -> Scheme {
        match self {
            Kind::Routing => Scheme::Routing,
            Kind::OneThreeThree => Scheme::Scheme133,
            Kind::TwoTwoFour => Scheme::Scheme224,
        }
    }
}

pub(super) fn construct(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
    kind: Kind,
) -> Result<ConstructionResult, ConstructionError> {
    let class = inst.classify()?;
    let base = kind.base();
    let mut target = vec![0; 3];
    for (k, &i) in class.order.iter().enumerate() {
        target[i] = base[k];
    }
    check_connectivity(inst, &target)?;
    let t = kind.time_units();
    let prepared = inst.prepare(&target).time_expand(t);
    let mut ctx = Ctx::new(field, seed);
    ctx.note(format!(
        "sessions by connectivity {:?}; coding over {t} time units",
        class.order.map(|i| i + 1)
    ));
    let code = match kind {
        Kind::Routing => routing(&prepared.instance, &mut ctx)?,
        _ => two_copies(&prepared.instance, &mut ctx, kind, class.order)?,
    };
    let ids: Vec<usize> = (0..inst.message_count() * t).collect();
    finish(&prepared, &code, &ids, kind.scheme(), t, ctx)
}

/// Copy `k` of every edge carries the three symbols of session `k`.
fn routing(inst: &UnicastInstance, ctx: &mut Ctx) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let t = 3;
    let mut code = NetworkCode::zero(inst, ctx.field);
    for (k, s) in inst.sessions().iter().enumerate() {
        let mask: Vec<bool> = (0..g.edge_count()).map(|e| e % t == k).collect();
        let paths = edge_disjoint_paths_masked(g, s.source, s.terminal, 3, Some(&mask))
            .ok_or_else(|| {
                ConstructionError::Topology(format!(
                    "copy {k} lacks three paths for session {}",
                    k + 1
                ))
            })?;
        for (path, msg) in paths.iter().zip(inst.message_range(k)) {
            route_path(&mut code, inst, path, msg)?;
        }
    }
    ctx.note("each session routed on its own copy");
    Ok(code)
}

/// Copy 0 serves sessions `(a, b)` and copy 1 sessions `(a, c)` for the
/// class `[1 3 3]`; for `[2 2 4]` copy 0 serves `(a, c)` and copy 1 `(b, c)`.
fn two_copies(
    inst: &UnicastInstance,
    ctx: &mut Ctx,
    kind: Kind,
    order: [usize; 3],
) -> Result<NetworkCode, ConstructionError> {
    let g = inst.dag();
    let [a, b, c] = order;
    let slot = |i: usize, t: usize| inst.message_range(i).start + t;
    let both = |i: usize| vec![slot(i, 0), slot(i, 1)];
    // (first session, its messages, second session, its messages)
    let plans: [(usize, Vec<usize>, usize, Vec<usize>); 2] = match kind {
        Kind::OneThreeThree => [
            (a, vec![slot(a, 0)], b, both(b)),
            (a, vec![slot(a, 1)], c, both(c)),
        ],
        Kind::TwoTwoFour => [
            (a, both(a), c, vec![slot(c, 0)]),
            (b, both(b), c, vec![slot(c, 1)]),
        ],
        Kind::Routing => unreachable!("routing has its own plan"),
    };
    let mut codes = Vec::new();
    for (copy, (i, mi, j, mj)) in plans.into_iter().enumerate() {
        let keep: Vec<bool> = (0..g.edge_count()).map(|e| e % 2 == copy).collect();
        let (sub, d) = inst.subinstance(&keep);
        let sessions = vec![
            Session {
                rate: mi.len() as u32,
                ..inst.session(i)
            },
            Session {
                rate: mj.len() as u32,
                ..inst.session(j)
            },
        ];
        let sub = sub.with_sessions(sessions)?;
        ctx.note(format!("copy {copy}: sessions {} and {}", i + 1, j + 1));
        let code = match kind {
            Kind::OneThreeThree => one_m::solve(&sub, ctx)?,
            _ => two_four::solve(&sub, ctx)?,
        };
        let map: Vec<usize> = mi.into_iter().chain(mj).collect();
        codes.push(lift_code(&sub, &code, &d, inst, &map));
    }
    Ok(merge_codes(inst, &codes))
}
