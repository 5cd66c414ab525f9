use crate::graph::Derivation;
use crate::instance::{Input, UnicastInstance};

use super::NetworkCode;

/// Converts a code on a derived instance into a code on the parent.
///
/// `message_map[m]` is the parent message carried as child message `m`.
/// Child values are tracked as combinations of parent variables (parent
/// messages, then parent edges); at the image of a parent edge the combination
/// is read off as that edge's parent row and replaced by the edge's own
/// variable. Parent edges without an image get all-zero rows, as do parent
/// edges whose image has no row.
pub fn lift_code(
    child: &UnicastInstance,
    code: &NetworkCode,
    derivation: &Derivation,
    parent: &UnicastInstance,
    message_map: &[usize],
) -> NetworkCode {
    assert_eq!(
        message_map.len(),
        child.message_count(),
        "message map covers the child"
    );
    let f = code.field();
    let pm = parent.message_count();
    let width = pm + parent.dag().edge_count();
    let cg = child.dag();
    let pg = parent.dag();
    let mut value: Vec<Vec<u32>> = vec![Vec::new(); cg.edge_count()];
    let mut out = NetworkCode::zero(parent, f);
    for ce in cg.edges_in_topo_order() {
        let mut acc = vec![0u32; width];
        if let Some(row) = code.row(ce) {
            for (inp, &c) in child.inputs(cg.tail(ce)).iter().zip(row) {
                if c == 0 {
                    continue;
                }
                match *inp {
                    Input::Message(m) => {
                        let k = message_map[m];
                        acc[k] = f.add(acc[k], c);
                    }
                    Input::Edge(ie) => {
                        for (a, &v) in acc.iter_mut().zip(&value[ie]) {
                            if v != 0 {
                                *a = f.add(*a, f.mul(c, v));
                            }
                        }
                    }
                }
            }
        }
        match derivation.edge_parent[ce] {
            Some(pe) => {
                let prow: Vec<u32> = parent
                    .inputs(pg.tail(pe))
                    .iter()
                    .map(|inp| match *inp {
                        Input::Message(m) => std::mem::take(&mut acc[m]),
                        Input::Edge(ie) => std::mem::take(&mut acc[pm + ie]),
                    })
                    .collect();
                debug_assert!(
                    acc.iter().all(|&v| v == 0),
                    "row of edge {pe} uses foreign inputs"
                );
                out.set_row(pe, prow);
                let mut unit = vec![0u32; width];
                unit[pm + pe] = 1;
                value[ce] = unit;
            }
            None => value[ce] = acc,
        }
    }
    out
}

/// Entrywise sum of codes on the same instance; unassigned rows count as zero.
pub fn merge_codes(inst: &UnicastInstance, codes: &[NetworkCode]) -> NetworkCode {
    let f = codes.first().expect("at least one code").field();
    let mut out = NetworkCode::zero(inst, f);
    for e in 0..inst.dag().edge_count() {
        let mut row = vec![0u32; inst.row_len(e)];
        for c in codes {
            assert_eq!(c.field(), f, "codes over different fields");
            if let Some(r) = c.row(e) {
                for (a, &v) in row.iter_mut().zip(r) {
                    *a = f.add(*a, v);
                }
            }
        }
        out.set_row(e, row);
    }
    out
}
