use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConstructionError, Ctx, RETRIES};
use crate::coding::{propagate_injected, NetworkCode};
use crate::field::{all_vectors, Field, FieldMatrix};
use crate::graph::{Dag, EdgeId, NodeId, Path};
use crate::instance::{Input, UnicastInstance};

/// Name of a rank condition that failed for the current random code.
pub(crate) type Gate = &'static str;

/// Outcome of one attempt: a value, or the gate that rejected the code.
pub(crate) type Attempt<T> = Result<Result<T, Gate>, ConstructionError>;

/// Largest number of precoding candidates tried before a search gives up.
const SEARCH_CAP: usize = 1 << 16;

/// Runs `f` on fresh random streams until it passes every gate.
pub(crate) fn retry<T>(
    ctx: &mut Ctx,
    mut f: impl FnMut(&mut Ctx, &mut ChaCha8Rng) -> Attempt<T>,
) -> Result<T, ConstructionError> {
    let stream = ctx.stream();
    let mut last = "none";
    for attempt in 0..RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(stream.seed(attempt));
        match f(ctx, &mut rng)? {
            Ok(v) => {
                if attempt > 0 {
                    ctx.note(format!("passed after {} retries", attempt));
                }
                return Ok(v);
            }
            Err(gate) => last = gate,
        }
    }
    Err(ConstructionError::GateExhausted {
        gate: last,
        attempts: RETRIES,
    })
}

/// Position of `inp` among the row inputs of edge `e`.
pub(crate) fn input_pos(inst: &UnicastInstance, e: EdgeId, inp: Input) -> Option<usize> {
    inst.inputs(inst.dag().tail(e))
        .iter()
        .position(|&x| x == inp)
}

pub(crate) fn unit_row(
    inst: &UnicastInstance,
    e: EdgeId,
    inp: Input,
) -> Result<Vec<u32>, ConstructionError> {
    let pos = input_pos(inst, e, inp)
        .ok_or_else(|| ConstructionError::Topology(format!("edge {e} cannot read {inp:?}")))?;
    let mut row = vec![0; inst.row_len(e)];
    row[pos] = 1;
    Ok(row)
}

/// Forwards `message` from the path's first edge to its last.
pub(crate) fn route_path(
    code: &mut NetworkCode,
    inst: &UnicastInstance,
    path: &Path,
    message: usize,
) -> Result<(), ConstructionError> {
    let mut input = Input::Message(message);
    for &e in &path.edges {
        code.set_row(e, unit_row(inst, e, input)?);
        input = Input::Edge(e);
    }
    Ok(())
}

/// Random rows with nonzero entries, so a relay chain never drops its signal.
pub(crate) fn randomize(
    code: &mut NetworkCode,
    inst: &UnicastInstance,
    edges: impl IntoIterator<Item = EdgeId>,
    rng: &mut ChaCha8Rng,
) {
    let p = code.field().modulus();
    for e in edges {
        code.set_row(
            e,
            (0..inst.row_len(e)).map(|_| rng.gen_range(1..p)).collect(),
        );
    }
}

/// Transfer rows from the injected edges to `targets`, one row per target.
pub(crate) fn transfer(
    inst: &UnicastInstance,
    code: &NetworkCode,
    injected: &[EdgeId],
    targets: &[EdgeId],
) -> Result<FieldMatrix, ConstructionError> {
    let vectors = propagate_injected(inst, code, injected)?;
    let rows: Vec<&[u32]> = targets.iter().map(|&e| vectors[e].as_slice()).collect();
    Ok(FieldMatrix::from_rows_with_cols(
        code.field(),
        &rows,
        injected.len(),
    ))
}

pub(crate) fn in_edges(inst: &UnicastInstance, v: NodeId) -> Vec<EdgeId> {
    inst.dag().in_edges(v).to_vec()
}

pub(crate) fn out_edges(inst: &UnicastInstance, v: NodeId) -> Vec<EdgeId> {
    inst.dag().out_edges(v).to_vec()
}

/// First nonzero vector in the column span of `basis`, scanning coefficient
/// vectors lexicographically, that `accept` admits.
pub(crate) fn first_in_span(
    field: Field,
    basis: &FieldMatrix,
    mut accept: impl FnMut(&[u32]) -> bool,
) -> Option<Vec<u32>> {
    all_vectors(field, basis.cols())
        .skip(1)
        .take(SEARCH_CAP)
        .map(|c| basis.mul_vec(&c))
        .find(|v| accept(v))
}

/// Number of nonzero vectors of GF(q)^n with `accept`; only for small `q^n`.
pub(crate) fn count_vectors(
    field: Field,
    n: usize,
    mut accept: impl FnMut(&[u32]) -> bool,
) -> usize {
    all_vectors(field, n).skip(1).filter(|v| accept(v)).count()
}

/// Whether the column `v` adds one dimension to the span of `m`.
pub(crate) fn escapes_span(m: &FieldMatrix, v: &[u32]) -> bool {
    let col = FieldMatrix::column_vector(m.field(), v);
    v.iter().any(|&x| x != 0) && m.hstack(&col).rank() == m.rank() + 1
}

/// `q^e` for the small fields where choices are enumerated.
pub(crate) fn qpow(field: Field, e: u32) -> usize {
    (field.modulus() as usize).pow(e)
}

/// Edges carried by any path of `paths`, as a per-edge mask.
pub(crate) fn mask_of<'a>(
    edge_count: usize,
    paths: impl IntoIterator<Item = &'a Path>,
) -> Vec<bool> {
    let mut mask = vec![false; edge_count];
    for p in paths {
        for &e in &p.edges {
            mask[e] = true;
        }
    }
    mask
}

/// Edges downstream of `e`, including `e`.
pub(crate) fn downstream_mask(g: &Dag, e: EdgeId) -> Vec<bool> {
    let reach = g.reachable_from(g.head(e), None);
    (0..g.edge_count())
        .map(|b| b == e || reach[g.tail(b)])
        .collect()
}
