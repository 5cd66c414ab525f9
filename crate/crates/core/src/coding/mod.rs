//! Linear network codes: local coefficient rows, global coding vectors and
//! transfer matrices.
//!
//! The row of edge `e` holds one coefficient per input of `tail(e)` in the
//! order given by [`UnicastInstance::inputs`]: observed messages first, then
//! in-edges. For an out-edge of a source the message coefficients form the
//! source's precoding.

mod algebra;
mod lift;

pub use algebra::{det_identity_check, distinct_image_count, partial_decode, DetIdentityError};
pub use lift::{lift_code, merge_codes};

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Field, FieldMatrix};
use crate::graph::EdgeId;
use crate::instance::{Input, UnicastInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("edge {0} has no coefficient row")]
    MissingRow(EdgeId),
    #[error("edge {edge} row has {found} coefficients, expected {expected}")]
    RowLength {
        edge: EdgeId,
        expected: usize,
        found: usize,
    },
    #[error("code has {found} edges, instance has {expected}")]
    EdgeCount { expected: usize, found: usize },
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
}

/// Local coefficient rows over one prime field; `None` marks an edge whose
/// row has not been assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkCode {
    field: Field,
    rows: Vec<Option<Vec<u32>>>,
}

impl NetworkCode {
    pub fn unassigned(field: Field, edges: usize) -> Self {
        NetworkCode {
            field,
            rows: vec![None; edges],
        }
    }

    /// The all-zero code on `inst`.
    pub fn zero(inst: &UnicastInstance, field: Field) -> Self {
        NetworkCode {
            field,
            rows: (0..inst.dag().edge_count())
                .map(|e| Some(vec![0; inst.row_len(e)]))
                .collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn edge_count(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, e: EdgeId) -> Option<&[u32]> {
        self.rows[e].as_deref()
    }

    pub fn set_row(&mut self, e: EdgeId, row: Vec<u32>) {
        let p = self.field.modulus();
        self.rows[e] = Some(row.into_iter().map(|v| v % p).collect());
    }

    pub fn clear_row(&mut self, e: EdgeId) {
        self.rows[e] = None;
    }

    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(Option::is_some)
    }

    /// Checks that every assigned row matches the instance's input counts.
    pub fn check_shape(&self, inst: &UnicastInstance) -> Result<(), CodingError> {
        if self.rows.len() != inst.dag().edge_count() {
            return Err(CodingError::EdgeCount {
                expected: inst.dag().edge_count(),
                found: self.rows.len(),
            });
        }
        for (e, row) in self.rows.iter().enumerate() {
            if let Some(r) = row {
                if r.len() != inst.row_len(e) {
                    return Err(CodingError::RowLength {
                        edge: e,
                        expected: inst.row_len(e),
                        found: r.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Precoding of session `i`: one row per out-edge of its source
    /// (ascending id), one column per message of the session.
    pub fn precoding(&self, inst: &UnicastInstance, i: usize) -> FieldMatrix {
        let s = inst.session(i);
        let msgs = inst.message_range(i);
        let inputs = inst.inputs(s.source);
        let outs = inst.dag().out_edges(s.source);
        FieldMatrix::from_fn(self.field, outs.len(), msgs.len(), |r, c| {
            let Some(row) = self.row(outs[r]) else {
                return 0;
            };
            inputs
                .iter()
                .position(|inp| *inp == Input::Message(msgs.start + c))
                .map_or(0, |k| row[k])
        })
    }

    /// Line-oriented text form: `field P`, `edges N`, then `row E c...` for
    /// every assigned edge.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "field {}\nedges {}\n",
            self.field.modulus(),
            self.rows.len()
        );
        for (e, row) in self.rows.iter().enumerate() {
            if let Some(r) = row {
                out.push_str(&format!("row {e}"));
                for v in r {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<NetworkCode, CodingError> {
        let err = |line: usize, col: usize, msg: String| CodingError::Parse { line, col, msg };
        let mut field: Option<Field> = None;
        let mut code: Option<NetworkCode> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut toks = Vec::new();
            let mut col = 0;
            for part in content.split(' ') {
                if !part.trim().is_empty() {
                    toks.push((part.trim(), col + 1));
                }
                col += part.len() + 1;
            }
            let Some(&(head, hcol)) = toks.first() else {
                continue;
            };
            let num = |i: usize| -> Result<u64, CodingError> {
                let (t, c) = *toks.get(i).ok_or_else(|| {
                    err(
                        line,
                        content.len() + 1,
                        format!("`{head}` is missing a field"),
                    )
                })?;
                t.parse::<u64>()
                    .map_err(|_| err(line, c, format!("expected a number, found `{t}`")))
            };
            match head {
                "field" => {
                    let p = num(1)?;
                    let f = u32::try_from(p)
                        .ok()
                        .and_then(|p| Field::new(p).ok())
                        .ok_or_else(|| {
                            err(line, toks[1].1, format!("`{p}` is not a supported prime"))
                        })?;
                    field = Some(f);
                }
                "edges" => {
                    let f =
                        field.ok_or_else(|| err(line, hcol, "`edges` before `field`".into()))?;
                    code = Some(NetworkCode::unassigned(f, num(1)? as usize));
                }
                "row" => {
                    let c = code
                        .as_mut()
                        .ok_or_else(|| err(line, hcol, "`row` before `edges`".into()))?;
                    let e = num(1)? as usize;
                    if e >= c.rows.len() {
                        return Err(err(line, toks[1].1, format!("edge {e} out of range")));
                    }
                    let p = c.field.modulus() as u64;
                    let mut row = Vec::with_capacity(toks.len() - 2);
                    for (i, tok) in toks.iter().enumerate().skip(2) {
                        let v = num(i)?;
                        if v >= p {
                            return Err(err(
                                line,
                                tok.1,
                                format!("coefficient {v} not reduced mod {p}"),
                            ));
                        }
                        row.push(v as u32);
                    }
                    c.rows[e] = Some(row);
                }
                other => return Err(err(line, hcol, format!("unknown directive `{other}`"))),
            }
        }
        code.ok_or_else(|| err(1, 1, "missing `field`/`edges` header".into()))
    }
}

/// Uniformly random rows on every edge, reproducible from `seed`.
pub fn random_code(inst: &UnicastInstance, field: Field, seed: u64) -> NetworkCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code = NetworkCode::unassigned(field, inst.dag().edge_count());
    for e in 0..inst.dag().edge_count() {
        let row = random_row(&mut rng, field, inst.row_len(e));
        code.set_row(e, row);
    }
    code
}

pub(crate) fn random_row(rng: &mut impl Rng, field: Field, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| rng.gen_range(0..field.modulus()))
        .collect()
}

/// Global coding vectors, one per edge, over all messages of the instance.
pub fn propagate(inst: &UnicastInstance, code: &NetworkCode) -> Result<Vec<Vec<u32>>, CodingError> {
    code.check_shape(inst)?;
    let f = code.field;
    let n = inst.message_count();
    let g = inst.dag();
    let mut global = vec![Vec::new(); g.edge_count()];
    for e in g.edges_in_topo_order() {
        let row = code.row(e).ok_or(CodingError::MissingRow(e))?;
        let mut acc = vec![0u64; n];
        for (inp, &c) in inst.inputs(g.tail(e)).iter().zip(row) {
            if c == 0 {
                continue;
            }
            match *inp {
                Input::Message(m) => acc[m] += c as u64,
                Input::Edge(ie) => {
                    for (a, &v) in acc.iter_mut().zip(&global[ie]) {
                        *a += c as u64 * v as u64;
                    }
                }
            }
            // Keep the accumulator bounded for large moduli.
            if f.modulus() > 1 << 16 {
                acc.iter_mut().for_each(|a| *a %= f.modulus() as u64);
            }
        }
        global[e] = acc.into_iter().map(|a| f.reduce(a)).collect();
    }
    Ok(global)
}

/// Propagation with the listed edges treated as free unit variables: each
/// returned vector is over `injected` (in the given order) and message inputs
/// are ignored. Used to obtain transfer matrices before precoding is fixed.
pub fn propagate_injected(
    inst: &UnicastInstance,
    code: &NetworkCode,
    injected: &[EdgeId],
) -> Result<Vec<Vec<u32>>, CodingError> {
    let f = code.field;
    let n = injected.len();
    let g = inst.dag();
    let mut global = vec![vec![0u32; n]; g.edge_count()];
    for e in g.edges_in_topo_order() {
        if let Some(k) = injected.iter().position(|&x| x == e) {
            global[e][k] = 1;
            continue;
        }
        let row = code.row(e).ok_or(CodingError::MissingRow(e))?;
        let mut acc = vec![0u64; n];
        for (inp, &c) in inst.inputs(g.tail(e)).iter().zip(row) {
            if let (Input::Edge(ie), true) = (*inp, c != 0) {
                for (a, &v) in acc.iter_mut().zip(&global[ie]) {
                    *a = (*a + c as u64 * v as u64) % f.modulus() as u64;
                }
            }
        }
        global[e] = acc.into_iter().map(|a| a as u32).collect();
    }
    Ok(global)
}

/// Rows to read a transfer matrix from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// In-edges of session `i`'s terminal.
    Terminal(usize),
    Edges(Vec<EdgeId>),
}

/// Global vectors of a set of edges, with columns grouped by session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    pub matrix: FieldMatrix,
    pub edges: Vec<EdgeId>,
    pub blocks: Vec<Range<usize>>,
}

impl TransferMatrix {
    /// Columns belonging to session `j`.
    pub fn block(&self, j: usize) -> FieldMatrix {
        self.matrix.col_block(self.blocks[j].clone())
    }
}

pub fn transfer_matrix(
    inst: &UnicastInstance,
    field: Field,
    global: &[Vec<u32>],
    target: &Target,
) -> TransferMatrix {
    let edges = match target {
        Target::Terminal(i) => inst.dag().in_edges(inst.session(*i).terminal).to_vec(),
        Target::Edges(list) => list.clone(),
    };
    let rows: Vec<&[u32]> = edges.iter().map(|&e| global[e].as_slice()).collect();
    TransferMatrix {
        matrix: FieldMatrix::from_rows_with_cols(field, &rows, inst.message_count()),
        edges,
        blocks: (0..inst.sessions().len())
            .map(|i| inst.message_range(i))
            .collect(),
    }
}
