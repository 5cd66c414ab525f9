//! Exact decodability checks and exhaustive linear feasibility searches.

mod odometer;
mod packed;
mod subspace;

pub use odometer::odometer_search;
pub use subspace::subspace_search;

use std::fmt;

use thiserror::Error;

use crate::coding::{partial_decode, propagate, transfer_matrix, CodingError, NetworkCode, Target};
use crate::field::{Field, FieldMatrix};
use crate::instance::UnicastInstance;

/// How a terminal separates its messages from interference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipe {
    /// No interference reaches the terminal.
    ZeroForcing,
    /// Interference occupies fewer dimensions than interfering messages.
    Alignment,
    /// Interference is full rank but its span avoids the desired span.
    SpanExclusion,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::ZeroForcing => "zero-forcing",
            Recipe::Alignment => "alignment",
            Recipe::SpanExclusion => "span-exclusion",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalReport {
    pub session: usize,
    pub decodable: bool,
    pub recipe: Recipe,
    pub desired_rank: usize,
    pub interference_rank: usize,
    /// `rank(I) + rank(D) - rank([I | D])`: dimensions where desired and
    /// interfering signals collide.
    pub overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeReport {
    pub terminals: Vec<TerminalReport>,
}

impl DecodeReport {
    pub fn all_decodable(&self) -> bool {
        self.terminals.iter().all(|t| t.decodable)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terminals {
            out.push_str(&format!(
                "terminal {} decodable {} recipe {} desired_rank {} interference_rank {} overlap {}\n",
                t.session, t.decodable, t.recipe, t.desired_rank, t.interference_rank, t.overlap
            ));
        }
        out.push_str(&format!("all_decodable {}\n", self.all_decodable()));
        out
    }
}

/// Splits the received matrix of session `i`'s terminal into desired and
/// interference columns.
fn received_blocks(
    inst: &UnicastInstance,
    field: Field,
    global: &[Vec<u32>],
    i: usize,
) -> (FieldMatrix, FieldMatrix) {
    let tm = transfer_matrix(inst, field, global, &Target::Terminal(i));
    let desired: Vec<usize> = inst.message_range(i).collect();
    let others: Vec<usize> = (0..inst.message_count())
        .filter(|m| !desired.contains(m))
        .collect();
    (
        tm.matrix.select_cols(&desired),
        tm.matrix.select_cols(&others),
    )
}

/// Certificate check on precomputed global vectors.
pub fn verify_globals(inst: &UnicastInstance, field: Field, global: &[Vec<u32>]) -> DecodeReport {
    let terminals = (0..inst.sessions().len())
        .map(|i| {
            let (d, interference) = received_blocks(inst, field, global, i);
            let rd = d.rank();
            let ri = interference.rank();
            let joint = interference.hstack(&d).rank();
            let recipe = if ri == 0 {
                Recipe::ZeroForcing
            } else if ri < interference.cols() {
                Recipe::Alignment
            } else {
                Recipe::SpanExclusion
            };
            TerminalReport {
                session: i,
                decodable: rd == d.cols() && joint == ri + rd,
                recipe,
                desired_rank: rd,
                interference_rank: ri,
                overlap: ri + rd - joint,
            }
        })
        .collect();
    DecodeReport { terminals }
}

/// Terminal `t_i` decodes iff its desired block has full column rank and the
/// desired and interference column spans meet only in zero.
pub fn verify_decoding(
    inst: &UnicastInstance,
    code: &NetworkCode,
) -> Result<DecodeReport, CodingError> {
    let global = propagate(inst, code)?;
    Ok(verify_globals(inst, code.field(), &global))
}

/// Runs the code on concrete messages and lets each terminal solve for its
/// own messages. `None` entries mark terminals that cannot decode.
pub fn decode(
    inst: &UnicastInstance,
    code: &NetworkCode,
    messages: &[u32],
) -> Result<Vec<Option<Vec<u32>>>, CodingError> {
    assert_eq!(
        messages.len(),
        inst.message_count(),
        "one value per message"
    );
    let f = code.field();
    let global = propagate(inst, code)?;
    Ok((0..inst.sessions().len())
        .map(|i| {
            let tm = transfer_matrix(inst, f, &global, &Target::Terminal(i));
            let z = tm.matrix.mul_vec(messages);
            let (d, interference) = received_blocks(inst, f, &global, i);
            partial_decode(&z, &interference, &d)
        })
        .collect())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BruteForceError {
    #[error("search space of {size} exceeds the budget of {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("exhaustive search supports p <= 13 and at most 16 messages")]
    Unsupported,
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// Which exhaustive search produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Every local coefficient assignment on the expanded instance.
    Odometer,
    /// Every assignment of maximal subspaces to edges; exact because
    /// enlarging what an edge carries never hurts any terminal.
    Subspace,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Odometer => "odometer",
            Method::Subspace => "subspace",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A code on the `T`-expanded instance that verifies.
    Feasible(NetworkCode),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceOutcome {
    pub feasibility: Feasibility,
    pub method: Method,
    /// Search nodes visited.
    pub explored: u64,
}

impl BruteForceOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.feasibility, Feasibility::Feasible(_))
    }
}

/// Limits on the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest coefficient space `p^coefficients` the odometer may walk.
    pub odometer: u128,
    /// Largest number of search nodes the subspace search may visit.
    pub subspace: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            odometer: 1 << 24,
            subspace: 50_000_000,
        }
    }
}

/// Decides whether some linear code over GF(p) on the `t`-fold expansion of
/// `inst` (unit capacities expected) lets every terminal decode. Uses the
/// odometer when the raw coefficient space fits its budget and the subspace
/// search otherwise; either way the answer is exact or an error.
pub fn brute_force_linear_feasibility(
    inst: &UnicastInstance,
    p: u32,
    t: usize,
    budget: &Budget,
) -> Result<BruteForceOutcome, BruteForceError> {
    let expanded = inst.time_expand(t);
    let size = odometer::space_size(&expanded, p);
    if size <= budget.odometer {
        odometer_search(&expanded, p, budget.odometer)
    } else {
        subspace_search(inst, p, t, budget.subspace)
    }
}
