//! Code constructions for the feasible connectivity classes.
//!
//! Every constructor prepares its input (unit split, private endpoints,
//! degree-three structuring, minimization), builds a code on the prepared
//! instance, lifts it back to the unit-split input and verifies it there.
//! Random choices come from ChaCha8 streams derived from one seed; a failed
//! rank condition is retried with a fresh stream up to [`RETRIES`] times.

mod c125;
mod gprime;
mod one_m;
mod two_four;
mod random;
mod util;
mod vector;

pub use gprime::{find_gprime, Gprime, GprimeCase, Topology};
pub use random::{random_class_instance, random_instance};

use std::fmt;

use thiserror::Error;

use crate::coding::{lift_code, CodingError, NetworkCode};
use crate::field::Field;
use crate::instance::{InstanceError, Prepared, UnicastInstance, Verdict};
use crate::verify::{verify_decoding, DecodeReport, Recipe};

/// Fresh random streams tried per rank condition before giving up.
pub const RETRIES: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Vector routing over three time units.
    Routing,
    /// One path against `m + 1` paths, rates 1 and `m`.
    TwoUnicastOneM,
    /// Two paths against four, rates 2 and 1.
    TwoUnicastTwoFour,
    Scheme133,
    Scheme224,
    Scheme125,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Routing => "routing",
            Scheme::TwoUnicastOneM => "two-unicast-1-m",
            Scheme::TwoUnicastTwoFour => "two-unicast-2-4",
            Scheme::Scheme133 => "133",
            Scheme::Scheme224 => "224",
            Scheme::Scheme125 => "125",
        })
    }
}

/// Number of admissible precoding choices found by enumeration, next to the
/// count the construction guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceCount {
    pub label: &'static str,
    pub count: usize,
    pub bound: usize,
    /// Whether `count` must equal `bound` rather than exceed it.
    pub exact: bool,
}

impl ChoiceCount {
    pub fn holds(&self) -> bool {
        if self.exact {
            self.count == self.bound
        } else {
            self.count >= self.bound
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    /// The instance the code lives on: the unit-split input, expanded over
    /// `time_units`.
    pub instance: UnicastInstance,
    pub code: NetworkCode,
    pub scheme: Scheme,
    pub time_units: usize,
    pub report: DecodeReport,
    /// Case decisions in the order they were taken.
    pub transcript: Vec<String>,
    /// Enumerated precoding counts; filled for fields of size at most 7.
    pub choices: Vec<ChoiceCount>,
}

impl ConstructionResult {
    pub fn recipes(&self) -> Vec<Recipe> {
        self.report.terminals.iter().map(|t| t.recipe).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("connectivity {found:?} does not dominate {expected:?}")]
    ConnectivityMismatch { expected: Vec<u32>, found: Vec<u32> },
    #[error("expected rates {expected:?}, found {found:?}")]
    RateMismatch { expected: Vec<u32>, found: Vec<u32> },
    #[error("no construction for class {0}")]
    NoConstruction(Verdict),
    #[error("rank condition `{gate}` failed on all {attempts} attempts")]
    GateExhausted { gate: &'static str, attempts: u32 },
    #[error("structural claim violated: {0}")]
    Topology(String),
    #[error("constructed code fails verification")]
    VerificationFailed(DecodeReport),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

/// Shared state of one construction run.
pub(crate) struct Ctx {
    pub field: Field,
    seed: u64,
    streams: u64,
    pub transcript: Vec<String>,
    pub choices: Vec<ChoiceCount>,
}

impl Ctx {
    pub fn new(field: Field, seed: u64) -> Self {
        Ctx {
            field,
            seed,
            streams: 0,
            transcript: Vec::new(),
            choices: Vec::new(),
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.transcript.push(line.into());
    }

    /// Whether exhaustive precoding counts are affordable.
    pub fn count_choices(&self) -> bool {
        self.field.modulus() <= 7
    }

    pub fn record(&mut self, label: &'static str, count: usize, bound: usize, exact: bool) {
        self.choices.push(ChoiceCount {
            label,
            count,
            bound,
            exact,
        });
    }

    /// A fresh family of per-attempt seeds for one random code.
    pub fn stream(&mut self) -> Stream {
        self.streams += 1;
        Stream {
            base: splitmix(self.seed ^ splitmix(self.streams)),
        }
    }
}

pub(crate) struct Stream {
    base: u64,
}

impl Stream {
    pub fn seed(&self, attempt: u32) -> u64 {
        splitmix(self.base.wrapping_add(attempt as u64))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn dominates(found: &[u32], expected: &[u32]) -> bool {
    found.len() == expected.len() && found.iter().zip(expected).all(|(a, b)| a >= b)
}

pub(crate) fn check_connectivity(
    inst: &UnicastInstance,
    expected: &[u32],
) -> Result<(), ConstructionError> {
    let found = inst.connectivity();
    if dominates(&found, expected) {
        Ok(())
    } else {
        Err(ConstructionError::ConnectivityMismatch {
            expected: expected.to_vec(),
            found,
        })
    }
}

fn check_rates(inst: &UnicastInstance, expected: &[u32]) -> Result<(), ConstructionError> {
    let found: Vec<u32> = inst.sessions().iter().map(|s| s.rate).collect();
    if found == expected {
        Ok(())
    } else {
        Err(ConstructionError::RateMismatch {
            expected: expected.to_vec(),
            found,
        })
    }
}

/// Lifts a code on the (expanded) prepared instance to the expanded base,
/// verifies it and packages the result.
fn finish(
    prepared: &Prepared,
    code: &NetworkCode,
    message_map: &[usize],
    scheme: Scheme,
    time_units: usize,
    ctx: Ctx,
) -> Result<ConstructionResult, ConstructionError> {
    let lifted = lift_code(
        &prepared.instance,
        code,
        &prepared.derivation,
        &prepared.base,
        message_map,
    );
    let report = verify_decoding(&prepared.base, &lifted)?;
    if !report.all_decodable() {
        return Err(ConstructionError::VerificationFailed(report));
    }
    Ok(ConstructionResult {
        instance: prepared.base.clone(),
        code: lifted,
        scheme,
        time_units,
        report,
        transcript: ctx.transcript,
        choices: ctx.choices,
    })
}

/// Two sessions with rates 1 and `m` and connectivity at least `[1, m+1]`.
pub fn construct_two_unicast_1_m(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    if inst.sessions().len() != 2 || inst.session(0).rate != 1 {
        let found = inst.sessions().iter().map(|s| s.rate).collect();
        return Err(ConstructionError::RateMismatch {
            expected: vec![1, inst.sessions().get(1).map_or(1, |s| s.rate)],
            found,
        });
    }
    let m = inst.session(1).rate;
    let target = [1, m + 1];
    check_connectivity(inst, &target)?;
    let prepared = inst.prepare(&target);
    let mut ctx = Ctx::new(field, seed);
    let code = one_m::solve(&prepared.instance, &mut ctx)?;
    let ids: Vec<usize> = (0..inst.message_count()).collect();
    finish(&prepared, &code, &ids, Scheme::TwoUnicastOneM, 1, ctx)
}

/// Two sessions with rates 2 and 1 and connectivity at least `[2, 4]`.
pub fn construct_two_unicast_24(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    check_rates(inst, &[2, 1])?;
    let target = [2, 4];
    check_connectivity(inst, &target)?;
    let prepared = inst.prepare(&target);
    let mut ctx = Ctx::new(field, seed);
    let code = two_four::solve(&prepared.instance, &mut ctx)?;
    let ids: Vec<usize> = (0..inst.message_count()).collect();
    finish(&prepared, &code, &ids, Scheme::TwoUnicastTwoFour, 1, ctx)
}

/// Three unit-rate sessions whose sorted connectivity dominates `[1 3 3]`.
pub fn construct_133(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    vector::construct(inst, field, seed, vector::Kind::OneThreeThree)
}

/// Three unit-rate sessions whose sorted connectivity dominates `[2 2 4]`.
pub fn construct_224(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    vector::construct(inst, field, seed, vector::Kind::TwoTwoFour)
}

/// Three unit-rate sessions with connectivity at least three each.
pub fn construct_routing(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    vector::construct(inst, field, seed, vector::Kind::Routing)
}

/// Three unit-rate sessions whose sorted connectivity dominates `[1 2 5]`.
pub fn construct_125(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    c125::construct(inst, field, seed)
}

/// Classifies a three-session unit-rate instance and runs the matching
/// construction.
pub fn construct(
    inst: &UnicastInstance,
    field: Field,
    seed: u64,
) -> Result<ConstructionResult, ConstructionError> {
    let class = inst.classify()?;
    match class.verdict {
        Verdict::FeasibleRouting => construct_routing(inst, field, seed),
        Verdict::Feasible133 => construct_133(inst, field, seed),
        Verdict::Feasible224 => construct_224(inst, field, seed),
        Verdict::Feasible125 => construct_125(inst, field, seed),
        other => Err(ConstructionError::NoConstruction(other)),
    }
}
