//! Packed-versus-routed comparisons over sampled level networks.

use std::sync::OnceLock;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::levels::{level_template, CapacityLaw, LevelNetwork, Simulation};
use super::lp::Q;
use super::model::{improvement, packed_throughput_with_budget, NODE_BUDGET};
use super::{enumerate_embeddings, EmbeddingList, PackingError, StructureClass};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub routed: Q,
    pub packed: Q,
    /// Total activations per class, in [`StructureClass::ALL`] order.
    pub activations: [u32; 3],
    pub optimal: bool,
    /// Branch-and-bound nodes explored.
    pub nodes: usize,
}

impl TrialRecord {
    pub fn improved(&self) -> bool {
        self.packed > self.routed
    }

    pub fn gain(&self) -> f64 {
        improvement(&self.routed, &self.packed)
            .to_f64()
            .expect("finite")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub level: u8,
    pub trials: usize,
    pub improved: usize,
    /// Fraction of trials where packing beat routing.
    pub proportion: f64,
    /// Mean relative gain over the improved trials.
    pub mean_improvement: Option<f64>,
    /// Embeddings available per class on the template.
    pub embeddings: [usize; 3],
    pub truncated: Vec<StructureClass>,
    /// Whether every trial's search finished within its node budget.
    pub all_optimal: bool,
    pub records: Vec<TrialRecord>,
}

/// Embeddings depend only on the topology, so each level enumerates once.
fn level_embeddings(level: &LevelNetwork) -> Result<&'static EmbeddingList, PackingError> {
    static CACHE: [OnceLock<Result<EmbeddingList, PackingError>>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    CACHE[level.level as usize - 1]
        .get_or_init(|| enumerate_embeddings(&level.instance))
        .as_ref()
        .map_err(Clone::clone)
}

pub fn run_simulation(
    level: u8,
    sim: Simulation,
    trials: usize,
    seed: u64,
) -> Result<SimulationSummary, PackingError> {
    let (black, other) = sim.laws();
    run_simulation_with(level, &black, &other, trials, seed)
}

/// Trial `k` samples its network from seed `seed + k`.
pub fn run_simulation_with(
    level: u8,
    black: &CapacityLaw,
    other: &CapacityLaw,
    trials: usize,
    seed: u64,
) -> Result<SimulationSummary, PackingError> {
    let template = level_template(level)?;
    let list = level_embeddings(&template)?;
    simulate_network(&template, list, black, other, trials, seed)
}

/// Runs trials on an arbitrary template with its precomputed embeddings.
pub fn simulate_network(
    template: &LevelNetwork,
    list: &EmbeddingList,
    black: &CapacityLaw,
    other: &CapacityLaw,
    trials: usize,
    seed: u64,
) -> Result<SimulationSummary, PackingError> {
    assert!(trials >= 1, "at least one trial");
    let level = template.level;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = seed.wrapping_add(trial as u64);
            let inst = template.sample(black, other, seed);
            let packed = packed_throughput_with_budget(&inst, &list.embeddings, NODE_BUDGET)?;
            let mut activations = [0; 3];
            for (e, &a) in list.embeddings.iter().zip(&packed.activations) {
                let k = StructureClass::ALL
                    .iter()
                    .position(|&c| c == e.class)
                    .expect("known class");
                activations[k] += a;
            }
            Ok(TrialRecord {
                trial,
                seed,
                routed: packed.routed,
                packed: packed.rate,
                activations,
                optimal: packed.optimal,
                nodes: packed.nodes,
            })
        })
        .collect::<Result<Vec<_>, PackingError>>()?;
    let gains: Vec<f64> = records
        .iter()
        .filter(|r| r.improved())
        .map(TrialRecord::gain)
        .collect();
    Ok(SimulationSummary {
        level,
        trials,
        improved: gains.len(),
        proportion: gains.len() as f64 / trials as f64,
        mean_improvement: (!gains.is_empty())
            .then(|| gains.iter().sum::<f64>() / gains.len() as f64),
        embeddings: StructureClass::ALL.map(|c| list.count(c)),
        truncated: list.truncated.clone(),
        all_optimal: records.iter().all(|r| r.optimal),
        records,
    })
}
