//! Level network templates and the capacity laws of the two simulations.
//!
//! Every template is built from gadgets in which a few shared edges sit on
//! every path of all three sessions, so a coded structure carries rate 1
//! where fractional routing cannot, plus bypass routes that let routing
//! compete. Session 1 meets the shared edges less as the level rises and
//! not at all on level 4, which admits no `[2 2 4]` structure.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PackingError;
use crate::graph::{Dag, Edge, EdgeId};
use crate::instance::{parse_instance, UnicastInstance};

const LEVEL_TEXT: [&str; 4] = [
    include_str!("templates/level1.txt"),
    include_str!("templates/level2.txt"),
    include_str!("templates/level3.txt"),
    include_str!("templates/level4.txt"),
];

/// Level-1 edges whose capacities follow the black-edge law: the shared
/// edges of its grid, by endpoint names.
const LEVEL1_BLACK: &[(&str, &str)] = &[("a1", "b1"), ("a2", "b2"), ("a3", "b3"), ("a4", "b4")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Simulation {
    /// Capacities one to three.
    One,
    /// Capacities five to seven.
    Two,
}

impl Simulation {
    /// Laws for black edges and for all other edges.
    pub fn laws(self) -> (CapacityLaw, CapacityLaw) {
        match self {
            Simulation::One => (
                CapacityLaw::new(&[(1, 25), (2, 40), (3, 35)]),
                CapacityLaw::new(&[(1, 15), (2, 60), (3, 25)]),
            ),
            Simulation::Two => (
                CapacityLaw::new(&[(5, 25), (6, 40), (7, 35)]),
                CapacityLaw::new(&[(5, 15), (6, 60), (7, 25)]),
            ),
        }
    }
}

/// A finite capacity distribution with integer weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityLaw {
    pub outcomes: Vec<(u32, u32)>,
}

impl CapacityLaw {
    pub fn new(outcomes: &[(u32, u32)]) -> Self {
        assert!(
            outcomes.iter().any(|&(_, w)| w > 0),
            "law needs positive weight"
        );
        CapacityLaw {
            outcomes: outcomes.to_vec(),
        }
    }

    pub fn constant(c: u32) -> Self {
        CapacityLaw::new(&[(c, 1)])
    }

    fn sampler(&self) -> WeightedIndex<u32> {
        WeightedIndex::new(self.outcomes.iter().map(|&(_, w)| w)).expect("positive weights")
    }
}

/// A level template: unit-capacity topology plus its black edges.
#[derive(Debug, Clone)]
pub struct LevelNetwork {
    pub level: u8,
    pub instance: UnicastInstance,
    pub black: Vec<EdgeId>,
}

impl LevelNetwork {
    /// Redraws every capacity independently: black edges from `black`,
    /// the rest from `other`.
    pub fn sample(&self, black: &CapacityLaw, other: &CapacityLaw, seed: u64) -> UnicastInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (bs, os) = (black.sampler(), other.sampler());
        let g = self.instance.dag();
        let edges = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let (law, sampler) = if self.black.contains(&e) {
                    (black, &bs)
                } else {
                    (other, &os)
                };
                Edge {
                    capacity: law.outcomes[sampler.sample(&mut rng)].0,
                    ..*edge
                }
            })
            .collect();
        self.instance
            .with_dag(Dag::new(g.names().to_vec(), edges).expect("same shape"))
    }
}

pub fn level_template(level: u8) -> Result<LevelNetwork, PackingError> {
    if !(1..=4).contains(&level) {
        return Err(PackingError::Level(level));
    }
    let instance = parse_instance(LEVEL_TEXT[level as usize - 1]).expect("bundled template parses");
    let black = if level == 1 {
        let g = instance.dag();
        LEVEL1_BLACK
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (
                    g.node_by_name(a).expect("named"),
                    g.node_by_name(b).expect("named"),
                );
                (0..g.edge_count())
                    .find(|&e| g.tail(e) == a && g.head(e) == b)
                    .expect("black edge exists")
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(LevelNetwork {
        level,
        instance,
        black,
    })
}

pub fn sample_level_network(
    level: u8,
    sim: Simulation,
    seed: u64,
) -> Result<UnicastInstance, PackingError> {
    let (black, other) = sim.laws();
    Ok(level_template(level)?.sample(&black, &other, seed))
}
