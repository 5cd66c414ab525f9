//! Random unit-rate instances with a prescribed connectivity vector.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Dag, Edge};
use crate::instance::{Session, UnicastInstance};

/// Sessions whose sources and terminals are private nodes; session `i` gets
/// `connectivity[i]` paths, each threading one to four random nodes of a
/// shared pool in topological order. A hop reuses an existing pool edge not
/// yet used by the same session with probability `share`, so sessions meet
/// on common edges while each session's paths stay edge-disjoint. Session
/// `i`'s source has out-degree `connectivity[i]`, which makes that its exact
/// connectivity.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    connectivity: &[u32],
    pool: usize,
    share: f64,
) -> UnicastInstance {
    assert!(pool >= 1, "pool needs a node");
    let n = connectivity.len();
    let mut names: Vec<String> = Vec::with_capacity(2 * n + pool);
    for i in 0..n {
        names.push(format!("s{}", i + 1));
        names.push(format!("t{}", i + 1));
    }
    names.extend((0..pool).map(|k| format!("v{k}")));
    let node = |k: usize| 2 * n + k;
    let unit = |tail, head| Edge {
        tail,
        head,
        capacity: 1,
    };

    let mut edges: Vec<Edge> = Vec::new();
    for (i, &c) in connectivity.iter().enumerate() {
        let mut used = vec![false; edges.len()];
        for _ in 0..c {
            let hops = rng.gen_range(1..=4.min(pool));
            let mut stops: Vec<usize> = (0..pool)
                .collect::<Vec<_>>()
                .choose_multiple(rng, hops)
                .copied()
                .collect();
            stops.sort_unstable();
            edges.push(unit(2 * i, node(stops[0])));
            for w in stops.windows(2) {
                let (a, b) = (node(w[0]), node(w[1]));
                let free: Vec<usize> = (0..used.len())
                    .filter(|&e| !used[e] && edges[e].tail == a && edges[e].head == b)
                    .collect();
                match free.choose(rng) {
                    Some(&e) if rng.gen_bool(share) => used[e] = true,
                    _ => edges.push(unit(a, b)),
                }
            }
            edges.push(unit(node(stops[hops - 1]), 2 * i + 1));
            used.resize(edges.len(), true);
        }
    }
    let sessions = (0..n)
        .map(|i| Session {
            source: 2 * i,
            terminal: 2 * i + 1,
            rate: 1,
        })
        .collect();
    let dag = Dag::new(names, edges).expect("pool order keeps the graph acyclic");
    UnicastInstance::new(dag, sessions).expect("sessions are well formed")
}

/// A three-session instance of the given sorted class, with the
/// connectivities assigned to sessions in random order.
pub fn random_class_instance(class: [u32; 3], seed: u64) -> UnicastInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conn = class.to_vec();
    conn.shuffle(&mut rng);
    let pool = rng.gen_range(4..=8);
    random_instance(&mut rng, &conn, pool, 0.7)
}
