#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use tricast_core::coding::{propagate, random_code, transfer_matrix, Target};
use tricast_core::field::{all_vectors, Field, FieldMatrix};
use tricast_core::graph::max_flow;
use tricast_core::instance::{parse_instance, UnicastInstance};

pub fn fixture(name: &str) -> UnicastInstance {
    let path = format!("{}/tests/fixtures/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    parse_instance(&std::fs::read_to_string(path).expect("fixture exists")).expect("fixture parses")
}

pub fn gf(p: u32) -> Field {
    Field::new(p).unwrap()
}

/// Fixtures of the three classes that admit a construction.
pub const FEASIBLE_FIXTURES: [&str; 10] = [
    "c133_overlaps",
    "c133_permuted",
    "c224_overlaps",
    "c125_no_cross",
    "c125_overlap",
    "c125_parallel_hosts",
    "c125_recode_merge",
    "c125_serial_host",
    "c125_shared_stretch",
    "one_m_two_overlaps",
];

/// Whether a random code at `seed` gives every session's own block at its
/// terminal the full rank the network allows.
pub fn random_code_passes_gates(inst: &UnicastInstance, f: Field, seed: u64) -> bool {
    let code = random_code(inst, f, seed);
    let global = propagate(inst, &code).unwrap();
    (0..inst.sessions().len()).all(|i| {
        let s = inst.session(i);
        let want = max_flow(inst.dag(), s.source, s.terminal).min(s.rate) as usize;
        transfer_matrix(inst, f, &global, &Target::Terminal(i))
            .block(i)
            .rank()
            == want
    })
}

/// Seeds in `0..trials` whose random code passes every gate.
pub fn gate_passes(inst: &UnicastInstance, p: u32, trials: u64) -> usize {
    let f = gf(p);
    (0..trials)
        .filter(|&s| random_code_passes_gates(inst, f, s))
        .count()
}

/// The determinant identity recomputed from matrix products: the left side
/// is `det[M21 | M22 xi]`, the right `(xi_2 / beta_1) det[M21 | M22 J beta]`
/// with `J = [[0, 1], [-1, 0]]` after transposing `beta` to `(-b2, b1)`.
pub fn det_identity_by_products(m2: &FieldMatrix, beta: [u32; 2], xi: [u32; 2]) -> (u32, u32) {
    let f = m2.field();
    let m21 = m2.col_block(0..1);
    let m22 = m2.col_block(1..3);
    let col = |v: [u32; 2]| FieldMatrix::column_vector(f, &v);
    let lhs = m21.hstack(&m22.mul(&col(xi))).det();
    let rotated = [f.neg(beta[1]), beta[0]];
    let d = m21.hstack(&m22.mul(&col(rotated))).det();
    let rhs = f.mul(f.mul(xi[1], f.inv(beta[0]).unwrap()), d);
    (lhs, rhs)
}

/// All `x2` for which some `x1` gives `h1 x1 + h2 x2 = z`, by enumeration.
pub fn preimages(z: &[u32], h1: &FieldMatrix, h2: &FieldMatrix) -> BTreeSet<Vec<u32>> {
    let f = h1.field();
    let mut out = BTreeSet::new();
    for x2 in all_vectors(f, h2.cols()) {
        let y2 = h2.mul_vec(&x2);
        let hit = all_vectors(f, h1.cols()).any(|x1| {
            let y1 = h1.mul_vec(&x1);
            y1.iter()
                .zip(&y2)
                .map(|(&a, &b)| f.add(a, b))
                .eq(z.iter().copied())
        });
        if hit {
            out.insert(x2);
        }
    }
    out
}

/// Distinct `m theta` over nonzero `theta` in the kernel of `constraints`,
/// enumerated independently of the library's counter.
pub fn distinct_images(m: &FieldMatrix, constraints: &FieldMatrix) -> usize {
    let f = m.field();
    let kernel = constraints.null_space();
    let mut seen = HashSet::new();
    for c in all_vectors(f, kernel.cols()) {
        if c.iter().all(|&v| v == 0) {
            continue;
        }
        let theta = kernel.mul_vec(&c);
        seen.insert(m.mul_vec(&theta));
    }
    seen.len()
}

/// The setup of the distinct-value bound at `p = 3`: a 4x5 matrix of rank
/// three, a first constraint row outside its row space and a second one
/// independent of the first.
pub fn distinct_value_fixture() -> (FieldMatrix, FieldMatrix) {
    let f = gf(3);
    let m = FieldMatrix::from_rows(
        f,
        &[
            [1, 0, 0, 1, 2],
            [0, 1, 0, 2, 1],
            [0, 0, 1, 1, 1],
            [1, 1, 1, 1, 1],
        ],
    );
    let constraints = FieldMatrix::from_rows(f, &[[0, 0, 0, 1, 0], [1, 2, 0, 0, 1]]);
    (m, constraints)
}
