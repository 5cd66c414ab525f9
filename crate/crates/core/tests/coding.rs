mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use tricast_core::coding::{
    det_identity_check, distinct_image_count, partial_decode, propagate, random_code,
    transfer_matrix, DetIdentityError, NetworkCode, Target,
};
use tricast_core::field::{all_vectors, FieldMatrix};
use tricast_core::graph::max_flow;
use tricast_core::instance::Input;

#[test]
fn det_identity_holds_exhaustively_at_two() {
    let f = gf(2);
    let mut checked = 0;
    for entries in all_vectors(f, 6) {
        let m2 = FieldMatrix::from_rows(f, &[&entries[..3], &entries[3..]]);
        for beta in all_vectors(f, 2) {
            for xi in all_vectors(f, 2) {
                let (beta, xi) = ([beta[0], beta[1]], [xi[0], xi[1]]);
                let admissible = beta[0] != 0
                    && f.add(f.mul(beta[0], xi[0]), f.mul(beta[1], xi[1])) == 0
                    && xi[1] != 0;
                match det_identity_check(&m2, beta, xi) {
                    Ok(holds) => {
                        assert!(admissible);
                        assert!(holds, "{m2:?} {beta:?} {xi:?}");
                        let (l, r) = det_identity_by_products(&m2, beta, xi);
                        assert_eq!(l, r);
                        checked += 1;
                    }
                    Err(_) => assert!(!admissible),
                }
            }
        }
    }
    // Two admissible (beta, xi) pairs for each of 64 matrices.
    assert_eq!(checked, 128);
}

#[test]
fn det_identity_holds_on_random_inputs_at_257() {
    let f = gf(257);
    let mut rng = ChaCha8Rng::seed_from_u64(257);
    for _ in 0..1000 {
        let rows: Vec<Vec<u32>> = (0..2)
            .map(|_| (0..3).map(|_| rng.gen_range(0..257)).collect())
            .collect();
        let m2 = FieldMatrix::from_rows(f, &rows);
        let beta = [rng.gen_range(1..257), rng.gen_range(0..257)];
        let x2 = rng.gen_range(1..257);
        let xi = [
            f.mul(f.neg(beta[1]), f.mul(x2, f.inv(beta[0]).unwrap())),
            x2,
        ];
        assert_eq!(det_identity_check(&m2, beta, xi), Ok(true));
        let (l, r) = det_identity_by_products(&m2, beta, xi);
        assert_eq!(l, r);
    }
}

#[test]
fn det_identity_rejects_inadmissible_inputs() {
    let f = gf(5);
    let m2 = FieldMatrix::from_rows(f, &[[1, 2, 3], [4, 0, 1]]);
    assert_eq!(
        det_identity_check(&m2, [0, 1], [1, 0]),
        Err(DetIdentityError::BetaOneZero)
    );
    assert_eq!(
        det_identity_check(&m2, [1, 1], [1, 1]),
        Err(DetIdentityError::XiNotOrthogonal)
    );
    assert_eq!(
        det_identity_check(&m2, [1, 0], [0, 0]),
        Err(DetIdentityError::XiTwoZero)
    );
    let wide = FieldMatrix::zeros(f, 2, 4);
    assert_eq!(
        det_identity_check(&wide, [1, 0], [0, 1]),
        Err(DetIdentityError::Shape)
    );
}

/// Every `(h1, h2)` pair of the given shape at `p = 3` and every received
/// vector: `partial_decode` answers exactly when the preimage set of `x2`
/// is a singleton for every reachable vector.
fn partial_decode_matches_enumeration(rows: usize, c1: usize, c2: usize) -> usize {
    let f = gf(3);
    let mut decoded = 0;
    for e in all_vectors(f, rows * (c1 + c2)) {
        let h1 = FieldMatrix::from_fn(f, rows, c1, |r, c| e[r * c1 + c]);
        let h2 = FieldMatrix::from_fn(f, rows, c2, |r, c| e[rows * c1 + r * c2 + c]);
        let reachable: Vec<Vec<u32>> = all_vectors(f, rows)
            .filter(|z| !preimages(z, &h1, &h2).is_empty())
            .collect();
        let unique = reachable.iter().all(|z| preimages(z, &h1, &h2).len() == 1);
        for z in &reachable {
            match partial_decode(z, &h1, &h2) {
                Some(x2) => {
                    assert!(unique, "{h1:?}{h2:?}");
                    assert!(preimages(z, &h1, &h2).contains(&x2));
                    decoded += 1;
                }
                None => assert!(!unique, "{h1:?}{h2:?} z {z:?}"),
            }
        }
    }
    decoded
}

#[test]
fn partial_decode_is_exact_at_three() {
    for (rows, c1, c2) in [
        (1, 1, 1),
        (2, 1, 1),
        (2, 0, 2),
        (2, 1, 2),
        (3, 1, 1),
        (3, 2, 1),
    ] {
        assert!(
            partial_decode_matches_enumeration(rows, c1, c2) > 0,
            "{rows}x({c1}+{c2})"
        );
    }
}

#[test]
fn distinct_value_fixture_meets_its_bound() {
    let (m, constraints) = distinct_value_fixture();
    assert_eq!(m.rank(), 3);
    assert_eq!(m.vstack(&constraints.select_rows(&[0])).rank(), 4);
    assert_eq!(constraints.rank(), 2);
    let count = distinct_image_count(&m, &constraints);
    assert_eq!(count, distinct_images(&m, &constraints));
    assert!(count >= 3 * 3 - 1, "{count}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Whenever the bound's hypotheses hold at `p = 3`, the bound does.
    #[test]
    fn distinct_value_bound_under_its_hypotheses(m in prop::collection::vec(0u32..3, 20), g in prop::collection::vec(0u32..3, 10)) {
        let f = gf(3);
        let m = FieldMatrix::from_fn(f, 4, 5, |r, c| m[r * 5 + c]);
        let constraints = FieldMatrix::from_fn(f, 2, 5, |r, c| g[r * 5 + c]);
        prop_assume!(m.rank() >= 3);
        prop_assume!(m.vstack(&constraints.select_rows(&[0])).rank() >= 4);
        prop_assume!(constraints.rank() == 2);
        let count = distinct_image_count(&m, &constraints);
        prop_assert_eq!(count, distinct_images(&m, &constraints));
        prop_assert!(count >= 8);
    }

    #[test]
    fn code_text_round_trips(fi in 0usize..FEASIBLE_FIXTURES.len(), seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 257])) {
        let inst = fixture(FEASIBLE_FIXTURES[fi]);
        let code = random_code(&inst, gf(p), seed);
        let back = NetworkCode::from_text(&code.to_text()).unwrap();
        prop_assert_eq!(back, code);
    }

    /// Every edge's global vector is its row applied to its inputs.
    #[test]
    fn propagation_is_locally_consistent(fi in 0usize..FEASIBLE_FIXTURES.len(), seed in any::<u64>()) {
        let inst = fixture(FEASIBLE_FIXTURES[fi]);
        let f = gf(7);
        let code = random_code(&inst, f, seed);
        let global = propagate(&inst, &code).unwrap();
        let g = inst.dag();
        for e in 0..g.edge_count() {
            let mut acc = vec![0u32; inst.message_count()];
            for (inp, &c) in inst.inputs(g.tail(e)).iter().zip(code.row(e).unwrap()) {
                match *inp {
                    Input::Message(m) => acc[m] = f.add(acc[m], c),
                    Input::Edge(ie) => {
                        for (a, &v) in acc.iter_mut().zip(&global[ie]) {
                            *a = f.add(*a, f.mul(c, v));
                        }
                    }
                }
            }
            prop_assert_eq!(&acc, &global[e]);
        }
    }

    /// A transfer block never exceeds the flow between its endpoints.
    #[test]
    fn transfer_rank_is_bounded_by_flow(fi in 0usize..FEASIBLE_FIXTURES.len(), seed in any::<u64>()) {
        let inst = fixture(FEASIBLE_FIXTURES[fi]);
        let f = gf(257);
        let global = propagate(&inst, &random_code(&inst, f, seed)).unwrap();
        for j in 0..inst.sessions().len() {
            let t = transfer_matrix(&inst, f, &global, &Target::Terminal(j));
            for i in 0..inst.sessions().len() {
                let flow = max_flow(inst.dag(), inst.session(i).source, inst.session(j).terminal) as usize;
                prop_assert!(t.block(i).rank() <= flow.min(inst.session(i).rate as usize));
            }
        }
    }
}

/// Union of the per-session degree bounds: session `i`'s block determinant
/// has degree at most its rate times the number of edges on its paths.
fn schwartz_zippel_bound(inst: &tricast_core::instance::UnicastInstance, p: u32) -> f64 {
    let g = inst.dag();
    let degree: usize = inst
        .sessions()
        .iter()
        .map(|s| {
            let from = g.reachable_from(s.source, None);
            let to = g.reaching(s.terminal, None);
            let on_paths = (0..g.edge_count())
                .filter(|&e| from[g.tail(e)] && to[g.head(e)])
                .count();
            s.rate as usize * on_paths
        })
        .sum();
    degree as f64 / p as f64
}

#[test]
fn random_code_failures_respect_the_degree_bound() {
    const TRIALS: u64 = 1000;
    for name in FEASIBLE_FIXTURES {
        let inst = fixture(name);
        let failures = (TRIALS as usize - gate_passes(&inst, 257, TRIALS)) as f64;
        let mean = TRIALS as f64 * schwartz_zippel_bound(&inst, 257);
        assert!(
            failures <= mean + 3.0 * mean.sqrt(),
            "{name}: {failures} failures, bound {mean:.1}"
        );
        let small = gate_passes(&inst, 2, 100);
        assert!(small < 100, "{name}: every seed passed at p = 2");
    }
}

#[test]
fn zero_code_carries_nothing() {
    let inst = fixture("c224_overlaps");
    let f = gf(5);
    let global = propagate(&inst, &NetworkCode::zero(&inst, f)).unwrap();
    assert!(global.iter().all(|v| v.iter().all(|&x| x == 0)));
}
