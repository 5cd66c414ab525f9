mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use tricast_core::coding::random_code;
use tricast_core::construction::random_instance;
use tricast_core::counterexample::{certify, find_violated_cut, generate, Certificate, FamilyId};
use tricast_core::instance::UnicastInstance;
use tricast_core::verify::{
    brute_force_linear_feasibility, decode, odometer_search, subspace_search, verify_decoding,
    BruteForceError, Budget, Feasibility, Method,
};

fn small_instance(seed: u64, sessions: usize) -> UnicastInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conn: Vec<u32> = (0..sessions).map(|i| 1 + (seed >> i & 1) as u32).collect();
    random_instance(&mut rng, &conn, 3, 0.8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The coefficient odometer and the subspace search answer alike.
    #[test]
    fn exhaustive_searches_agree(seed in any::<u64>(), sessions in 2usize..=3) {
        let inst = small_instance(seed, sessions);
        let odo = match odometer_search(&inst, 2, 1 << 18) {
            Ok(out) => out,
            Err(BruteForceError::BudgetExceeded { .. }) => return Err(TestCaseError::reject("too large")),
            Err(e) => panic!("{e}"),
        };
        let sub = subspace_search(&inst, 2, 1, 10_000_000).unwrap();
        prop_assert_eq!(odo.method, Method::Odometer);
        prop_assert_eq!(sub.method, Method::Subspace);
        prop_assert_eq!(odo.is_feasible(), sub.is_feasible());
        for out in [&odo, &sub] {
            if let Feasibility::Feasible(code) = &out.feasibility {
                prop_assert!(verify_decoding(&inst, code).unwrap().all_decodable());
            }
        }
    }

    /// A violated cut rules out every code.
    #[test]
    fn violated_cut_means_infeasible(seed in any::<u64>()) {
        let inst = small_instance(seed, 3);
        if find_violated_cut(&inst).is_some() {
            let out = brute_force_linear_feasibility(&inst, 2, 1, &Budget::default()).unwrap();
            prop_assert!(!out.is_feasible());
        }
    }

    /// Decoding succeeds for every message exactly at the terminals the
    /// report calls decodable, and returns the sent message.
    #[test]
    fn decode_agrees_with_report(fi in 0usize..FEASIBLE_FIXTURES.len(), seed in any::<u64>(), msg_seed in any::<u64>()) {
        let inst = fixture(FEASIBLE_FIXTURES[fi]);
        let f = gf(5);
        let code = random_code(&inst, f, seed);
        let report = verify_decoding(&inst, &code).unwrap();
        let messages: Vec<u32> = (0..inst.message_count()).map(|m| ((msg_seed >> (2 * m)) % 5) as u32).collect();
        let decoded = decode(&inst, &code, &messages).unwrap();
        for (t, d) in report.terminals.iter().zip(&decoded) {
            prop_assert_eq!(t.decodable, d.is_some());
            if let Some(x) = d {
                prop_assert_eq!(x.as_slice(), &messages[inst.message_range(t.session)]);
            }
        }
    }
}

#[test]
fn cut_families_violate_their_named_cuts() {
    let b = Budget::default();
    for (family, capacity, demand) in [(FamilyId::Fig222, 2, 3), (FamilyId::Fig113, 1, 2)] {
        match certify(family, 2, 1, &b).unwrap() {
            Certificate::Cut {
                capacity: c,
                demand: d,
                ..
            } => assert_eq!((c, d), (capacity, demand), "{family}"),
            other => panic!("{family}: {other}"),
        }
        assert!(!brute_force_linear_feasibility(&generate(family), 2, 1, &b)
            .unwrap()
            .is_feasible());
    }
}

#[test]
fn rate_families_are_linearly_infeasible_at_two() {
    for family in [FamilyId::Fig23Rate21, FamilyId::Corollary232] {
        let inst = generate(family);
        assert_eq!(inst.connectivity(), family.connectivity());
        assert!(
            find_violated_cut(&inst).is_none(),
            "{family} passes every cut"
        );
        for t in [1, 2] {
            match certify(family, 2, t, &Budget::default()).unwrap() {
                Certificate::LinearInfeasible { p, t: tt, .. } => assert_eq!((p, tt), (2, t)),
                other => panic!("{family}: {other}"),
            }
        }
    }
}

#[test]
fn budget_overrun_is_reported() {
    let tiny = Budget {
        odometer: 4,
        subspace: 4,
    };
    assert!(matches!(
        brute_force_linear_feasibility(&generate(FamilyId::Corollary232), 2, 1, &tiny),
        Err(BruteForceError::BudgetExceeded { .. })
    ));
}

#[test]
fn feasible_fixtures_have_codes_at_two() {
    for name in ["c133_overlaps", "one_m_two_overlaps"] {
        let out = brute_force_linear_feasibility(&fixture(name), 2, 1, &Budget::default()).unwrap();
        let Feasibility::Feasible(code) = out.feasibility else {
            panic!("{name} is feasible")
        };
        assert!(verify_decoding(&fixture(name), &code)
            .unwrap()
            .all_decodable());
    }
}
