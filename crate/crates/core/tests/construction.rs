use tricast_core::construction::{
    construct, construct_125, construct_133, construct_224, construct_two_unicast_1_m,
    construct_two_unicast_24, find_gprime, random_class_instance, ConstructionError,
    ConstructionResult, GprimeCase, Scheme, Topology,
};
use tricast_core::field::Field;
use tricast_core::graph::max_flow_masked;
use tricast_core::instance::{parse_instance, UnicastInstance};
use tricast_core::verify::verify_decoding;

fn fixture(name: &str) -> UnicastInstance {
    let path = format!("{}/tests/fixtures/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    parse_instance(&std::fs::read_to_string(path).expect("fixture exists")).expect("fixture parses")
}

fn gf(p: u32) -> Field {
    Field::new(p).unwrap()
}

/// Independent re-verification of a construction's output.
fn assert_decodes(r: &ConstructionResult) {
    let report = verify_decoding(&r.instance, &r.code).unwrap();
    assert!(report.all_decodable(), "{report:?}\n{:?}", r.transcript);
}

fn mentions(r: &ConstructionResult, needle: &str) -> bool {
    r.transcript.iter().any(|l| l.contains(needle))
}

#[test]
fn one_m_single_overlap_decodes_at_both_fields() {
    for p in [3, 257] {
        let r = construct_two_unicast_1_m(&fixture("one_m_two_overlaps"), gf(p), 5).unwrap();
        assert_eq!(r.scheme, Scheme::TwoUnicastOneM);
        assert_decodes(&r);
    }
}

#[test]
fn one_m_column_counts_are_exact_at_p3() {
    for (name, columns) in [("one_m_two_overlaps", 1), ("one_m_three_overlaps", 2)] {
        let r = construct_two_unicast_1_m(&fixture(name), gf(3), 1).unwrap();
        assert_decodes(&r);
        let counts: Vec<_> = r
            .choices
            .iter()
            .filter(|c| c.label == "two-unicast-1-m column")
            .collect();
        assert_eq!(counts.len(), columns, "{name}");
        for c in counts {
            assert_eq!(c.count, 2, "{name}: {c:?}");
            assert!(c.holds());
        }
    }
}

#[test]
fn one_m_disjoint_path_is_routed() {
    let r = construct_two_unicast_1_m(&fixture("one_m_disjoint"), gf(257), 0).unwrap();
    assert_decodes(&r);
    assert!(
        mentions(&r, "overlap free: routing every message"),
        "{:?}",
        r.transcript
    );
}

#[test]
fn one_m_rejects_low_connectivity() {
    let inst = fixture("one_m_disjoint");
    let sessions = vec![
        inst.session(0),
        tricast_core::instance::Session {
            rate: 3,
            ..inst.session(1)
        },
    ];
    let inst = inst.with_sessions(sessions).unwrap();
    assert!(matches!(
        construct_two_unicast_1_m(&inst, gf(257), 0),
        Err(ConstructionError::ConnectivityMismatch { .. })
    ));
}

#[test]
fn two_four_distinct_hosts_counts_at_p3() {
    let r = construct_two_unicast_24(&fixture("two_four_distinct_hosts"), gf(3), 2).unwrap();
    assert_decodes(&r);
    assert!(mentions(&r, "lie on session-2 paths"), "{:?}", r.transcript);
    let c = r
        .choices
        .iter()
        .find(|c| c.label == "two-unicast-2-4 distinct hosts")
        .expect("count recorded");
    assert!(c.count >= 9 - 3 - 1, "{c:?}");
}

#[test]
fn two_four_shared_host_recodes() {
    for p in [3, 257] {
        let r = construct_two_unicast_24(&fixture("two_four_shared_host"), gf(p), 4).unwrap();
        assert_decodes(&r);
        assert!(mentions(&r, "share session-2 path"), "{:?}", r.transcript);
        assert!(
            mentions(&r, "recoding the downstream segment"),
            "{:?}",
            r.transcript
        );
    }
}

#[test]
fn two_four_free_session_one_path_routes_and_reduces() {
    let r = construct_two_unicast_24(&fixture("two_four_one_free"), gf(257), 0).unwrap();
    assert_decodes(&r);
    assert!(
        mentions(&r, "is overlap free: routing X"),
        "{:?}",
        r.transcript
    );
}

#[test]
fn vector_schemes_decode_on_fixtures() {
    for (name, scheme) in [
        ("c133_overlaps", Scheme::Scheme133),
        ("c133_permuted", Scheme::Scheme133),
        ("c224_overlaps", Scheme::Scheme224),
    ] {
        for p in [2, 257] {
            let r = construct(&fixture(name), gf(p), 3).unwrap();
            assert_eq!(r.scheme, scheme, "{name}");
            assert_eq!(r.time_units, 2);
            assert_eq!(r.instance.time_units(), 2);
            assert_decodes(&r);
        }
    }
    let r = construct_133(&fixture("c133_overlaps"), gf(257), 0).unwrap();
    assert!(mentions(&r, "zero row"), "{:?}", r.transcript);
    let r = construct_224(&fixture("c224_overlaps"), gf(257), 0).unwrap();
    assert!(mentions(&r, "lie on session-2 paths"), "{:?}", r.transcript);
}

#[test]
fn permuted_sessions_keep_decodability() {
    let r = construct_133(&fixture("c133_permuted"), gf(257), 9).unwrap();
    assert!(r.transcript[0].contains("[2, 1, 3]"), "{:?}", r.transcript);
    assert_decodes(&r);
}

#[test]
fn uncovered_class_has_no_construction() {
    assert!(matches!(
        construct(&fixture("c222_fails"), gf(257), 0),
        Err(ConstructionError::NoConstruction(_))
    ));
    assert!(matches!(
        construct_224(&fixture("c133_overlaps"), gf(257), 0),
        Err(ConstructionError::ConnectivityMismatch { .. })
    ));
}

fn skeleton_case(name: &str) -> GprimeCase {
    let inst = fixture(name);
    let prepared = inst.prepare(&inst.connectivity());
    find_gprime(&prepared.instance).unwrap().case
}

#[test]
fn skeleton_shapes_of_fixtures() {
    assert_eq!(skeleton_case("c125_no_cross"), GprimeCase::NoCrossToSecond);
    assert_eq!(skeleton_case("c125_overlap"), GprimeCase::Overlapping);
    assert_eq!(
        skeleton_case("c125_serial_host"),
        GprimeCase::Disjoint(Topology::SerialHost)
    );
    assert_eq!(
        skeleton_case("c125_parallel_hosts"),
        GprimeCase::Disjoint(Topology::ParallelHosts)
    );
    assert_eq!(
        skeleton_case("c125_shared_stretch"),
        GprimeCase::Disjoint(Topology::SharedStretch)
    );
}

#[test]
fn skeleton_is_minimal() {
    for name in [
        "c125_no_cross",
        "c125_overlap",
        "c125_serial_host",
        "c125_parallel_hosts",
        "c125_shared_stretch",
    ] {
        let inst = fixture(name);
        let prepared = inst.prepare(&inst.connectivity());
        let inst = &prepared.instance;
        let g = inst.dag();
        let gp = find_gprime(inst).unwrap();
        let (a, b) = (inst.session(0), inst.session(1));
        let flow = |m: &Vec<bool>, s, t| max_flow_masked(g, s, t, Some(m), None).0;
        let holds = |m: &Vec<bool>| {
            flow(m, a.source, a.terminal) >= 1
                && flow(m, b.source, b.terminal) >= 2
                && (gp.cross12.is_none() || flow(m, a.source, b.terminal) >= 1)
                && (gp.cross21.is_none() || flow(m, b.source, a.terminal) >= 1)
        };
        assert!(holds(&gp.keep), "{name}");
        for e in (0..g.edge_count()).filter(|&e| gp.keep[e]) {
            let mut m = gp.keep.clone();
            m[e] = false;
            assert!(!holds(&m), "{name}: edge {e} is removable");
        }
    }
}

#[test]
fn aligned_fixtures_count_at_p3() {
    for name in ["c125_no_cross", "c125_overlap", "c125_serial_host"] {
        let r = construct_125(&fixture(name), gf(3), 0).unwrap();
        assert_decodes(&r);
        let before = r
            .choices
            .iter()
            .find(|c| c.label == "three-session aligned before terminal 3")
            .unwrap();
        assert!(before.count >= 26, "{name}: {before:?}");
        let fin = r
            .choices
            .iter()
            .find(|c| c.label == "three-session aligned final")
            .unwrap();
        assert!(fin.count >= 27 - 9 - 1, "{name}: {fin:?}");
    }
}

#[test]
fn recoded_fixtures_cancel_session_one() {
    for name in [
        "c125_parallel_hosts",
        "c125_shared_stretch",
        "c125_recode_merge",
    ] {
        for p in [3, 257] {
            let r = construct_125(&fixture(name), gf(p), 0).unwrap();
            assert_decodes(&r);
            assert!(
                mentions(&r, "cancelled on the recoded edge"),
                "{name}: {:?}",
                r.transcript
            );
            if p == 3 {
                let c = r
                    .choices
                    .iter()
                    .find(|c| c.label == "three-session recoded final")
                    .unwrap();
                assert!(c.count >= 9 - 3 - 1, "{name}: {c:?}");
            }
        }
    }
    let r = construct_125(&fixture("c125_recode_merge"), gf(257), 0).unwrap();
    let line = r.transcript.iter().find(|l| l.contains("weights")).unwrap();
    assert!(
        !line.contains("[0,") && !line.contains(", 0]"),
        "both inputs carry session 1: {line}"
    );
}

#[test]
fn random_instances_of_every_class_construct() {
    for class in [[1, 3, 3], [2, 2, 4], [1, 2, 5]] {
        for seed in 0..20 {
            let inst = random_class_instance(class, seed);
            let r = construct(&inst, gf(257), seed)
                .unwrap_or_else(|e| panic!("{class:?} seed {seed}: {e}"));
            assert_decodes(&r);
        }
    }
}

#[test]
fn construction_is_deterministic_in_the_seed() {
    let inst = random_class_instance([1, 2, 5], 7);
    let a = construct(&inst, gf(257), 11).unwrap();
    let b = construct(&inst, gf(257), 11).unwrap();
    assert_eq!(a.code, b.code);
    assert_eq!(a.transcript, b.transcript);
}
