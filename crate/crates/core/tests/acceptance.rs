//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see them; the test fails if any criterion outside `KNOWN_RED` fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use tricast_core::coding::{det_identity_check, distinct_image_count, partial_decode};
use tricast_core::construction::{
    construct, construct_125, construct_two_unicast_1_m, construct_two_unicast_24,
    random_class_instance,
};
use tricast_core::counterexample::{certify, Certificate, FamilyId};
use tricast_core::field::{all_vectors, FieldMatrix};
use tricast_core::graph::{
    connectivity_of, is_minimal_for, minimize, structure, Dag, Edge, NodeId,
};
use tricast_core::packing::{
    enumerate_embeddings, level_template, run_simulation, sample_level_network, PackingModel,
    Simulation,
};
use tricast_core::verify::{verify_decoding, Budget};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to stay red; each has a recorded analysis.
const KNOWN_RED: &[usize] = &[5];

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut total = 0;
    for class in [[1, 3, 3], [2, 2, 4], [1, 2, 5]] {
        for seed in 0..50 {
            total += 1;
            let raw = random_class_instance(class, 1000 + seed);
            let inst = raw.prepare(&raw.connectivity()).instance;
            let mut sorted = inst.connectivity();
            sorted.sort_unstable();
            if sorted != class {
                failures.push(format!("{class:?}/{seed}: connectivity {sorted:?}"));
                continue;
            }
            match construct(&inst, gf(257), seed) {
                Ok(r)
                    if verify_decoding(&r.instance, &r.code)
                        .unwrap()
                        .all_decodable() => {}
                Ok(_) => failures.push(format!("{class:?}/{seed}: code does not decode")),
                Err(e) => failures.push(format!("{class:?}/{seed}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{}/{total} constructed and verified in {elapsed:.1?} {failures:?}",
            total - failures.len()
        ),
    )
}

fn criterion_2() -> Verdict {
    let f = gf(3);
    let q = 3usize;
    let mut lines = Vec::new();
    let mut ok = true;
    let mut record = |what: &str, count: usize, bound: usize, exact: bool| {
        let holds = if exact {
            count == bound
        } else {
            count >= bound
        };
        ok &= holds;
        lines.push(format!(
            "{what} {count}{}{bound}",
            if exact { "==" } else { ">=" }
        ));
    };
    for name in ["one_m_two_overlaps", "one_m_three_overlaps"] {
        let r = construct_two_unicast_1_m(&fixture(name), f, 1).unwrap();
        for c in r
            .choices
            .iter()
            .filter(|c| c.label == "two-unicast-1-m column")
        {
            record("column", c.count, q - 1, true);
        }
    }
    let r = construct_two_unicast_24(&fixture("two_four_distinct_hosts"), f, 2).unwrap();
    let c = r
        .choices
        .iter()
        .find(|c| c.label == "two-unicast-2-4 distinct hosts")
        .unwrap();
    record("distinct-hosts", c.count, q * q - q - 1, false);
    for name in ["c125_no_cross", "c125_overlap", "c125_serial_host"] {
        let r = construct_125(&fixture(name), f, 0).unwrap();
        let c = r
            .choices
            .iter()
            .find(|c| c.label == "three-session aligned final")
            .unwrap();
        record("aligned", c.count, q * q * q - q * q - 1, false);
    }
    for name in [
        "c125_parallel_hosts",
        "c125_shared_stretch",
        "c125_recode_merge",
    ] {
        let r = construct_125(&fixture(name), f, 0).unwrap();
        let c = r
            .choices
            .iter()
            .find(|c| c.label == "three-session recoded final")
            .unwrap();
        record("recoded", c.count, q * q - q - 1, false);
    }
    check(ok, lines.join(", "))
}

fn criterion_3() -> Verdict {
    let mut problems = Vec::new();
    let f2 = gf(2);
    let mut exhaustive = 0;
    for e in all_vectors(f2, 6) {
        let m2 = FieldMatrix::from_rows(f2, &[&e[..3], &e[3..]]);
        for (beta, xi) in [([1, 0], [0, 1]), ([1, 1], [1, 1])] {
            exhaustive += 1;
            let (l, r) = det_identity_by_products(&m2, beta, xi);
            if det_identity_check(&m2, beta, xi) != Ok(true) || l != r {
                problems.push(format!("p=2 {e:?}"));
            }
        }
    }
    let f = gf(257);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
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
        if det_identity_check(&m2, beta, xi) != Ok(true) {
            problems.push(format!("p=257 {rows:?}"));
        }
    }
    // partial_decode against enumeration for 3x(1+1) and 2x(1+2) shapes.
    let f3 = gf(3);
    let mut decode_cases = 0;
    for (rows, c1, c2) in [(3, 1, 1), (2, 1, 2)] {
        for e in all_vectors(f3, rows * (c1 + c2)) {
            let h1 = FieldMatrix::from_fn(f3, rows, c1, |r, c| e[r * c1 + c]);
            let h2 = FieldMatrix::from_fn(f3, rows, c2, |r, c| e[rows * c1 + r * c2 + c]);
            let reachable: Vec<Vec<u32>> = all_vectors(f3, rows)
                .filter(|z| !preimages(z, &h1, &h2).is_empty())
                .collect();
            let unique = reachable.iter().all(|z| preimages(z, &h1, &h2).len() == 1);
            for z in &reachable {
                decode_cases += 1;
                let got = partial_decode(z, &h1, &h2);
                let expected = if unique {
                    preimages(z, &h1, &h2).into_iter().next()
                } else {
                    None
                };
                if got != expected {
                    problems.push(format!("partial_decode {e:?} {z:?}"));
                }
            }
        }
    }
    let (m, cons) = distinct_value_fixture();
    let distinct = distinct_image_count(&m, &cons);
    if distinct < 8 || distinct != distinct_images(&m, &cons) {
        problems.push(format!("distinct values {distinct}"));
    }
    check(
        problems.is_empty(),
        format!(
            "identity {exhaustive} exhaustive + 1000 random, partial_decode {decode_cases} cases, distinct values {distinct}>=8 {problems:?}"
        ),
    )
}

fn criterion_4() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    let b = Budget::default();
    for (family, cap, demand) in [(FamilyId::Fig222, 2, 3), (FamilyId::Fig113, 1, 2)] {
        match certify(family, 2, 1, &b) {
            Ok(Certificate::Cut {
                capacity: c,
                demand: d,
                ..
            }) if (c, d) == (cap, demand) => lines.push(format!("{family} cut {c}<{d}")),
            other => {
                ok = false;
                lines.push(format!("{family} {other:?}"));
            }
        }
    }
    for family in [FamilyId::Fig23Rate21, FamilyId::Corollary232] {
        for t in [1, 2] {
            let start = Instant::now();
            let r = certify(family, 2, t, &b);
            let elapsed = start.elapsed();
            let good = matches!(r, Ok(Certificate::LinearInfeasible { .. }))
                && elapsed < Duration::from_secs(600);
            ok &= good;
            lines.push(format!(
                "{family} T={t} {} in {elapsed:.1?}",
                if good { "infeasible" } else { "NOT certified" }
            ));
        }
    }
    check(ok, lines.join(", "))
}

fn criterion_5() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in FEASIBLE_FIXTURES {
        let inst = fixture(name);
        let large = gate_passes(&inst, 257, 100);
        let small = gate_passes(&inst, 2, 100);
        ok &= large >= 99 && small < 100;
        lines.push(format!(
            "{name} {large}/100 at 257, {}/100 fail at 2",
            100 - small
        ));
    }
    check(ok, lines.join(", "))
}

fn criterion_6() -> Verdict {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut proportions = [[0.0; 2]; 4];
    for level in 1..=4u8 {
        for (k, sim) in [Simulation::One, Simulation::Two].into_iter().enumerate() {
            let s = run_simulation(level, sim, 300, 0).unwrap();
            let dominated = s.records.iter().all(|r| r.packed >= r.routed);
            ok &= dominated && s.records.len() == 300;
            proportions[level as usize - 1][k] = s.proportion;
            lines.push(format!("L{level}S{} {:.1}%", k + 1, 100.0 * s.proportion));
        }
    }
    ok &= proportions[3][0] == 0.0;
    ok &= (0..3).all(|l| proportions[l][1] > proportions[l][0]);

    // Branch and bound against enumeration, on full models small enough and
    // on windows of five structures.
    let mut compared = 0;
    for level in 1..=3u8 {
        let list = enumerate_embeddings(&level_template(level).unwrap().instance).unwrap();
        let useful: Vec<Vec<usize>> = list
            .embeddings
            .iter()
            .filter(|e| !e.routable)
            .map(|e| e.edges.clone())
            .collect();
        for seed in 0..20u64 {
            let inst = sample_level_network(level, Simulation::One, seed).unwrap();
            let start = seed as usize % useful.len();
            let window: Vec<Vec<usize>> = (0..5)
                .map(|k| useful[(start + k) % useful.len()].clone())
                .collect();
            for embeddings in [window, useful.clone()] {
                let model = PackingModel::new(&inst, embeddings).unwrap();
                if let Some((best, _)) = model.exhaustive(10_000) {
                    compared += 1;
                    let bb = model.packed(100_000);
                    ok &= bb.optimal && bb.rate == best;
                }
            }
        }
    }
    ok &= compared > 0;
    lines.push(format!(
        "branch-and-bound matched enumeration on {compared} models"
    ));
    check(ok, lines.join(", "))
}

fn random_dag(seed: u64) -> (Dag, Vec<(NodeId, NodeId)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(6..=10);
    let m = rng.gen_range(n..=3 * n);
    let edges = (0..m)
        .map(|_| {
            let a = rng.gen_range(0..n - 1);
            Edge {
                tail: a,
                head: rng.gen_range(a + 1..n),
                capacity: 1,
            }
        })
        .collect();
    let pairs = (0..3)
        .map(|_| (rng.gen_range(0..n / 2), rng.gen_range(n / 2..n)))
        .collect();
    (
        Dag::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap(),
        pairs,
    )
}

fn criterion_7() -> Verdict {
    let mut problems = Vec::new();
    for seed in 0..100 {
        let (g, pairs) = random_dag(seed);
        let conn = connectivity_of(&g, &pairs);
        let exempt: Vec<NodeId> = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
        let h = structure(&g, &exempt).dag;
        if (0..h.node_count()).any(|v| !exempt.contains(&v) && h.degree(v) > 3)
            || connectivity_of(&h, &pairs) != conn
        {
            problems.push(format!("structure {seed}"));
        }
        let (m, _) = minimize(&g, &pairs);
        let (again, _) = minimize(&m, &pairs);
        if connectivity_of(&m, &pairs) != conn
            || !is_minimal_for(&m, &pairs, &conn)
            || again.edges() != m.edges()
        {
            problems.push(format!("minimize {seed}"));
        }
        for t in 2..=3 {
            let scaled: Vec<u32> = conn.iter().map(|&c| c * t as u32).collect();
            if connectivity_of(&g.time_expand(t), &pairs) != scaled {
                problems.push(format!("time_expand {seed} T={t}"));
            }
        }
    }
    check(problems.is_empty(), format!("100 random DAGs {problems:?}"))
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Verdict; 7] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
    ];
    let mut unexpected = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        match &verdict {
            Ok(detail) => println!("criterion {n} PASS ({elapsed:.1?}): {detail}"),
            Err(detail) if KNOWN_RED.contains(&n) => {
                println!("criterion {n} FAIL, known shortfall ({elapsed:.1?}): {detail}")
            }
            Err(detail) => {
                println!("criterion {n} FAIL ({elapsed:.1?}): {detail}");
                unexpected.push(n);
            }
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
