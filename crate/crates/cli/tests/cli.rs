use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn classify_reports_connectivity_and_verdict() {
    for (file, sorted, verdict) in [
        ("c133_permuted.txt", "[1 3 3]", "Feasible133"),
        ("c224_overlaps.txt", "[2 2 4]", "Feasible224"),
        ("c125_overlap.txt", "[1 2 5]", "Feasible125"),
        ("c222_fails.txt", "[2 2 2]", "KnownInfeasibleClass"),
    ] {
        let o = run(&["classify", "--input", path_str(&fixture(file))]);
        assert_eq!(code(&o), 0, "{file}");
        let text = stdout(&o);
        assert!(text.contains(&format!("sorted {sorted}")), "{file}: {text}");
        assert!(
            text.contains(&format!("verdict {verdict}")),
            "{file}: {text}"
        );
    }
}

#[test]
fn classify_handles_two_session_rate_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.txt");
    let o = run(&[
        "counterexample",
        "--family",
        "Fig23Rate21",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["classify", "--input", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("connectivity [2 3]"), "{text}");
    assert!(text.contains("verdict KnownInfeasibleClass"), "{text}");
}

#[test]
fn construct_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for file in ["c133_permuted.txt", "c224_overlaps.txt", "c125_overlap.txt"] {
        let input = fixture(file);
        let out = dir.path().join(file);
        let o = run(&[
            "construct",
            "--input",
            path_str(&input),
            "--seed",
            "3",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(
            code(&o),
            0,
            "{file}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = stdout(&o);
        assert!(text.contains("all_decodable true"), "{text}");
        let t = text
            .lines()
            .find_map(|l| l.strip_prefix("time-units "))
            .expect("time units printed")
            .to_string();
        let o = run(&[
            "verify",
            "--input",
            path_str(&input),
            "--code",
            path_str(&out),
        ]);
        assert_eq!(
            code(&o),
            0,
            "{file}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let o = run(&[
            "verify",
            "--input",
            path_str(&input),
            "--code",
            path_str(&out),
            "--time-units",
            &t,
        ]);
        assert_eq!(code(&o), 0);
    }
}

#[test]
fn construct_is_deterministic_in_its_seed() {
    let input = fixture("c125_overlap.txt");
    let a = run(&["construct", "--input", path_str(&input), "--seed", "9"]);
    let b = run(&["construct", "--input", path_str(&input), "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zeroed_code_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("c224_overlaps.txt");
    let out = dir.path().join("code.txt");
    assert_eq!(
        code(&run(&[
            "construct",
            "--input",
            path_str(&input),
            "--out",
            path_str(&out)
        ])),
        0
    );
    let zeroed: String = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| match l.strip_prefix("row ") {
            Some(rest) => {
                let mut parts = rest.split_whitespace();
                let e = parts.next().unwrap();
                let zeros: Vec<&str> = parts.map(|_| "0").collect();
                format!("row {e} {}\n", zeros.join(" "))
            }
            None => format!("{l}\n"),
        })
        .collect();
    std::fs::write(&out, zeroed).unwrap();
    let o = run(&[
        "verify",
        "--input",
        path_str(&input),
        "--code",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn infeasible_and_open_classes_exit_with_three() {
    let o = run(&["construct", "--input", path_str(&fixture("c222_fails.txt"))]);
    assert_eq!(code(&o), 3);
    let dir = tempfile::tempdir().unwrap();
    let open = dir.path().join("open.txt");
    // Session 1 on one path, session 2 on two, session 3 on four.
    std::fs::write(
        &open,
        "nodes s1 s2 s3 t1 t2 t3\n\
         edge s1 t1 1\n\
         edge s2 t2 1\nedge s2 t2 1\n\
         edge s3 t3 1\nedge s3 t3 1\nedge s3 t3 1\nedge s3 t3 1\n\
         session s1 t1 1\nsession s2 t2 1\nsession s3 t3 1\n",
    )
    .unwrap();
    let o = run(&["classify", "--input", path_str(&open)]);
    assert!(stdout(&o).contains("verdict Unknown124"), "{}", stdout(&o));
    let o = run(&["construct", "--input", path_str(&open)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("open case"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "nodes a b\nedge a c 1\n").unwrap();
    let o = run(&["classify", "--input", path_str(&bad)]);
    assert_eq!(code(&o), 2);
    let cyclic = dir.path().join("cyclic.txt");
    std::fs::write(
        &cyclic,
        "nodes a b\nedge a b 1\nedge b a 1\nsession a b 1\n",
    )
    .unwrap();
    assert_eq!(code(&run(&["classify", "--input", path_str(&cyclic)])), 2);
    assert_eq!(
        code(&run(&["classify", "--input", "/nonexistent/x.txt"])),
        2
    );
    assert_eq!(code(&run(&["counterexample", "--family", "nope"])), 2);
    assert_eq!(code(&run(&["simulate", "--level", "5", "--sim", "1"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn counterexamples_certify_and_respect_budget() {
    for (family, kind) in [
        ("Fig222", "cut"),
        ("Fig113", "cut"),
        ("Fig23Rate21", "linear-infeasible"),
        ("Corollary232", "linear-infeasible"),
    ] {
        let o = run(&["counterexample", "--family", family]);
        assert_eq!(code(&o), 0, "{family}");
        assert!(
            stdout(&o).contains(&format!("certificate {kind}")),
            "{}",
            stdout(&o)
        );
    }
    let o = run(&[
        "counterexample",
        "--family",
        "Corollary232",
        "--budget",
        "10",
    ]);
    assert_eq!(code(&o), 5);
}

#[test]
fn pack_compares_routing_and_packing() {
    let o = run(&["pack", "--input", path_str(&fixture("c224_overlaps.txt"))]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for key in ["routed ", "packed ", "activations ", "embeddings "] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn simulate_is_deterministic_and_tabulated() {
    let args = [
        "simulate", "--level", "1", "--sim", "2", "--trials", "6", "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("proportion "), "{text}");
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.split('\t').count() == 8)
        .collect();
    assert_eq!(rows.len(), 7, "{text}");
    assert_eq!(rows[1].split('\t').nth(1), Some("11"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.tsv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path_str(&out)]);
    let o = run(&with_out);
    assert_eq!(code(&o), 0);
    let table = std::fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 7);
    assert!(!stdout(&o).contains('\t'));
}
