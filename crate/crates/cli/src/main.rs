//! `tricast`: classify, code, verify and pack three-session unicast networks.
//!
//! Exit codes: 0 success, 2 bad input or usage, 3 no construction for the
//! instance's class, 4 construction or verification failure, 5 search
//! budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tricast_core::coding::NetworkCode;
use tricast_core::construction::{construct, ConstructionError};
use tricast_core::counterexample::{certify, generate, CounterexampleError, FamilyId};
use tricast_core::field::Field;
use tricast_core::instance::{parse_instance, UnicastInstance, Verdict};
use tricast_core::packing::{
    enumerate_embeddings, packed_throughput, run_simulation, Simulation, SimulationSummary,
    StructureClass,
};
use tricast_core::verify::{verify_decoding, BruteForceError, Budget};

#[derive(Parser)]
#[command(
    name = "tricast",
    version,
    about = "Network codes for three-session multiple unicast"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the connectivity vector and the class verdict.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build, verify and write a code for a feasible instance.
    Construct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 257)]
        field: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the code; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every terminal of an instance decodes under a code.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        code: PathBuf,
        /// Time units the code was built over; inferred from its size when absent.
        #[arg(long)]
        time_units: Option<usize>,
    },
    /// Emit a built-in infeasible instance with its certificate.
    Counterexample {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        field: u32,
        #[arg(long, default_value_t = 1)]
        time_units: usize,
        /// Cap on both the coefficient odometer and the subspace search nodes.
        #[arg(long)]
        budget: Option<u64>,
        /// Where to write the instance, certificate in its header.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare pure routing with structure packing on a capacitated instance.
    Pack {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run packed-versus-routed trials on a level network.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        level: u8,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        sim: u8,
        #[arg(long, default_value_t = 300)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the table; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run: exit code and message.
struct Failure(u8, String);

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure(2, msg.into())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { input } => classify(&input),
        Command::Construct {
            input,
            field,
            seed,
            out,
        } => construct_cmd(&input, field, seed, out.as_deref()),
        Command::Verify {
            input,
            code,
            time_units,
        } => verify_cmd(&input, &code, time_units),
        Command::Counterexample {
            family,
            field,
            time_units,
            budget,
            out,
        } => counterexample_cmd(&family, field, time_units, budget, out.as_deref()),
        Command::Pack { input } => pack(&input),
        Command::Simulate {
            level,
            sim,
            trials,
            seed,
            out,
        } => simulate(level, sim, trials, seed, out.as_deref()),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read_instance(path: &Path) -> Result<UnicastInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::input(format!("{}:{e}", path.display())))
}

fn field(p: u32) -> Result<Field, Failure> {
    Field::new(p).map_err(|e| Failure::input(e.to_string()))
}

fn write_or_return(out: Option<&Path>, body: String, summary: String) -> Outcome {
    match out {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok(summary)
        }
        None => Ok(summary + &body),
    }
}

fn bracket(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(" "))
}

fn classify(input: &Path) -> Outcome {
    let inst = read_instance(input)?;
    let conn = inst.connectivity();
    let mut out = format!("connectivity {}\n", bracket(&conn));
    let rates: Vec<u32> = inst.sessions().iter().map(|s| s.rate).collect();
    if inst.sessions().len() == 3 && rates.iter().all(|&r| r == 1) {
        let c = inst.classify().map_err(|e| Failure::input(e.to_string()))?;
        let _ = writeln!(out, "sorted {}", bracket(&c.sorted));
        let _ = writeln!(out, "verdict {}", c.verdict);
        return Ok(out);
    }
    let _ = writeln!(out, "rates {}", bracket(&rates));
    let verdict = if rates.iter().zip(&conn).any(|(r, c)| r > c) {
        "Infeasible (a session's rate exceeds its connectivity)"
    } else if conn == [2, 3] && rates == [2, 1] {
        // Connectivity [2 3] does not guarantee rates 2 and 1.
        "KnownInfeasibleClass"
    } else {
        "Undetermined"
    };
    let _ = writeln!(out, "verdict {verdict}");
    Ok(out)
}

fn construct_cmd(input: &Path, p: u32, seed: u64, out: Option<&Path>) -> Outcome {
    let inst = read_instance(input)?;
    let gf = field(p)?;
    let result = construct(&inst, gf, seed).map_err(|e| match e {
        ConstructionError::NoConstruction(Verdict::Unknown124) => Failure(
            3,
            "no construction: the [1 2 4] class is an open case".into(),
        ),
        ConstructionError::NoConstruction(v) => {
            Failure(3, format!("no construction for verdict {v}"))
        }
        ConstructionError::Instance(e) => Failure::input(e.to_string()),
        other => Failure(4, other.to_string()),
    })?;
    // Independent check before anything is written.
    let report =
        verify_decoding(&result.instance, &result.code).map_err(|e| Failure(4, e.to_string()))?;
    if !report.all_decodable() {
        return Err(Failure(
            4,
            format!("constructed code fails verification\n{}", report.to_text()),
        ));
    }
    let mut summary = format!(
        "scheme {}\ntime-units {}\nfield {}\n",
        result.scheme, result.time_units, p
    );
    for line in &result.transcript {
        let _ = writeln!(summary, "step {line}");
    }
    for c in &result.choices {
        let _ = writeln!(
            summary,
            "choices {}: {} (bound {})",
            c.label, c.count, c.bound
        );
    }
    summary.push_str(&report.to_text());
    write_or_return(out, result.code.to_text(), summary)
}

fn verify_cmd(input: &Path, code: &Path, t: Option<usize>) -> Outcome {
    let inst = read_instance(input)?;
    let text = std::fs::read_to_string(code)
        .map_err(|e| Failure::input(format!("{}: {e}", code.display())))?;
    let code = NetworkCode::from_text(&text).map_err(|e| Failure::input(format!("code: {e}")))?;
    let unit = inst.unit_split().0;
    let per_unit = unit.dag().edge_count();
    let t = match t {
        Some(0) => return Err(Failure::input("time units must be positive")),
        Some(t) => t,
        None if per_unit > 0 && code.edge_count() % per_unit == 0 => {
            (code.edge_count() / per_unit).max(1)
        }
        None => {
            return Err(Failure::input(
                "code size does not match any number of time units",
            ))
        }
    };
    let target = unit.time_expand(t);
    let report = verify_decoding(&target, &code).map_err(|e| Failure::input(e.to_string()))?;
    if report.all_decodable() {
        Ok(report.to_text() + "decodable\n")
    } else {
        Err(Failure(
            4,
            format!("some terminal cannot decode\n{}", report.to_text()),
        ))
    }
}

fn counterexample_cmd(
    name: &str,
    p: u32,
    t: usize,
    budget: Option<u64>,
    out: Option<&Path>,
) -> Outcome {
    let family: FamilyId = name
        .parse()
        .map_err(|e: CounterexampleError| Failure::input(e.to_string()))?;
    let budget = match budget {
        Some(n) => Budget {
            odometer: n.into(),
            subspace: n,
        },
        None => Budget::default(),
    };
    let cert = certify(family, p, t, &budget).map_err(|e| match e {
        CounterexampleError::BruteForce(BruteForceError::BudgetExceeded { .. }) => {
            Failure(5, e.to_string())
        }
        CounterexampleError::BruteForce(BruteForceError::Unsupported)
        | CounterexampleError::UnknownFamily(_) => Failure::input(e.to_string()),
        other => Failure(4, other.to_string()),
    })?;
    let inst = generate(family);
    let summary = format!(
        "family {family}\nconnectivity {}\ncertificate {cert}\n",
        bracket(&inst.connectivity())
    );
    let body = format!("# {family}: {cert}\n{}", inst.to_text());
    write_or_return(out, body, summary)
}

fn class_counts(acts: impl IntoIterator<Item = (StructureClass, u32)>) -> String {
    let mut sums = [0u32; 3];
    for (c, a) in acts {
        sums[StructureClass::ALL
            .iter()
            .position(|&k| k == c)
            .expect("known class")] += a;
    }
    StructureClass::ALL
        .iter()
        .zip(sums)
        .map(|(c, a)| format!("{c}={a}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pack(input: &Path) -> Outcome {
    let inst = read_instance(input)?;
    let list = enumerate_embeddings(&inst).map_err(|e| Failure::input(e.to_string()))?;
    let packed =
        packed_throughput(&inst, &list.embeddings).map_err(|e| Failure::input(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "routed {}", packed.routed);
    let _ = writeln!(out, "packed {}", packed.rate);
    let _ = writeln!(out, "optimal {}", packed.optimal);
    let _ = writeln!(
        out,
        "embeddings {}",
        class_counts(list.embeddings.iter().map(|e| (e.class, 1)))
    );
    let _ = writeln!(
        out,
        "activations {}",
        class_counts(
            list.embeddings
                .iter()
                .zip(&packed.activations)
                .map(|(e, &a)| (e.class, a))
        )
    );
    if !list.truncated.is_empty() {
        let _ = writeln!(out, "truncated {:?}", list.truncated);
    }
    Ok(out)
}

fn simulation_table(s: &SimulationSummary) -> String {
    let mut out = String::from("trial\tseed\trouted\tpacked\t[1 3 3]\t[2 2 4]\t[1 2 5]\toptimal\n");
    for r in &s.records {
        let [a, b, c] = r.activations;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{a}\t{b}\t{c}\t{}",
            r.trial, r.seed, r.routed, r.packed, r.optimal
        );
    }
    out
}

fn simulate(level: u8, sim: u8, trials: usize, seed: u64, out: Option<&Path>) -> Outcome {
    if trials == 0 {
        return Err(Failure::input("trials must be positive"));
    }
    let simulation = if sim == 1 {
        Simulation::One
    } else {
        Simulation::Two
    };
    let s = run_simulation(level, simulation, trials, seed)
        .map_err(|e| Failure::input(e.to_string()))?;
    let mut summary = format!("level {level}\nsimulation {sim}\ntrials {trials}\n");
    let _ = writeln!(summary, "improved {}", s.improved);
    let _ = writeln!(summary, "proportion {:.2}%", 100.0 * s.proportion);
    match s.mean_improvement {
        Some(g) => {
            let _ = writeln!(summary, "mean-improvement {:.2}%", 100.0 * g);
        }
        None => summary.push_str("mean-improvement -\n"),
    }
    let [a, b, c] = s.embeddings;
    let _ = writeln!(summary, "embeddings [1 3 3]={a} [2 2 4]={b} [1 2 5]={c}");
    let _ = writeln!(summary, "all-optimal {}", s.all_optimal);
    if !s.truncated.is_empty() {
        let _ = writeln!(summary, "truncated {:?}", s.truncated);
    }
    write_or_return(out, simulation_table(&s), summary)
}
