//! End-to-end checks of the binary: canonical output, exit codes, and
//! byte-for-byte determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wepsilon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn act_prints_canonical_form() {
    let out = run(&[
        "act",
        "--epsilon",
        "-1",
        "--i",
        "0",
        "--m",
        "1",
        "--poly",
        "1",
        "--symbolic",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "b*t^1 + -1*a*b^2\n");
}

#[test]
fn act_numeric_params() {
    let out = run(&[
        "act",
        "--epsilon",
        "1",
        "--i",
        "1",
        "--m",
        "0",
        "--poly",
        "t",
        "--lambda",
        "2",
        "--alpha",
        "3",
        "--beta",
        "0",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2*t^2 + -8*t^1 + 6\n");
}

#[test]
fn usage_errors_exit_2() {
    // lambda = 0 violates the family precondition.
    let out = run(&[
        "act",
        "--epsilon",
        "1",
        "--i",
        "0",
        "--m",
        "0",
        "--poly",
        "1",
        "--lambda",
        "0",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(code(&out), 2);
    // Malformed rational.
    let out = run(&[
        "act",
        "--epsilon",
        "1",
        "--i",
        "0",
        "--m",
        "0",
        "--poly",
        "1",
        "--lambda",
        "x",
        "--alpha",
        "1",
        "--beta",
        "1",
    ]);
    assert_eq!(code(&out), 2);
    // Unknown flag (clap's own usage error).
    let out = run(&["verify", "axioms", "--bogus"]);
    assert_eq!(code(&out), 2);
    // Bad epsilon.
    let out = run(&["verify", "axioms", "--epsilon", "2"]);
    assert_eq!(code(&out), 2);
    // Symbolic and numeric flags are mutually exclusive.
    let out = run(&[
        "act",
        "--epsilon",
        "1",
        "--i",
        "0",
        "--m",
        "0",
        "--poly",
        "1",
        "--symbolic",
        "--lambda",
        "1",
        "--alpha",
        "0",
        "--beta",
        "0",
    ]);
    assert_eq!(code(&out), 2);
    // beta_0 != 1 is rejected as usage.
    let out = run(&["sequence", "--values", "2,4,8"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_suite_passes_and_is_deterministic() {
    let args = [
        "verify",
        "axioms",
        "--epsilon",
        "1",
        "--i-max",
        "1",
        "--m-max",
        "1",
        "--k-max",
        "2",
        "--symbolic",
    ];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8_lossy(&first.stdout);
    assert!(text.ends_with("summary checks=108 failed=0 status=pass\n"));
}

#[test]
fn verify_out_file_matches_stdout() {
    let dir = std::env::temp_dir().join("wepsilon-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let out = run(&[
        "verify",
        "identities",
        "--k-max",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let file = std::fs::read(&path).unwrap();
    assert_eq!(file, out.stdout);
}

#[test]
fn act_table_export() {
    let args = [
        "act",
        "--epsilon",
        "-1",
        "--table",
        "--i-max",
        "1",
        "--m-max",
        "1",
        "--k-max",
        "1",
        "--symbolic",
    ];
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    // 3 * 2 * 2 grid cells, one record each.
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("epsilon=-1 i=-1 m=0 k=0 result="));
    // Byte-identical on repeat.
    assert_eq!(run(&args).stdout, out.stdout);
    // Mixing --table with a single-point flag is a usage error.
    let out = run(&[
        "act",
        "--epsilon",
        "-1",
        "--table",
        "--i",
        "0",
        "--symbolic",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sequence_exit_codes() {
    let out = run(&["sequence", "--geometric", "3/2", "--len", "13"]);
    assert_eq!(code(&out), 0);
    let out = run(&["sequence", "--values", "1,1,2,4"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("m=1 n=1"));
}

#[test]
fn classify_and_probe_flows() {
    let out = run(&["classify", "w1", "--degree", "3"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("forced-zero a3"));

    let out = run(&[
        "classify", "wm1", "--degree", "3", "--mode", "sampled", "--trace",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("forced-zero a3^(0)"));
    assert!(text.contains("sample alpha="));
    assert!(text.contains("relation=wm1-index-compatibility"));

    let out = run(&["classify", "wm1", "--degree", "1", "--mode", "symbolic"]);
    assert_eq!(code(&out), 2);

    let out = run(&[
        "probe",
        "--epsilon",
        "1",
        "--lambda",
        "1",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--start",
        "t",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "probe found\n");

    let out = run(&[
        "probe",
        "--epsilon",
        "-1",
        "--lambda",
        "2",
        "--alpha",
        "0",
        "--beta",
        "3",
        "--start",
        "t^2",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certified"));

    let out = run(&[
        "probe",
        "--epsilon",
        "1",
        "--lambda",
        "1",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--start",
        "0",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn every_suite_is_reachable() {
    let with_eps: &[&str] = &[
        "axioms",
        "submodule",
        "shift-iso",
        "vir-reduction",
        "expansion",
        "closed-forms",
        "extract-roundtrip",
    ];
    for suite in with_eps {
        for eps in ["1", "-1"] {
            let out = run(&[
                "verify",
                suite,
                "--epsilon",
                eps,
                "--i-max",
                "1",
                "--m-max",
                "1",
                "--k-max",
                "1",
                "--trials",
                "2",
            ]);
            assert_eq!(code(&out), 0, "suite {suite} eps {eps}");
            assert!(String::from_utf8_lossy(&out.stdout).contains("status=pass"));
        }
    }
    for suite in ["oracle-equiv", "identities"] {
        let out = run(&[
            "verify", suite, "--i-max", "1", "--m-max", "1", "--k-max", "3",
        ]);
        assert_eq!(code(&out), 0, "suite {suite}");
    }
    // Suites that need --epsilon reject its absence as usage.
    let out = run(&[
        "verify", "axioms", "--i-max", "1", "--m-max", "1", "--k-max", "1",
    ]);
    assert_eq!(code(&out), 2);
}
