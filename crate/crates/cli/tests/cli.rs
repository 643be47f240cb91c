use std::path::Path;
use std::process::Command;

use diffset::{SetFile, Status, TheoremReport};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_diffset"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIFFSET_WORKERS")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), args)
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&[]).code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["check", "thm9.9", "--q", "2"]).code, 1);
    assert_eq!(
        run(&["construct", "--q", "2", "--d", "4", "--s", "3"]).code,
        1
    );
    assert_eq!(
        run(&["--ceiling", "2^x", "scan", "--q", "2", "--s", "1"]).code,
        1
    );
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn missing_and_invalid_inputs_exit_1() {
    let r = run(&["check", "thm4.3", "--q", "2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("--s"), "{}", r.stderr);
    assert_eq!(run(&["construct", "--q", "6", "--d", "3"]).code, 1);
    // Even s is outside the restriction corollary.
    assert_eq!(run(&["check", "cor3.2", "--q", "2", "--s", "2"]).code, 1);
    // GF(2^8) is above a ceiling of 2^6.
    let r = run(&["--ceiling", "2^6", "construct", "--q", "2", "--d", "8"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("ceiling"), "{}", r.stderr);
}

#[test]
fn unmet_hypothesis_exits_2() {
    let r = run(&["check", "thm4.3", "--q", "2", "--s", "5"]);
    assert_eq!(r.code, 2);
    assert!(
        r.stdout.contains("hypothesis: [FAIL] s ∤ q²+1"),
        "{}",
        r.stdout
    );
    assert!(r.stdout.contains("status: hypothesis-not-met"));
}

#[test]
fn non_difference_set_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.set"), "group Z_7\n7 3 1\n0\n1\n2\n").unwrap();
    let r = run_in(dir.path(), &["verify", "--set", "bad.set"]);
    assert_eq!(r.code, 3, "{}", r.stdout);
    assert!(r.stdout.contains("verified: false"));
}

#[test]
fn json_and_text_reports_agree() {
    let cases: &[&[&str]] = &[
        &["check", "thm2.2", "--q", "2", "--s", "1"],
        &["check", "cor5.2", "--q", "2", "--s", "1"],
        &["check", "thm5.1", "--q", "3"],
        &["check", "thm4.3", "--q", "2", "--s", "5"],
        &["check", "thm3.1", "--q", "2", "--a", "2", "--b", "2"],
        &["check", "lem4.1", "--q", "2", "--s", "3"],
        &["check", "lem4.2", "--q", "2", "--s", "3"],
        &["check", "hall", "--q", "3", "--d", "3"],
        &["check", "jv", "--m", "2"],
        &["check", "ho", "--m", "2", "--s", "2"],
        &["mann", "--q", "3", "--d", "4", "--subgroup-order", "10"],
    ];
    for args in cases {
        let text = run(args);
        let mut json_args = vec!["--json"];
        json_args.extend_from_slice(args);
        let json = run(&json_args);
        assert_eq!(text.code, json.code, "{args:?}");
        let report: TheoremReport = serde_json::from_str(&json.stdout).unwrap();
        assert_eq!(report.render_text(), text.stdout, "{args:?}");
        let expected = match report.status {
            Status::Verified => 0,
            Status::HypothesisNotMet => 2,
            Status::Falsified => 3,
        };
        assert_eq!(text.code, expected, "{args:?}");
    }
}

#[test]
fn status_strings_in_json() {
    let r = run(&["--json", "check", "thm4.3", "--q", "2", "--s", "5"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["status"], "hypothesis-not-met");
    let r = run(&["--json", "check", "hall", "--q", "2", "--d", "3"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["status"], "verified");
}

#[test]
fn constructed_set_file_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_in(dir.path(), &["construct", "--q", "3", "--d", "3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("set file: singer-q3-d3.set"));
    let text = std::fs::read_to_string(dir.path().join("singer-q3-d3.set")).unwrap();
    let file = SetFile::parse(&text).unwrap();
    assert_eq!(file.render(), text);
    assert_eq!(
        (file.params.v, file.params.k, file.params.lambda),
        (13, 4, 1)
    );

    let r = run_in(
        dir.path(),
        &["--json", "verify", "--set", "singer-q3-d3.set"],
    );
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["lambda_observed"], 1);

    let r = run_in(dir.path(), &["check", "hall", "--set", "singer-q3-d3.set"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn parse_errors_report_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.set"), "group Z_7\n7 3 1\n1\n  9\n4\n").unwrap();
    let r = run_in(dir.path(), &["verify", "--set", "bad.set"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 4, column 3"), "{}", r.stderr);
}

#[test]
fn search_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    for workers in ["1", "8"] {
        let r = run_in(
            dir.path(),
            &[
                "--workers",
                workers,
                "--no-timestamps",
                "search",
                "--v",
                "15",
                "--k",
                "7",
                "--lambda",
                "3",
                "--m",
                "2",
                "--out",
                workers,
            ],
        );
        assert_eq!(r.code, 0, "{}", r.stderr);
    }
    let listing = |sub: &str| {
        let mut names: Vec<String> = std::fs::read_dir(dir.path().join(sub))
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    let names = listing("1");
    assert_eq!(names, listing("8"));
    assert!(names.contains(&"summary.json".to_string()));
    assert!(names.len() > 1);
    for name in &names {
        let a = std::fs::read(dir.path().join("1").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("8").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn exhausted_search_budget_exits_1() {
    let r = run(&[
        "search", "--v", "31", "--k", "15", "--lambda", "7", "--budget", "10",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("complete: false"));
}

#[test]
fn brute_and_orbit_search_agree_through_the_cli() {
    let brute = run(&[
        "--json",
        "--no-timestamps",
        "search",
        "--v",
        "7",
        "--k",
        "3",
        "--lambda",
        "1",
        "--m",
        "2",
        "--brute",
    ]);
    let orbit = run(&[
        "--json",
        "--no-timestamps",
        "search",
        "--v",
        "7",
        "--k",
        "3",
        "--lambda",
        "1",
        "--m",
        "2",
    ]);
    assert_eq!((brute.code, orbit.code), (0, 0));
    let b: serde_json::Value = serde_json::from_str(&brute.stdout).unwrap();
    let o: serde_json::Value = serde_json::from_str(&orbit.stdout).unwrap();
    assert_eq!(b["sets"], o["sets"]);
    assert_eq!(b["representatives"], o["representatives"]);
}

#[test]
fn workers_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_diffset"))
        .args(["check", "hall", "--q", "2", "--d", "4"])
        .current_dir(dir.path())
        .env("DIFFSET_WORKERS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
}
