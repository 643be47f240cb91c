//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use diffset::analysis::{self, mann_test};
use diffset::arith::{divisors, gcd};
use diffset::search::{brute_force_search, orbit_union_search, SearchSpec};
use diffset::singer::{singer_construct, singer_construct_streamed, singer_restriction_check};
use diffset::{
    AbelianGroup, DifferenceSet, Params, Resources, SetFile, SetReport, Status, TheoremReport,
};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_diffset"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIFFSET_WORKERS")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn check_report(dir: &Path, args: &[&str], expected_code: i32) -> Result<TheoremReport, String> {
    let mut full = vec!["--json", "check"];
    full.extend_from_slice(args);
    let r = cli(dir, &full);
    ensure!(
        r.code == expected_code,
        "check {args:?} exited {} (expected {expected_code}): {}{}",
        r.code,
        r.stdout,
        r.stderr
    );
    serde_json::from_str(&r.stdout).map_err(|e| format!("check {args:?}: bad JSON: {e}"))
}

fn conclusion_ok(r: &TheoremReport, name: &str) -> Outcome {
    let c = r
        .conclusions
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| format!("{}: no conclusion {name:?}", r.theorem))?;
    ensure!(c.ok, "{}: conclusion {name:?} failed", r.theorem);
    Ok(())
}

/// Runs `construct`, checks the report, and loads the written set file.
fn construct(
    dir: &Path,
    q: u64,
    d: u32,
    expected: (u64, u64, u64),
) -> Result<DifferenceSet, String> {
    let (qs, ds) = (q.to_string(), d.to_string());
    let r = cli(dir, &["--json", "construct", "--q", &qs, "--d", &ds]);
    ensure!(
        r.code == 0,
        "construct q={q} d={d} exited {}: {}",
        r.code,
        r.stderr
    );
    let report: SetReport = serde_json::from_str(&r.stdout).map_err(|e| e.to_string())?;
    let p = report.params;
    ensure!((p.v, p.k, p.lambda) == expected, "params {p}");
    ensure!(
        report.verified && report.lambda_observed == Some(expected.2),
        "not verified"
    );
    ensure!(report.normalized, "not normalized");
    ensure!(
        report.profile_checks.iter().all(|c| c.ok()),
        "profile check failed"
    );
    let text = std::fs::read_to_string(dir.join(format!("singer-q{q}-d{d}.set")))
        .map_err(|e| e.to_string())?;
    let mut set = SetFile::parse(&text)
        .map_err(|e| e.to_string())?
        .to_candidate()
        .map_err(|e| e.to_string())?;
    ensure!(
        set.verify(2).map_err(|e| e.to_string())?.verified,
        "set file does not re-verify"
    );
    Ok(set)
}

/// Sorted counts `|D ∩ (H + x)|` over the cosets of the unique subgroup of order `m`.
fn coset_counts(d: &DifferenceSet, m: u64) -> Result<(Vec<u64>, Vec<u64>), String> {
    let h = d
        .group()
        .unique_subgroup_of_order(m)
        .map_err(|e| e.to_string())?
        .ok_or("no unique subgroup")?;
    let profile = d.intersection_profile(&h);
    Ok((profile.multiset(), h.elements().to_vec()))
}

fn a1(dir: &Path) -> Outcome {
    let d = construct(dir, 2, 4, (15, 7, 3))?;
    ensure!(d.is_normalized(), "not normalized");
    let (h_counts, h) = coset_counts(&d, 3)?;
    ensure!(h == [0, 5, 10], "H = {h:?}");
    ensure!(h.iter().all(|&x| d.contains(x)), "H ⊄ D");
    ensure!(h_counts == [1, 1, 1, 1, 3], "H-coset counts {h_counts:?}");
    let (k_counts, k) = coset_counts(&d, 5)?;
    let meet: Vec<u64> = k.iter().copied().filter(|&x| d.contains(x)).collect();
    ensure!(meet == [0], "D ∩ K = {meet:?}");
    ensure!(k_counts == [1, 3, 3], "K-coset counts {k_counts:?}");
    check_report(dir, &["thm2.2", "--q", "2", "--s", "1"], 0)?;
    check_report(dir, &["cor5.2", "--q", "2", "--s", "1"], 0)?;
    Ok(())
}

fn a2(dir: &Path) -> Outcome {
    let d = construct(dir, 3, 4, (40, 13, 4))?;
    // q odd: one H-coset inside D, every other coset met once.
    let (h_counts, _) = coset_counts(&d, 4)?;
    ensure!(
        h_counts == [[1u64; 9].as_slice(), &[4]].concat(),
        "H-coset counts {h_counts:?}"
    );
    let (k_counts, _) = coset_counts(&d, 10)?;
    ensure!(k_counts == [1, 4, 4, 4], "K-coset counts {k_counts:?}");
    check_report(dir, &["thm2.2", "--q", "3", "--s", "1"], 0)?;
    check_report(dir, &["thm5.1", "--q", "3"], 0)?;

    let u = d.group().unique_subgroup_of_order(10).unwrap().unwrap();
    let mann = mann_test(&d, &u).map_err(|e| e.to_string())?;
    let w = mann.witness.as_ref().ok_or("no Mann witness")?;
    ensure!(
        (w.p, w.f, w.j) == (3, 1, 1),
        "witness ({}, {}, {})",
        w.p,
        w.f,
        w.j
    );
    // By hand: u* = exp(Z_40 / U) = 4, 3^1 = 3 ≡ -1 (mod 4), n = 9 = 3^2.
    ensure!(
        mann.u_star == 4 && (w.p.pow(w.f as u32) + 1) % 4 == 0 && 9 == w.p.pow(2 * w.j),
        "u* = {}",
        mann.u_star
    );
    ensure!(
        mann.intersections.iter().all(|&s| s % 3 == 1),
        "intersections {:?}",
        mann.intersections
    );
    ensure!(
        mann.to_theorem_report(&d).status == Status::Verified,
        "Mann report not verified"
    );
    Ok(())
}

fn a3(dir: &Path) -> Outcome {
    let d = construct(dir, 4, 4, (85, 21, 5))?;
    let hk = analysis::check_hk(&d, 4, 1).map_err(|e| e.to_string())?;
    ensure!(hk.status == Status::Verified, "{}", hk.render_text());
    check_report(dir, &["cor5.2", "--q", "4", "--s", "1"], 0)?;
    let (k_counts, _) = coset_counts(&d, 17)?;
    ensure!(k_counts == [1, 5, 5, 5, 5], "K-coset counts {k_counts:?}");

    let u = d.group().unique_subgroup_of_order(17).unwrap().unwrap();
    let mann = mann_test(&d, &u).map_err(|e| e.to_string())?;
    let w = mann.witness.as_ref().ok_or("no Mann witness")?;
    ensure!(
        (w.p, w.f, w.j) == (2, 2, 2),
        "witness ({}, {}, {})",
        w.p,
        w.f,
        w.j
    );
    // By hand: u* = 85 / 17 = 5, 2^2 = 4 ≡ -1 (mod 5), n = 16 = 2^4.
    ensure!(
        mann.u_star == 5 && (w.p.pow(w.f as u32) + 1) % 5 == 0 && 16 == w.p.pow(2 * w.j),
        "u* = {}",
        mann.u_star
    );
    ensure!(
        mann.intersections.iter().all(|&s| s % 4 == 1),
        "intersections {:?}",
        mann.intersections
    );
    Ok(())
}

fn minimal_embedding(dir: &Path, s: &str, params: (u64, u64, u64)) -> Outcome {
    let r = check_report(dir, &["thm6.1", "--q", "2", "--s", s], 0)?;
    ensure!(r.status == Status::Verified, "status {}", r.status);
    let inst = |key: &str| r.instance.get(key).and_then(|v| v.as_u64());
    ensure!(
        (inst("v"), inst("k"), inst("lambda")) == (Some(params.0), Some(params.1), Some(params.2)),
        "instance {:?}",
        r.instance
    );
    ensure!(
        r.instance.get("input").and_then(|v| v.as_str()) == Some("verified"),
        "input not fully verified"
    );
    conclusion_ok(&r, "D ∩ M verifies as (15, 7, 3)")
}

fn a4(dir: &Path) -> Outcome {
    minimal_embedding(dir, "3", (585, 73, 9))
}

fn a5(dir: &Path) -> Outcome {
    minimal_embedding(dir, "5", (33825, 1057, 33))?;
    let r = check_report(dir, &["thm4.3", "--q", "2", "--s", "5"], 2)?;
    let failed: Vec<&str> = r
        .hypotheses
        .iter()
        .filter(|h| !h.ok)
        .map(|h| h.name.as_str())
        .collect();
    ensure!(failed == ["s ∤ q²+1"], "failed hypotheses {failed:?}");
    ensure!(r.status == Status::HypothesisNotMet, "status {}", r.status);
    Ok(())
}

fn a6(dir: &Path) -> Outcome {
    let start = Instant::now();
    let r = check_report(dir, &["thm4.3", "--q", "2", "--s", "7"], 0)?;
    ensure!(
        start.elapsed() < Duration::from_secs(60),
        "construction took {:?}",
        start.elapsed()
    );
    ensure!(
        r.instance.get("v").and_then(|v| v.as_u64()) == Some(2_113_665),
        "instance {:?}",
        r.instance
    );
    ensure!(
        r.field_descriptor
            .as_deref()
            .is_some_and(|f| f.starts_with("2 28 ")),
        "field {:?}",
        r.field_descriptor
    );
    conclusion_ok(&r, "D ∩ M verifies as (15, 7, 3)")?;

    // Optional full verification of all k(k-1) differences behind --ceiling.
    let start = Instant::now();
    let full = cli(
        dir,
        &[
            "--json",
            "--ceiling",
            "2^29",
            "--workers",
            "4",
            "check",
            "thm4.3",
            "--q",
            "2",
            "--s",
            "7",
        ],
    );
    ensure!(
        full.code == 0,
        "full verification exited {}: {}",
        full.code,
        full.stderr
    );
    ensure!(
        start.elapsed() < Duration::from_secs(600),
        "full verification took {:?}",
        start.elapsed()
    );
    let r: TheoremReport = serde_json::from_str(&full.stdout).map_err(|e| e.to_string())?;
    ensure!(
        r.instance.get("input").and_then(|v| v.as_str()) == Some("verified"),
        "input {:?}",
        r.instance.get("input")
    );
    Ok(())
}

fn a7(dir: &Path) -> Outcome {
    let r = check_report(dir, &["thm3.1", "--q", "2", "--a", "4", "--b", "3"], 0)?;
    ensure!(
        r.instance.get("contained") == Some(&serde_json::Value::Bool(true)),
        "instance {:?}",
        r.instance
    );
    conclusion_ok(&r, "E ⊆ D")?;
    let r = check_report(dir, &["thm3.1", "--q", "2", "--a", "2", "--b", "2"], 2)?;
    ensure!(
        r.instance.contains_key("contained"),
        "no brute-force status"
    );
    let obs = r.observations.first().ok_or("no observation")?;
    ensure!(obs.witness.is_some(), "observation without witness");
    Ok(())
}

fn a8(dir: &Path) -> Outcome {
    let r = check_report(dir, &["cor3.2", "--q", "2", "--s", "3"], 0)?;
    conclusion_ok(&r, "D ∩ R verifies as (15, 7, 3)")?;
    let r = check_report(dir, &["cor3.2", "--q", "3", "--s", "3"], 0)?;
    conclusion_ok(&r, "D ∩ R verifies as (40, 13, 4)")?;
    ensure!(
        r.field_descriptor
            .as_deref()
            .is_some_and(|f| f.starts_with("3 12 ")),
        "field {:?}",
        r.field_descriptor
    );
    Ok(())
}

fn a9(dir: &Path) -> Outcome {
    for (m, outer, inner) in [
        ("2", (21, 5, 1), "D ∩ H verifies as (7, 3, 1)"),
        ("3", (91, 10, 1), "D ∩ H verifies as (13, 4, 1)"),
    ] {
        let r = check_report(dir, &["jv", "--m", m], 0)?;
        let inst = |key: &str| r.instance.get(key).and_then(|v| v.as_u64());
        ensure!(
            (inst("v"), inst("k"), inst("lambda")) == (Some(outer.0), Some(outer.1), Some(outer.2)),
            "instance {:?}",
            r.instance
        );
        conclusion_ok(&r, inner)?;
    }
    Ok(())
}

fn multiplier_fixed(g: &AbelianGroup, sets: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    sets.iter()
        .filter(|s| {
            let mut img: Vec<u64> = s.iter().map(|&x| g.scale(x, m)).collect();
            img.sort_unstable();
            &img == *s
        })
        .cloned()
        .collect()
}

fn a10(dir: &Path) -> Outcome {
    for (v, k, lambda) in [(7u64, 3u64, 1u64), (15, 7, 3)] {
        let g = AbelianGroup::cyclic(v).unwrap();
        let all = brute_force_search(&g, k, lambda, 1_000_000).map_err(|e| e.to_string())?;
        ensure!(all.complete, "brute force incomplete");
        for m in (1..v).filter(|&m| gcd(m, v) == 1) {
            let spec = SearchSpec::new(g.clone(), k, lambda, m).map_err(|e| e.to_string())?;
            let found = orbit_union_search(&spec, 4).map_err(|e| e.to_string())?;
            ensure!(found.complete, "orbit search incomplete");
            ensure!(
                found.sets == multiplier_fixed(&g, &all.sets, m),
                "({v},{k},{lambda}) m={m}: searches disagree"
            );
            for s in &found.sets {
                ensure!(
                    DifferenceSet::verified(g.clone(), s.clone(), 1).is_ok(),
                    "{s:?} does not re-verify"
                );
            }
        }
        let (vs, ks, ls) = (v.to_string(), k.to_string(), lambda.to_string());
        for workers in ["1", "8"] {
            let out = format!("search-{v}-w{workers}");
            let r = cli(
                dir,
                &[
                    "--workers",
                    workers,
                    "--no-timestamps",
                    "search",
                    "--v",
                    &vs,
                    "--k",
                    &ks,
                    "--lambda",
                    &ls,
                    "--m",
                    "2",
                    "--out",
                    &out,
                ],
            );
            ensure!(r.code == 0, "search exited {}: {}", r.code, r.stderr);
        }
        let files = |w: &str| -> Vec<(String, Vec<u8>)> {
            let base = dir.join(format!("search-{v}-w{w}"));
            let mut names: Vec<String> = std::fs::read_dir(&base)
                .unwrap()
                .map(|e| e.unwrap().file_name().into_string().unwrap())
                .collect();
            names.sort();
            names
                .into_iter()
                .map(|n| (n.clone(), std::fs::read(base.join(n)).unwrap()))
                .collect()
        };
        let one = files("1");
        ensure!(one.len() > 1, "no class files written");
        ensure!(
            one == files("8"),
            "({v},{k},{lambda}): worker counts give different files"
        );
    }
    Ok(())
}

/// Sets built along the way in A1–A9.
fn constructed_sets() -> Vec<DifferenceSet> {
    let res = Resources::default();
    let mut sets: Vec<DifferenceSet> = [(2u64, 4u32), (3, 4), (4, 4), (4, 3), (9, 3)]
        .iter()
        .map(|&(q, d)| singer_construct(q, d, &res).unwrap().set)
        .collect();
    for (q, s) in [(2u64, 3u32), (2, 5), (2, 7), (3, 3)] {
        sets.push(singer_construct_streamed(q, s, &res).unwrap().set);
    }
    // The restrictions found inside them.
    for (i, target) in [(5usize, 15u64), (8, 40), (3, 7), (4, 13)] {
        let d = &sets[i];
        let sub = d.group().unique_subgroup_of_order(target).unwrap().unwrap();
        sets.push(d.restrict(&sub).to_candidate().unwrap());
    }
    sets
}

fn a11(_dir: &Path) -> Outcome {
    // Sanity: the corollary builds the same (40,13,4) restriction.
    let r = singer_restriction_check(3, 3, &Resources::default()).map_err(|e| e.to_string())?;
    ensure!(r.status == Status::Verified, "{}", r.render_text());
    let mut failures = Vec::new();
    for d in constructed_sets() {
        let p: Params = d.params();
        for m in divisors(p.v) {
            for h in d.group().subgroups_of_order(m).map_err(|e| e.to_string())? {
                let profile = d.intersection_profile(&h);
                if !profile.sum_ok || !profile.sum_of_squares_ok {
                    failures.push(format!("{p}: profile equations fail for order {m}"));
                }
                if !d.distribution_bound_check(&h).ok {
                    failures.push(format!("{p}: bound fails for order {m}"));
                }
            }
        }
        match analysis::hall_check(&d) {
            Ok(r) if r.status == Status::Verified => {}
            Ok(r) => failures.push(format!("{p}: hall check {}", r.status)),
            Err(e) => failures.push(format!("{p}: hall check error {e}")),
        }
        let n = d.normalize().map_err(|e| e.to_string())?;
        let again = n.normalize().map_err(|e| e.to_string())?;
        if again.elements() != n.elements() {
            failures.push(format!("{p}: normalize is not idempotent"));
        }
    }
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(())
}

fn a12(dir: &Path) -> Outcome {
    let r = cli(dir, &["--json", "scan", "--q", "2", "--s", "1,3,5,7"]);
    ensure!(r.code == 0, "scan exited {}: {}", r.code, r.stderr);
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&r.stdout).map_err(|e| e.to_string())?;
    let s: Vec<u64> = rows.iter().filter_map(|row| row["s"].as_u64()).collect();
    ensure!(s == [1, 3, 5, 7], "rows for s = {s:?}");
    ensure!(
        rows.iter().all(|row| row["status"] == "embedded"),
        "statuses {:?}",
        rows.iter().map(|r| r["status"].clone()).collect::<Vec<_>>()
    );
    let text = cli(dir, &["scan", "--q", "2", "--s", "1,3,5,7"]);
    ensure!(
        text.stdout
            .lines()
            .skip(1)
            .filter(|l| !l.starts_with('#'))
            .all(|l| l.split('\t').nth(3) == Some("embedded")),
        "text table: {}",
        text.stdout
    );
    Ok(())
}

/// Writes straight to stdout so the verdicts show even under output capture.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

/// Name, check, and time limit in seconds.
type Criterion = (&'static str, fn(&Path) -> Outcome, u64);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("A1", a1, 1),
        ("A2", a2, 1),
        ("A3", a3, 5),
        ("A4", a4, 5),
        ("A5", a5, 30),
        ("A6", a6, 660),
        ("A7", a7, 60),
        ("A8", a8, 120),
        ("A9", a9, 60),
        ("A10", a10, 120),
        ("A11", a11, 600),
        ("A12", a12, 600),
    ];
    let mut failed = Vec::new();
    for (name, criterion, limit) in criteria {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let outcome = criterion(dir.path());
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed <= Duration::from_secs(limit) {
                Ok(())
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit} s"))
            }
        });
        match outcome {
            Ok(()) => report(&format!("PASS {name} ({elapsed:.2?})")),
            Err(why) => {
                report(&format!("FAIL {name} ({elapsed:.2?}): {why}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
