//! End-to-end runs of the `descramble` binary: exit codes, stdout formats,
//! and the files each subcommand leaves behind.

use std::path::Path;
use std::process::{Command, Output};
use std::str::FromStr;

use descramble_cli::capture_io;
use descramble_core::{hash_password, HashHalves, ScrambleParams};

fn descramble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descramble"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_line(output: &Output) -> String {
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    String::from_utf8(output.stdout.clone())
        .unwrap()
        .trim_end()
        .to_string()
}

#[test]
fn hash_prints_parseable_halves() {
    let empty = stdout_line(&descramble(&["hash", ""]));
    assert_eq!(empty, "50305735:12345671");
    let word = stdout_line(&descramble(&["hash", "password"]));
    assert_eq!(word, "5d2e1939:3cc5ef67");
    assert_eq!(HashHalves::from_str(&word).unwrap(), hash_password(b"password"));
}

#[test]
fn scramble_verify_round_trip_and_mismatch() {
    let response = stdout_line(&descramble(&[
        "scramble",
        "--challenge",
        "abcdefgh",
        "--password",
        "secret",
    ]));
    assert_eq!(response.len(), 16);

    let ok = descramble(&[
        "verify",
        "--challenge",
        "abcdefgh",
        "--response",
        &response,
        "--password",
        "secret",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "match");

    // The hash halves alone authenticate; no password text needed.
    let hash = stdout_line(&descramble(&["hash", "secret"]));
    let via_hash = descramble(&[
        "verify",
        "--challenge",
        "abcdefgh",
        "--response",
        &response,
        "--hash",
        &hash,
    ]);
    assert_eq!(via_hash.status.code(), Some(0));

    let mut flipped = response.clone();
    let last = flipped.pop().unwrap();
    flipped.push(if last == '0' { '1' } else { '0' });
    let bad = descramble(&[
        "verify",
        "--challenge",
        "abcdefgh",
        "--response",
        &flipped,
        "--password",
        "secret",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&bad.stdout).trim(), "mismatch");

    let not_hex = descramble(&[
        "verify",
        "--challenge",
        "abcdefgh",
        "--response",
        "zz",
        "--password",
        "secret",
    ]);
    assert_eq!(not_hex.status.code(), Some(2));

    let wrong_length = descramble(&[
        "verify",
        "--challenge",
        "abcdefgh",
        "--response",
        &response[..14],
        "--password",
        "secret",
    ]);
    assert_eq!(wrong_length.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(descramble(&[]).status.code(), Some(2));
    assert_eq!(descramble(&["scramble", "--challenge", "x"]).status.code(), Some(2));
    let both = descramble(&[
        "scramble",
        "--challenge",
        "x",
        "--password",
        "a",
        "--hash",
        "00000000:00000000",
    ]);
    assert_eq!(both.status.code(), Some(2));
    assert_eq!(descramble(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_capture_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.trace");
    let b = dir.path().join("b.trace");
    let cap = dir.path().join("a.cap");
    let reparsed = dir.path().join("reparsed.trace");

    let run = descramble(&[
        "gen", "--password", "pw", "--count", "10", "--seed", "5",
        "--out", a.to_str().unwrap(),
        "--capture", cap.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let rerun = descramble(&[
        "gen", "--password", "pw", "--count", "10", "--seed", "5",
        "--out", b.to_str().unwrap(),
    ]);
    assert_eq!(rerun.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let records = capture_io::read_trace(&a).unwrap();
    assert_eq!(records.len(), 10);
    let params = ScrambleParams::deployed();
    assert!(records.iter().all(|r| r.verifies(b"pw", &params)));

    let parse = descramble(&[
        "parse",
        "--capture", cap.to_str().unwrap(),
        "--out", reparsed.to_str().unwrap(),
    ]);
    assert_eq!(parse.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&reparsed).unwrap());

    let empty = dir.path().join("empty.trace");
    let none = descramble(&[
        "gen", "--password", "pw", "--count", "0", "--seed", "5",
        "--out", empty.to_str().unwrap(),
    ]);
    assert_eq!(none.status.code(), Some(0));
    assert_eq!(std::fs::read(&empty).unwrap(), b"");
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("bad.trace");
    std::fs::write(&trace, "not hex at all\n").unwrap();
    let out = dir.path().join("cands.txt");
    let run = descramble(&[
        "attack",
        "--trace", trace.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("trace line 1"));

    let cap = dir.path().join("cut.cap");
    std::fs::write(&cap, [5u8, 0, 0]).unwrap();
    let parse = descramble(&[
        "parse",
        "--capture", cap.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("capture offset"));

    let good_trace = dir.path().join("good.trace");
    assert_eq!(
        descramble(&[
            "gen", "--password", "x", "--count", "6", "--seed", "1",
            "--out", good_trace.to_str().unwrap(),
        ])
        .status
        .code(),
        Some(0)
    );
    let bad_cells = descramble(&[
        "attack",
        "--trace", good_trace.to_str().unwrap(),
        "--cells", "24,x",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(bad_cells.status.code(), Some(2));
    let bad_budget = descramble(&[
        "attack",
        "--trace", good_trace.to_str().unwrap(),
        "--budget", "2^70",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(bad_budget.status.code(), Some(2));
}

#[test]
fn attack_recovers_the_hash_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("login.trace");
    let cands = dir.path().join("candidates.txt");
    let svg_dir = dir.path().join("svg");
    let report = dir.path().join("report.json");

    assert_eq!(
        descramble(&[
            "gen", "--password", "taco", "--count", "10", "--seed", "9",
            "--out", trace.to_str().unwrap(),
        ])
        .status
        .code(),
        Some(0)
    );

    let run = descramble(&[
        "attack",
        "--trace", trace.to_str().unwrap(),
        "--p1-pairs", "6",
        "--cells", "24,20,16,12,10",
        "--budget", "2^24",
        "--out", cands.to_str().unwrap(),
        "--svg", svg_dir.to_str().unwrap(),
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");

    let truth = hash_password(b"taco").to_string();
    let listing = std::fs::read_to_string(&cands).unwrap();
    assert!(listing.lines().any(|line| line == truth));

    for index in 0..6 {
        assert_svg(&svg_dir.join(format!("pair-{index:02}-polygons.svg")));
    }
    assert!(!svg_dir.join("pair-06-polygons.svg").exists());
    for round in 0..5 {
        assert_svg(&svg_dir.join(format!("round-{round:02}-cells.svg")));
    }
    assert!(!svg_dir.join("round-05-cells.svg").exists());

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["params"]["modulus"], (1u64 << 30) - 1);
    assert_eq!(json["pairs"], 10);
    assert!(json["candidate_count"].as_u64().unwrap() >= 1);
    let stages: Vec<&str> = json["stages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["stage"].as_str().unwrap())
        .collect();
    assert!(stages.contains(&"polygon_search"));
    assert!(stages.contains(&"cell_filter"));
    assert!(stages.contains(&"extraction"));
    assert!(stages.contains(&"response_filter"));

    // Scoring the survivors: the true hash answers every fresh challenge.
    let score = descramble(&[
        "score",
        "--candidates", cands.to_str().unwrap(),
        "--truth", &truth,
        "--trials", "200",
        "--seed", "1",
    ]);
    assert_eq!(score.status.code(), Some(0));
    let scored = String::from_utf8_lossy(&score.stdout);
    assert!(scored
        .lines()
        .any(|line| line == format!("{truth} 1.000")));
}

fn assert_svg(path: &Path) {
    let body = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(body.starts_with("<?xml"));
    assert!(body.contains("</svg>"));
}

#[test]
fn attack_exits_one_when_no_candidate_survives() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("mixed.trace");
    let cands = dir.path().join("candidates.txt");

    // Six sessions from one password, four from another: the polygon stage
    // inverts the first six, then the replay filter kills every candidate.
    let params = ScrambleParams::deployed();
    let mut records = capture_io::generate_trace(b"alpha", 2, 6, &params);
    records.extend(capture_io::generate_trace(b"omega", 3, 4, &params));
    capture_io::write_trace(&trace, &records).unwrap();

    let run = descramble(&[
        "attack",
        "--trace", trace.to_str().unwrap(),
        "--p1-pairs", "6",
        "--cells", "24,20,16,12,10",
        "--out", cands.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(1), "{run:?}");
    assert_eq!(std::fs::read_to_string(&cands).unwrap(), "");
}

#[test]
fn score_rejects_bad_candidate_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cands = dir.path().join("cands.txt");
    std::fs::write(&cands, "# header\n50305735:12345671\nnot-a-hash\n").unwrap();
    let run = descramble(&[
        "score",
        "--candidates", cands.to_str().unwrap(),
        "--truth", "50305735:12345671",
        "--trials", "10",
        "--seed", "0",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
}
