//! Integration tests spawning the `proximeter` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use proximeter_core::jsonl::{read_jsonl, EventRecord};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_proximeter"));
    cmd.env_remove("PROXIMETER_CONFIG");
    cmd
}

fn repo_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn binary");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output().expect("spawn binary").status.code().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn calibrate_writes_profile_and_echoes_focal() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("profile.txt");
    let out = run_ok(bin().args([
        "calibrate",
        "--pixel-extent",
        "100",
        "--known-distance",
        "2.0",
        "--known-extent",
        "1.0",
        "--out",
    ]).arg(&out_path));
    assert_eq!(stdout_of(&out).trim(), "200.0");
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("focal_length_px=200.0"));
    assert!(text.contains("assumed_subject_extent_m=1.6256"));
}

#[test]
fn calibrate_identity_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(bin().args([
        "calibrate",
        "--pixel-extent",
        "1",
        "--known-distance",
        "1",
        "--known-extent",
        "1",
        "--out",
    ]).arg(dir.path().join("p.txt")));
    assert_eq!(stdout_of(&out).trim(), "1.0");
}

#[test]
fn calibrate_rejects_non_positive_args_as_usage() {
    let dir = tempfile::tempdir().unwrap();
    let code = exit_code(bin().args([
        "calibrate",
        "--pixel-extent=-1",
        "--known-distance",
        "1",
        "--known-extent",
        "1",
        "--out",
    ]).arg(dir.path().join("p.txt")));
    assert_eq!(code, 2);
}

#[test]
fn calibrate_unwritable_path_is_io_error() {
    let code = exit_code(bin().args([
        "calibrate",
        "--pixel-extent",
        "1",
        "--known-distance",
        "1",
        "--known-extent",
        "1",
        "--out",
        "/nonexistent-dir/profile.txt",
    ]));
    assert_eq!(code, 4);
}

#[test]
fn unknown_flag_is_clap_usage_error() {
    assert_eq!(exit_code(bin().args(["classify", "--frobnicate"])), 2);
}

fn classify_with_stdin(input: &str, envs: &[(&str, &str)], args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg("classify").args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn classify_emits_tag_and_color_per_line() {
    let out = classify_with_stdin("0.4\n1.0\n0.75\n", &[], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_of(&out),
        "0.4\tUnsafe\tRed\n1.0\tSafe\tGreen\n0.75\tWarning\tOrange\n"
    );
}

#[test]
fn classify_echoes_input_token_verbatim() {
    let out = classify_with_stdin("1.0\n0.50\n", &[], &[]);
    let text = stdout_of(&out);
    assert!(text.starts_with("1.0\t"));
    assert!(text.contains("0.50\tUnsafe"));
}

#[test]
fn classify_skips_bad_lines_and_exits_one() {
    let out = classify_with_stdin("0.4\nabc\n-2\n\n1.5\n", &[], &[]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = stdout_of(&out);
    assert_eq!(stdout.lines().count(), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"));
    assert!(stderr.contains("line 3"));
}

#[test]
fn config_file_moves_zone_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wide.conf");
    std::fs::write(&cfg, "zone.unsafe_max_m = 1.0\nzone.safe_min_m = 2.0\n").unwrap();
    let out = classify_with_stdin("1.5\n", &[], &["--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout_of(&out), "1.5\tWarning\tOrange\n");

    // Same config through the environment variable.
    let out = classify_with_stdin("1.5\n", &[("PROXIMETER_CONFIG", cfg.to_str().unwrap())], &[]);
    assert_eq!(stdout_of(&out), "1.5\tWarning\tOrange\n");
}

#[test]
fn invalid_config_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "zone.safe_min_m = -3\n").unwrap();
    let code = exit_code(
        bin()
            .args(["classify", "--config"])
            .arg(&cfg)
            .stdin(Stdio::null()),
    );
    assert_eq!(code, 3);
}

#[test]
fn missing_explicit_config_is_io_error() {
    let code = exit_code(
        bin()
            .args(["classify", "--config", "/nonexistent.conf"])
            .stdin(Stdio::null()),
    );
    assert_eq!(code, 4);
}

#[test]
fn simulate_walkthrough_emits_expected_streams() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(bin()
        .args(["simulate", "--scenario"])
        .arg(repo_path("scenarios/zone_walkthrough.json"))
        .arg("--out-dir")
        .arg(dir.path()));
    let events = std::fs::read_to_string(dir.path().join("events.jsonl")).unwrap();
    let records: Vec<EventRecord> = read_jsonl(events.as_bytes()).unwrap();
    assert_eq!(records.len(), 6);

    // The written stream re-parses losslessly.
    let mut rewritten = Vec::new();
    proximeter_core::jsonl::write_jsonl(&mut rewritten, &records).unwrap();
    assert_eq!(String::from_utf8(rewritten).unwrap(), events);

    let truth = std::fs::read_to_string(dir.path().join("truth.jsonl")).unwrap();
    assert_eq!(truth.lines().count(), 6);
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.starts_with("label,detected_m,actual_m,difference_m,percent_error\n"));
}

#[test]
fn simulate_missing_scenario_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let code = exit_code(
        bin()
            .args(["simulate", "--scenario", "/nonexistent.json", "--out-dir"])
            .arg(dir.path()),
    );
    assert_eq!(code, 4);
}

#[test]
fn simulate_invalid_scenario_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("bad.json");
    std::fs::write(
        &scenario,
        r#"{"camera": {"camera_id": "c", "focal_length_px": -5.0}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("camera.focal_length_px"));
}

#[test]
fn simulate_malformed_json_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("broken.json");
    std::fs::write(&scenario, "{not json").unwrap();
    let code = exit_code(
        bin()
            .args(["simulate", "--scenario"])
            .arg(&scenario)
            .arg("--out-dir")
            .arg(dir.path()),
    );
    assert_eq!(code, 3);
}

#[test]
fn simulate_empty_scenario_writes_empty_log() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("empty.json");
    std::fs::write(
        &scenario,
        r#"{"camera": {"camera_id": "c", "focal_length_px": 600.0}}"#,
    )
    .unwrap();
    run_ok(bin()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .arg("--out-dir")
        .arg(dir.path()));
    let events = std::fs::read_to_string(dir.path().join("events.jsonl")).unwrap();
    assert!(events.is_empty());
}

#[test]
fn simulate_seed_override_changes_noisy_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("noisy.json");
    std::fs::write(
        &scenario,
        r#"{
            "camera": {"camera_id": "c", "focal_length_px": 600.0},
            "subjects": [{"subject_id": "s", "trajectory": [
                {"timestamp_ms": 0, "sector": "left", "true_distance_m": 2.0}
            ]}],
            "noise": {"sigma_m": 0.05},
            "seed": 1
        }"#,
    )
    .unwrap();
    let read_events = |out_dir: &Path| std::fs::read_to_string(out_dir.join("events.jsonl")).unwrap();

    let a_dir = dir.path().join("a");
    run_ok(bin()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .arg("--out-dir")
        .arg(&a_dir));
    let b_dir = dir.path().join("b");
    run_ok(bin()
        .args(["simulate", "--scenario"])
        .arg(&scenario)
        .args(["--seed", "99"])
        .arg("--out-dir")
        .arg(&b_dir));
    assert_ne!(read_events(&a_dir), read_events(&b_dir));
}

#[test]
fn evaluate_empty_csv_reports_zero_rows() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("empty.csv");
    std::fs::write(&pairs, "").unwrap();
    let out = run_ok(bin().args(["evaluate", "--pairs"]).arg(&pairs));
    assert!(stdout_of(&out).contains("rows: 0"));
}

#[test]
fn evaluate_single_identical_pair_is_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("same.csv");
    std::fs::write(&pairs, "detected,actual\n1.3,1.3\n").unwrap();
    let out = run_ok(bin().args(["evaluate", "--pairs"]).arg(&pairs));
    assert!(stdout_of(&out).contains("0.00"));
}

#[test]
fn evaluate_missing_column_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("short.csv");
    std::fs::write(&pairs, "detected\n1.0\n").unwrap();
    let out = bin().args(["evaluate", "--pairs"]).arg(&pairs).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("actual"));
}

#[test]
fn evaluate_denominator_config_switches_convention() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, "detected,actual\n2.0,1.0\n").unwrap();
    let cfg = dir.path().join("actual.conf");
    std::fs::write(&cfg, "eval.denominator = actual\n").unwrap();

    let by_detected = run_ok(bin().args(["evaluate", "--pairs"]).arg(&pairs));
    assert!(stdout_of(&by_detected).contains("50.00"));
    let by_actual = run_ok(bin()
        .args(["evaluate", "--pairs"])
        .arg(&pairs)
        .arg("--config")
        .arg(&cfg));
    assert!(stdout_of(&by_actual).contains("100.00"));
}

#[test]
fn replay_merges_streams_into_events() {
    let dir = tempfile::tempdir().unwrap();
    let motions = dir.path().join("motions.jsonl");
    std::fs::write(
        &motions,
        "{\"t_ms\":100,\"sector\":\"left\"}\n{\"t_ms\":300,\"sector\":\"back\"}\n",
    )
    .unwrap();
    let ranges = dir.path().join("ranges.jsonl");
    std::fs::write(
        &ranges,
        "{\"t_ms\":150,\"sector\":\"left\",\"distance_m\":0.8}\n\
         {\"t_ms\":350,\"sector\":\"back\",\"distance_m\":null}\n",
    )
    .unwrap();
    let out = run_ok(bin()
        .args(["replay", "--motions"])
        .arg(&motions)
        .arg("--ranges")
        .arg(&ranges));
    assert_eq!(
        stdout_of(&out),
        "{\"t_ms\":150,\"sector\":\"left\",\"distance_m\":0.8,\"tag\":\"warning\",\"color\":\"Orange\"}\n\
         {\"t_ms\":350,\"sector\":\"back\",\"tag\":\"safe\",\"color\":\"Green\",\"out_of_range\":true}\n"
    );
}

#[test]
fn replay_detections_require_profile() {
    let dir = tempfile::tempdir().unwrap();
    let detections = dir.path().join("detections.jsonl");
    std::fs::write(
        &detections,
        "{\"t_ms\":0,\"subject_id\":\"p\",\"bbox\":{\"x\":0,\"y\":0,\"w\":50,\"h\":488},\"confidence\":0.9}\n",
    )
    .unwrap();
    assert_eq!(
        exit_code(bin().args(["replay", "--detections"]).arg(&detections)),
        2
    );
}

#[test]
fn replay_ranges_detections_through_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.txt");
    run_ok(bin().args([
        "calibrate",
        "--pixel-extent",
        "487.68",
        "--known-distance",
        "2.0",
        "--known-extent",
        "1.6256",
        "--out",
    ]).arg(&profile));

    let detections = dir.path().join("detections.jsonl");
    std::fs::write(
        &detections,
        "{\"t_ms\":0,\"subject_id\":\"p\",\"bbox\":{\"x\":0,\"y\":0,\"w\":100,\"h\":1219},\"confidence\":0.9}\n\
         {\"t_ms\":0,\"subject_id\":\"ghost\",\"bbox\":{\"x\":0,\"y\":0,\"w\":100,\"h\":1219},\"confidence\":0.2}\n",
    )
    .unwrap();
    let out = run_ok(bin()
        .args(["replay", "--detections"])
        .arg(&detections)
        .arg("--profile")
        .arg(&profile));
    let records: Vec<EventRecord> = read_jsonl(stdout_of(&out).as_bytes()).unwrap();
    // Low-confidence box dropped; 975.36/1219 px nears 0.8 m.
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].subject_id.as_deref(), Some("p"));
    let d = records[0].distance_m.unwrap();
    assert!((d - 0.8).abs() < 1e-3, "distance {d}");
    assert_eq!(records[0].tag, proximeter_core::ZoneTag::Warning);
}

#[test]
fn replay_bad_stream_is_validation_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let motions = dir.path().join("motions.jsonl");
    std::fs::write(&motions, "{\"t_ms\":100,\"sector\":\"left\"}\nbroken\n").unwrap();
    let out = bin().args(["replay", "--motions"]).arg(&motions).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn extent_prints_meters_or_inches() {
    let out = run_ok(bin().args([
        "extent",
        "--known-distance",
        "2.0",
        "--bbox-height",
        "200",
        "--focal-length",
        "200",
    ]));
    assert_eq!(stdout_of(&out).trim(), "2.0");
    let out = run_ok(bin().args([
        "extent",
        "--known-distance",
        "3.2",
        "--bbox-height",
        "560",
        "--focal-length",
        "500",
        "--inches",
    ]));
    assert_eq!(stdout_of(&out).trim(), "141.10");
}

#[test]
fn extent_rejects_non_positive_input() {
    assert_eq!(
        exit_code(bin().args([
            "extent",
            "--known-distance=0",
            "--bbox-height",
            "200",
            "--focal-length",
            "200",
        ])),
        2
    );
}
