//! End-to-end tests against the built binary: exit codes, JSON schemas,
//! byte-level determinism, and file/pipeline round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

use bernstein_core::constructions::special_bernstein;
use bernstein_core::io::state_from_json;
use bernstein_core::qstate::Axis;
use bernstein_core::stats::kwise_independence_report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bernstein"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("bernstein_cli_{}_{name}", std::process::id()))
}

#[test]
fn construct_bernstein_writes_eq6_state() {
    let path = temp_path("b4.json");
    let out = run(&["construct", "bernstein", "--n", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let loaded = state_from_json(&text).unwrap();
    assert!(!loaded.renormalized);
    let want = special_bernstein(4).unwrap();
    for i in 0..16 {
        assert!((loaded.state.amplitude(i) - want.amplitude(i)).norm() < 1e-12);
    }
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["amps"].as_array().unwrap().len(), 8);
    std::fs::remove_file(&path).ok();
}

#[test]
fn independence_pipeline_matches_in_memory() {
    let path = temp_path("b4_pipeline.json");
    run(&["construct", "bernstein", "--n", "4", "--out", path.to_str().unwrap()]);
    let out = run(&[
        "independence",
        "--state",
        path.to_str().unwrap(),
        "--axes",
        "zzzz",
        "--max-k",
        "4",
    ]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();

    let in_memory =
        kwise_independence_report(&special_bernstein(4).unwrap(), &[Axis::Z; 4], 4).unwrap();

    assert_eq!(parsed["max_checked"], 4);
    let per_size = parsed["per_size"].as_array().unwrap();
    assert_eq!(per_size.len(), in_memory.per_size.len());
    for (row, verdict) in per_size.iter().zip(&in_memory.per_size) {
        assert_eq!(row["size"].as_u64().unwrap() as usize, verdict.size);
        assert_eq!(row["independent"].as_bool().unwrap(), verdict.independent);
        let dev = row["worst_deviation"].as_f64().unwrap();
        assert!((dev - verdict.worst_deviation).abs() < 1e-12);
    }
    assert_eq!(per_size[3]["witness"], "(++++)");
    let joint = parsed["n_wise"]["joint"].as_f64().unwrap();
    let product = parsed["n_wise"]["product"].as_f64().unwrap();
    assert!(joint.abs() < 1e-12);
    assert!((product - 1.0 / 16.0).abs() < 1e-12);
    std::fs::remove_file(&path).ok();
}

#[test]
fn identical_argv_and_seed_give_identical_bytes() {
    for args in [
        vec!["mermin", "--n", "4"],
        vec![
            "construct",
            "general-bernstein",
            "--n",
            "4",
            "--random-phases",
            "--seed",
            "9",
        ],
        vec!["orbit", "--n", "3", "--phases", "0.25,0,0.5,1"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
    }
    // a different seed changes the random construction
    let a = run(&["construct", "general-bernstein", "--n", "4", "--random-phases", "--seed", "9"]);
    let b = run(&["construct", "general-bernstein", "--n", "4", "--random-phases", "--seed", "10"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn mermin_n4_has_eight_quadruplets() {
    let out = run(&["mermin", "--n", "4", "--max-size", "4"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["contradiction_count"], 8);
    assert_eq!(parsed["relations"].as_array().unwrap().len(), 8);
    assert_eq!(parsed["all_match"], true);

    let flipped = run(&["mermin", "--n", "4", "--ghz-sign", "1"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&flipped)).unwrap();
    assert_eq!(parsed["all_match"], false);
}

#[test]
fn orbit_reports_membership_and_lattice() {
    let out = run(&["orbit", "--n", "3", "--phases", "[0.1, 0.7, 0.3, 1.4]"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["membership"]["reachable"], true);
    let lattice = parsed["period_lattice_pi"].as_array().unwrap();
    assert_eq!(lattice.len(), 3);
    assert_eq!(lattice[0].as_array().unwrap()[0], 1.0);

    let random_n4 = run(&["orbit", "--n", "4", "--phases", "0.13,0.57,0.91,0.24,1.61,0.08,1.99,0.45"]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&random_n4)).unwrap();
    assert_eq!(parsed["membership"]["reachable"], false);
}

#[test]
fn fragility_reports_separable_bernstein() {
    let path = temp_path("b3.json");
    run(&["construct", "bernstein", "--n", "3", "--out", path.to_str().unwrap()]);
    let out = run(&["fragility", "--state", path.to_str().unwrap()]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = parsed.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["verdict"], "separable");
        assert!(row["residual"].as_f64().unwrap() < 1e-10);
        assert_eq!(row["splits"].as_array().unwrap().len(), 1);
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn exit_codes() {
    // usage error
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));

    // missing state file
    let out = run(&["stats", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(2));

    // malformed state file
    let path = temp_path("broken.json");
    std::fs::write(&path, "{\"n\": 2, \"amps\": [{\"bits\": \"0z\", \"re\": 1, \"im\": 0}]}")
        .unwrap();
    let out = run(&["stats", "--state", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();

    // verdict failure: GHZ_z is not a Bernstein state
    let ghz_path = temp_path("ghz4.json");
    run(&["construct", "ghz", "--n", "4", "--axis", "z", "--out", ghz_path.to_str().unwrap()]);
    let out = run(&["stats", "--state", ghz_path.to_str().unwrap(), "--expect-pass"]);
    assert_eq!(out.status.code(), Some(1));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["certificate"]["is_bernstein"], false);
    assert_eq!(parsed["certificate"]["reason"], "support");

    // and a Bernstein state passes
    let b_path = temp_path("b5.json");
    run(&["construct", "bernstein", "--n", "5", "--out", b_path.to_str().unwrap()]);
    let out = run(&["stats", "--state", b_path.to_str().unwrap(), "--expect-pass"]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_file(&ghz_path).ok();
    std::fs::remove_file(&b_path).ok();
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let config_path = temp_path("config.json");
    std::fs::write(&config_path, r#"{"output_format": "table", "seed": 3}"#).unwrap();

    let out = bin()
        .env("BERNSTEIN_CONFIG", &config_path)
        .args(["mermin", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.contains("all_match: true"), "table output expected: {text}");

    // flag wins over the file
    let out = bin()
        .env("BERNSTEIN_CONFIG", &config_path)
        .args(["mermin", "--n", "3", "--format", "json"])
        .output()
        .unwrap();
    assert!(stdout_str(&out).trim_start().starts_with('{'));

    // bad config is a usage error
    std::fs::write(&config_path, r#"{"output_format": "yaml"}"#).unwrap();
    let out = bin()
        .env("BERNSTEIN_CONFIG", &config_path)
        .args(["mermin", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&config_path).ok();
}

#[test]
fn ghz_x_state_file_round_trips_through_stats() {
    let path = temp_path("ghzx3.json");
    let out = run(&["construct", "ghz", "--n", "3", "--axis", "x", "--sign", "-1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let loaded = state_from_json(&text).unwrap().state;
    // two polar coefficients in the x eigenbasis
    assert!((loaded.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((loaded.amplitude(7).re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    std::fs::remove_file(&path).ok();
}
