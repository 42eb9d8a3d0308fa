//! The `ttroute` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use ttroute::experiments::{compare_paths, schedule, write_comparison, ExperimentConfig, MapSelector, Scenario};

fn ttroute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttroute"))
        .args(args)
        .env_remove("TTROUTE_LOG")
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_documents_every_subcommand() {
    let flags: &[(&str, &[&str])] = &[
        ("gen-map", &["--family", "--map", "--seed", "--out"]),
        ("plan", &["--config", "--map", "--seed", "--provider", "--from", "--to", "--snr"]),
        ("simulate", &["--config", "--map", "--seed", "--provider", "--repetitions", "--snr", "--out"]),
        ("experiment", &["--config", "--out", "--seed", "--map", "--provider", "--repetitions", "--regression-no", "--snr"]),
        ("sweep", &["--config", "--out", "--seed", "--map", "--repetitions", "--regression-no", "--snr"]),
        ("compare", &["--config", "--map", "--scenario", "--seed", "--out"]),
    ];
    for (sub, expected) in flags {
        let out = ttroute(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in *expected {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
    assert!(ttroute(&["--help"]).status.success());
}

#[test]
fn bad_arguments_exit_with_two() {
    for args in [
        vec!["experiment", "-o", "x", "--repetitions", "30"],
        vec!["experiment", "-o", "x", "--regression-no", "1"],
        vec!["sweep", "snr", "-o", "x", "--snr", "40"],
        vec!["plan", "--from", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = ttroute(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_failures_exit_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = ttroute(&["experiment", "--config", arg(&missing), "-o", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8(out.stderr).unwrap().trim().lines().count(), 1);

    let out = ttroute(&["plan", "--map", "1", "--from", "0", "--to", "9999"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_map_writes_a_loadable_map() {
    let dir = tempfile::tempdir().unwrap();
    let out = ttroute(&["gen-map", "--family", "hub", "--seed", "7", "-o", arg(dir.path())]);
    assert!(out.status.success());
    let map = ttroute::topo_map::load_map(dir.path().join("hub.json")).unwrap();
    assert_eq!(map.meta().seed, Some(7));

    // the generated file works as a --map argument
    let path = dir.path().join("hub.json");
    let ports: Vec<_> = map.ports().collect();
    let out = ttroute(&["plan", "--map", arg(&path), "--provider", "static", "--from", &ports[0].to_string(), "--to", &ports[1].to_string()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn experiment_from_config_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    std::fs::write(&config, r#"{ "map": 2, "repetitions": 20, "seeds": [3, 4], "snr_db": 25 }"#).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out_dir in [&a, &b] {
        let out = ttroute(&["experiment", "--config", arg(&config), "-o", arg(out_dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["summary.csv", "records.csv"] {
        let bytes = std::fs::read(a.join(file)).unwrap();
        assert!(!bytes.is_empty());
        assert_eq!(bytes, std::fs::read(b.join(file)).unwrap(), "{file} differs");
    }
    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    // header plus three providers on two seeds
    assert_eq!(summary.lines().count(), 7);
    assert!(summary.lines().skip(1).all(|l| l.contains(",20,2,25,")));
}

#[test]
fn compare_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let cli_dir = dir.path().join("cli");
    let out = ttroute(&["compare", "--map", "2", "--scenario", "battery", "--seed", "5", "-o", arg(&cli_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for name in ["heuristic", "static", "dynamic"] {
        assert!(stdout.lines().any(|l| l.starts_with(name) && l.contains('%')), "{stdout}");
    }

    let cfg = ExperimentConfig {
        map: MapSelector::Builtin(2),
        scenario: Scenario::Battery,
        seeds: (5..15).collect(),
        ..ExperimentConfig::default()
    };
    let map = cfg.map.load().unwrap();
    let od = schedule(&map, &cfg, 5)[0];
    let lib_dir = dir.path().join("lib");
    std::fs::create_dir_all(&lib_dir).unwrap();
    write_comparison(&compare_paths(&map, od, &cfg, 5).unwrap(), &lib_dir).unwrap();
    assert_eq!(
        std::fs::read(cli_dir.join("compare.csv")).unwrap(),
        std::fs::read(lib_dir.join("compare.csv")).unwrap()
    );
}

#[test]
fn simulate_and_sweep_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = ttroute(&["simulate", "--map", "3", "--repetitions", "20", "--snr", "25", "-o", arg(&sim)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["paths.csv", "observations.csv", "trace.csv"] {
        assert!(std::fs::read_to_string(sim.join(file)).unwrap().lines().count() > 1, "{file}");
    }
    assert_eq!(std::fs::read_to_string(sim.join("paths.csv")).unwrap().lines().count(), 21);

    let sweep = dir.path().join("sweep");
    let out = ttroute(&["sweep", "regression-no", "--map", "1", "--repetitions", "20", "-o", arg(&sweep)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(sweep.join("summary.csv")).unwrap();
    // eight orders, dynamic plus heuristic, ten seeds
    assert_eq!(summary.lines().count(), 1 + 8 * 2 * 10);
}

#[test]
fn log_level_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "--map", "1", "--repetitions", "20", "--provider", "dynamic", "-o", arg(dir.path())];
    let quiet = ttroute(&args);
    let loud = Command::new(env!("CARGO_BIN_EXE_ttroute"))
        .args(args)
        .env("TTROUTE_LOG", "debug")
        .output()
        .unwrap();
    assert!(quiet.status.success() && loud.status.success());
    assert!(quiet.stderr.is_empty());
    assert!(String::from_utf8_lossy(&loud.stderr).contains("DEBUG"));
}
