use std::fs;
use std::path::Path;

use nkcs_org::cli::{cmd_ofat, cmd_run, cmd_stats, cmd_sweep, CommonArgs};
use nkcs_org::engine::{read_summary_csv, run_scenario_serial};
use nkcs_org::{run_replication, run_scenario, CoordinationMode, Error, NetworkKind, ScenarioConfig, SearchMode};

fn small() -> ScenarioConfig {
    ScenarioConfig {
        runs: 6,
        periods: 40,
        short_run: 10,
        ..Default::default()
    }
}

#[test]
fn parallel_equals_serial() {
    for cfg in [
        small()
            .with_mode(CoordinationMode::Decentralized, SearchMode::Cursory)
            .with_network(NetworkKind::Ring),
        small()
            .with_mode(CoordinationMode::Prescreening, SearchMode::Thorough)
            .with_interdependence(2, 2, 2),
    ] {
        assert_eq!(run_scenario(&cfg).unwrap(), run_scenario_serial(&cfg).unwrap());
    }
}

#[test]
fn replications_depend_on_seed_and_index() {
    let cfg = small();
    let a = run_replication(&cfg, 0).unwrap();
    assert_eq!(a, run_replication(&cfg, 0).unwrap());
    assert_ne!(a.performance, run_replication(&cfg, 1).unwrap().performance);
    let other = ScenarioConfig {
        base_seed: 9,
        ..small()
    };
    assert_ne!(a.performance, run_replication(&other, 0).unwrap().performance);
}

#[test]
fn series_are_bounded() {
    let cfg = small().with_mode(CoordinationMode::Decentralized, SearchMode::Thorough);
    let r = run_scenario(&cfg).unwrap();
    for rec in &r.records {
        assert_eq!(rec.performance.len(), 40);
        assert!(rec.performance.iter().all(|v| *v > 0.0 && *v <= 1.0 + 1e-12));
        assert!(rec.synchrony.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn validation_names_the_field() {
    let err = ScenarioConfig { rho: 1.5, ..small() }.validate().unwrap_err();
    assert!(err.to_string().contains("`rho`"), "{err}");
    let err = ScenarioConfig { agents: 10, ..small() }
        .with_interdependence(2, 2, 2)
        .validate()
        .unwrap_err();
    assert!(matches!(err, Error::StateSpaceTooLarge { .. }));
    let ok = ScenarioConfig {
        agents: 10,
        normalize: false,
        ..small()
    }
    .with_interdependence(2, 2, 2);
    ok.validate().unwrap();
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn run_command_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(
        dir.path(),
        "s.json",
        r#"{"name": "s", "R": 4, "T": 30, "mode": "decentralized"}"#,
    );
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    cmd_run(std::slice::from_ref(&scenario), &CommonArgs::with_out(&out1), true).unwrap();
    cmd_run(std::slice::from_ref(&scenario), &CommonArgs::with_out(&out2), true).unwrap();
    for f in ["s.summary.csv", "s.runs.csv"] {
        let a = fs::read(out1.join(f)).unwrap();
        assert_eq!(a, fs::read(out2.join(f)).unwrap());
        assert!(a.starts_with(b"# manifest: {"));
    }
    let summary = read_summary_csv(fs::File::open(out1.join("s.summary.csv")).unwrap()).unwrap();
    assert_eq!(summary.len(), 4);

    let seeded = CommonArgs {
        seed: Some(5),
        runs: Some(2),
        ..CommonArgs::with_out(dir.path().join("c"))
    };
    cmd_run(&[scenario], &seeded, false).unwrap();
    let text = fs::read_to_string(dir.path().join("c/s.summary.csv")).unwrap();
    assert!(text.contains(r#""base_seed":5"#));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn run_command_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = CommonArgs::with_out(dir.path().join("o"));
    let bad = write(dir.path(), "bad.json", r#"{"rho": 1.5}"#);
    assert!(cmd_run(&[bad], &out, false).unwrap_err().to_string().contains("`rho`"));
    let typo = write(dir.path(), "typo.json", r#"{"network": "mesh"}"#);
    assert!(cmd_run(&[typo], &out, false).is_err());
    let unknown = write(dir.path(), "unknown.json", r#"{"rhoo": 0.5}"#);
    assert!(cmd_run(&[unknown], &out, false)
        .unwrap_err()
        .to_string()
        .contains("rhoo"));
    assert!(matches!(cmd_run(&[], &out, false), Err(Error::EmptyPlan(_))));
    let big = write(dir.path(), "big.json", r#"{"P": 10, "K": 2, "C": 2, "S": 2}"#);
    assert!(cmd_run(std::slice::from_ref(&big), &out, false)
        .unwrap_err()
        .to_string()
        .contains("--no-normalize"));
    let empty = write(dir.path(), "ofat.json", r#"{"parameter": "rho", "values": []}"#);
    assert!(matches!(cmd_ofat(&empty, &out), Err(Error::EmptyPlan(_))));
    let unknown = write(dir.path(), "ofat2.json", r#"{"parameter": "zeta", "values": [1]}"#);
    assert!(matches!(cmd_ofat(&unknown, &out), Err(Error::UnknownParameter(_))));
}

#[test]
fn sweep_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"base": {"R": 5, "T": 20, "short_run": 5},
            "environments": [[3,0,0],[2,2,2]],
            "modes": ["decentralized", "centralized"],
            "searches": ["thorough"],
            "networks": ["line"],
            "conformity": [false, true]}"#,
    );
    let out = dir.path().join("sweep");
    let index = cmd_sweep(&grid, &CommonArgs::with_out(&out)).unwrap();
    let rows = fs::read_to_string(&index).unwrap();
    assert_eq!(rows.lines().count(), 2 + 8);
    let files = cmd_stats(&out, None, &dir.path().join("stats")).unwrap();
    assert_eq!(files.len(), 3);
    let effects = fs::read_to_string(dir.path().join("stats/effects_noconf.csv")).unwrap();
    let mut lines = effects.lines().skip(1);
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 2 * 4 * 4);
    assert!(lines
        .next()
        .unwrap()
        .starts_with("centralized-thorough-line-noconf,+0.00"));
    let means = fs::read_to_string(dir.path().join("stats/means.csv")).unwrap();
    assert_eq!(means.lines().count(), 2 + 8 * 4);
}

#[test]
fn ofat_command_writes_columns() {
    let dir = tempfile::tempdir().unwrap();
    let plan = write(
        dir.path(),
        "ofat.json",
        r#"{"parameter": "P", "values": [5, 8],
            "decentralized": {"mode": "decentralized", "search": "cursory", "network": "cycle", "R": 3, "T": 20},
            "centralized": {"R": 3, "T": 20}}"#,
    );
    let path = cmd_ofat(&plan, &CommonArgs::with_out(dir.path())).unwrap();
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(
        lines.next().unwrap(),
        "param,value,scenario,perf_mean,perf_lo,perf_hi,sync_mean,sync_lo,sync_hi"
    );
    assert_eq!(lines.count(), 4);
    // P = 8 forces the whole sweep onto raw performance
    assert!(text.lines().next().unwrap().contains(r#""normalize":false"#));
}
