use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bsopt::csv_io::{read_cdf, read_sweep, write_cdf, write_sweep};
use bsopt::harness::{self, CdfLabels};
use bsopt_core::{Configuration, ScenarioConfig, SolverConfig, Strategy, TdSavings};

fn bsopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsopt")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = bsopt(&[
            "sweep",
            "--preset",
            "8t8r",
            "--td-savings",
            "on",
            "--seed",
            "3",
            "--points",
            "10",
            "--out",
            path_str(p),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let sweep = read_sweep(bytes.as_slice()).unwrap();
    assert_eq!(sweep.rows.len(), 40);
    assert!(sweep.rows.windows(2).all(|w| w[0].load <= w[1].load));
}

#[test]
fn sweep_writes_to_stdout_without_out() {
    let out = bsopt(&[
        "sweep",
        "--preset",
        "4t4r",
        "--load",
        "0,1",
        "--strategy",
        "rush-to-sleep",
    ]);
    assert_eq!(code(&out), 0);
    let sweep = read_sweep(out.stdout.as_slice()).unwrap();
    assert_eq!(sweep.rows.len(), 4);
    let sleep = Configuration::Rru4T4R.consumption_params(TdSavings::Off).p_sleep;
    assert!(sweep
        .rows
        .iter()
        .filter(|r| r.load == 0.0)
        .all(|r| r.p_cons == sleep && r.n_a == 0));
}

#[test]
fn csv_round_trips() {
    let cfg = ScenarioConfig::from_preset(Configuration::Aau64T64R, 100).with_seed(1);
    let cp = Configuration::Aau64T64R.consumption_params(TdSavings::On);
    let solver = SolverConfig::default();
    let sweep = harness::sweep_load(&cfg, &cp, &solver, &[0.7, 0.0, 0.2], &Strategy::BENCHMARKS, 4).unwrap();
    let mut buf = Vec::new();
    write_sweep(&sweep, &mut buf).unwrap();
    assert_eq!(read_sweep(buf.as_slice()).unwrap(), sweep);

    let labels = CdfLabels {
        preset: "64t64r".into(),
        td_savings: "on".into(),
    };
    let cdf = harness::monte_carlo_cdf(&cfg, &cp, &solver, &labels, 0.06, 25, &[Strategy::Oracle]).unwrap();
    let mut buf = Vec::new();
    write_cdf(&cdf, &mut buf).unwrap();
    assert_eq!(read_cdf(buf.as_slice()).unwrap(), cdf);
    let text = String::from_utf8(buf).unwrap();
    assert!(!text.contains('\r'));
}

#[test]
fn cdf_samples_are_sorted_with_rank_ordinates() {
    let cfg = ScenarioConfig::from_preset(Configuration::Rru4T4R, 100).with_seed(2);
    let cp = Configuration::Rru4T4R.consumption_params(TdSavings::Off);
    let labels = CdfLabels {
        preset: "4t4r".into(),
        td_savings: "off".into(),
    };
    let cdf = harness::monte_carlo_cdf(
        &cfg,
        &cp,
        &SolverConfig::default(),
        &labels,
        0.06,
        40,
        &Strategy::BENCHMARKS,
    )
    .unwrap();
    for st in [
        Strategy::Optimized,
        Strategy::RushToSleep,
        Strategy::RushToMute,
        Strategy::AwakeButWhisper,
    ] {
        let rows = cdf.samples(st, 0.06);
        assert_eq!(rows.len(), 40);
        assert!(rows.windows(2).all(|w| w[0].p_cons <= w[1].p_cons));
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.rank, i + 1);
            assert_eq!(r.cdf, (i + 1) as f64 / 40.0);
        }
    }
    // Rush-to-sleep always uses ceil(load·N) slots.
    assert!(cdf.samples(Strategy::RushToSleep, 0.06).iter().all(|r| r.n_a == 6));

    let one = harness::monte_carlo_cdf(&cfg, &cp, &SolverConfig::default(), &labels, 0.06, 1, &[]).unwrap();
    assert_eq!(one.rows.len(), 1);
    assert_eq!(one.rows[0].cdf, 1.0);
}

#[test]
fn solve_prints_one_record_and_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = bsopt(&[
        "solve",
        "--preset",
        "64t64r",
        "--td-savings",
        "on",
        "--load",
        "0.1",
        "--finalize",
        "ceil-floor",
        "--report",
        path_str(&report),
    ]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
    assert!(stdout.starts_with("strategy=optimized-ceil-floor "));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["finalize_mode"], "ceil-floor");
    assert!(json["allocation"]["p_cons"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_reads_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    fs::write(&file, r#"{"m": 32, "n": 100, "k": 4, "p_max": 1.0, "betas": [1, 1, 1, 1], "noise_powers": [0.1, 0.1, 0.1, 0.1], "rates": [4, 4, 4, 4]}"#).unwrap();
    let out = bsopt(&["solve", "--scenario", path_str(&file), "--strategy", "rush-to-mute"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains(" n_a=100 m_a=6 "));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = dir.path().join("hot.json");
    fs::write(
        &infeasible,
        r#"{"m": 8, "n": 10, "k": 2, "p_max": 1.0, "betas": [1, 1], "noise_powers": [1, 1], "rates": [50, 50]}"#,
    )
    .unwrap();
    assert_eq!(code(&bsopt(&["solve", "--scenario", path_str(&infeasible)])), 2);

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&bsopt(&["solve", "--scenario", path_str(&missing)])), 4);
    let unwritable = dir.path().join("no/such/dir.csv");
    assert_eq!(
        code(&bsopt(&["sweep", "--points", "2", "--out", path_str(&unwritable)])),
        4
    );

    let garbled = dir.path().join("bad.json");
    fs::write(&garbled, "{").unwrap();
    assert_eq!(code(&bsopt(&["solve", "--scenario", path_str(&garbled)])), 1);
    assert_eq!(code(&bsopt(&["solve", "--no-such-flag"])), 1);
    assert_eq!(code(&bsopt(&["sweep", "--load", "1.5"])), 1);
    assert_eq!(code(&bsopt(&["--help"])), 0);
}

#[test]
fn snr_overrides_change_the_draw() {
    let base = bsopt(&["solve", "--preset", "8t8r", "--load", "0.3"]);
    let low = bsopt(&[
        "solve",
        "--preset",
        "8t8r",
        "--load",
        "0.3",
        "--snr-lo-db",
        "-5",
        "--snr-hi-db",
        "5",
    ]);
    assert_eq!(code(&low), 0);
    assert_ne!(base.stdout, low.stdout);
    assert_eq!(code(&bsopt(&["solve", "--snr-lo-db", "20", "--snr-hi-db", "10"])), 1);
}

#[test]
fn derive_params_prints_preset_values() {
    let out = bsopt(&["derive-params", "--preset", "4t4r", "--td-savings", "on"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "gamma=5.33 alpha=0.75 p0=34.69 p1=114.71 p_sleep=233.55"
    );
}

#[test]
fn oracle_check_reports_each_load() {
    let out = bsopt(&[
        "oracle-check",
        "--preset",
        "8t8r",
        "--trials",
        "5",
        "--seed",
        "4",
        "--load",
        "0.1,0.5",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text
        .lines()
        .all(|l| l.contains("round_max=") && l.contains("ceil_floor_median=")));
}
