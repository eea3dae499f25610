use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use rfso_cli::presets::{preset, PRESET_NAMES};
use rfso_cli::run::CSV_HEADER;
use rfso_cli::{load, parse, run_files, MethodChoice};
use rfso_core::mcsim::McConfig;

const MINIMAL: &str = "\
fso.alpha = 10
fso.beta = 5
fso.rho_M = 0.95
rf.M = 2
rf.l = 2
rf.rho = 0.5
";

fn rfso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfso"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV file, split on commas (no field here contains one).
fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn run_writes_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let scn = scenarios_dir().join("fig7.scn");
    let o = rfso(&["run", "--scenario", scn.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "scenario_id,sweep_var,sweep_value,mu1_db,mu2_db,method,p_out,uncertainty,work,wall_time_ms,diagnostics"
    );
    assert_eq!(CSV_HEADER.join(","), text.lines().next().unwrap());
    let rows = rows(&out);
    assert_eq!(rows.len(), 5);
    for (m, row) in rows.iter().enumerate() {
        assert_eq!(row[0], "fig7-weak");
        assert_eq!(row[1], "M");
        assert_eq!(row[2].parse::<f64>().unwrap(), (m + 1) as f64);
        assert_eq!(row[5], "exact");
        let p: f64 = row[6].parse().unwrap();
        assert!(p > 0.0 && p < 1.0);
        // 17 significant digits
        assert_eq!(row[6].split('e').next().unwrap().replace('.', "").len(), 17);
    }
}

#[test]
fn validate_accepts_shipped_scenarios() {
    for name in PRESET_NAMES {
        let scn = scenarios_dir().join(format!("{name}.scn"));
        let o = rfso(&["validate", "--scenario", scn.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains(&format!("scenario {name}-")));
        assert!(text.contains("sweep"));
    }
}

#[test]
fn validate_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(
        dir.path(),
        "bad.scn",
        "fso.beta = 0\nfso.rho_M = 0.5\nrf.M = 2\nrf.l = 3\nrf.rho = 1.5\nfso.colour = red\nsweep.mu1_db = 5:1:1\n",
    );
    let o = rfso(&["validate", "--scenario", scn.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in ["fso.alpha", "fso.beta", "rf.l", "rf.rho", "fso.colour", "sweep.mu1_db"] {
        assert!(err.contains(needle), "missing {needle} in:\n{err}");
    }
}

#[test]
fn input_errors_exit_with_2() {
    let scn = scenarios_dir().join("fig7.scn");
    let o = rfso(&["run", "--scenario", scn.to_str().unwrap(), "--method", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rfso(&["run", "--scenario", "/nonexistent/x.scn"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
    let o = rfso(&["preset", "fig9", "--out", "/tmp"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_method_exits_with_1_and_keeps_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "two.scn", MINIMAL);
    let out = dir.path().join("r.csv");
    let o = rfso(&[
        "run", "--scenario", scn.to_str().unwrap(), "--method", "exact,single", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rows = rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "two");
    assert!(!rows[0][6].is_empty() && rows[0][10].is_empty());
    assert_eq!(rows[1][5], "single");
    assert!(rows[1][6].is_empty());
    assert!(rows[1][10].starts_with("error:"));
}

#[test]
fn mu2_floor_does_not_move_with_mu2() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "floor.scn", &format!("{MINIMAL}sweep.mu2_db = 0:60:2\n"));
    let out = dir.path().join("r.csv");
    let o = rfso(&[
        "run", "--scenario", scn.to_str().unwrap(), "--method", "floor-mu2", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = rows(&out);
    assert_eq!(rows.len(), 31);
    assert!(rows.iter().all(|r| r[6] == rows[0][6]));
    assert_eq!(rows[30][4].parse::<f64>().unwrap(), 60.0);
}

#[test]
fn full_correlation_is_clamped_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "rho1.scn", &MINIMAL.replace("rf.rho = 0.5", "rf.rho = 1"));
    let out = dir.path().join("r.csv");
    let o = rfso(&[
        "run", "--scenario", scn.to_str().unwrap(), "--method", "quadrature,mc", "--samples", "20000",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: rf.rho = 1 clamped to 0.999"));
    let rows = rows(&out);
    assert!(rows[0][10].contains("clamped"));
    // MC simulates ρ = 1 itself
    assert!(!rows[1][10].contains("clamped"));

    // the t-series needs far more than t_max terms this close to ρ = 1
    let o = rfso(&[
        "run", "--scenario", scn.to_str().unwrap(), "--method", "exact", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rows = self::rows(&out);
    assert!(rows[0][10].contains("series not converged"));
    assert!(rows[0][6].parse::<f64>().is_ok());
}

#[test]
fn output_is_renamed_into_place() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "a.scn", MINIMAL);
    let out = dir.path().join("r.csv");
    std::fs::write(&out, "stale").unwrap();
    let o = rfso(&["run", "--scenario", scn.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["a.scn", "r.csv"]);
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("scenario_id,"));
}

#[test]
fn unwritable_output_is_an_evaluation_error() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "a.scn", MINIMAL);
    let out = dir.path().join("missing/r.csv");
    let o = rfso(&["run", "--scenario", scn.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn preset_writes_scenarios_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let o = rfso(&[
        "preset", "fig7", "--out", dir.path().to_str().unwrap(), "--method", "exact",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for id in ["fig7-weak", "fig7-strong", "fig7-weak-jitter6"] {
        let loaded = load(&dir.path().join(format!("{id}.scn"))).unwrap();
        assert_eq!(loaded.file.id, id);
    }
    assert_eq!(rows(&dir.path().join("fig7.csv")).len(), 15);
}

#[test]
fn shipped_scenarios_are_the_first_preset_curves() {
    for name in PRESET_NAMES {
        let loaded = load(&scenarios_dir().join(format!("{name}.scn"))).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.file, preset(name).unwrap().files[0], "{name}");
    }
}

#[test]
fn more_relays_never_hurt_the_best_relay() {
    let p = preset("fig7").unwrap();
    let rows = run_files(&p.files, &[MethodChoice::Exact], &McConfig::default());
    for curve in rows.chunks(5) {
        for w in curve.windows(2) {
            assert!(w[1].p_out.unwrap() <= w[0].p_out.unwrap(), "{}", w[0].scenario_id);
        }
    }
}

#[test]
fn repeated_runs_agree_except_for_timing() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenarios_dir().join("fig2.scn");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = rfso(&[
            "run", "--scenario", scn.to_str().unwrap(), "--method", "exact,mc", "--samples", "50000",
            "--seed", "9", "--workers", "3", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(rows(&out));
    }
    let strip = |rows: &[Vec<String>]| -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().enumerate().filter(|(i, _)| *i != 9).map(|(_, v)| v.clone()).collect())
            .collect()
    };
    assert_eq!(strip(&outputs[0]), strip(&outputs[1]));
}

prop_compose! {
    fn scenario_text()(
        alpha in 0.6f64..30.0,
        beta in 1u32..10,
        rho_m in 0.0f64..=1.0,
        omega in 0.1f64..2.0,
        b0 in 0.05f64..1.0,
        (relays, rank) in (1u32..6).prop_flat_map(|m| (Just(m), prop_oneof![(1..=m).prop_map(|l| l.to_string()), Just("M".to_string())])),
        rho in 0.0f64..0.999,
        mu1 in -10.0f64..60.0,
        mu2 in -10.0f64..60.0,
        gamma in -20.0f64..10.0,
        jitter in 0.1f64..6.0,
        t_max in 50u32..900,
        sweep in prop_oneof![
            Just(String::new()),
            (0.0f64..20.0, 1.0f64..5.0).prop_map(|(a, s)| format!("sweep.mu1_db = {a}:{}:{s}\n", a + 10.0)),
            Just("sweep.rho = 0:0.9:0.3\n".to_string()),
        ],
    ) -> String {
        format!(
            "gamma_th_db = {gamma}\nrf.mu1_db = {mu1}\nrf.rho = {rho}\nrf.M = {relays}\nrf.l = {rank}\n\
             fso.mu2_db = {mu2}\nfso.alpha = {alpha}\nfso.beta = {beta}\nfso.rho_M = {rho_m}\n\
             fso.omega = {omega}\nfso.b0 = {b0}\nfso.sigma_s = {}\nseries.t_max = {t_max}\n{sweep}",
            0.05 * jitter
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emitted_files_parse_back(text in scenario_text()) {
        let first = parse(&text, "generated", "gen").unwrap().file;
        let again = parse(&first.emit(), "emitted", "other").unwrap().file;
        prop_assert_eq!(&again, &first);
        prop_assert_eq!(again.emit(), first.emit());
    }
}
