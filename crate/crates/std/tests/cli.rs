use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homsim_std::output::{read_count_record, read_density};
use homsim_core::fit::DipModel;
use tempfile::TempDir;

fn homsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("HOMSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn jsa_reference_preset_writes_panels_and_marginals() {
    let dir = TempDir::new().unwrap();
    let out = homsim(&["jsa", "--preset", "paper", "--out", "o", "--grid", "128"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for name in ["pump_envelope", "phase_matching", "jsa"] {
        let (s, i, v) = read_density(&dir.path().join(format!("o/{name}.csv"))).unwrap();
        assert_eq!((s.len(), i.len(), v.len()), (128, 128, 128 * 128), "{name}");
    }
    assert!(dir.path().join("o/marginals.csv").is_file());
    let text = stdout(&out);
    let signal: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("signal marginal FWHM: ")?.strip_suffix(" nm")?.parse().ok())
        .unwrap();
    assert!((signal - 9.3).abs() / 9.3 < 0.15, "{signal}");
}

#[test]
fn missing_material_file_exits_2_naming_the_path() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "run.toml", "[crystal]\nmaterial = \"materials/bbo.toml\"\n");
    let out = homsim(&["jsa", "--config", "run.toml"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("materials/bbo.toml"), "{}", stderr(&out));
}

#[test]
fn material_file_resolves_relative_to_the_config() {
    let dir = TempDir::new().unwrap();
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    std::fs::write(dir.path().join("cfg/kdp.toml"), include_str!("../materials/kdp.toml")).unwrap();
    write(dir.path(), "cfg/run.toml", "[crystal]\nmaterial = \"kdp.toml\"\n");
    let out = homsim(&["hom", "--config", "cfg/run.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn validation_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "empty.toml", "[scan]\ndelays_um = []\n");
    write(dir.path(), "typo.toml", "[pump]\ncentre_nm = 400.0\n");
    write(dir.path(), "coarse.toml", "[grid]\nspan_fwhm = 40.0\nsignal_points = 16\nidler_points = 16\n");
    for args in [
        &["hom", "--config", "empty.toml"][..],
        &["hom", "--config", "typo.toml"],
        &["schmidt", "--grid", "1"],
        &["schmidt", "--config", "coarse.toml", "--out", "o"],
        &["hom", "--preset", "nonexistent"],
        &["hom", "--config", "absent.toml"],
        &["frobnicate"],
    ] {
        let out = homsim(args, dir.path());
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn truncation_leakage_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bright.toml", "[source]\nlo_mean_photons = 0.5\ncutoff = 4\n");
    let out = homsim(&["simulate", "--config", "bright.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("leakage"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "blocker", "");
    let out = homsim(&["hom", "--out", "blocker/o"], dir.path());
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn hom_reports_visibility_and_width() {
    let dir = TempDir::new().unwrap();
    let out = homsim(&["hom", "--out", "o"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("visibility V = 0.9646"), "{text}");
    assert!(text.contains("dip FWHM = 45.75 µm"), "{text}");
    let csv = std::fs::read_to_string(dir.path().join("o/hom_curve.csv")).unwrap();
    assert!(csv.starts_with("# homsim"));
    assert!(csv.lines().nth(1).unwrap() == "delay_s,path_um,probability");
    assert_eq!(csv.lines().count(), 2 + 61);

    let out = homsim(&["hom", "--preset", "matched", "--out", "m"], dir.path());
    assert!(stdout(&out).contains("visibility V = 1.0000"));
}

#[test]
fn schmidt_numbers_for_reference_and_separable() {
    let dir = TempDir::new().unwrap();
    let k = |preset: &str| -> f64 {
        let out = homsim(&["schmidt", "--preset", preset, "--out", preset, "--grid", "128"], dir.path());
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        stdout(&out)
            .lines()
            .find_map(|l| l.strip_prefix("Schmidt number K = ")?.parse().ok())
            .unwrap()
    };
    assert!((1.0..=1.1).contains(&k("paper")));
    assert!((k("separable") - 1.0).abs() < 1e-6);
}

#[test]
fn simulate_is_deterministic_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let run = |out: &str, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_homsim"))
            .args(["simulate", "--seed", "42", "--out", out])
            .current_dir(dir.path())
            .env("HOMSIM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(dir.path().join(out).join("counts.csv")).unwrap()
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "4"));
    assert!(String::from_utf8_lossy(&a).lines().next().unwrap().ends_with("seed=42"));
    let other = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(["simulate", "--seed", "43", "--out", "e"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&other), 0);
    assert_ne!(a, std::fs::read(dir.path().join("e/counts.csv")).unwrap());
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(["simulate", "--out", "o"])
        .current_dir(dir.path())
        .env("HOMSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_then_fit_recovers_the_configured_visibility() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "run.toml",
        "[simulation]\npulses_per_point = 4000000\nseed = 5\n[scan]\nstart_um = -120.0\nstop_um = 120.0\npoints = 49\n",
    );
    let out = homsim(&["simulate", "--config", "run.toml", "--out", "o"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let exact: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("exact three-fold visibility: ")?.parse().ok())
        .unwrap();
    let record = read_count_record(&dir.path().join("o/counts.csv")).unwrap();
    assert_eq!(record.seed, 5);
    assert!(record.points.iter().all(|p| p.is_consistent() && p.pulses == 4_000_000));

    let out = homsim(&["fit", "--input", "o/counts.csv", "--out", "f"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("visibility V = ")).unwrap();
    let nums: Vec<f64> = line
        .trim_start_matches("visibility V = ")
        .split(" ± ")
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((nums[0] - exact).abs() <= 3.0 * nums[1], "fit {line}, exact {exact:.4}");
    assert!(dir.path().join("f/fit_curve.csv").is_file());
}

#[test]
fn fit_recovers_noiseless_two_column_data() {
    let dir = TempDir::new().unwrap();
    let truth = DipModel::from_fwhm(100.0, 0.894, 0.0, 50.1);
    let mut text = String::from("position_um,counts\n");
    for k in 0..41 {
        let d = -150.0 + 7.5 * k as f64;
        text.push_str(&format!("{d},{:?}\n", truth.eval(d)));
    }
    write(dir.path(), "dip.csv", &text);
    let out = homsim(&["fit", "--input", "dip.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("visibility V = 0.89400 ± 0.00000"), "{text}");
    assert!(text.contains("FWHM = 50.100"), "{text}");
}

#[test]
fn malformed_fit_input_exits_2() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.csv", "position_um,counts\n0,abc\n");
    write(dir.path(), "short.csv", "position_um,counts\n0,1\n1,2\n");
    for input in ["bad.csv", "short.csv", "missing.csv"] {
        let out = homsim(&["fit", "--input", input], dir.path());
        assert_eq!(code(&out), 2, "{input}: {}", stderr(&out));
    }
}

#[test]
fn tampered_tolerance_flips_only_its_criterion() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(["paper", "--out", "o"])
        .current_dir(dir.path())
        .env("HOMSIM_TOL_C1", "0")
        .env("HOMSIM_TOL_C3", "1e-9")
        .output()
        .unwrap();
    let text = stdout(&out);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('C')).collect();
    assert_eq!(lines.len(), 9, "{text}");
    assert!(lines[0].starts_with("C1 FAIL"));
    assert!(lines[1].starts_with("C2 PASS"));
    assert!(lines[2].starts_with("C3 FAIL"));

    let report = std::fs::read_to_string(dir.path().join("o/paper_report.csv")).unwrap();
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(report.as_bytes());
    assert_eq!(r.headers().unwrap().len(), 5);
    let status: Vec<String> = r.records().map(|rec| rec.unwrap()[2].to_string()).collect();
    assert_eq!(status.len(), 9);
    assert_eq!(status[0], "FAIL");
    assert!(dir.path().join("o/visibility_curves.csv").is_file());

    let out = Command::new(env!("CARGO_BIN_EXE_homsim"))
        .args(["paper", "--out", "p"])
        .current_dir(dir.path())
        .env("HOMSIM_TOL_C2", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
