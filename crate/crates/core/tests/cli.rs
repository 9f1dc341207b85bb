use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use efista::cli::read_pgm;
use efista::experiments::psnr;

fn efista(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_efista"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn noiseless_fista_deblur_improves_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(
        dir.path(),
        &["deblur"],
        "image = synthetic:11\nsize = 64\nlevels = 6\nnoise_sigma = 0\nvariant = fista\niterations = 50\nout = res\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let res = dir.path().join("res");
    for f in ["deblurred.pgm", "observed.pgm", "trace.csv", "summary.txt"] {
        assert!(res.join(f).is_file(), "{f} missing");
    }
    let truth = efista::experiments::synthetic_image(64, 64, 11);
    let restored = psnr(&read_pgm(res.join("deblurred.pgm")).unwrap(), &truth).unwrap();
    let observed = psnr(&read_pgm(res.join("observed.pgm")).unwrap(), &truth).unwrap();
    assert!(restored > observed, "{restored} <= {observed}");
    assert_eq!(fs::read_to_string(res.join("trace.csv")).unwrap().lines().count(), 51);
    assert!(stdout(&out).starts_with("FISTA on synthetic-11"));
}

#[test]
fn diverging_ifista_exits_two_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(
        dir.path(),
        &["deblur", "--out", dir.path().join("o").to_str().unwrap()],
        "image = cameraman\nnoise_sigma = 0.01\nvariant = ifista\niterations = 50\ntiming = off\n",
    );
    assert_eq!(out.status.code(), Some(2), "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("turned upward") || stdout(&out).contains("blew up"));
    assert!(dir.path().join("o/deblurred.pgm").is_file());
    assert!(dir.path().join("o/trace.csv").is_file());
}

#[test]
fn missing_image_exits_one_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(dir.path(), &["deblur"], "image = nowhere/absent.pgm\nout = res\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("absent.pgm"), "{}", stderr(&out));
    assert!(!dir.path().join("res").exists(), "nothing written before validation");
}

#[test]
fn unknown_key_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(dir.path(), &["deblur"], "# comment\nsize = 64\nstep = 2\n");
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("run.cfg:3") && err.contains("unknown key 'step'"), "{err}");
}

#[test]
fn table_has_thirty_rows_and_empty_list_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(
        dir.path(),
        &["table", "--quiet"],
        "size = 32\nlevels = 5\ntrials = 1\niterations = 3\ntiming = off\nout = t\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty(), "quiet suppresses the summary");
    let csv = fs::read_to_string(dir.path().join("t/table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 2 * 3);

    let out = efista(dir.path(), &["table"], "images =\nout = t2\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_grid_has_thirty_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = efista(
        dir.path(),
        &["sweep", "--quiet"],
        "image = synthetic:2\nsize = 16\nlevels = 2\ntrials = 1\niterations = 15\nout = s\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 36);
}

#[test]
fn curves_are_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "image = synthetic:4\nsize = 32\nlevels = 3\ntrials = 2\niterations = 10\ntiming = off\n\
               variants = ista, fista, ifista, efista\nn_values = 4, 8\n";
    let run = |name: &str, seed: &str| {
        let out_dir = dir.path().join(name);
        let out = efista(
            dir.path(),
            &["curves", "--quiet", "--seed", seed, "--out", out_dir.to_str().unwrap()],
            cfg,
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let mut files: Vec<_> = fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>()
    };
    let a = run("a", "5");
    assert_eq!(a.len(), 6);
    assert_eq!(a, run("b", "5"));
    assert_ne!(a, run("c", "6"));
}
