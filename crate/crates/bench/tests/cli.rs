mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use phaseret_bench::report::parse_rows_csv;

fn phaseret(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseret"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn help_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&phaseret(&["--help"], dir.path())), 0);
    assert_eq!(code(&phaseret(&["run", "--bogus"], dir.path())), 1);
    assert_eq!(code(&phaseret(&[], dir.path())), 1);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    small_dataset(dir.path(), &["nt_coins"], 4);
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--dataset", d, "--alphas=-1"],
        vec!["run", "--dataset", d, "--algs", "gs"],
        vec!["run", "--dataset", d, "--denoiser", "bm3d"],
        vec!["run", "--dataset", d, "--iters", "0"],
    ] {
        let out = phaseret(&args, dir.path());
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    std::fs::write(dir.path().join("bad.toml"), "alphas = [2]\nunknown_key = 1\n").unwrap();
    assert_eq!(code(&phaseret(&["run", "--config", "bad.toml"], dir.path())), 1);
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(code(&phaseret(&["run", "--dataset", empty.path().to_str().unwrap()], dir.path())), 1);
}

#[test]
fn runtime_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    small_dataset(dir.path(), &["nt_coins"], 4);
    let out = phaseret(&["run", "--dataset", ".", "--denoiser", "cnn:path=missing.bin"], dir.path());
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&phaseret(&["table", "absent.csv"], dir.path())), 2);
}

#[test]
fn run_then_table_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    small_dataset(&data, &["nt_coins", "unt_moon"], 4);
    std::fs::write(
        dir.path().join("sweep.toml"),
        "dataset = \"data\"\nalgs = [\"hio\", \"prdeep\"]\nalphas = [2, 3]\nseeds = [0]\niters = 10\nout = \"file.csv\"\n",
    )
    .unwrap();
    // flags override the file
    let out = phaseret(&["run", "--config", "sweep.toml", "--out", "rows.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("file.csv").exists());
    let rows = parse_rows_csv(&std::fs::read_to_string(dir.path().join("rows.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    let console = String::from_utf8(out.stdout).unwrap();
    assert!(console.contains("alpha=2") && console.contains("alpha=3"));

    let out = phaseret(&["table", "rows.csv", "--out", "summary.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("algorithm,alpha,psnr,ssim,runtime,count"));
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
}

#[test]
fn denoise_subcommand_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    small_dataset(dir.path(), &["unt_retina"], 2);
    let out = phaseret(&["denoise", "--denoiser", "median:window=3", "unt_retina.pgm", "out.png"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let img = phaseret::io::load_image(dir.path().join("out.png")).unwrap();
    assert_eq!(img.dims(), (32, 32));
}
