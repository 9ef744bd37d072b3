#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub const BIN: &str = env!("CARGO_BIN_EXE_schottky-lab");

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Every command on the reference specs: name, expected exit code, arguments.
pub fn cases() -> Vec<(&'static str, i32, Vec<String>)> {
    let unit = fixture("unit_ball.json");
    let three = fixture("three_disk.json");
    let sier = fixture("sierpinski.json");
    let a = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    vec![
        ("validate_unit_ball", 0, a(&["validate", "--spec", &unit])),
        ("validate_sierpinski", 0, a(&["validate", "--spec", &sier])),
        ("validate_overlapping", 1, a(&["validate", "--spec", &fixture("overlapping.json")])),
        ("whitney_unit_ball", 0, a(&["whitney", "--spec", &unit, "--max-level", "6"])),
        ("whitney_three_disk", 0, a(&["whitney", "--spec", &three, "--max-level", "6"])),
        ("qh_unit_ball", 0, a(&["qh", "--spec", &unit, "--from", "x0", "--to", "0.5+0i"])),
        ("qh_three_disk", 0, a(&["qh", "--spec", &three, "--from", "0.1,-0.2", "--to", "0+0.3i"])),
        ("shadows_three_disk", 0, a(&["shadows", "--spec", &three])),
        ("chains_three_disk", 0, a(&["chains", "--spec", &three, "--from", "0.2,0.3", "--to", "0.8,0.1"])),
        ("schottky_three_disk", 0, a(&["schottky", "--spec", &three, "--depth", "3"])),
        ("schottky_sierpinski", 0, a(&["schottky", "--spec", &sier, "--depth", "2"])),
        ("modulus_three_disk", 0, a(&["modulus", "--spec", &three])),
        ("beltrami_three_disk", 0, a(&["beltrami", "--spec", &three])),
        ("generate_random_packing", 0, a(&["generate", "--kind", "random_packing", "--count", "5", "--seed", "11"])),
        ("generate_sierpinski", 0, a(&["generate", "--kind", "sierpinski_type", "--depth", "1", "--ring", "6", "--seed", "7"])),
    ]
}

pub struct Run {
    pub code: i32,
    pub document: Option<String>,
    pub scene: Option<String>,
}

pub fn run(args: &[String], dir: &Path, tag: &str) -> Run {
    let out = dir.join(format!("{tag}.json"));
    let scene = dir.join(format!("{tag}.svg"));
    let status = Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(&out)
        .arg("--scene")
        .arg(&scene)
        .output()
        .expect("binary runs");
    let code = status.status.code().expect("exit code");
    Run { code, document: std::fs::read_to_string(&out).ok(), scene: std::fs::read_to_string(&scene).ok() }
}

pub fn check_golden(path: &Path, actual: &str) {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|_| panic!("missing golden {}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "{} differs from the golden document", path.display());
}
