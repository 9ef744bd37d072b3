//! Golden documents for the full command set, reruns, spec round-trip and
//! the exit-code contract. Set `UPDATE_GOLDEN=1` to rewrite the goldens.

mod common;

use std::process::Command;

use common::{cases, check_golden, fixture, golden_dir, run, BIN};
use schottky_lab_cli::spec::DomainSpec;

#[test]
fn documents_match_goldens_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, code, args) in cases() {
        let first = run(&args, tmp.path(), &format!("{name}_a"));
        let second = run(&args, tmp.path(), &format!("{name}_b"));
        assert_eq!(first.code, code, "{name}: exit code");
        let doc = first.document.unwrap_or_else(|| panic!("{name}: no document"));
        assert_eq!(Some(&doc), second.document.as_ref(), "{name}: rerun document differs");
        assert_eq!(first.scene, second.scene, "{name}: rerun scene differs");
        check_golden(&golden_dir().join(format!("{name}.json")), &doc);
        if let Some(svg) = &first.scene {
            check_golden(&golden_dir().join(format!("{name}.svg")), svg);
        }
    }
}

#[test]
fn documents_carry_schema_and_truncation_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, code, args) in cases() {
        if code != 0 || name.starts_with("generate") {
            continue;
        }
        let doc: serde_json::Value = serde_json::from_str(&run(&args, tmp.path(), name).document.unwrap()).unwrap();
        assert_eq!(doc["version"], 1, "{name}");
        for key in ["command", "inputs", "parameters", "measurements", "residuals", "empirical_constants"] {
            assert!(doc.get(key).is_some(), "{name}: missing {key}");
        }
        if !name.starts_with("validate") {
            assert!(!doc["parameters"].as_object().unwrap().is_empty(), "{name}: no parameters");
        }
    }
}

#[test]
fn scenes_use_the_outer_box_as_view_box() {
    let tmp = tempfile::tempdir().unwrap();
    let scaled = tmp.path().join("scaled.json");
    std::fs::write(
        &scaled,
        r#"{"version":1,"outer_radius":2.5,"disks":[[1.0,0.5,0.3]],"basepoint":[0.0,0.0]}"#,
    )
    .unwrap();
    let args = vec!["whitney".to_string(), "--spec".into(), scaled.display().to_string(), "--max-level".into(), "5".into()];
    let svg = run(&args, tmp.path(), "scene").scene.expect("scene written");
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"viewBox="-2.500000 -2.500000 5.000000 5.000000""#));
    assert!(!svg.contains("NaN") && !svg.contains("inf"));
}

#[test]
fn exit_code_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| Command::new(BIN).args(args).current_dir(tmp.path()).output().unwrap().status.code();
    assert_eq!(code(&["validate", "--spec", &fixture("unit_ball.json")]), Some(0));
    assert_eq!(code(&["validate", "--spec", &fixture("overlapping.json")]), Some(1));
    assert_eq!(code(&["whitney", "--spec", &fixture("overlapping.json")]), Some(1));
    assert_eq!(code(&["shadows", "--spec", &fixture("sierpinski.json"), "--max-level", "7"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(64));
    assert_eq!(code(&[]), Some(64));
    assert_eq!(code(&["whitney", "--max-level", "many"]), Some(64));
    assert_eq!(code(&["validate", "--spec", &fixture("malformed.json")]), Some(66));
    assert_eq!(code(&["validate", "--spec", "no/such/spec.json"]), Some(66));
}

#[test]
fn spec_round_trip_preserves_values() {
    for name in ["unit_ball.json", "three_disk.json", "sierpinski.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let spec = DomainSpec::parse(&text).unwrap();
        let again = DomainSpec::parse(&serde_json::to_string_pretty(&spec).unwrap()).unwrap();
        assert_eq!(spec, again, "{name}");
        let config = spec.to_config().unwrap();
        let back = DomainSpec::from_config(&config, spec.generator.clone());
        assert_eq!(spec, back, "{name}");
        assert_eq!(config, again.to_config().unwrap(), "{name}");
    }
}

#[test]
fn generators_are_deterministic_and_valid() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = |kind: &str, seed: &str, tag: &str| {
        let out = tmp.path().join(tag);
        let extra: &[&str] = if kind == "sierpinski_type" { &["--depth", "1", "--ring", "6"] } else { &["--count", "6"] };
        let status = Command::new(BIN)
            .args(["generate", "--kind", kind, "--seed", seed, "--out"])
            .arg(&out)
            .args(extra)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&out).unwrap()
    };
    for kind in ["random_packing", "sierpinski_type"] {
        let a = gen(kind, "5", "a.json");
        let b = gen(kind, "5", "b.json");
        assert_eq!(a, b, "{kind}: same seed, different bytes");
        let spec = DomainSpec::parse(std::str::from_utf8(&a).unwrap()).unwrap();
        spec.to_config().unwrap();
        if kind == "sierpinski_type" {
            assert_eq!(spec.disks.len(), 7);
        }
    }
}

#[test]
fn reference_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let doc = |args: &[&str], tag: &str| -> serde_json::Value {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let r = run(&args, tmp.path(), tag);
        assert_eq!(r.code, 0, "{tag}");
        serde_json::from_str(&r.document.unwrap()).unwrap()
    };
    let w = doc(&["whitney", "--spec", &fixture("unit_ball.json")], "w");
    assert!(w["measurements"]["cube_count"].as_u64().unwrap() > 0);
    assert_eq!(w["measurements"]["property_violations"], 0);
    assert!(w["residuals"]["uncovered_area"].as_f64().unwrap() > 0.0);

    let s = doc(&["schottky", "--spec", &fixture("three_disk.json"), "--depth", "3"], "s");
    assert_eq!(s["measurements"]["complement_disk_counts"][3], 24);

    let q = doc(&["qh", "--spec", &fixture("unit_ball.json"), "--from", "x0", "--to", "0.5+0i"], "q");
    let d = q["measurements"]["distance"].as_f64().unwrap();
    assert!((d / 2f64.ln() - 1.0).abs() <= 0.02, "{d}");
}
