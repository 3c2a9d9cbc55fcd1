use bicover_demo::{extend, extend_json, spectrum, spectrum_json, synthesize_json};
use serde_json::Value;

#[test]
fn spectrum_of_the_golden_mean_graph() {
    let v = spectrum_json("[[1,1],[1,0]]").unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((v["spectral_radius"].as_f64().unwrap() - golden).abs() < 1e-9);
    assert_eq!(v["connectivity"]["irreducible"], true);
}

#[test]
fn two_cycle_covers_a_loop() {
    let v = synthesize_json("[[0,1],[1,0]]", "[[1]]", "eq").unwrap();
    assert_eq!(v["found"], true);
    assert_eq!(v["witness"]["rows"], serde_json::json!([[1], [1]]));
    assert_eq!(v["homomorphism"]["bi_covering"], true);
    let none = synthesize_json("[[1]]", "[[2]]", "eq").unwrap();
    assert_eq!(none["found"], false);
}

#[test]
fn loop_extends_into_two_loops() {
    let v = extend_json("[[1]]", "[[2]]", "2").unwrap();
    assert_eq!(v["extension"]["bi_covering"], true);
    assert_eq!(v["extension"]["degree"], 2);
    let same = extend_json("[[1]]", "[[2]]", "same").unwrap();
    assert_eq!(same["extension"]["degree"], 1);
}

#[test]
fn errors_become_json() {
    let v: Value = serde_json::from_str(&spectrum("[[1,2]]")).unwrap();
    assert_eq!(v["ok"], false);
    let v: Value = serde_json::from_str(&extend("[[1,0],[0,1]]", "[[1]]", "same")).unwrap();
    assert!(v["error"].as_str().unwrap().contains("weakly connected hypothesis fails"));
    let big = format!("[{}]", vec!["[0,0,0,0,0,0,0]"; 7].join(","));
    assert!(spectrum_json(&big).is_err());
}
