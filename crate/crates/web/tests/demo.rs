use relcris_web::{classify_demo_json, newton_json, rank_demo_json};

#[test]
fn rotation_has_slope_one_half() {
    let v = newton_json(3, "0,3;1,0").unwrap();
    assert_eq!(v["slopes"], serde_json::json!([[1, 2], [1, 2]]));
    assert_eq!(v["newton_number"], serde_json::json!([1, 1]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 2);
}

#[test]
fn diagonal_polygon_has_a_corner() {
    let v = newton_json(5, "25 0; 0 1").unwrap();
    assert_eq!(v["slopes"], serde_json::json!([[0, 1], [2, 1]]));
    assert_eq!(v["vertices"], serde_json::json!([[0, [0, 1]], [1, [0, 1]], [2, [2, 1]]]));
}

#[test]
fn counterexample_rank_and_verdict() {
    assert_eq!(rank_demo_json(3, "3, 1", "1").unwrap()["rank"], 1);
    assert_eq!(rank_demo_json(3, "1", "0, 3").unwrap()["rank"], 2);
    let c = classify_demo_json(3, "3 1", "1").unwrap();
    assert_eq!(c["verdict"], "WEAKLY_ADMISSIBLE_NON_ADMISSIBLE");
    assert_eq!(classify_demo_json(3, "1", "0 3").unwrap()["verdict"], "ADMISSIBLE_MIXED");
}

#[test]
fn bad_input_is_reported() {
    assert!(newton_json(3, "1,2;3").is_err());
    assert!(rank_demo_json(3, "x", "1").is_err());
}
