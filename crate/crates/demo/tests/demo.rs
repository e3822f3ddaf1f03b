use numindex_demo::{lorentz_sweep_json, radius_2x2_json, unit_balls_svg};
use serde_json::Value;

const LINF: &str = r#"{"dim":2,"kind":"lp","parameters":{"p":"inf"}}"#;
const EUCLID: &str = r#"{"dim":2,"kind":"euclidean"}"#;

#[test]
fn balls_of_max_norm() {
    let svg = unit_balls_svg(LINF).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
    // the square's corner (1, 1) and the diamond's vertex (1, 0) are traced
    assert!(svg.contains("<svg") && svg.ends_with("</svg>"));
    assert!(unit_balls_svg(r#"{"dim":3,"kind":"example_3_2"}"#).is_err());
    assert!(unit_balls_svg("{").is_err());
}

#[test]
fn shift_and_rotation() {
    let v: Value =
        serde_json::from_str(&radius_2x2_json(LINF, 0.0, 1.0, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(v["radius"], 1.0);
    assert_eq!(v["norm"], 1.0);
    assert_eq!(v["exact"], true);
    let v: Value =
        serde_json::from_str(&radius_2x2_json(EUCLID, 0.0, 1.0, -1.0, 0.0).unwrap()).unwrap();
    assert!(v["radius"].as_f64().unwrap() < 1e-12);
    assert!((v["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v: Value =
        serde_json::from_str(&radius_2x2_json(EUCLID, 0.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(v["ratio"], 0.0);
}

#[test]
fn sweep_rows() {
    let rows: Vec<Value> = serde_json::from_str(&lorentz_sweep_json("2, 8", 1).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0]["upper"].as_f64().unwrap() < 1e-6);
    assert!(lorentz_sweep_json("x", 1).is_err());
    assert!(lorentz_sweep_json("0.5", 1).is_err());
}
