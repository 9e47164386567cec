use serde_json::Value;
use thhforge_web::{adams_impl, bokstedt_impl, steenrod_impl, MAX_DEGREE};

#[test]
fn steenrod_rank_and_reduction() {
    let v: Value = serde_json::from_str(&steenrod_impl("A2", "Sq2Sq2").unwrap()).unwrap();
    assert_eq!(v["rank"], 64);
    assert_eq!(v["reduced"], "Sq3Sq1");
    assert!(steenrod_impl("A", "").is_err());
}

#[test]
fn bokstedt_series() {
    let v: Value = serde_json::from_str(&bokstedt_impl("hz", 2, 10).unwrap()).unwrap();
    // H_*(HZ) ⊗ E(σξ̄₁²) ⊗ P(σξ̄₂): P on 2, 3, 7, 4; E on 3
    let series: Vec<u64> = serde_json::from_value(v["series"].clone()).unwrap();
    assert_eq!(series, vec![1, 0, 1, 2, 2, 2, 4, 5, 5, 7, 9]);
    assert!(bokstedt_impl("ku", 2, MAX_DEGREE + 1).is_err());
}

#[test]
fn adams_svg() {
    let svg = adams_impl("thh-ko-Y", 30).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<circle"));
    assert!(adams_impl("thh-tmf", 30).is_err());
}
