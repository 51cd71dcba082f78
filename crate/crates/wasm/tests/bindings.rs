use arithdeg_wasm::*;

#[test]
fn cyclic_rows() {
    let v = cyclic_beta_json(2, 8, 100).unwrap();
    assert_eq!(v["rows"][0]["exact"], "10/9");
    assert_eq!(v["rows"][0]["f"], "4");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(cyclic_beta_json(2, 5, 100).is_err());
}

#[test]
fn marked_rows() {
    let v = marked_bounds_json(2, 10).unwrap();
    assert_eq!(v["rows"][0]["bound"], "661/84");
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["exceeds"] == true));
}

#[test]
fn search_rows() {
    let v = cor12_search_json("1", 30, "").unwrap();
    assert_eq!(v["count"], 3);
    assert_eq!(v["degeneracy"]["degrees"][0]["kernel_dim"], 0);
    assert!(cor12_search_json("1", MAX_BOUND + 1, "").is_err());
}

#[test]
fn errors_come_back_as_json() {
    let s = cor12_search("x1^", 5, "");
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!(v["error"].as_str().unwrap().contains("parse"));
    assert!(marked_bounds(9, 10).contains("error"));
}
