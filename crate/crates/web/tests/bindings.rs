use rnaenum_web::{counts_json, inspect_json, melt_json};

fn parse(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn counts_for_the_page() {
    let v = parse(&counts_json("general", 1, 0, "1", "0", 7).unwrap());
    let want: Vec<&str> = vec!["1", "1", "2", "4", "8", "17", "37"];
    assert_eq!(v["counts"], serde_json::json!(want));
    let v = parse(&counts_json("saturated", 1, 0, "1", "1", 5).unwrap());
    assert_eq!(v["class"], "saturated+dangles");
    assert!(counts_json("general", 1, 0, "1", "0", 10_000).is_err());
    assert!(counts_json("bogus", 1, 0, "1", "0", 5).is_err());
}

#[test]
fn inspecting_a_structure() {
    let v = parse(&inspect_json("((.))..", 1, 0).unwrap());
    assert_eq!(v["valid"], true);
    assert_eq!(v["stacked_pairs"], 1);
    assert!(v["tree"].is_object());
    let v = parse(&inspect_json("(.)", 3, 0).unwrap());
    assert_eq!(v["valid"], false);
    assert!(inspect_json("(()", 1, 0).is_err());
}

#[test]
fn melting_curves_for_the_page() {
    let v = parse(&melt_json(30, 1, -150.0, 50.0, 10.0).unwrap());
    assert_eq!(v["celsius"].as_array().unwrap().len(), 21);
    let nus: Vec<f64> = v["nussinov"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(nus.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(melt_json(30, 1, 10.0, 0.0, 1.0).is_err());
}
