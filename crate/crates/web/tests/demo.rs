use dadmm_web::{network_json, race_json, sweep_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn lattice_view_is_two_colored() {
    let v = parse(network_json("lattice", 10, 0).unwrap());
    assert_eq!(v["nodes"], 10);
    assert_eq!(v["edges"].as_array().unwrap().len(), 13);
    assert_eq!(v["num_colors"], 2);
    let colors: Vec<u64> = v["colors"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    for e in v["edges"].as_array().unwrap() {
        let (i, j) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
        assert_ne!(colors[i], colors[j]);
    }
}

#[test]
fn race_records_every_step() {
    let v = parse(race_json("geometric", 20, 1, 1.0, 50).unwrap());
    assert_eq!(v["d_admm"].as_array().unwrap().len(), 50);
    assert_eq!(v["zhu"].as_array().unwrap().len(), 50);
    let last = v["d_admm"][49].as_f64().unwrap();
    let first = v["d_admm"][0].as_f64().unwrap();
    assert!(last < first);
}

#[test]
fn sweep_covers_the_grid() {
    let v = parse(sweep_json("barabasi-albert", 10, 0, 1000).unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().any(|r| r["d_admm"].is_u64()));
}

#[test]
fn bad_requests_are_reported() {
    assert!(network_json("torus", 10, 0).is_err());
    assert!(network_json("lattice", 100_000, 0).is_err());
    assert!(race_json("lattice", 10, 0, -1.0, 10).is_err());
}
