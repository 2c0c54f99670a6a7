use nfbeam_wasm::{gain_map, range_correlation, search_grid};

#[test]
fn profile_peaks_at_focus() {
    let v: serde_json::Value = serde_json::from_str(&range_correlation(20.0, 90.0, 50.0, 2.0, 41).unwrap()).unwrap();
    let oracle: Vec<f64> = v["oracle"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(oracle.len(), 41);
    let best = oracle.iter().cloned().fold(0.0, f64::max);
    assert!((oracle[20] - best).abs() < 1e-12);
    assert!(v["delta_minus"].as_f64().unwrap() < v["delta_plus"].as_f64().unwrap());
}

#[test]
fn grid_and_errors() {
    let v: serde_json::Value = serde_json::from_str(&search_grid(30.0, 60.0, 50.0, 99.0, 2.5).unwrap()).unwrap();
    assert!(!v["rings"].as_array().unwrap().is_empty());
    assert!(search_grid(30.0, 60.0, 50.0, 120.0, 2.5).is_err());
}

#[test]
fn gain_map_is_bounded_and_peaks_near_centre() {
    let n = 21;
    let m = gain_map(15.0, 80.0, 1.0, n).unwrap();
    assert_eq!(m.len(), n * n);
    assert!(m.iter().all(|g| (0.0..=1.0).contains(g)));
    assert!(m[10 * n + 10] > 0.95);
    assert!(gain_map(2.0, 90.0, 10.0, 5).unwrap().iter().any(|g| g.is_nan()));
}
