use nfbeam::sim::campaign::{run_trial, Scenario, TrackerKind};
use nfbeam::sim::SimulationConfig;

#[test]
fn trials_are_reproducible() {
    let s = Scenario::new(11, 3);
    let an = s.analytics().unwrap();
    let a = run_trial(&s, &an, 2, TrackerKind::Proposed, None).unwrap();
    let b = run_trial(&s, &an, 2, TrackerKind::Proposed, None).unwrap();
    assert!(a.error.is_none());
    assert_eq!(a, b);
}

#[test]
fn redrawn_scatterers_change_the_channel_not_the_path() {
    let fixed = Scenario::new(11, 3);
    let mut redraw = fixed.clone();
    redraw.redraw_scatterers = true;
    let an = fixed.analytics().unwrap();
    let a = run_trial(&fixed, &an, 1, TrackerKind::Proposed, None).unwrap();
    let b = run_trial(&redraw, &an, 1, TrackerKind::Proposed, None).unwrap();
    assert!(b.error.is_none());
    assert_eq!(a.tti_r0, b.tti_r0);
    assert_ne!(a.tti_gain, b.tti_gain);
    let mean = b.tti_gain.iter().map(|&g| g as f64).sum::<f64>() / b.tti_gain.len() as f64;
    assert!(mean > 0.5, "{mean}");
}

#[test]
fn config_maps_the_redraw_flag() {
    let text = "[scatterers]\nredraw_per_slot = true\ncount = 2\n";
    let s = SimulationConfig::from_toml_str(text, "inline.toml").unwrap().resolve().unwrap();
    assert!(s.redraw_scatterers);
    assert_eq!(s.scatterer_count, 2);
    assert!(!SimulationConfig::default().resolve().unwrap().redraw_scatterers);
}
