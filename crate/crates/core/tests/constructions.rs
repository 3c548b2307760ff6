use confcurv_core::analysis::{default_settings, growth_settings, pohozaev_report, slow_decay_measure, volume_growth};
use confcurv_core::construct::{
    build_prescribed_growth, build_unbounded, ConstructionAParams, ConstructionBParams, GrowthTable,
};

#[test]
fn unbounded_checks_and_pohozaev() {
    let c = build_unbounded(&ConstructionAParams::new(3, 3)).unwrap();
    assert!(c.report.checks.iter().all(|ch| ch.holds), "{:?}", c.report.checks);
    let f = &c.field;
    for r in [1.0, 5.0] {
        let p = pohozaev_report(f, r, &default_settings(f));
        assert!(p.discrepancy <= 10.0 * p.combined_error(), "{p:?}");
    }
    let norms: Vec<f64> = c.report.scales.iter().map(|x| x.center_norm).collect();
    let decay = slow_decay_measure(f, &norms);
    assert!(decay.windows(2).all(|w| w[1].sup > w[0].sup));
}

#[test]
fn unbounded_volume_grows_slower_than_log_bound() {
    let c = build_unbounded(&ConstructionAParams::new(3, 3)).unwrap();
    let rs: Vec<f64> = (2..=4).map(|k| (k as f64).exp()).collect();
    let rows = volume_growth(&c.field, &rs, None, &growth_settings(&c.field));
    assert!(rows.windows(2).all(|w| w[1].value > w[0].value));
    // the increment per unit of ln r shrinks: bubble masses stay bounded
    let inc: Vec<f64> = rows.windows(2).map(|w| w[1].value - w[0].value).collect();
    assert!(inc.windows(2).all(|w| w[1] < w[0]), "{rows:?}");
    assert!(rows.windows(2).all(|w| w[1].per_log < w[0].per_log));
}

#[test]
fn prescribed_growth_rings_carry_mass() {
    let phi = GrowthTable::from_fn((0..=10).map(f64::from), |r| r * r).unwrap();
    let c = build_prescribed_growth(&ConstructionBParams::new(3, 2, phi.clone())).unwrap();
    assert!(c.report.checks.iter().all(|ch| ch.holds), "{:?}", c.report.checks);
    let rows = volume_growth(&c.field, &[3.0], Some(&phi), &growth_settings(&c.field));
    assert!(rows[0].value >= 9.0, "{rows:?}");
}
