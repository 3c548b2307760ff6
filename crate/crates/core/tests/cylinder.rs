use confcurv_core::analysis::CylinderField;
use confcurv_core::quadrature::QuadSettings;
use confcurv_core::{make_context, SolutionField};

#[test]
fn pohozaev_sphere_form_on_flat_bubble() {
    let f = SolutionField::flat_only(make_context(3).unwrap(), 1.0).unwrap();
    let cyl = CylinderField::new(&f);
    let s = QuadSettings::for_dim(3).with_rtol(1e-10);
    for t in [0.0, 1.0, 2.0] {
        let id = cyl.w_identity_check(t, 1e-2, &s);
        assert!(id.pohozaev_gap <= 1e-5, "{id:?}");
        // the flat bubble does not have constant curvature, so P is nonzero
        assert!(id.two_p_volume.abs() > 1e-3);
    }
}

#[test]
fn energy_second_derivative_on_baseline() {
    for n in [3, 4, 5] {
        let f = SolutionField::baseline_only(make_context(n).unwrap()).unwrap();
        let cyl = CylinderField::new(&f);
        let id = cyl.w_identity_check(1.0, 1e-2, &QuadSettings::for_dim(n));
        assert!(id.second_derivative_gap <= 1e-4, "{id:?}");
    }
}

#[test]
fn round_trip_off_origin_bubble() {
    let f = SolutionField::single_bubble(make_context(4).unwrap(), vec![0.5, -0.2, 0.1, 0.0], 0.3).unwrap();
    let cyl = CylinderField::new(&f);
    for x in [[1.0, 2.0, -0.5, 0.25], [0.01, 0.0, 0.02, -0.03], [40.0, -3.0, 7.0, 1.0]] {
        let u = f.value(&x);
        assert!((cyl.u_from_v(&x) - u).abs() <= 1e-13 * u);
    }
}
