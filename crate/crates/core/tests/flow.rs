use subfinsler::flow::{
    check_constant_speed, check_dual_sphere, detect_branching, integrate, integrate_polyhedral, FlowSettings,
    SelectionRule, Trajectory,
};
use subfinsler::lie::GroupSpec;
use subfinsler::{Covector, Error, NormSpec, Vector};

fn affine_curve(a: f64) -> Trajectory {
    let aff = GroupSpec::affine().unwrap();
    let norm = NormSpec::corner(2, 0).unwrap();
    integrate(&aff, &norm, &Covector::from_slice(&[a, 1.0]), &aff.identity(), &FlowSettings::new(2.5, 1e-3)).unwrap()
}

#[test]
fn affine_curves_switch_once_at_the_logarithm() {
    for (a, t_star) in [(0.5, 2f64.ln()), (1.0 / 3.0, 3f64.ln())] {
        let traj = affine_curve(a);
        assert_eq!(traj.events.len(), 1, "{:?}", traj.events);
        assert!((traj.events[0].t - t_star).abs() < 1e-5, "{} vs {t_star}", traj.events[0].t);
        let first = &traj.controls[0];
        assert_eq!(first.to_vec(), vec![0.0, 1.0]);
        let last = traj.controls.last().unwrap();
        assert!(last.as_slice()[0] > 0.0);
        assert!(check_constant_speed(&traj) < 1e-9);
        assert!(check_dual_sphere(&traj) < 1e-9);
    }
}

#[test]
fn affine_pair_agrees_then_splits() {
    let a = affine_curve(0.5);
    let b = affine_curve(1.0 / 3.0);
    let report = detect_branching(&a, &b, 1e-6, 1e-4).unwrap();
    assert!((report.coincidence_horizon - 2f64.ln()).abs() < 2e-3, "{report:?}");
    let w = report.witness.unwrap();
    assert!(w.t > 2f64.ln() && w.t < 3f64.ln() + 1.0);
    assert!(report.branched);
}

#[test]
fn identical_covectors_never_branch() {
    let a = affine_curve(0.5);
    let report = detect_branching(&a, &a, 1e-6, 1e-3).unwrap();
    assert_eq!(report.coincidence_horizon, a.horizon());
    assert!(report.witness.is_none());
    assert_eq!(report.max_separation, 0.0);
}

#[test]
fn branching_needs_a_common_grid() {
    let a = affine_curve(0.5);
    let mut b = a.clone();
    b.points.pop();
    b.times.pop();
    assert!(detect_branching(&a, &b, 1e-6, 1e-3).is_err());
}

#[test]
fn so3_axial_pair_does_not_branch_early() {
    let so3 = GroupSpec::so3().unwrap();
    let norm = NormSpec::axial(3, 0).unwrap();
    let s = FlowSettings::new(3.0, 1e-3);
    let a = integrate(&so3, &norm, &Covector::from_slice(&[1.0, 0.2, 0.1]), &so3.identity(), &s).unwrap();
    let b = integrate(&so3, &norm, &Covector::from_slice(&[1.0, -0.3, 0.25]), &so3.identity(), &s).unwrap();
    let report = detect_branching(&a, &b, 1e-6, 1e-3).unwrap();
    assert!(report.witness.is_none(), "{report:?}");
    assert!(check_constant_speed(&a) < 1e-6);
}

#[test]
fn central_covector_keeps_the_central_control() {
    let h = GroupSpec::heisenberg().unwrap();
    let norm = NormSpec::linf(3);
    let s = FlowSettings::new(5.0, 1e-3).with_start_control(Vector::basis(3, 2));
    let traj = integrate(&h, &norm, &Covector::basis(3, 2), &h.identity(), &s).unwrap();
    assert!(traj.events.is_empty());
    assert_eq!(traj.segments.len(), 1);
    let end = traj.end().matrix();
    assert!((end[(0, 2)] - 5.0).abs() < 1e-12);
    assert!(end[(0, 1)].abs() < 1e-15 && end[(1, 2)].abs() < 1e-15);
}

#[test]
fn abelian_l1_curve_is_a_straight_line_along_a_vertex() {
    let a = GroupSpec::abelian(2).unwrap();
    let traj = integrate(&a, &NormSpec::l1(2), &Covector::from_slice(&[1.0, 0.4]), &a.identity(), &FlowSettings::new(2.0, 1e-2))
        .unwrap();
    assert!(traj.events.is_empty());
    for (t, g) in traj.times.iter().zip(&traj.points) {
        assert!((g.matrix()[(0, 2)] - t).abs() < 1e-12);
        assert!(g.matrix()[(1, 2)].abs() < 1e-12);
    }
}

#[test]
fn abelian_euclidean_curve_follows_the_sharp_covector() {
    let a = GroupSpec::abelian(2).unwrap();
    let traj = integrate(&a, &NormSpec::euclidean(2), &Covector::from_slice(&[0.6, -0.8]), &a.identity(), &FlowSettings::new(2.0, 1e-2))
        .unwrap();
    for (t, g) in traj.times.iter().zip(&traj.points) {
        assert!((g.matrix()[(0, 2)] - 0.6 * t).abs() < 1e-12);
        assert!((g.matrix()[(1, 2)] + 0.8 * t).abs() < 1e-12);
    }
}

#[test]
fn face_thrashing_is_reported_with_the_events() {
    let h = GroupSpec::heisenberg().unwrap();
    let mut s = FlowSettings::new(6.0, 1e-3);
    s.max_switches = 0;
    let err = integrate_polyhedral(&h, &NormSpec::linf(3), &Covector::from_slice(&[0.3, -0.1, 0.6]), &h.identity(), &s)
        .unwrap_err();
    match err {
        Error::FaceThrashing { switches, events, .. } => {
            assert_eq!(switches, 1);
            assert_eq!(events.len(), 1);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn zero_covector_on_the_polarization_is_rejected() {
    let h = GroupSpec::heisenberg_carnot().unwrap();
    let err = integrate(&h, &NormSpec::l1(2), &Covector::basis(3, 2), &h.identity(), &FlowSettings::new(1.0, 1e-2));
    assert!(matches!(err, Err(Error::InvalidInput(_))));
}

#[test]
fn selection_rules_pick_different_controls_on_a_facet() {
    let h = GroupSpec::heisenberg().unwrap();
    let norm = NormSpec::linf(3);
    let lam = Covector::basis(3, 2);
    let base = FlowSettings::new(0.5, 1e-2);
    let bary = integrate(&h, &norm, &lam, &h.identity(), &base.clone().with_rule(SelectionRule::Barycenter)).unwrap();
    let vert = integrate(&h, &norm, &lam, &h.identity(), &base.clone().with_rule(SelectionRule::VertexIndexMin)).unwrap();
    let pers = integrate(&h, &norm, &lam, &h.identity(), &base).unwrap();
    assert_eq!(bary.controls[0].as_slice()[2], 1.0);
    assert_eq!(bary.controls[0].as_slice()[..2], [0.0, 0.0]);
    assert_eq!(pers.controls[0], bary.controls[0]);
    assert_eq!(vert.controls[0].max_abs(), 1.0);
    assert!(vert.controls[0].as_slice()[..2].iter().all(|x| x.abs() == 1.0));
    assert_eq!(bary.rule, "barycenter");
    assert_eq!(vert.rule, "vertex_index_min");
}

#[test]
fn start_control_outside_the_face_is_rejected() {
    let h = GroupSpec::heisenberg().unwrap();
    let s = FlowSettings::new(1.0, 1e-2).with_start_control(Vector::basis(3, 0));
    let err = integrate(&h, &NormSpec::linf(3), &Covector::basis(3, 2), &h.identity(), &s);
    assert!(matches!(err, Err(Error::InvalidInput(_))));
}

#[test]
fn csv_has_one_row_per_sample() {
    let traj = affine_curve(0.5);
    let csv = traj.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,g11,g12,g21,g22,u1,u2,xi1,xi2,face_id");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), traj.len());
    assert!(rows.iter().all(|r| r.split(',').count() == 10));
    assert!(rows[0].ends_with(",-1"));
}

#[test]
fn trajectory_files_round_trip_the_metadata() {
    let traj = affine_curve(1.0 / 3.0);
    let dir = std::env::temp_dir().join(format!("subfinsler-flow-{}", std::process::id()));
    traj.write_files(&dir, "curve").unwrap();
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("curve.json")).unwrap()).unwrap();
    assert_eq!(meta["samples"], traj.len());
    assert_eq!(meta["events"].as_array().unwrap().len(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}
