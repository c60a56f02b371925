use nalgebra::DVector;
use proptest::prelude::*;
use subfinsler::certify::{m_of_r, stability_window, MSettings};
use subfinsler::convex::check_duality_inversion;
use subfinsler::convex::sampled::sampled_dual_norm;
use subfinsler::flow::{self, FlowSettings};
use subfinsler::lie::GroupSpec;
use subfinsler::sampling::rng_from_seed;
use subfinsler::{Covector, NormSpec, Polyhedron, Vector};

fn family(k: usize, dim: usize) -> NormSpec {
    match k % 7 {
        0 => NormSpec::euclidean(dim),
        1 => NormSpec::l1(dim),
        2 => NormSpec::linf(dim),
        3 => NormSpec::corner(dim, 0).unwrap(),
        4 => NormSpec::axial(dim, dim - 1).unwrap(),
        5 => NormSpec::root_sum(dim),
        _ => {
            let hex: Vec<Vector> = (0..6)
                .map(|j| {
                    let a = std::f64::consts::FRAC_PI_3 * j as f64 + 0.2;
                    Vector::from_slice(&[a.cos(), a.sin()])
                })
                .collect();
            if dim == 2 {
                NormSpec::polyhedral(Polyhedron::from_vertices(&hex).unwrap())
            } else {
                NormSpec::l1(dim)
            }
        }
    }
}

/// Coordinates that are often zero or tied, so that kinks are exercised.
fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            3 => -3.0..3.0f64,
            1 => Just(0.0),
            1 => Just(1.0),
            1 => Just(-1.0),
        ],
        dim,
    )
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    coords(dim).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn lie_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5..1.5f64, dim)
}

fn groups() -> Vec<GroupSpec> {
    vec![
        GroupSpec::heisenberg().unwrap(),
        GroupSpec::affine().unwrap(),
        GroupSpec::so3().unwrap(),
        GroupSpec::abelian(3).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn subdifferential_points_satisfy_fenchel(k in 0usize..7, dim in 2usize..5, u in nonzero(4), seed in any::<u64>()) {
        let norm = family(k, dim);
        let u = Vector::from_slice(&u[..dim]);
        let set = norm.subdiff_energy(&u).unwrap();
        let mut rng = rng_from_seed(seed);
        let nu = norm.norm(&u).unwrap();
        for _ in 0..4 {
            let eta = Covector::from_dvector(set.sample(&mut rng));
            let ne = norm.dual_norm(&eta).unwrap();
            prop_assert!((ne - nu).abs() <= 1e-9 * nu.max(1.0), "{} vs {}", ne, nu);
            prop_assert!((eta.pair(&u) - nu * nu).abs() <= 1e-9 * (nu * nu).max(1.0));
            let check = check_duality_inversion(&norm, &u, &eta, 1e-9).unwrap();
            prop_assert!(check.all(), "{:?}", check);
        }
    }

    #[test]
    fn duality_conditions_agree_off_the_graph(k in 0usize..7, dim in 2usize..5, u in nonzero(4), d in nonzero(4)) {
        let norm = family(k, dim);
        let u = Vector::from_slice(&u[..dim]);
        let eta = Covector::from_slice(&d[..dim]);
        let check = check_duality_inversion(&norm, &u, &eta, 1e-9).unwrap();
        prop_assert!(check.agree(), "{:?}", check);
    }

    #[test]
    fn dual_gradient_inverts_subdifferential(k in 0usize..6, dim in 2usize..5, e in nonzero(4)) {
        let norm = family(k, dim);
        if norm.is_polyhedral() {
            return Ok(());
        }
        let eta = Covector::from_slice(&e[..dim]);
        let u = norm.gradient_dual_energy(&eta).unwrap();
        let ne = norm.dual_norm(&eta).unwrap();
        prop_assert!((norm.norm(&u).unwrap() - ne).abs() <= 1e-9 * ne.max(1.0));
        prop_assert!(norm.subdiff_energy(&u).unwrap().contains(eta.coords(), 1e-9 * ne.max(1.0)).unwrap());
    }

    #[test]
    fn norms_are_homogeneous_and_symmetric(k in 0usize..7, dim in 2usize..5, u in coords(4), s in -4.0..4.0f64) {
        let norm = family(k, dim);
        let u = Vector::from_slice(&u[..dim]);
        let n = norm.norm(&u).unwrap();
        prop_assert!((norm.norm(&u.scale(s)).unwrap() - s.abs() * n).abs() <= 1e-12 * (1.0 + n * s.abs()));
        prop_assert!((norm.norm(&u.scale(-1.0)).unwrap() - n).abs() <= 1e-12 * (1.0 + n));
    }

    #[test]
    fn face_of_is_scale_invariant_and_exposed(dim in 2usize..4, e in nonzero(3), s in 0.1..10.0f64) {
        prop_assume!(e[..dim].iter().any(|x| x.abs() > 1e-3));
        let p = NormSpec::linf(dim).polyhedron().unwrap();
        let eta = Covector::from_slice(&e[..dim]);
        let f = p.face_of(&eta).unwrap().clone();
        prop_assert_eq!(&p.face_of(&eta.scale(s)).unwrap().id, &f.id);
        let dn = p.dual_norm(&eta);
        for &i in &f.vertices {
            prop_assert!((eta.pair(&p.vertices()[i]) - dn).abs() <= 1e-9 * dn);
        }
    }

    #[test]
    fn every_dual_point_lies_in_a_star(e in nonzero(3)) {
        let p = NormSpec::linf(3).polyhedron().unwrap();
        let cover = p.star_covering().unwrap();
        let xi = Covector::from_slice(&e);
        prop_assert!(!cover.stars_containing(&p, &xi).unwrap().is_empty());
    }

    #[test]
    fn adjoint_is_a_homomorphism(gi in 0usize..4, x in lie_vec(3), y in lie_vec(3), z in lie_vec(3)) {
        let spec = &groups()[gi];
        let n = spec.dim();
        let g = spec.exp(&Vector::from_slice(&x[..n])).unwrap();
        let h = spec.exp(&Vector::from_slice(&y[..n])).unwrap();
        let gh = spec.mul(&g, &h);
        let lhs = spec.adjoint_matrix(&gh).unwrap();
        let rhs = spec.adjoint_matrix(&g).unwrap() * spec.adjoint_matrix(&h).unwrap();
        prop_assert!((lhs - rhs).amax() <= 1e-10);
        // Ad_g is a Lie algebra automorphism
        let a = Vector::from_slice(&y[..n]);
        let b = Vector::from_slice(&z[..n]);
        let left = spec.Ad(&g, &spec.ad(&a, &b).unwrap()).unwrap();
        let right = spec.ad(&spec.Ad(&g, &a).unwrap(), &spec.Ad(&g, &b).unwrap()).unwrap();
        prop_assert!((left.coords() - right.coords()).amax() <= 1e-10);
    }

    #[test]
    fn exponentials_invert(gi in 0usize..4, x in lie_vec(3)) {
        let spec = &groups()[gi];
        let v = Vector::from_slice(&x[..spec.dim()]);
        let g = spec.exp(&v).unwrap();
        let prod = spec.mul(&g, &spec.exp(&v.scale(-1.0)).unwrap());
        prop_assert!(prod.distance(&spec.identity()) <= 1e-12);
        prop_assert!(spec.mul(&g, &spec.inverse(&g)).distance(&spec.identity()) <= 1e-12);
    }

    #[test]
    fn abelian_curves_are_affine(k in 0usize..7, l in nonzero(2)) {
        let spec = GroupSpec::abelian(2).unwrap();
        let norm = family(k, 2);
        let lambda = Covector::from_slice(&l);
        let traj = flow::integrate(&spec, &norm, &lambda, &spec.identity(), &FlowSettings::new(1.0, 0.05)).unwrap();
        let u0 = traj.controls[0].clone();
        prop_assert!(traj.events.is_empty());
        for (i, g) in traj.points.iter().enumerate() {
            prop_assert_eq!(&traj.controls[i], &u0);
            let t = traj.times[i];
            prop_assert!((g.matrix()[(0, 2)] - t * u0[0]).abs() <= 1e-12);
            prop_assert!((g.matrix()[(1, 2)] - t * u0[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn heisenberg_polyhedral_curves_keep_speed(l in nonzero(3)) {
        let spec = GroupSpec::heisenberg().unwrap();
        let norm = NormSpec::linf(3);
        let lambda = Covector::from_slice(&l);
        let traj = flow::integrate(&spec, &norm, &lambda, &spec.identity(), &FlowSettings::new(2.0, 0.01)).unwrap();
        prop_assert!(flow::check_constant_speed(&traj) <= 1e-12);
        prop_assert!(flow::check_dual_sphere(&traj) <= 10.0 * 0.01);
    }

    #[test]
    fn windows_scale_inversely_with_the_covector(d in 0.1..5.0f64, n in 0.1..5.0f64, m in 0.1..5.0f64, s in 0.5..4.0f64) {
        let w = stability_window(d, n, m).unwrap();
        let ws = stability_window(d, s * n, m).unwrap();
        prop_assert!((w / ws - s).abs() <= 1e-12 * s);
    }
}

#[test]
fn dual_norms_match_the_sampled_oracle() {
    let mut rng = rng_from_seed(11);
    for k in 0..7 {
        let norm = family(k, 2);
        for e in [[0.3, -1.2], [1.0, 1.0], [2.0, 0.0], [-0.7, 0.4]] {
            let eta = DVector::from_column_slice(&e);
            let exact = norm.dual_norm(&Covector::from_dvector(eta.clone())).unwrap();
            let sampled = sampled_dual_norm(&norm, &eta, &mut rng);
            assert!((exact - sampled).abs() <= 1e-8 * exact, "family {k}: {exact} vs {sampled}");
        }
    }
}

#[test]
fn sampled_m_is_monotone_in_the_radius() {
    let spec = GroupSpec::so3().unwrap();
    let aux = NormSpec::linf(3);
    let metric = NormSpec::euclidean(3);
    let values: Vec<f64> = [0.0, 0.4, 0.9, 1.6]
        .iter()
        .map(|&r| m_of_r(&spec, &aux, &metric, r, MSettings::default()).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]), "{values:?}");
}

#[test]
fn left_translation_of_normal_curves() {
    let spec = GroupSpec::affine().unwrap();
    let norm = NormSpec::corner(2, 0).unwrap();
    let lambda = Covector::from_slice(&[0.5, 1.0]);
    let g0 = spec.exp(&Vector::from_slice(&[0.3, -0.2])).unwrap();
    let a = flow::integrate_smooth(&spec, &norm, &lambda, &g0, 1.5, 1e-3).unwrap();
    let shifted = Covector::from_dvector(spec.adjoint_matrix(&g0).unwrap().transpose() * lambda.coords());
    let b = flow::integrate_smooth(&spec, &norm, &shifted, &spec.identity(), 1.5, 1e-3).unwrap();
    for (x, y) in a.points.iter().zip(&b.points) {
        assert!(x.distance(&spec.mul(&g0, y)) <= 1e-8);
    }
}

#[test]
fn dual_curve_derivative_matches_finite_differences() {
    let spec = GroupSpec::so3().unwrap();
    let norm = NormSpec::euclidean(3);
    let lambda = Covector::from_slice(&[0.4, -0.3, 0.8]);
    let h = 1e-3;
    let traj = flow::integrate_smooth(&spec, &norm, &lambda, &spec.identity(), 1.0, h).unwrap();
    for i in (10..traj.len() - 1).step_by(97) {
        let fd = (traj.duals[i + 1].coords() - traj.duals[i - 1].coords()) / (2.0 * h);
        let exact = flow::dual_derivative(&spec, &lambda, &traj.points[i], &traj.controls[i]).unwrap();
        assert!((&fd - exact.coords()).amax() <= 10.0 * h, "{fd} vs {}", exact.coords());
    }
}

#[test]
fn cube_vertex_pairs_give_m_two() {
    let verts: Vec<DVector<f64>> = (0..8)
        .map(|b| DVector::from_fn(3, |i, _| if b >> i & 1 == 1 { 1.0 } else { -1.0 }))
        .collect();
    let best = verts
        .iter()
        .flat_map(|x| verts.iter().map(move |y| (x[0] * y[1] - x[1] * y[0]).abs()))
        .fold(0.0, f64::max);
    assert_eq!(best, 2.0);
    let spec = GroupSpec::heisenberg().unwrap();
    let m = m_of_r(&spec, &NormSpec::linf(3), &NormSpec::linf(3), 3.0, MSettings::default()).unwrap();
    assert_eq!(m.value, best);
}
