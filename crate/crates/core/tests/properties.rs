use proptest::prelude::*;
use sphere_spline::bezier::indices;
use sphere_spline::families::{QuadraticFamily, QuarticBranch};
use sphere_spline::geometry::in_omega;
use sphere_spline::{
    bernstein, cubic_g1_triples, cubic_net, gaussian_curvature, quadratic_net, quartic_g1_family, quartic_net,
    radial_errors, to_omega, Bary, Mat3d, Net, PolyhedronKind, SphericalTriangle, Vec3d,
};

fn kind() -> impl Strategy<Value = PolyhedronKind> {
    prop_oneof![
        Just(PolyhedronKind::Tetrahedron),
        Just(PolyhedronKind::Octahedron),
        Just(PolyhedronKind::Icosahedron),
    ]
}

fn delta_point() -> impl Strategy<Value = Bary> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(u, v)| {
        if u + v > 1.0 {
            Bary::new(1.0 - u, 1.0 - v)
        } else {
            Bary::new(u, v)
        }
    })
}

/// Points of Δ enlarged by 0.05 in the 1-norm.
fn near_delta_point() -> impl Strategy<Value = Bary> {
    (-0.05..=1.05f64, -0.05..=1.05f64).prop_filter_map("outside the neighbourhood", |(u, v)| {
        let p = Bary::new(u, v);
        (p.distance_to_delta() <= 0.05).then_some(p)
    })
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3d> {
    (-r..=r, -r..=r, -r..=r).prop_map(|(x, y, z)| Vec3d::new(x, y, z))
}

fn random_net() -> impl Strategy<Value = Net> {
    (1usize..=5).prop_flat_map(|n| {
        proptest::collection::vec(vec3(2.0), (n + 1) * (n + 2) / 2)
            .prop_map(move |pts| Net::from_points(n, pts).unwrap())
    })
}

fn matrix() -> impl Strategy<Value = Mat3d> {
    (vec3(2.0), vec3(2.0), vec3(2.0)).prop_map(|(a, b, c)| Mat3d::from_columns(a, b, c))
}

fn symmetric_nets(k: PolyhedronKind) -> Vec<Net> {
    vec![
        quadratic_net(k, 1.7),
        cubic_net(k, 1).unwrap(),
        quartic_net(k, 0.8, QuarticBranch::One),
        quartic_net(k, 0.8, QuarticBranch::Two),
    ]
}

fn close(a: Vec3d, b: Vec3d, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #[test]
    fn partition_of_unity(n in 0usize..=8, p in near_delta_point()) {
        let s: f64 = indices(n).map(|(i, j, k)| bernstein(n, i, j, k, p).unwrap()).sum();
        prop_assert!((s - 1.0).abs() < 1e-13, "{s}");
    }

    #[test]
    fn affine_invariance(net in random_net(), a in matrix(), t in vec3(3.0), p in near_delta_point()) {
        let moved = net.map(|x| a * x + t);
        let lhs = moved.position(p);
        let rhs = a * net.position(p) + t;
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs:?} {rhs:?}");
    }

    #[test]
    fn derivatives_match_finite_differences(net in random_net(), p in delta_point()) {
        let h = 1e-5;
        let at = |u: f64, v: f64| net.evaluate(Bary::new(u, v));
        let s = net.evaluate(p);
        let (up, um) = (at(p.u + h, p.v), at(p.u - h, p.v));
        let (vp, vm) = (at(p.u, p.v + h), at(p.u, p.v - h));
        let cd = |a: Vec3d, b: Vec3d| (a - b) * (0.5 / h);
        let rel = 1e-6;
        prop_assert!(close(s.du, cd(up.position, um.position), rel));
        prop_assert!(close(s.dv, cd(vp.position, vm.position), rel));
        prop_assert!(close(s.duu, cd(up.du, um.du), rel));
        prop_assert!(close(s.duv, cd(vp.du, vm.du), rel));
        prop_assert!(close(s.dvv, cd(vp.dv, vm.dv), rel));
    }

    #[test]
    fn degree_elevation_keeps_the_surface(net in random_net(), p in delta_point()) {
        let e = net.elevate_degree().elevate_degree();
        prop_assert_eq!(e.degree(), net.degree() + 2);
        prop_assert!(close(e.position(p), net.position(p), 1e-13));
    }

    #[test]
    fn tbnet_round_trip(net in random_net()) {
        let back = Net::from_tbnet(&net.to_tbnet()).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn family_nets_commute_with_the_triangle_symmetries(k in kind(), p in delta_point()) {
        let tri = SphericalTriangle::<f64>::from_c(k.c());
        for net in symmetric_nets(k) {
            let x = net.position(p);
            for (perm, m) in tri.symmetries() {
                let y = net.position(p.permuted(perm));
                prop_assert!(close(y, m * x, 1e-12), "{perm:?}");
            }
        }
    }

    #[test]
    fn curvature_is_symmetric(k in kind(), p in delta_point()) {
        let net = quartic_net::<f64>(k, 0.8, QuarticBranch::One);
        let a = gaussian_curvature(&net, p).unwrap().k;
        for perm in [[1, 2, 0], [2, 0, 1], [0, 2, 1]] {
            let b = gaussian_curvature(&net, p.permuted(perm)).unwrap().k;
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn omega_membership(p in delta_point()) {
        prop_assert!(in_omega(to_omega(p), 1e-12));
    }

    #[test]
    fn f_increases_with_quadratic_alpha(k in kind(), p in delta_point()) {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=8 {
            let alpha = 0.5 * i as f64;
            let (f, _) = radial_errors(&quadratic_net(k, alpha), p).unwrap();
            prop_assert!(f - prev >= -1e-12, "alpha {alpha}: {f} < {prev}");
            prev = f;
        }
    }

    #[test]
    fn g_is_monotone_in_f(net in random_net(), p in delta_point()) {
        if let Ok((f, g)) = radial_errors(&net, p) {
            prop_assert!((g - ((f + 1.0).sqrt() - 1.0)).abs() < 1e-14 * (1.0 + f.abs()));
            prop_assert_eq!(f > 0.0, g > 0.0);
        }
    }

    #[test]
    fn generic_c_families_interpolate_and_keep_boundaries_planar(
        c in 0.3..0.99f64,
        alpha in 0.5..4.0f64,
        gamma in 0.0..3.0f64,
    ) {
        let tri = SphericalTriangle::from_c(c);
        let [v0, v1, v2] = tri.vertices();
        let mut nets = vec![QuadraticFamily::new(c, alpha).net()];
        nets.extend(cubic_g1_triples(c).iter().map(|f| f.net()));
        for branch in [QuarticBranch::One, QuarticBranch::Two] {
            let fam = quartic_g1_family(c, gamma, branch);
            if branch == QuarticBranch::One {
                prop_assert!(fam.constraint_residual().abs() < 1e-12);
            }
            nets.push(fam.net());
        }
        for net in nets {
            let n = net.degree();
            let [a, b, d] = net.corners();
            prop_assert!((a - v0).max_abs() < 1e-14 && (b - v1).max_abs() < 1e-14 && (d - v2).max_abs() < 1e-14);
            for (i, j, k) in indices(n) {
                let p = net.get(i, j, k);
                // boundary controls lie in the plane of the origin and their edge
                let plane = if k == 0 {
                    Some(v0.cross(v1))
                } else if i == 0 {
                    Some(v1.cross(v2))
                } else if j == 0 {
                    Some(v2.cross(v0))
                } else {
                    None
                };
                if let Some(nrm) = plane {
                    prop_assert!(nrm.normalize().dot(p).abs() < 1e-13 * (1.0 + p.norm()), "({i},{j},{k})");
                }
            }
        }
    }
}
