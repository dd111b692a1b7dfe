use sphere_spline::geometry::PolyhedronKind::{Icosahedron, Octahedron, Tetrahedron};
use sphere_spline::metrics::{equioscillation_residual, fundamental_image};
use sphere_spline::optimal::{
    icosa_quartic_bisection, icosa_quartic_newton, quartic_branch_two_inferior, quartic_branch_two_sweep,
};
use sphere_spline::{
    build_sphere, build_sphere_from_family, cubic_net, extrema_over_delta, optimal_solution, quadratic_optimal,
    tessellate, Bary, Error, Family, Measure, Mesh, MeshFormat, PolyhedronKind, QuadraticFamily,
};

fn near(p: Bary, q: Bary, tol: f64) -> bool {
    (p.u - q.u).abs() <= tol && (p.v - q.v).abs() <= tol
}

#[test]
fn extrema_sit_at_barycenter_and_edge_midpoint() {
    let bary = Bary::new(1.0 / 3.0, 1.0 / 3.0);
    // (1/2, 1/2) is carried to (1/2, 0) by the symmetry reduction
    let mid = fundamental_image(Bary::new(0.5, 0.5));
    let grid = 512;
    for kind in PolyhedronKind::ALL {
        for degree in [2, 3, 4] {
            if kind == Icosahedron && degree == 4 {
                continue;
            }
            let sol = optimal_solution::<f64>(kind, degree, Measure::Radial, grid).unwrap();
            let r = extrema_over_delta(&sol.net(), grid).unwrap();
            let tol = 2.0 / grid as f64;
            let (a, b) = (r.argmax_g, r.argmin_g);
            if degree == 3 {
                // no free parameter: the error is one-signed, vanishing at the corners
                assert!(near(a, bary, tol), "{kind}: {a:?}");
                assert!(r.min_g.abs() < 1e-15 && r.min_f.abs() < 1e-15);
                continue;
            }
            assert!(
                (near(a, bary, tol) && near(b, mid, tol)) || (near(a, mid, tol) && near(b, bary, tol)),
                "{kind} degree {degree}: {a:?} {b:?}"
            );
            // f and g share their extremum locations
            assert!(near(r.argmax_f, r.argmax_g, tol) && near(r.argmin_f, r.argmin_g, tol));
            assert_eq!(r.d_s, r.max_f.abs().max(r.min_f.abs()));
            assert_eq!(r.d_r, r.max_g.abs().max(r.min_g.abs()));
        }
    }
}

#[test]
fn quadratic_g1_candidate_is_not_optimal() {
    for kind in PolyhedronKind::ALL {
        let c = kind.c::<f64>();
        let cand = QuadraticFamily::<f64>::g1_candidate(c);
        for m in Measure::ALL {
            assert!((cand - quadratic_optimal(c, m)).abs() > 1e-3, "{kind} {m}");
        }
    }
    // the single c admitting a G¹ quadratic is not a Platonic one
    let special = 6.0 / 43f64.sqrt();
    for kind in PolyhedronKind::ALL {
        assert!((kind.c::<f64>() - special).abs() > 1e-3);
    }
}

#[test]
fn closed_form_optima_equioscillate() {
    for kind in PolyhedronKind::ALL {
        for m in Measure::ALL {
            let c = kind.c::<f64>();
            let fam = Family::Quadratic(QuadraticFamily::new(c, quadratic_optimal(c, m)));
            assert!(equioscillation_residual(&fam, m).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn cubic_singular_triples() {
    for kind in PolyhedronKind::ALL {
        let regular = cubic_net::<f64>(kind, 1).unwrap();
        for i in 0..=20 {
            for j in 0..=20 - i {
                let s = regular.evaluate(Bary::new(i as f64 / 20.0, j as f64 / 20.0));
                assert!(s.du.cross(s.dv).norm() > 1e-6);
            }
        }
        let two = cubic_net::<f64>(kind, 2).unwrap().evaluate(Bary::new(0.0, 0.0));
        assert!(two.du.cross(two.dv).norm() < 1e-10);
        let three = cubic_net::<f64>(kind, 3).unwrap().evaluate(Bary::new(0.5, 0.5));
        assert!(three.du.cross(three.dv).norm() < 1e-10);
    }
}

#[test]
fn quartic_branch_two_is_inferior() {
    assert!(quartic_branch_two_inferior(Tetrahedron).unwrap());
    assert!(quartic_branch_two_inferior(Octahedron).unwrap());
    let sweep = quartic_branch_two_sweep::<f64>(Octahedron).unwrap();
    assert!(sweep.margin() > 0.0);
    assert!(quartic_branch_two_sweep::<f64>(Icosahedron).is_err());
}

#[test]
fn icosa_quartic_newton_agrees_with_bisection() {
    let b = icosa_quartic_bisection::<f64>(Measure::Simplified, 256).unwrap();
    assert!(b.hi - b.lo < 1e-12);
    let n = icosa_quartic_newton(0.14, b.root).unwrap();
    assert!((n.gamma - b.root).abs() < 1e-8, "{} {}", n.gamma, b.root);
    assert!((n.u - 0.139979).abs() < 1e-6);
    assert!(n.curvature < 0.0);
}

#[test]
fn assembled_sphere_deviation_matches_patch_distance() {
    for kind in PolyhedronKind::ALL {
        for degree in [2, 3, 4] {
            let sol = optimal_solution::<f64>(kind, degree, Measure::Radial, 512).unwrap();
            let sphere = build_sphere_from_family(kind, &sol.family).unwrap();
            let dev = sphere.radial_deviation(2000);
            assert!(dev <= sol.d_r + 1e-9, "{kind} {degree}: {dev} > {}", sol.d_r);
            assert!(dev >= 0.9 * sol.d_r, "{kind} {degree}: {dev} << {}", sol.d_r);
        }
    }
}

#[test]
fn foreign_net_is_rejected_by_assembly() {
    let net = cubic_net::<f64>(Tetrahedron, 1).unwrap();
    assert!(matches!(build_sphere(Octahedron, &net), Err(Error::CornerMismatch(_))));
}

#[test]
fn mesh_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = optimal_solution::<f64>(Icosahedron, 3, Measure::Radial, 256).unwrap();
    let sphere = build_sphere_from_family(Icosahedron, &sol.family).unwrap();
    let mesh = tessellate(&sphere, 6, true).unwrap();
    assert_eq!(mesh.triangles.len(), 20 * 36);
    for (name, fmt) in [("s.obj", MeshFormat::Obj), ("s.ply", MeshFormat::Ply)] {
        let path = dir.path().join(name);
        mesh.write(&path, fmt).unwrap();
        let back = match fmt {
            MeshFormat::Obj => Mesh::read_obj(&std::fs::read_to_string(&path).unwrap()).unwrap(),
            MeshFormat::Ply => Mesh::read_ply(&std::fs::read(&path).unwrap()).unwrap(),
        };
        assert_eq!(back.triangles, mesh.triangles);
        assert_eq!(back.positions, mesh.positions);
        assert_eq!(back.curvature, mesh.curvature);
        assert_eq!(back.edge_manifold_defects(), 0);
        assert_eq!(back.inward_triangles(), 0);
    }
}
