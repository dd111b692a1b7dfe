use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sphere_spline::continuity::canonical_reflection;
use sphere_spline::{cubic_net, quartic_net, Mesh, PolyhedronKind, QuarticBranch};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sphere-spline"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sphere-spline")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table_one_and_two_match() {
    for n in ["1", "2"] {
        let o = run(&["tables", n]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("0 mismatching cell(s)"));
    }
    let o = run(&["tables", "1"]);
    assert!(stdout(&o).contains("expected +3.060496"));
    assert!(stdout(&o).contains("expected +3.132163"));
}

#[test]
fn table_three_reports_the_icosahedral_distance() {
    let o = run(&["tables", "3"]);
    let out = stdout(&o);
    assert!(out.contains("expected +0.000017"));
    // the printed icosahedral distance is not reproduced
    assert_eq!(o.status.code(), Some(1), "{out}");
    assert!(out.contains("1 mismatching cell(s)"));
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    run(&["tables", "2", "--report", s(&a)]);
    run(&["tables", "2", "--report", s(&b)]);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.trim_start().starts_with('{'));
    assert!(text.contains("\"number\": 2"));
}

#[test]
fn unknown_table_is_usage_error() {
    assert_eq!(run(&["tables", "7"]).status.code(), Some(2));
}

#[test]
fn mesh_tetra_quadratic_obj() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.obj");
    let o = run(&["mesh", "tetra", "2", "G0", "8", "obj", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let m = Mesh::read_obj(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m.triangles.len(), 4 * 64);
    assert_eq!(m.edge_manifold_defects(), 0);
    assert_eq!(m.euler_characteristic(), 2);
}

#[test]
fn mesh_octa_quartic_ply_has_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.ply");
    let o = run(&["mesh", "octa", "4", "G2", "64", "ply", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let m = Mesh::read_ply(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(m.triangles.len(), 8 * 64 * 64);
    assert_eq!(m.edge_manifold_defects(), 0);
    assert_eq!(m.inward_triangles(), 0);
    let k = m.curvature.expect("curvature channel");
    let (lo, hi) = k
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    // vertex samples stay inside the tabulated range [0.93, 1.03]
    assert!(lo >= 0.925 && hi <= 1.035, "{lo} {hi}");
}

#[test]
fn mesh_cubic_accepts_g2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.obj");
    let o = run(&["mesh", "tetra", "3", "G2", "4", "obj", s(&out), "--no-curvature"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!std::fs::read_to_string(&out).unwrap().contains("# K"));
}

#[test]
fn mesh_rejects_invalid_combination() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.obj");
    let o = run(&["mesh", "tetra", "2", "G1", "4", "obj", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2 G0") && err.contains("4 G2"), "{err}");
    assert!(!out.exists());
}

#[test]
fn check_optimal_cubic_pair_is_g2() {
    let dir = tempfile::tempdir().unwrap();
    let kind = PolyhedronKind::Icosahedron;
    let net = cubic_net::<f64>(kind, 1).unwrap();
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    let b = write(
        dir.path(),
        "b.tbnet",
        &net.transformed(&canonical_reflection(kind.c())).to_tbnet(),
    );
    let o = run(&["check", s(&a), s(&b), "icosa", "G2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("G2 PASS"));
}

#[test]
fn check_quartic_pair_infers_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let kind = PolyhedronKind::Octahedron;
    let net = quartic_net::<f64>(kind, 0.775181, QuarticBranch::One);
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    let b = write(
        dir.path(),
        "b.tbnet",
        &net.transformed(&canonical_reflection(kind.c())).to_tbnet(),
    );
    assert_eq!(run(&["check", s(&a), s(&b), "mirror", "G2"]).status.code(), Some(0));
    // a wrong γ for the transversal curve breaks the G² match
    let o = run(&["check", s(&a), s(&b), "mirror", "G2", "--gamma", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_perturbed_pair_fails_g1() {
    let dir = tempfile::tempdir().unwrap();
    let kind = PolyhedronKind::Octahedron;
    let r = canonical_reflection(kind.c());
    let net = quartic_net::<f64>(kind, 0.775181, QuarticBranch::One);
    let bent = quartic_net::<f64>(kind, 0.825181, QuarticBranch::One);
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    let b = write(dir.path(), "b.tbnet", &bent.transformed(&r).to_tbnet());
    let o = run(&["check", s(&a), s(&b), "c=0.9428090415820634", "G1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn check_self_pair_g0() {
    let dir = tempfile::tempdir().unwrap();
    let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    assert_eq!(run(&["check", s(&a), s(&a), "none", "G0"]).status.code(), Some(0));
}

#[test]
fn check_reports_parse_line() {
    let dir = tempfile::tempdir().unwrap();
    let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
    let good = write(dir.path(), "a.tbnet", &net.to_tbnet());
    let mut lines: Vec<String> = net.to_tbnet().lines().map(String::from).collect();
    lines[3] = "1 2 x y z".into();
    let bad = write(dir.path(), "b.tbnet", &lines.join("\n"));
    let o = run(&["check", s(&good), s(&bad), "none", "G0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn missing_file_is_io_error() {
    let o = run(&["errors", "/nonexistent/net.tbnet"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_reflection_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    assert_eq!(run(&["check", s(&a), s(&a), "1,0,0", "G0"]).status.code(), Some(2));
    // a rotation is not a reflection
    let o = run(&["check", s(&a), s(&a), "1,0,0,0,1,0,0,0,1", "G0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_prints_parameters() {
    let o = run(&["optimize", "octa", "3", "radial"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("gamma = 1.732050807569"), "{out}");
    assert!(out.contains("provenance = closed-form"), "{out}");
}

#[test]
fn errors_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
    let a = write(dir.path(), "a.tbnet", &net.to_tbnet());
    let o = run(&["errors", s(&a), "--grid", "128"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("d_r = 3.7037037037"), "{out}");
    assert!(out.contains("grid_n = 128"));
}
