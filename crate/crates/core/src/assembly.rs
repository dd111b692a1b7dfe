//! Whole-sphere spline assemblies: the canonical patch rotated onto every
//! face of a Platonic triangulation.

use serde::{Deserialize, Serialize};

use crate::bezier::ControlNet;
use crate::continuity::{
    check_level, check_vertex_ring, pair_across_edge, transversal_for, ContinuityCertificate, Level, TransversalCurve,
};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::geometry::{BarycentricPoint, PolyhedronKind, SphericalTriangle};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Corners may deviate from the canonical vertices by at most this.
pub const CORNER_TOL: f64 = 1e-10;

/// Boundary samples compared between neighbouring faces.
pub const BOUNDARY_SAMPLES: usize = 33;

/// Adjacent boundary curves must coincide to this.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Unit vertices of the polyhedron.
pub fn polyhedron_vertices<T: Real>(kind: PolyhedronKind) -> Vec<Vec3<T>> {
    let l = |x: f64| T::lit(x);
    let raw: Vec<Vec3<T>> = match kind {
        PolyhedronKind::Tetrahedron => [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
            .iter()
            .map(|&(x, y, z)| Vec3::new(l(x), l(y), l(z)))
            .collect(),
        PolyhedronKind::Octahedron => {
            let (o, z) = (T::one(), T::zero());
            vec![
                Vec3::new(o, z, z),
                Vec3::new(-o, z, z),
                Vec3::new(z, o, z),
                Vec3::new(z, -o, z),
                Vec3::new(z, z, o),
                Vec3::new(z, z, -o),
            ]
        }
        PolyhedronKind::Icosahedron => {
            let phi = (T::one() + l(5.0).sqrt()) * l(0.5);
            let mut v = Vec::with_capacity(12);
            for a in [T::one(), -T::one()] {
                for b in [phi, -phi] {
                    // cyclic permutations of (0, ±1, ±φ)
                    v.push(Vec3::new(T::zero(), a, b));
                    v.push(Vec3::new(a, b, T::zero()));
                    v.push(Vec3::new(b, T::zero(), a));
                }
            }
            v
        }
    };
    raw.into_iter().map(Vec3::normalize).collect()
}

/// Faces as outward-oriented vertex index triples, found as the triples of
/// mutually nearest vertices.
pub fn polyhedron_faces<T: Real>(verts: &[Vec3<T>]) -> Vec<[usize; 3]> {
    let n = verts.len();
    let mut edge = T::infinity();
    for i in 0..n {
        for j in i + 1..n {
            edge = edge.min((verts[i] - verts[j]).norm());
        }
    }
    let tol = T::lit(1e-9);
    let adj = |i: usize, j: usize| ((verts[i] - verts[j]).norm() - edge).abs() < tol;
    let mut faces = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !adj(a, b) {
                continue;
            }
            for c in b + 1..n {
                if adj(a, c) && adj(b, c) {
                    let (pa, pb, pc) = (verts[a], verts[b], verts[c]);
                    let outward = (pb - pa).cross(pc - pa).dot(pa + pb + pc) > T::zero();
                    faces.push(if outward { [a, b, c] } else { [a, c, b] });
                }
            }
        }
    }
    faces
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face<T> {
    pub net: ControlNet<T>,
    /// Rotation taking the canonical triangle onto this face.
    pub transform: Mat3<T>,
    /// Polyhedron vertex indices at corners `(1,0)`, `(0,1)`, `(0,0)`.
    pub vertices: [usize; 3],
}

/// Two faces sharing an edge; an edge is named by the opposite corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub face_a: usize,
    pub edge_a: usize,
    pub face_b: usize,
    pub edge_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSpline<T> {
    pub kind: PolyhedronKind,
    pub vertices: Vec<Vec3<T>>,
    pub faces: Vec<Face<T>>,
    pub adjacency: Vec<EdgeRecord>,
    /// Family of the canonical net, when known; selects the G² test curves.
    pub family: Option<Family<T>>,
}

impl<T: Real> SphereSpline<T> {
    /// Faces meeting at polyhedron vertex `v`.
    pub fn ring(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| self.faces[f].vertices.contains(&v))
            .collect()
    }

    /// Largest `|‖x‖ - 1|` over `per_face` samples on every face.
    pub fn radial_deviation(&self, per_face: usize) -> T {
        let n = ((2 * per_face) as f64).sqrt().ceil() as usize;
        let inv = T::one() / T::from_usize_lossy(n.max(1));
        let mut worst = T::zero();
        for face in &self.faces {
            for i in 0..=n {
                for j in 0..=n - i {
                    let p = BarycentricPoint::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv);
                    worst = worst.max((face.net.position(p).norm() - T::one()).abs());
                }
            }
        }
        worst
    }
}

/// Rotates `net` (built on the canonical triangle of `kind`) onto every face.
pub fn build_sphere<T: Real>(kind: PolyhedronKind, net: &ControlNet<T>) -> Result<SphereSpline<T>> {
    let tri = SphericalTriangle::from_c(kind.c::<T>());
    let dev = net.corner_deviation(&tri);
    if dev > T::lit(CORNER_TOL) {
        return Err(Error::CornerMismatch(dev.as_f64()));
    }
    let verts = polyhedron_vertices::<T>(kind);
    let src_inv = Mat3::from_columns(tri.v0, tri.v1, tri.v2)
        .inverse()
        .expect("canonical vertices are independent");
    let mut faces = Vec::new();
    for idx in polyhedron_faces(&verts) {
        let dst = Mat3::from_columns(verts[idx[0]], verts[idx[1]], verts[idx[2]]);
        let q = dst * src_inv;
        if q.orthogonality_defect() > T::lit(1e-12) || (q.det() - T::one()).abs() > T::lit(1e-12) {
            return Err(Error::InvalidArgument("face transform is not a rotation".into()));
        }
        faces.push(Face {
            net: net.transformed(&q),
            transform: q,
            vertices: idx,
        });
    }
    if faces.len() != kind.face_count() {
        return Err(Error::InvalidArgument(format!(
            "found {} faces, expected {}",
            faces.len(),
            kind.face_count()
        )));
    }
    let mut adjacency = Vec::new();
    for a in 0..faces.len() {
        for b in a + 1..faces.len() {
            let (va, vb) = (faces[a].vertices, faces[b].vertices);
            let shared: Vec<usize> = va.iter().copied().filter(|v| vb.contains(v)).collect();
            if shared.len() == 2 {
                let edge_a = va.iter().position(|v| !shared.contains(v)).expect("one corner left");
                let edge_b = vb.iter().position(|v| !shared.contains(v)).expect("one corner left");
                adjacency.push(EdgeRecord {
                    face_a: a,
                    edge_a,
                    face_b: b,
                    edge_b,
                });
            }
        }
    }
    let sphere = SphereSpline {
        kind,
        vertices: verts,
        faces,
        adjacency,
        family: None,
    };
    for e in &sphere.adjacency {
        let pair = edge_pair(&sphere, e)?;
        for k in 0..BOUNDARY_SAMPLES {
            let t = T::from_usize_lossy(k) / T::from_usize_lossy(BOUNDARY_SAMPLES - 1);
            let p = BarycentricPoint::new(T::zero(), t);
            let gap = (pair.net1.position(p) - pair.net2.position(p)).norm();
            if gap > T::lit(BOUNDARY_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "faces {} and {} separate by {:e} along their edge",
                    e.face_a,
                    e.face_b,
                    gap.as_f64()
                )));
            }
        }
    }
    Ok(sphere)
}

/// Like [`build_sphere`], remembering the family for G² certification.
pub fn build_sphere_from_family<T: Real>(kind: PolyhedronKind, family: &Family<T>) -> Result<SphereSpline<T>> {
    let mut s = build_sphere(kind, &family.net())?;
    s.family = Some(*family);
    Ok(s)
}

fn edge_pair<T: Real>(s: &SphereSpline<T>, e: &EdgeRecord) -> Result<crate::continuity::AdjoinedPair<T>> {
    pair_across_edge(&s.faces[e.face_a].net, e.edge_a, &s.faces[e.face_b].net, e.edge_b)
}

/// Certificates for every shared edge and every vertex ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereCertification<T> {
    pub level: Level,
    pub edges: Vec<(EdgeRecord, ContinuityCertificate<T>)>,
    pub vertices: Vec<(usize, ContinuityCertificate<T>)>,
}

impl<T: Real> SphereCertification<T> {
    pub fn all_pass(&self) -> bool {
        self.edges.iter().all(|(_, c)| c.pass) && self.vertices.iter().all(|(_, c)| c.pass)
    }

    pub fn none_pass(&self) -> bool {
        self.edges.iter().all(|(_, c)| !c.pass) && self.vertices.iter().all(|(_, c)| !c.pass)
    }
}

/// Certifies all edges and vertex rings at `level`.
pub fn certify_sphere<T: Real>(sphere: &SphereSpline<T>, level: Level, samples: usize) -> SphereCertification<T> {
    let curve: Option<Box<dyn TransversalCurve<T>>> = sphere.family.as_ref().and_then(transversal_for);
    let curve = curve.as_deref();
    let edges = sphere
        .adjacency
        .iter()
        .map(|e| {
            let cert = match edge_pair(sphere, e) {
                Ok(pair) => check_level(&pair, level, curve, samples),
                Err(err) => ContinuityCertificate {
                    level,
                    samples: vec![],
                    max_residual: T::zero(),
                    pass: false,
                    reason: Some(err.to_string()),
                },
            };
            (*e, cert)
        })
        .collect();
    let vertices = (0..sphere.vertices.len())
        .map(|v| {
            let nets: Vec<ControlNet<T>> = sphere
                .ring(v)
                .into_iter()
                .map(|f| sphere.faces[f].net.clone())
                .collect();
            (v, check_vertex_ring(&nets, level, curve, samples))
        })
        .collect();
    SphereCertification { level, edges, vertices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cubic_net, quadratic_net};

    #[test]
    fn face_and_edge_counts() {
        for (kind, v, e) in [
            (PolyhedronKind::Tetrahedron, 4, 6),
            (PolyhedronKind::Octahedron, 6, 12),
            (PolyhedronKind::Icosahedron, 12, 30),
        ] {
            let s = build_sphere(kind, &cubic_net::<f64>(kind, 1).unwrap()).unwrap();
            assert_eq!(s.faces.len(), kind.face_count());
            assert_eq!(s.vertices.len(), v);
            assert_eq!(s.adjacency.len(), e);
            for vi in 0..v {
                assert_eq!(s.ring(vi).len(), kind.valence());
            }
            for f in &s.faces {
                assert!(f.transform.orthogonality_defect() < 1e-14);
                for p in f.net.corners() {
                    assert!((p.norm() - 1.0).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn foreign_net_rejected() {
        let net = quadratic_net::<f64>(PolyhedronKind::Octahedron, 1.9);
        assert!(matches!(
            build_sphere(PolyhedronKind::Icosahedron, &net),
            Err(Error::CornerMismatch(_))
        ));
    }

    #[test]
    fn every_edge_in_two_faces() {
        let verts = polyhedron_vertices::<f64>(PolyhedronKind::Icosahedron);
        let faces = polyhedron_faces(&verts);
        let mut count = std::collections::HashMap::new();
        for f in &faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        assert_eq!(count.len(), 30);
        assert!(count.values().all(|&c| c == 2));
    }
}
