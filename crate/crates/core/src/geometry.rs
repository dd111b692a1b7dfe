//! Canonical equilateral spherical triangle, the barycentric domain and its
//! reduction to elementary symmetric coordinates.
//!
//! The canonical triangle has its mass point at `(0, 0, 1)` and vertices
//!
//! ```text
//! v0 = ( c,      0,       s)
//! v1 = (-c/2,  √3 c/2,    s)
//! v2 = (-c/2, -√3 c/2,    s)      s = √(1 - c²)
//! ```
//!
//! where `c` is the circumradius of the flat face of the inscribed polyhedron.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Absolute tolerance on the `e3` bounds when testing membership in Ω.
pub const OMEGA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolyhedronKind {
    Tetrahedron,
    Octahedron,
    Icosahedron,
}

impl PolyhedronKind {
    pub const ALL: [PolyhedronKind; 3] = [
        PolyhedronKind::Tetrahedron,
        PolyhedronKind::Octahedron,
        PolyhedronKind::Icosahedron,
    ];

    /// Cosine of the angular radius of one projected face.
    pub fn c<T: Real>(self) -> T {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        match self {
            PolyhedronKind::Tetrahedron => two * two.sqrt() / three,
            PolyhedronKind::Octahedron => T::lit(6.0).sqrt() / three,
            PolyhedronKind::Icosahedron => (two * (T::lit(5.0) - T::lit(5.0).sqrt()) / T::lit(15.0)).sqrt(),
        }
    }

    pub fn face_count(self) -> usize {
        match self {
            PolyhedronKind::Tetrahedron => 4,
            PolyhedronKind::Octahedron => 8,
            PolyhedronKind::Icosahedron => 20,
        }
    }

    /// Number of faces meeting at each vertex.
    pub fn valence(self) -> usize {
        match self {
            PolyhedronKind::Tetrahedron => 3,
            PolyhedronKind::Octahedron => 4,
            PolyhedronKind::Icosahedron => 5,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            PolyhedronKind::Tetrahedron => "tetra",
            PolyhedronKind::Octahedron => "octa",
            PolyhedronKind::Icosahedron => "icosa",
        }
    }

    /// Identifies the kind whose `c` matches within `tol`.
    pub fn from_c<T: Real>(c: T, tol: T) -> Option<Self> {
        Self::ALL.into_iter().find(|k| (k.c::<T>() - c).abs() <= tol)
    }
}

impl fmt::Display for PolyhedronKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolyhedronKind::Tetrahedron => "tetrahedron",
            PolyhedronKind::Octahedron => "octahedron",
            PolyhedronKind::Icosahedron => "icosahedron",
        };
        f.write_str(s)
    }
}

impl FromStr for PolyhedronKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetra" | "tetrahedron" | "t" => Ok(PolyhedronKind::Tetrahedron),
            "octa" | "octahedron" | "o" => Ok(PolyhedronKind::Octahedron),
            "icosa" | "icosahedron" | "i" => Ok(PolyhedronKind::Icosahedron),
            other => Err(Error::InvalidArgument(format!(
                "unknown polyhedron '{other}' (expected tetra, octa or icosa)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalTriangle<T> {
    pub v0: Vec3<T>,
    pub v1: Vec3<T>,
    pub v2: Vec3<T>,
    pub c: T,
}

impl<T: Real> SphericalTriangle<T> {
    /// Canonical triangle for an arbitrary `c` in `(0, 1)`.
    pub fn from_c(c: T) -> Self {
        let s = (T::one() - c * c).sqrt();
        let half = T::lit(0.5);
        let h = T::lit(3.0).sqrt() * half * c;
        Self {
            v0: Vec3::new(c, T::zero(), s),
            v1: Vec3::new(-half * c, h, s),
            v2: Vec3::new(-half * c, -h, s),
            c,
        }
    }

    pub fn vertices(&self) -> [Vec3<T>; 3] {
        [self.v0, self.v1, self.v2]
    }

    /// `√(1 - c²)`, the common z coordinate of the vertices.
    pub fn height(&self) -> T {
        (T::one() - self.c * self.c).sqrt()
    }

    /// The six spatial symmetries of the triangle paired with the corner
    /// permutation they induce: the matrix maps `v[a]` to `v[perm[a]]`.
    pub fn symmetries(&self) -> Vec<([usize; 3], Mat3<T>)> {
        let v = self.vertices();
        let src = Mat3::from_columns(v[0], v[1], v[2]);
        let src_inv = src.inverse().expect("canonical vertices are independent");
        PERMUTATIONS
            .iter()
            .map(|&p| {
                // columns of dst are the images of v0, v1, v2
                let mut img = [Vec3::zero(); 3];
                for a in 0..3 {
                    img[a] = v[p[a]];
                }
                let dst = Mat3::from_columns(img[0], img[1], img[2]);
                (p, dst * src_inv)
            })
            .collect()
    }

    /// Reflection across the plane through the origin, `v1` and `v2`.
    pub fn edge_reflection(&self) -> Mat3<T> {
        Mat3::reflection(self.v1.cross(self.v2))
    }
}

/// All permutations of three corners.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

pub fn canonical_triangle<T: Real>(kind: PolyhedronKind) -> SphericalTriangle<T> {
    SphericalTriangle::from_c(kind.c())
}

/// Point of the plane parameterising Δ; `w = 1 - u - v` is implied.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BarycentricPoint<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> BarycentricPoint<T> {
    #[inline]
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }

    pub fn from_f64(u: f64, v: f64) -> Self {
        Self::new(T::lit(u), T::lit(v))
    }

    #[inline]
    pub fn w(&self) -> T {
        T::one() - self.u - self.v
    }

    pub fn barycenter() -> Self {
        let third = T::one() / T::lit(3.0);
        Self::new(third, third)
    }

    /// Builds the point from three weights given in corner order.
    pub fn from_weights(b: [T; 3]) -> Self {
        Self::new(b[0], b[1])
    }

    pub fn weights(&self) -> [T; 3] {
        [self.u, self.v, self.w()]
    }

    pub fn in_delta(&self, tol: T) -> bool {
        self.u >= -tol && self.v >= -tol && self.w() >= -tol
    }

    /// ℓ¹ distance to Δ measured along the violated coordinates.
    pub fn distance_to_delta(&self) -> T {
        self.weights()
            .iter()
            .fold(T::zero(), |acc, &x| acc + (-x).max(T::zero()))
    }

    /// Image under a corner permutation: weight of corner `a` moves to `perm[a]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let b = self.weights();
        let mut out = [T::zero(); 3];
        for a in 0..3 {
            out[perm[a]] = b[a];
        }
        Self::from_weights(out)
    }
}

/// Values of the second and third elementary symmetric polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaPoint<T> {
    pub e2: T,
    pub e3: T,
}

pub fn to_omega<T: Real>(p: BarycentricPoint<T>) -> OmegaPoint<T> {
    let w = p.w();
    OmegaPoint {
        e2: p.u * p.v + p.u * w + p.v * w,
        e3: p.u * p.v * w,
    }
}

/// Lower and upper `e3` bounds of Ω at the given `e2`.
///
/// The lower bound is clamped at zero since Ω lives in the closed first
/// quadrant; below `e2 = 1/4` the unclamped expression is negative.
pub fn omega_bounds<T: Real>(e2: T) -> Result<(T, T)> {
    let third = T::one() / T::lit(3.0);
    let slack = T::lit(OMEGA_TOL);
    if !(e2 >= -slack && e2 <= third + slack) {
        return Err(Error::OutOfDomain(e2.as_f64()));
    }
    let (lo, hi) = omega_bounds_unclamped(e2);
    Ok((lo.max(T::zero()), hi))
}

/// The closed-form bounds without the clamp at zero.
pub fn omega_bounds_unclamped<T: Real>(e2: T) -> (T, T) {
    let nine = T::lit(9.0);
    let two = T::lit(2.0);
    let root = (T::one() - T::lit(3.0) * e2).max(T::zero()).sqrt();
    let base = nine * e2 - two;
    let spread = (two - T::lit(6.0) * e2) * root;
    let d = T::lit(27.0);
    ((base - spread) / d, (base + spread) / d)
}

pub fn in_omega<T: Real>(q: OmegaPoint<T>, tol: T) -> bool {
    match omega_bounds(q.e2) {
        Ok((lo, hi)) => q.e3 >= lo - tol && q.e3 <= hi + tol,
        Err(_) => false,
    }
}

/// Signed distance of `e3` to the nearer Ω bound (positive inside).
pub fn omega_margin<T: Real>(q: OmegaPoint<T>) -> Result<T> {
    let (lo, hi) = omega_bounds(q.e2)?;
    Ok((q.e3 - lo).min(hi - q.e3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn platonic_constants() {
        let t: f64 = PolyhedronKind::Tetrahedron.c();
        let o: f64 = PolyhedronKind::Octahedron.c();
        let i: f64 = PolyhedronKind::Icosahedron.c();
        assert!((t - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-16);
        assert!((o - 6f64.sqrt() / 3.0).abs() < 1e-16);
        for c in [t, o, i] {
            assert!(c > 0.0 && c < 1.0);
        }
        // the icosahedron face subtends a smaller cap than the octahedron's
        assert!(i < o && o < t);
    }

    #[test]
    fn tetrahedron_vertex() {
        let tri = canonical_triangle::<f64>(PolyhedronKind::Tetrahedron);
        let c = 2.0 * 2f64.sqrt() / 3.0;
        assert!((tri.v0 - Vec3::new(c, 0.0, 1.0 / 3.0)).max_abs() < 1e-15);
        assert!((tri.v0.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vertices_unit_equilateral_same_height() {
        for kind in PolyhedronKind::ALL {
            let tri = canonical_triangle::<f64>(kind);
            let v = tri.vertices();
            for p in v {
                assert!((p.norm() - 1.0).abs() < 1e-14);
                assert!((p.z - tri.height()).abs() < 1e-15);
            }
            let d01 = (v[0] - v[1]).norm();
            let d12 = (v[1] - v[2]).norm();
            let d20 = (v[2] - v[0]).norm();
            assert!((d01 - d12).abs() < 1e-14 && (d12 - d20).abs() < 1e-14);
        }
        let octa = canonical_triangle::<f64>(PolyhedronKind::Octahedron);
        assert!((octa.v1.z - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        let q = to_omega(BarycentricPoint::new(1.0f64 / 3.0, 1.0 / 3.0));
        assert!((q.e2 - 1.0 / 3.0).abs() < 1e-16 && (q.e3 - 1.0 / 27.0).abs() < 1e-16);
        let q = to_omega(BarycentricPoint::new(1.0, 0.0));
        assert_eq!((q.e2, q.e3), (0.0, 0.0));
        let q = to_omega(BarycentricPoint::new(0.5f64, 0.5));
        assert!((q.e2 - 0.25).abs() < 1e-16 && q.e3 == 0.0);
        assert!(in_omega(q, OMEGA_TOL));
    }

    #[test]
    fn omega_bound_examples() {
        let (lo, hi) = omega_bounds(1.0f64 / 3.0).unwrap();
        assert!((lo - 1.0 / 27.0).abs() < 1e-15 && (hi - 1.0 / 27.0).abs() < 1e-15);

        let (raw_lo, raw_hi) = omega_bounds_unclamped(0.0f64);
        assert!((raw_lo + 4.0 / 27.0).abs() < 1e-16 && raw_hi.abs() < 1e-16);
        let (lo, hi) = omega_bounds(0.0f64).unwrap();
        assert_eq!(lo, 0.0);
        assert!(lo <= 0.0 + 1e-16 && hi >= -1e-16);

        let (lo, hi) = omega_bounds(0.25f64).unwrap();
        assert!(lo <= 1e-16 && hi >= 0.0);
        assert!(lo.abs() < 1e-16);

        assert!(omega_bounds(0.4f64).is_err());
        assert!(omega_bounds(-0.1f64).is_err());
    }

    #[test]
    fn symmetries_map_vertices() {
        let tri = canonical_triangle::<f64>(PolyhedronKind::Icosahedron);
        let v = tri.vertices();
        for (perm, m) in tri.symmetries() {
            assert!(m.orthogonality_defect() < 1e-14);
            for a in 0..3 {
                assert!((m * v[a] - v[perm[a]]).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn permuted_moves_weights() {
        let p = BarycentricPoint::new(0.5f64, 0.3);
        let q = p.permuted([1, 2, 0]);
        assert!((q.v - 0.5).abs() < 1e-16 && (q.w() - 0.3).abs() < 1e-16);
    }

    #[test]
    fn parse_kind() {
        assert_eq!("octa".parse::<PolyhedronKind>().unwrap(), PolyhedronKind::Octahedron);
        assert!("cube".parse::<PolyhedronKind>().is_err());
    }
}
