//! Optimal triangular Bézier spline approximations of the unit sphere over
//! the spherical triangulations induced by the tetrahedron, octahedron and
//! icosahedron.
//!
//! The numeric core is generic over the scalar type ([`Real`]); the aliases
//! at the bottom of this file fix it to `f64`, which is what the tables,
//! reports and CLI use.

// `!(x > tol)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bezier;
pub mod continuity;
pub mod curvature;
pub mod error;
pub mod families;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod optimal;
pub mod scalar;
pub mod tables;

pub use assembly::{build_sphere, build_sphere_from_family, certify_sphere, SphereSpline};
pub use bezier::{bernstein, ControlNet, SurfacePoint};
pub use continuity::{
    check_g0, check_g1, check_g2_via_curve, check_vertex_ring, AdjoinedPair, ContinuityCertificate, Level,
};
pub use curvature::{curvature_range, gaussian_curvature, CurvatureRange, CurvatureSample};
pub use error::{Error, Result};
pub use families::{
    cubic_g1_triples, cubic_net, quadratic_net, quartic_g1_family, quartic_net, CubicFamily, Family, QuadraticFamily,
    QuarticBranch, QuarticFamily,
};
pub use geometry::{
    canonical_triangle, omega_bounds, to_omega, BarycentricPoint, OmegaPoint, PolyhedronKind, SphericalTriangle,
};
pub use linalg::{Mat3, Vec3};
pub use mesh::{tessellate, Mesh, MeshFormat};
pub use metrics::{extrema_over_delta, radial_errors, ErrorReport, Measure};
pub use optimal::{cubic_optimal, optimal_solution, quadratic_optimal, quartic_optimal, OptimalSolution, Provenance};
pub use scalar::Real;

pub type Vec3d = Vec3<f64>;
pub type Mat3d = Mat3<f64>;
pub type Bary = BarycentricPoint<f64>;
pub type Net = ControlNet<f64>;
