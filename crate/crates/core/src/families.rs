//! Symmetric control-net families approximating the canonical spherical
//! triangle: quadratic G⁰, cubic G¹ and quartic G¹.
//!
//! Every family is generic in `c`; the `*_net(kind, ..)` helpers are thin
//! wrappers for the three Platonic values. Nets are completed from a few
//! listed control points by the six symmetries of the canonical triangle.

use serde::{Deserialize, Serialize};

use crate::bezier::ControlNet;
use crate::error::{Error, Result};
use crate::geometry::{PolyhedronKind, SphericalTriangle};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Tolerance for symmetry ties while completing a net.
pub const SYMMETRY_TOL: f64 = 1e-13;

/// A control index with its point.
pub type Seed<T> = ((usize, usize, usize), Vec3<T>);

/// Completes a degree-`n` net from `seeds` using the symmetry group of `tri`.
///
/// Each seed is propagated to all six images; a control point that is hit
/// more than once (it lies on a symmetry axis) must receive the same value.
pub fn symmetric_net<T: Real>(tri: &SphericalTriangle<T>, degree: usize, seeds: &[Seed<T>]) -> Result<ControlNet<T>> {
    let size = crate::bezier::net_size(degree);
    let mut slots: Vec<Option<Vec3<T>>> = vec![None; size];
    let tol = T::lit(SYMMETRY_TOL);
    for &((i, j, k), b) in seeds {
        if i + j + k != degree {
            return Err(Error::IndexMismatch { n: degree, i, j, k });
        }
        for (perm, m) in tri.symmetries() {
            let src = [i, j, k];
            let mut dst = [0usize; 3];
            for a in 0..3 {
                dst[perm[a]] = src[a];
            }
            let pos = crate::bezier::net_offset(degree, dst[0], dst[1]);
            let img = m * b;
            match slots[pos] {
                Some(prev) if (prev - img).max_abs() > tol => {
                    return Err(Error::InvalidArgument(format!(
                        "symmetry tie at ({},{},{}) disagrees by {:e}",
                        dst[0],
                        dst[1],
                        dst[2],
                        (prev - img).max_abs().as_f64()
                    )));
                }
                Some(_) => {}
                None => slots[pos] = Some(img),
            }
        }
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(Error::InvalidArgument(format!(
            "seeds do not cover control point #{missing}"
        )));
    }
    ControlNet::from_points(degree, slots.into_iter().map(Option::unwrap).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFamily<T> {
    pub c: T,
    pub alpha: T,
}

impl<T: Real> QuadraticFamily<T> {
    pub fn new(c: T, alpha: T) -> Self {
        Self { c, alpha }
    }

    /// Corners on the sphere, edge controls `α/2 (vᵢ + vⱼ)`.
    pub fn net(&self) -> ControlNet<T> {
        let tri = SphericalTriangle::from_c(self.c);
        let half = self.alpha * T::lit(0.5);
        symmetric_net(&tri, 2, &[((2, 0, 0), tri.v0), ((1, 1, 0), (tri.v0 + tri.v1) * half)])
            .expect("quadratic seeds are symmetric")
    }

    /// The only α with a normal parallel to the radius at the corners.
    pub fn g1_candidate(c: T) -> T {
        T::lit(4.0) / (T::lit(4.0) - T::lit(3.0) * c * c)
    }
}

pub fn quadratic_net<T: Real>(kind: PolyhedronKind, alpha: T) -> ControlNet<T> {
    QuadraticFamily::new(kind.c(), alpha).net()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicFamily<T> {
    pub c: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> CubicFamily<T> {
    /// Edge controls `α vᵢ + β vⱼ`, centre control `(0, 0, γ)`.
    pub fn net(&self) -> ControlNet<T> {
        let tri = SphericalTriangle::from_c(self.c);
        symmetric_net(
            &tri,
            3,
            &[
                ((3, 0, 0), tri.v0),
                ((2, 1, 0), tri.v0 * self.alpha + tri.v1 * self.beta),
                ((1, 1, 1), Vec3::new(T::zero(), T::zero(), self.gamma)),
            ],
        )
        .expect("cubic seeds are symmetric")
    }
}

/// The corner tangent-plane condition shared by the cubic and quartic
/// families: `α = (2 - 2β + 3c²β) / 2`.
pub fn vertex_constraint_alpha<T: Real>(c: T, beta: T) -> T {
    let two = T::lit(2.0);
    (two - two * beta + T::lit(3.0) * c * c * beta) / two
}

/// The three G¹ cubic parameter triples `(α, β, γ)`.
///
/// Triples 2 and 3 are singular (vanishing normal at `(0,0)` and
/// `(1/2,1/2)` respectively); triple 1 is the regular one.
pub fn cubic_g1_triples<T: Real>(c: T) -> [CubicFamily<T>; 3] {
    let c2 = c * c;
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let eight = T::lit(8.0);
    let s = (one - c2).sqrt();
    let q = four - three * c2;
    let t1 = CubicFamily {
        c,
        alpha: (eight - three * c2) / (three * q),
        beta: four / (three * q),
        gamma: s * (eight - eight * c2 + three * c2 * c2) / (two * (one - c2) * q),
    };
    let t2 = CubicFamily {
        c,
        alpha: one,
        beta: T::zero(),
        gamma: s * q / (four * (one - c2)),
    };
    let t3 = CubicFamily {
        c,
        alpha: three * c2 / q,
        beta: four / q,
        gamma: s * (eight - T::lit(9.0) * c2 * c2) / (two * (one - c2) * q),
    };
    [t1, t2, t3]
}

/// Cubic net from triple `index` (1-based, as in the literature).
pub fn cubic_net<T: Real>(kind: PolyhedronKind, index: usize) -> Result<ControlNet<T>> {
    if !(1..=3).contains(&index) {
        return Err(Error::InvalidArgument(format!(
            "cubic triple index {index} not in 1..=3"
        )));
    }
    Ok(cubic_g1_triples(kind.c::<T>())[index - 1].net())
}

/// Which of the two non-singular quartic G¹ parameter branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuarticBranch {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticFamily<T> {
    pub c: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub zeta: T,
    pub xi: T,
    pub branch: QuarticBranch,
}

/// Quartic G¹ parameters as functions of the free parameter γ.
pub fn quartic_g1_family<T: Real>(c: T, gamma: T, branch: QuarticBranch) -> QuarticFamily<T> {
    let c2 = c * c;
    let c4 = c2 * c2;
    let c6 = c4 * c2;
    let l = |x: f64| T::lit(x);
    let g = gamma;
    // shared sub-expressions
    let p = l(9.0) * c4 - l(18.0) * c2 + l(8.0);
    let q = l(3.0) * c4 - l(7.0) * c2 + l(4.0);
    let (alpha, beta, zeta, xi) = match branch {
        QuarticBranch::One => {
            let alpha = ((l(6.0) * c2 - l(4.0)) * g + c2 + l(2.0)) / (l(4.0) * c2);
            let beta = (l(2.0) * g - l(1.0)) / (l(2.0) * c2);
            let zeta = (-l(4.0) * p * g + l(9.0) * c6 - l(24.0) * c4 - l(4.0) * c2 + l(16.0)) / (l(12.0) * c2 * q);
            let xi =
                (-l(2.0) * (l(3.0) * c4 - l(3.0) * c2 - l(2.0)) * g - c2 - l(2.0)) / (l(12.0) * c2 * (l(1.0) - c2));
            (alpha, beta, zeta, xi)
        }
        QuarticBranch::Two => {
            let r = l(4.0) - l(3.0) * c2;
            let alpha = (p * g - l(3.0) * c4 + l(10.0) * c2 - l(4.0)) / (c2 * r);
            let beta = ((l(6.0) * c2 - l(8.0)) * g + l(4.0)) / (c2 * r);
            let zeta = (p * g - l(3.0) * c4 + l(10.0) * c2 - l(4.0)) / (l(6.0) * c2 * (c2 - l(1.0)));
            let xi = ((l(9.0) * c6 - l(30.0) * c4 + l(36.0) * c2 - l(16.0)) * g + l(3.0) * c4 - l(8.0) * c2 + l(8.0))
                / (l(6.0) * c2 * q);
            (alpha, beta, zeta, xi)
        }
    };
    QuarticFamily {
        c,
        alpha,
        beta,
        gamma,
        zeta,
        xi,
        branch,
    }
}

impl<T: Real> QuarticFamily<T> {
    /// `b310 = α v0 + β v1`, `b220 = γ (v0 + v1)`, `b211 = ζ v0 + ξ (v1 + v2)`,
    /// remaining controls by symmetry.
    pub fn net(&self) -> ControlNet<T> {
        let tri = SphericalTriangle::from_c(self.c);
        let (v0, v1, v2) = (tri.v0, tri.v1, tri.v2);
        symmetric_net(
            &tri,
            4,
            &[
                ((4, 0, 0), v0),
                ((3, 1, 0), v0 * self.alpha + v1 * self.beta),
                ((2, 2, 0), (v0 + v1) * self.gamma),
                ((2, 1, 1), v0 * self.zeta + (v1 + v2) * self.xi),
            ],
        )
        .expect("quartic seeds are symmetric")
    }

    /// `α - (2 - 2β + 3c²β)/2`; zero for both branches by construction.
    pub fn constraint_residual(&self) -> T {
        self.alpha - vertex_constraint_alpha(self.c, self.beta)
    }
}

pub fn quartic_net<T: Real>(kind: PolyhedronKind, gamma: T, branch: QuarticBranch) -> ControlNet<T> {
    quartic_g1_family(kind.c(), gamma, branch).net()
}

/// Any of the families, used where a net must remember how it was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family<T> {
    Quadratic(QuadraticFamily<T>),
    Cubic(CubicFamily<T>),
    Quartic(QuarticFamily<T>),
}

impl<T: Real> Family<T> {
    pub fn net(&self) -> ControlNet<T> {
        match self {
            Family::Quadratic(f) => f.net(),
            Family::Cubic(f) => f.net(),
            Family::Quartic(f) => f.net(),
        }
    }

    pub fn c(&self) -> T {
        match self {
            Family::Quadratic(f) => f.c,
            Family::Cubic(f) => f.c,
            Family::Quartic(f) => f.c,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Family::Quadratic(_) => 2,
            Family::Cubic(_) => 3,
            Family::Quartic(_) => 4,
        }
    }
}
