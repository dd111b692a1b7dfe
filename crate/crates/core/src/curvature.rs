//! Fundamental forms and Gaussian curvature of a patch.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bezier::{net_offset, ControlNet, SurfacePoint};
use crate::error::{Error, Result};
use crate::geometry::BarycentricPoint;
use crate::metrics::{fundamental_image, has_triangle_symmetry};
use crate::scalar::Real;

/// `EG - F²` at or below this is treated as a singular point.
pub const REGULARITY_TOL: f64 = 1e-12;

/// Smallest grid accepted by [`curvature_range`].
pub const MIN_CURVATURE_GRID: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample<T> {
    pub p: BarycentricPoint<T>,
    pub e: T,
    pub f: T,
    pub g: T,
    pub l: T,
    pub m: T,
    pub n: T,
    pub k: T,
}

/// Curvature from already evaluated partials. The normal is `du × dv`
/// normalised; `K` does not depend on its sign.
pub fn curvature_from_derivatives<T: Real>(s: &SurfacePoint<T>) -> Result<CurvatureSample<T>> {
    let e = s.du.dot(s.du);
    let f = s.du.dot(s.dv);
    let g = s.dv.dot(s.dv);
    let det = e * g - f * f;
    if !(det > T::lit(REGULARITY_TOL)) {
        return Err(Error::NonRegular {
            u: s.p.u.as_f64(),
            v: s.p.v.as_f64(),
            det: det.as_f64(),
        });
    }
    let nrm = s.du.cross(s.dv) * (T::one() / det.sqrt());
    let l = s.duu.dot(nrm);
    let m = s.duv.dot(nrm);
    let n = s.dvv.dot(nrm);
    Ok(CurvatureSample {
        p: s.p,
        e,
        f,
        g,
        l,
        m,
        n,
        k: (l * n - m * m) / det,
    })
}

pub fn gaussian_curvature<T: Real>(net: &ControlNet<T>, p: BarycentricPoint<T>) -> Result<CurvatureSample<T>> {
    curvature_from_derivatives(&net.evaluate(p))
}

/// Extremes of the Gaussian curvature over Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureRange<T> {
    pub k_min: T,
    pub k_max: T,
    pub argmin: BarycentricPoint<T>,
    pub argmax: BarycentricPoint<T>,
}

/// Compass search of `sign · K` from `start`, shrinking the step down to
/// `1e-12` and staying in Δ.
fn refine<T: Real>(
    net: &ControlNet<T>,
    start: BarycentricPoint<T>,
    k0: T,
    step: T,
    sign: T,
) -> (BarycentricPoint<T>, T) {
    let (mut p, mut k) = (start, k0);
    let mut h = step;
    let dirs: [(f64, f64); 6] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
    ];
    let stop = T::lit(1e-12);
    let mut budget = 10_000;
    while h > stop && budget > 0 {
        let mut improved = false;
        for &(du, dv) in &dirs {
            budget -= 1;
            let q = BarycentricPoint::new(p.u + h * T::lit(du), p.v + h * T::lit(dv));
            if !q.in_delta(T::zero()) {
                continue;
            }
            if let Ok(s) = gaussian_curvature(net, q) {
                if sign * s.k > sign * k {
                    p = q;
                    k = s.k;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h = h * T::lit(0.5);
        }
    }
    (p, k)
}

/// `K_min` and `K_max` over Δ: a grid scan (one sixth of Δ for symmetric
/// nets) refined by compass search from the best grid nodes.
pub fn curvature_range<T: Real>(net: &ControlNet<T>, grid_n: usize) -> Result<CurvatureRange<T>> {
    if grid_n < MIN_CURVATURE_GRID {
        return Err(Error::InvalidArgument(format!(
            "curvature grid {grid_n} below the minimum {MIN_CURVATURE_GRID}"
        )));
    }
    let n = grid_n;
    let symmetric = has_triangle_symmetry(net);
    let inv = T::one() / T::from_usize_lossy(n);
    let pt = |i: usize, j: usize| BarycentricPoint::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv);
    let values: Vec<Result<Option<T>>> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..=n - i).map(move |j| {
                if symmetric && !(j <= i && 2 * i + j <= n) {
                    return Ok(None);
                }
                gaussian_curvature(net, pt(i, j)).map(|s| Some(s.k))
            })
        })
        .collect();
    let mut grid = Vec::with_capacity(values.len());
    for v in values {
        grid.push(v?);
    }
    let mut out = [(BarycentricPoint::new(T::zero(), T::zero()), T::zero()); 2];
    for (slot, sign) in [(0usize, -T::one()), (1, T::one())] {
        let mut nodes: Vec<(usize, usize, T)> = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                if let Some(k) = grid[net_offset(n, i, j)] {
                    nodes.push((i, j, k));
                }
            }
        }
        nodes.sort_by(|a, b| {
            (sign * b.2)
                .partial_cmp(&(sign * a.2))
                .unwrap_or(Ordering::Equal)
                .then((a.0, a.1).cmp(&(b.0, b.1)))
        });
        nodes.truncate(6);
        let refined: Vec<(BarycentricPoint<T>, T)> = nodes
            .par_iter()
            .map(|&(i, j, k)| refine(net, pt(i, j), k, inv, sign))
            .collect();
        let mut best = refined[0];
        for cand in refined.into_iter().skip(1) {
            if sign * cand.1 > sign * best.1 {
                best = cand;
            }
        }
        if symmetric {
            best.0 = fundamental_image(best.0);
        }
        out[slot] = best;
    }
    Ok(CurvatureRange {
        k_min: out[0].1,
        k_max: out[1].1,
        argmin: out[0].0,
        argmax: out[1].0,
    })
}

/// Rounds half away from zero to `digits` decimals.
pub fn round_half_away(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::cubic_net;
    use crate::geometry::{canonical_triangle, PolyhedronKind};
    use crate::linalg::Vec3;

    #[test]
    fn sphere_patch_from_analytic_partials() {
        // unit sphere at longitude/latitude (θ, φ): partials in closed form
        let (th, ph) = (0.4f64, 0.3f64);
        let x = Vec3::new(ph.cos() * th.cos(), ph.cos() * th.sin(), ph.sin());
        let s = SurfacePoint {
            p: BarycentricPoint::new(th, ph),
            position: x,
            du: Vec3::new(-ph.cos() * th.sin(), ph.cos() * th.cos(), 0.0),
            dv: Vec3::new(-ph.sin() * th.cos(), -ph.sin() * th.sin(), ph.cos()),
            duu: Vec3::new(-ph.cos() * th.cos(), -ph.cos() * th.sin(), 0.0),
            duv: Vec3::new(ph.sin() * th.sin(), -ph.sin() * th.cos(), 0.0),
            dvv: -x,
            normal: None,
        };
        let k = curvature_from_derivatives(&s).unwrap().k;
        assert!((k - 1.0).abs() < 1e-14);
    }

    #[test]
    fn flat_patch_has_zero_curvature() {
        let tri = canonical_triangle::<f64>(PolyhedronKind::Icosahedron);
        let net = ControlNet::linear(tri.v0, tri.v1, tri.v2).elevate_degree();
        let r = curvature_range(&net, 128).unwrap();
        assert!(r.k_min.abs() < 1e-12 && r.k_max.abs() < 1e-12);
    }

    #[test]
    fn cubic_tetra_range() {
        let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
        let r = curvature_range(&net, 128).unwrap();
        assert_eq!(round_half_away(r.k_min, 2), 0.11);
        assert_eq!(round_half_away(r.k_max, 2), 3.24);
    }

    #[test]
    fn singular_patch_is_reported() {
        let net = cubic_net::<f64>(PolyhedronKind::Octahedron, 2).unwrap();
        assert!(matches!(
            gaussian_curvature(&net, BarycentricPoint::new(0.0, 0.0)),
            Err(Error::NonRegular { .. })
        ));
        assert!(curvature_range(&net, 128).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_away(0.125, 2), 0.13);
        assert_eq!(round_half_away(-0.125, 2), -0.13);
        assert_eq!(round_half_away(1.6875, 2), 1.69);
        assert_eq!(round_half_away(0.934, 2), 0.93);
    }

    #[test]
    fn grid_too_coarse() {
        let net = cubic_net::<f64>(PolyhedronKind::Tetrahedron, 1).unwrap();
        assert!(curvature_range(&net, 64).is_err());
    }
}
