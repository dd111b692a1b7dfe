//! Radial error functions `f = ‖p‖² - 1` and `g = ‖p‖ - 1` and their global
//! extrema over the parameter triangle Δ.
//!
//! The search is a dense barycentric grid (restricted to the fundamental
//! region `v ≤ u ≤ w` when the net has the full triangle symmetry) followed
//! by a projected Newton / gradient ascent from the best grid nodes.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bezier::{net_offset, net_size, ControlNet};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::geometry::{BarycentricPoint, PolyhedronKind, SphericalTriangle};
use crate::scalar::Real;

/// Default grid resolution for [`extrema_over_delta`].
pub const DEFAULT_GRID: usize = 512;

/// Smallest grid resolution accepted by [`extrema_over_delta`].
pub const MIN_GRID: usize = 64;

/// `|max| = |min|` is declared when they agree to this absolute tolerance.
pub const EQUIOSCILLATION_TOL: f64 = 1e-9;

/// Refinement stops once the projected gradient of `f` drops below this.
pub const GRADIENT_TOL: f64 = 1e-12;

/// Nets whose symmetry defect is below this are searched on one sixth of Δ.
const SYMMETRY_DETECT: f64 = 1e-12;

/// Number of grid extrema refined per direction.
const MAX_SEEDS: usize = 6;

/// Which error function to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// `f = ‖p‖² - 1`
    Simplified,
    /// `g = ‖p‖ - 1`
    Radial,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Simplified, Measure::Radial];

    /// Applies the measure to a value of `f`.
    pub fn from_f<T: Real>(self, f: T) -> T {
        match self {
            Measure::Simplified => f,
            Measure::Radial => (f + T::one()).sqrt() - T::one(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Measure::Simplified => "f",
            Measure::Radial => "g",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Simplified => "simplified",
            Measure::Radial => "radial",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f" | "simplified" | "s" => Ok(Measure::Simplified),
            "g" | "radial" | "r" => Ok(Measure::Radial),
            other => Err(Error::InvalidArgument(format!(
                "unknown measure '{other}' (expected simplified|f or radial|g)"
            ))),
        }
    }
}

/// `(f, g)` at one parameter point.
pub fn radial_errors<T: Real>(net: &ControlNet<T>, p: BarycentricPoint<T>) -> Result<(T, T)> {
    let f = net.position(p).norm_squared() - T::one();
    // ‖p‖² ≥ 0, so only a patch through the origin reaches the bound
    if f <= -T::one() {
        return Err(Error::NegativeRadicand {
            u: p.u.as_f64(),
            v: p.v.as_f64(),
            f: f.as_f64(),
        });
    }
    Ok((f, (f + T::one()).sqrt() - T::one()))
}

/// Value of the chosen error function at one point.
pub fn point_error<T: Real>(net: &ControlNet<T>, p: BarycentricPoint<T>, m: Measure) -> T {
    m.from_f(net.position(p).norm_squared() - T::one())
}

/// Global extrema of `f` and `g` over Δ.
///
/// Since `g = √(f + 1) - 1` is increasing in `f`, both functions share their
/// extremal points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport<T> {
    pub max_f: T,
    pub min_f: T,
    pub max_g: T,
    pub min_g: T,
    pub argmax_f: BarycentricPoint<T>,
    pub argmin_f: BarycentricPoint<T>,
    pub argmax_g: BarycentricPoint<T>,
    pub argmin_g: BarycentricPoint<T>,
    pub d_s: T,
    pub d_r: T,
    pub equioscillation_f: bool,
    pub equioscillation_g: bool,
    /// Whether the search used the symmetry-reduced region.
    pub symmetric: bool,
    pub grid_n: usize,
}

impl<T: Real> ErrorReport<T> {
    pub fn max(&self, m: Measure) -> T {
        match m {
            Measure::Simplified => self.max_f,
            Measure::Radial => self.max_g,
        }
    }

    pub fn min(&self, m: Measure) -> T {
        match m {
            Measure::Simplified => self.min_f,
            Measure::Radial => self.min_g,
        }
    }

    /// `max(|max|, |min|)` of the chosen measure.
    pub fn distance(&self, m: Measure) -> T {
        match m {
            Measure::Simplified => self.d_s,
            Measure::Radial => self.d_r,
        }
    }

    /// `max + min`; zero when the error equioscillates.
    pub fn balance(&self, m: Measure) -> T {
        self.max(m) + self.min(m)
    }

    /// Flat `key = value` block, one entry per line.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        let pt = |p: &BarycentricPoint<T>| format!("{:.12} {:.12}", p.u.as_f64(), p.v.as_f64());
        let rows: [(&str, String); 14] = [
            ("max_f", format!("{:.12e}", self.max_f.as_f64())),
            ("min_f", format!("{:.12e}", self.min_f.as_f64())),
            ("max_g", format!("{:.12e}", self.max_g.as_f64())),
            ("min_g", format!("{:.12e}", self.min_g.as_f64())),
            ("argmax_f", pt(&self.argmax_f)),
            ("argmin_f", pt(&self.argmin_f)),
            ("argmax_g", pt(&self.argmax_g)),
            ("argmin_g", pt(&self.argmin_g)),
            ("d_s", format!("{:.12e}", self.d_s.as_f64())),
            ("d_r", format!("{:.12e}", self.d_r.as_f64())),
            ("equioscillation_f", self.equioscillation_f.to_string()),
            ("equioscillation_g", self.equioscillation_g.to_string()),
            ("symmetric", self.symmetric.to_string()),
            ("grid_n", self.grid_n.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Canonical triangle the net approximates, if its corners are the
/// canonical vertices for some `c`.
fn canonical_of<T: Real>(net: &ControlNet<T>) -> Option<SphericalTriangle<T>> {
    let v0 = net.corners()[0];
    let c = (v0.x * v0.x + v0.y * v0.y).sqrt();
    if !(c > T::zero() && c < T::one()) {
        return None;
    }
    let tri = SphericalTriangle::from_c(c);
    (net.corner_deviation(&tri) < T::lit(SYMMETRY_DETECT)).then_some(tri)
}

/// Whether the net is invariant under the symmetries of its canonical triangle.
pub fn has_triangle_symmetry<T: Real>(net: &ControlNet<T>) -> bool {
    canonical_of(net).is_some_and(|tri| net.symmetry_defect(&tri) < T::lit(SYMMETRY_DETECT))
}

/// Symmetric image of `p` in the fundamental region `v ≤ u ≤ w`.
pub fn fundamental_image<T: Real>(p: BarycentricPoint<T>) -> BarycentricPoint<T> {
    let mut b = p.weights();
    b.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    BarycentricPoint::new(b[1], b[0])
}

/// `f`, its gradient and Hessian in `(u, v)`.
fn f_jet<T: Real>(net: &ControlNet<T>, p: BarycentricPoint<T>) -> (T, [T; 2], [[T; 3]; 1]) {
    let s = net.evaluate(p);
    let two = T::lit(2.0);
    let x = s.position;
    let f = x.norm_squared() - T::one();
    let g = [two * x.dot(s.du), two * x.dot(s.dv)];
    let huu = two * (s.du.dot(s.du) + x.dot(s.duu));
    let huv = two * (s.du.dot(s.dv) + x.dot(s.duv));
    let hvv = two * (s.dv.dot(s.dv) + x.dot(s.dvv));
    (f, g, [[huu, huv, hvv]])
}

/// Moves `p` back onto Δ when round-off pushes it a hair outside.
fn snap<T: Real>(p: BarycentricPoint<T>) -> BarycentricPoint<T> {
    let u = p.u.max(T::zero());
    let v = p.v.max(T::zero());
    let sum = u + v;
    if sum > T::one() {
        BarycentricPoint::new(u / sum, v / sum)
    } else {
        BarycentricPoint::new(u, v)
    }
}

/// Largest `t ≥ 0` with `p + t d` in Δ, capped at `cap`.
fn max_step<T: Real>(p: BarycentricPoint<T>, d: [T; 2], cap: T) -> T {
    let mut t = cap;
    if d[0] < T::zero() {
        t = t.min(-p.u / d[0]);
    }
    if d[1] < T::zero() {
        t = t.min(-p.v / d[1]);
    }
    let ds = d[0] + d[1];
    if ds > T::zero() {
        t = t.min(p.w() / ds);
    }
    t.max(T::zero())
}

/// Local ascent of `sign · f` from `start`, staying in Δ.
///
/// Bound constraints are handled by an active set: a coordinate on its
/// bound whose gradient points outward is frozen, and the step is taken
/// in the remaining edge direction (or interior). Newton steps are used
/// where the reduced Hessian is definite, gradient steps otherwise, with
/// step halving until the objective does not decrease.
pub fn refine_extremum<T: Real>(net: &ControlNet<T>, start: BarycentricPoint<T>, sign: T) -> (BarycentricPoint<T>, T) {
    let zero = T::zero();
    let tiny = T::lit(1e-15);
    let tol = T::lit(GRADIENT_TOL);
    let mut p = snap(start);
    let (mut f, _, _) = f_jet(net, p);
    for _ in 0..200 {
        let (_, g, [[huu, huv, hvv]]) = f_jet(net, p);
        let (gu, gv) = (sign * g[0], sign * g[1]);
        let (huu, huv, hvv) = (sign * huu, sign * huv, sign * hvv);
        let at_u = p.u <= tiny;
        let at_v = p.v <= tiny;
        let at_w = p.w() <= tiny;
        let block_u = at_u && gu < zero;
        let block_v = at_v && gv < zero;
        // increasing u + v is blocked on the hypotenuse
        let block_w = at_w && gu + gv > zero;
        let dirs: Option<[T; 2]> = match (block_u, block_v, block_w) {
            (false, false, false) => None,
            (true, false, false) => Some([zero, T::one()]),
            (false, true, false) => Some([T::one(), zero]),
            (false, false, true) => Some([T::one(), -T::one()]),
            _ => break, // corner with both neighbours blocked
        };
        let d = match dirs {
            None => {
                if gu.abs().max(gv.abs()) < tol {
                    break;
                }
                let det = huu * hvv - huv * huv;
                if huu < zero && det > zero {
                    // Newton step for a concave model: d = -H⁻¹ g
                    [-(hvv * gu - huv * gv) / det, -(huu * gv - huv * gu) / det]
                } else {
                    [gu, gv]
                }
            }
            Some(e) => {
                let gd = e[0] * gu + e[1] * gv;
                let ee = e[0] * e[0] + e[1] * e[1];
                if gd.abs() / ee.sqrt() < tol {
                    break;
                }
                let hd = e[0] * e[0] * huu + T::lit(2.0) * e[0] * e[1] * huv + e[1] * e[1] * hvv;
                let t = if hd < zero { -gd / hd } else { gd / ee };
                [e[0] * t, e[1] * t]
            }
        };
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        if !(len > zero) {
            break;
        }
        // never jump more than a tenth of the domain in one step
        let cap = T::lit(0.1) / len;
        let mut t = max_step(p, d, T::one().min(cap));
        let mut accepted = false;
        for _ in 0..60 {
            if t <= zero {
                break;
            }
            let q = snap(BarycentricPoint::new(p.u + t * d[0], p.v + t * d[1]));
            let fq = net.position(q).norm_squared() - T::one();
            if sign * fq >= sign * f {
                let moved = (q.u - p.u).abs() + (q.v - p.v).abs();
                p = q;
                f = fq;
                accepted = moved > zero;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    (p, f)
}

#[derive(Clone, Copy)]
struct Node<T> {
    i: usize,
    j: usize,
    f: T,
}

/// Orders candidates by `sign · f`, breaking ties toward the smaller `(u, v)`.
fn better<T: Real>(a: (BarycentricPoint<T>, T), b: (BarycentricPoint<T>, T), sign: T) -> bool {
    let (fa, fb) = (sign * a.1, sign * b.1);
    if fa != fb {
        return fa > fb;
    }
    (a.0.u, a.0.v) < (b.0.u, b.0.v)
}

/// Extrema of `f` and `g` over Δ by a grid scan followed by local refinement.
pub fn extrema_over_delta<T: Real>(net: &ControlNet<T>, grid_n: usize) -> Result<ErrorReport<T>> {
    if grid_n < MIN_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid resolution {grid_n} below the minimum {MIN_GRID}"
        )));
    }
    let n = grid_n;
    let symmetric = has_triangle_symmetry(net);
    let inv = T::one() / T::from_usize_lossy(n);
    let in_region = |i: usize, j: usize| !symmetric || (j <= i && 2 * i + j <= n);

    // stage 1: grid values, NaN outside the searched region
    let values: Vec<T> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..=n - i).map(move |j| {
                if in_region(i, j) {
                    let p = BarycentricPoint::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv);
                    net.position(p).norm_squared() - T::one()
                } else {
                    T::nan()
                }
            })
        })
        .collect();
    debug_assert_eq!(values.len(), net_size(n));
    let at = |i: usize, j: usize| values[net_offset(n, i, j)];

    let mut best = [None::<(BarycentricPoint<T>, T)>; 2];
    for (slot, sign) in [(0usize, T::one()), (1, -T::one())] {
        // stage 2: discrete local extrema as seeds
        let mut seeds: Vec<Node<T>> = (0..=n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let at = &at;
                (0..=n - i).filter_map(move |j| {
                    let f = at(i, j);
                    if f.is_nan() {
                        return None;
                    }
                    let (ii, jj) = (i as isize, j as isize);
                    let nb = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
                    let local = nb.iter().all(|&(di, dj)| {
                        let (a, b) = (ii + di, jj + dj);
                        if a < 0 || b < 0 || (a + b) as usize > n {
                            return true;
                        }
                        let g = at(a as usize, b as usize);
                        g.is_nan() || sign * g <= sign * f
                    });
                    local.then_some(Node { i, j, f })
                })
            })
            .collect();
        seeds.sort_by(|a, b| {
            (sign * b.f)
                .partial_cmp(&(sign * a.f))
                .unwrap_or(Ordering::Equal)
                .then((a.i, a.j).cmp(&(b.i, b.j)))
        });
        seeds.truncate(MAX_SEEDS);

        let refined: Vec<(BarycentricPoint<T>, T)> = seeds
            .par_iter()
            .map(|s| {
                let p0 = BarycentricPoint::new(T::from_usize_lossy(s.i) * inv, T::from_usize_lossy(s.j) * inv);
                let (p, f) = refine_extremum(net, p0, sign);
                // keep the grid node if refinement somehow lost ground
                let (p, f) = if sign * f >= sign * s.f { (p, f) } else { (p0, s.f) };
                let p = if symmetric { fundamental_image(p) } else { p };
                (p, f)
            })
            .collect();
        for cand in refined {
            best[slot] = match best[slot] {
                Some(cur) if !better(cand, cur, sign) => Some(cur),
                _ => Some(cand),
            };
        }
    }
    let (argmax, max_f) = best[0].expect("grid has nodes");
    let (argmin, min_f) = best[1].expect("grid has nodes");
    if min_f <= -T::one() {
        return Err(Error::NegativeRadicand {
            u: argmin.u.as_f64(),
            v: argmin.v.as_f64(),
            f: min_f.as_f64(),
        });
    }
    let max_g = Measure::Radial.from_f(max_f);
    let min_g = Measure::Radial.from_f(min_f);
    let eq = T::lit(EQUIOSCILLATION_TOL);
    Ok(ErrorReport {
        max_f,
        min_f,
        max_g,
        min_g,
        argmax_f: argmax,
        argmin_f: argmin,
        argmax_g: argmax,
        argmin_g: argmin,
        d_s: max_f.abs().max(min_f.abs()),
        d_r: max_g.abs().max(min_g.abs()),
        equioscillation_f: (max_f + min_f).abs() <= eq,
        equioscillation_g: (max_g + min_g).abs() <= eq,
        symmetric,
        grid_n,
    })
}

/// `err(1/3, 1/3) + err(1/2, 1/2)`: the balance between the barycenter and
/// an edge midpoint, which vanishes at the minimax optimum whenever those
/// two points carry the extrema.
pub fn point_residual<T: Real>(net: &ControlNet<T>, m: Measure) -> T {
    let half = T::lit(0.5);
    point_error(net, BarycentricPoint::barycenter(), m) + point_error(net, BarycentricPoint::new(half, half), m)
}

/// `max + min` of the chosen error over Δ, from [`extrema_over_delta`].
pub fn minimax_residual<T: Real>(net: &ControlNet<T>, m: Measure, grid_n: usize) -> Result<T> {
    Ok(extrema_over_delta(net, grid_n)?.balance(m))
}

/// The residual whose root defines the optimal family parameter.
///
/// The quartic icosahedral family has its maximum off the barycenter, so
/// the balance of the true extrema is used there; every other case uses
/// [`point_residual`].
pub fn equioscillation_residual<T: Real>(family: &Family<T>, m: Measure) -> Result<T> {
    let net = family.net();
    let icosa = PolyhedronKind::from_c(family.c(), T::lit(1e-12)) == Some(PolyhedronKind::Icosahedron);
    match family {
        Family::Quartic(_) if icosa => minimax_residual(&net, m, DEFAULT_GRID),
        Family::Cubic(_) => Err(Error::Unsupported(
            "the G¹ cubic family has no free parameter to balance".into(),
        )),
        _ => Ok(point_residual(&net, m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{quadratic_net, QuadraticFamily};
    use crate::geometry::canonical_triangle;

    fn alpha_f(c: f64) -> f64 {
        let c2 = c * c;
        (68.0 - 59.0 * c2 - 12.0 * (196.0 - 175.0 * c2 - 3.0 * c2 * c2).sqrt()) / (91.0 * c2 - 100.0)
    }

    #[test]
    fn corners_have_zero_error() {
        let net = quadratic_net::<f64>(PolyhedronKind::Icosahedron, 1.7);
        let (f, g) = radial_errors(&net, BarycentricPoint::new(1.0, 0.0)).unwrap();
        assert!(f.abs() < 1e-15 && g.abs() < 1e-15);
    }

    #[test]
    fn negative_radicand_detected() {
        let o = crate::linalg::Vec3::<f64>::zero();
        let net = ControlNet::linear(o, o, o);
        assert!(matches!(
            radial_errors(&net, BarycentricPoint::new(0.2, 0.2)),
            Err(Error::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn quadratic_tetra_equioscillates() {
        let kind = PolyhedronKind::Tetrahedron;
        let net = quadratic_net::<f64>(kind, alpha_f(kind.c()));
        let r = extrema_over_delta(&net, 128).unwrap();
        assert!(r.symmetric);
        // edge controls push the midpoint out; the barycenter stays inside
        assert!((r.argmin_f.u - 1.0 / 3.0).abs() < 1e-9 && (r.argmin_f.v - 1.0 / 3.0).abs() < 1e-9);
        // (1/2, 0) is the fundamental image of (1/2, 1/2)
        assert!((r.argmax_f.u - 0.5).abs() < 1e-9 && r.argmax_f.v.abs() < 1e-9);
        assert!((r.max_f + r.min_f).abs() < 1e-9);
        assert!(r.equioscillation_f);
        assert!(!r.equioscillation_g);
    }

    #[test]
    fn flat_triangle_lies_inside() {
        let tri = canonical_triangle::<f64>(PolyhedronKind::Octahedron);
        let net = ControlNet::linear(tri.v0, tri.v1, tri.v2);
        let r = extrema_over_delta(&net, 64).unwrap();
        assert!(r.max_f.abs() < 1e-15);
        let b = BarycentricPoint::<f64>::barycenter();
        assert!((r.argmin_f.u - b.u).abs() < 1e-9 && (r.argmin_f.v - b.v).abs() < 1e-9);
        assert!(r.min_f < 0.0);
    }

    #[test]
    fn asymmetric_net_uses_full_domain() {
        let tri = canonical_triangle::<f64>(PolyhedronKind::Octahedron);
        let mut pts = quadratic_net::<f64>(PolyhedronKind::Octahedron, 1.5).points().to_vec();
        pts[1] = pts[1] * 1.1;
        let net = ControlNet::from_points(2, pts).unwrap();
        assert!(net.symmetry_defect(&tri) > 1e-3);
        let r = extrema_over_delta(&net, 64).unwrap();
        assert!(!r.symmetric);
    }

    #[test]
    fn grid_too_coarse() {
        let net = quadratic_net::<f64>(PolyhedronKind::Octahedron, 1.5);
        assert!(extrema_over_delta(&net, 63).is_err());
    }

    #[test]
    fn fundamental_image_sorts_weights() {
        let p = fundamental_image(BarycentricPoint::new(0.5f64, 0.5));
        assert_eq!((p.u, p.v), (0.5, 0.0));
        let q = fundamental_image(BarycentricPoint::new(0.1f64, 0.6));
        assert!((q.u - 0.3).abs() < 1e-15 && (q.v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn residual_at_alpha_one_is_negative() {
        for kind in PolyhedronKind::ALL {
            let fam = Family::Quadratic(QuadraticFamily::new(kind.c::<f64>(), 1.0));
            assert!(equioscillation_residual(&fam, Measure::Simplified).unwrap() < 0.0);
        }
    }

    #[test]
    fn kv_block_has_every_key() {
        let net = quadratic_net::<f64>(PolyhedronKind::Octahedron, 1.9);
        let kv = extrema_over_delta(&net, 64).unwrap().to_kv_string();
        for key in ["max_f", "min_g", "argmax_g", "d_s", "d_r", "equioscillation_f"] {
            assert!(kv.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
        }
    }

    #[test]
    fn measure_parses() {
        assert_eq!("g".parse::<Measure>().unwrap(), Measure::Radial);
        assert_eq!("Simplified".parse::<Measure>().unwrap(), Measure::Simplified);
        assert!("h".parse::<Measure>().is_err());
    }
}
