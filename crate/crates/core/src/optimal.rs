//! Optimal free parameters of the quadratic, cubic and quartic families.
//!
//! Quadratic and tetrahedral/octahedral quartic optima have closed forms.
//! The icosahedral quartic optimum is found by bisection on the balance of
//! the true extrema, since its maximum leaves the barycenter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bezier::ControlNet;
use crate::continuity::Level;
use crate::error::{Error, Result};
use crate::families::{
    cubic_g1_triples, quartic_g1_family, CubicFamily, Family, QuadraticFamily, QuarticBranch, QuarticFamily,
};
use crate::geometry::{BarycentricPoint, PolyhedronKind};
use crate::metrics::{extrema_over_delta, Measure, DEFAULT_GRID};
use crate::scalar::Real;

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-12;

/// Hard cap on bisection steps.
pub const BISECTION_MAX_ITER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    Bisection,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Bisection => "bisection",
        })
    }
}

/// Optimal member of a family together with its radial distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSolution<T> {
    pub kind: PolyhedronKind,
    pub degree: usize,
    pub smoothness: Level,
    pub measure: Measure,
    pub params: Vec<(String, T)>,
    pub d_r: T,
    pub provenance: Provenance,
    pub family: Family<T>,
}

impl<T: Real> OptimalSolution<T> {
    pub fn net(&self) -> ControlNet<T> {
        self.family.net()
    }

    pub fn param(&self, name: &str) -> Option<T> {
        self.params.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

/// Optimal `α` of the quadratic family for the chosen measure.
pub fn quadratic_optimal<T: Real>(c: T, measure: Measure) -> T {
    let l = |x: f64| T::lit(x);
    let c2 = c * c;
    match measure {
        Measure::Simplified => {
            (l(68.0) - l(59.0) * c2 - l(12.0) * (l(196.0) - l(175.0) * c2 - l(3.0) * c2 * c2).sqrt())
                / (l(91.0) * c2 - l(100.0))
        }
        Measure::Radial => {
            let a = (l(4.0) - l(3.0) * c2).sqrt();
            let b = (T::one() - c2).sqrt();
            (l(24.0) - l(3.0) * a - l(4.0) * b) / (l(3.0) * a + l(8.0) * b)
        }
    }
}

/// The regular G¹ cubic (triple 1); the family has no free parameter left.
pub fn cubic_optimal<T: Real>(c: T) -> CubicFamily<T> {
    cubic_g1_triples(c)[0]
}

/// Closed-form quartic `γ` for the tetrahedron and octahedron.
pub fn quartic_closed_gamma<T: Real>(kind: PolyhedronKind, measure: Measure) -> Option<T> {
    let l = |x: f64| T::lit(x);
    let r3 = l(3.0).sqrt();
    match (kind, measure) {
        (PolyhedronKind::Tetrahedron, Measure::Simplified) => {
            Some((l(2189.0) + l(108.0) * l(2291.0).sqrt()) / l(7602.0))
        }
        (PolyhedronKind::Tetrahedron, Measure::Radial) => Some((l(9587.0) - l(2916.0) * r3) / l(4686.0)),
        (PolyhedronKind::Octahedron, Measure::Simplified) => Some((l(47.0) + l(36.0) * l(974.0).sqrt()) / l(1510.0)),
        (PolyhedronKind::Octahedron, Measure::Radial) => {
            Some((l(209.0) + l(768.0) * r3 - l(12.0) * (l(6126.0) + l(1512.0) * r3).sqrt()) / l(538.0))
        }
        (PolyhedronKind::Icosahedron, _) => None,
    }
}

/// Upper end of the icosahedral bisection bracket: the root of
/// `f(1/3,1/3,γ) = -f(1/2,1/2,γ)`.
pub fn icosa_gamma0<T: Real>() -> T {
    let l = |x: f64| T::lit(x);
    let r5 = l(5.0).sqrt();
    (l(-1931.0) - l(1100.0) * r5 + l(18.0) * (l(6.0) * (l(556615.0) + l(248877.0) * r5)).sqrt())
        / (l(6.0) * (l(5771.0) + l(2508.0) * r5))
}

/// `γ` with `f(1/3,1/3,γ) = 0` and `f(1/2,1/2,γ) = 0`; the simplified
/// icosahedral optimum lies between them.
pub fn icosa_gamma_bounds<T: Real>() -> (T, T) {
    let l = |x: f64| T::lit(x);
    let r5 = l(5.0).sqrt();
    let g1 = (l(29.0) - l(13.0) * r5 + l(9.0) * (l(6.0) * (l(5.0) + r5)).sqrt()) / l(96.0);
    let g2 = (l(-1.0) + l(2.0) * (l(10.0) - l(2.0) * r5).sqrt()) / l(6.0);
    (g1, g2)
}

/// Outcome of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bisection<T> {
    pub root: T,
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
}

/// Bisection for an increasing residual with `r(lo) ≤ 0 ≤ r(hi)`.
pub fn bisect_increasing<T: Real>(
    mut lo: T,
    mut hi: T,
    mut residual: impl FnMut(T) -> Result<T>,
) -> Result<Bisection<T>> {
    let r_lo = residual(lo)?;
    let r_hi = residual(hi)?;
    if !(r_lo <= T::zero() && r_hi >= T::zero()) {
        return Err(Error::NonBracketing {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            r_lo: r_lo.as_f64(),
            r_hi: r_hi.as_f64(),
        });
    }
    let width = T::lit(BISECTION_WIDTH);
    let mut iterations = 0;
    while hi - lo >= width {
        if iterations == BISECTION_MAX_ITER {
            return Err(Error::NoConvergence(format!(
                "bisection bracket still {:e} wide after {BISECTION_MAX_ITER} steps",
                (hi - lo).as_f64()
            )));
        }
        let mid = (lo + hi) * T::lit(0.5);
        if residual(mid)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(Bisection {
        root: (lo + hi) * T::lit(0.5),
        lo,
        hi,
        iterations,
    })
}

/// Icosahedral quartic optimum by bisection on `max + min` over `[1/2, γ₀]`.
pub fn icosa_quartic_bisection<T: Real>(measure: Measure, grid_n: usize) -> Result<Bisection<T>> {
    let c = PolyhedronKind::Icosahedron.c::<T>();
    bisect_increasing(T::lit(0.5), icosa_gamma0(), |g| {
        let net = quartic_g1_family(c, g, QuarticBranch::One).net();
        Ok(extrema_over_delta(&net, grid_n)?.balance(measure))
    })
}

/// Solution of the two-equation characterisation of the icosahedral
/// simplified optimum: `f(u,u,γ) = -f(1/2,0,γ)` and `∂/∂u f(u,u,γ) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcosaNewton<T> {
    pub u: T,
    pub gamma: T,
    pub residual: T,
    pub iterations: usize,
    /// `∂²/∂u² f(u,u,γ)`, negative at an admissible solution.
    pub curvature: T,
}

fn icosa_system<T: Real>(c: T, u: T, gamma: T) -> ([T; 2], T) {
    let net = quartic_g1_family(c, gamma, QuarticBranch::One).net();
    let s = net.evaluate(BarycentricPoint::new(u, u));
    let x = s.position;
    let two = T::lit(2.0);
    let f_diag = x.norm_squared() - T::one();
    let edge = net.position(BarycentricPoint::new(T::lit(0.5), T::zero()));
    let f_edge = edge.norm_squared() - T::one();
    // d/du along the diagonal: direction (1, 1)
    let d1 = s.du + s.dv;
    let d2 = s.duu + s.duv * two + s.dvv;
    let df = two * x.dot(d1);
    let ddf = two * (d1.dot(d1) + x.dot(d2));
    ([f_diag + f_edge, df], ddf)
}

/// Damped Newton solve of the icosahedral system from `(u0, γ0)`.
///
/// `f` is quadratic in `γ` (the net is affine in it), so central
/// differences in `γ` are exact up to rounding.
pub fn icosa_quartic_newton<T: Real>(u0: T, gamma0: T) -> Result<IcosaNewton<T>> {
    let c = PolyhedronKind::Icosahedron.c::<T>();
    let h = T::lit(1e-3);
    let two = T::lit(2.0);
    let (mut u, mut g) = (u0, gamma0);
    let norm = |r: [T; 2]| r[0].abs().max(r[1].abs());
    let (mut r, mut ddf) = icosa_system(c, u, g);
    for it in 0..100 {
        if norm(r) < T::lit(1e-15) {
            return Ok(IcosaNewton {
                u,
                gamma: g,
                residual: norm(r),
                iterations: it,
                curvature: ddf,
            });
        }
        let (rp, _) = icosa_system(c, u, g + h);
        let (rm, _) = icosa_system(c, u, g - h);
        let j = [[r[1], (rp[0] - rm[0]) / (two * h)], [ddf, (rp[1] - rm[1]) / (two * h)]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == T::zero() {
            return Err(Error::NoConvergence(
                "singular Jacobian in icosahedral Newton solve".into(),
            ));
        }
        let du = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dg = -(j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut t = T::one();
        let mut moved = false;
        for _ in 0..40 {
            let (rn, ddn) = icosa_system(c, u + t * du, g + t * dg);
            if norm(rn) < norm(r) {
                u = u + t * du;
                g = g + t * dg;
                r = rn;
                ddf = ddn;
                moved = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !moved {
            // no further decrease is representable; accept if already tiny
            if norm(r) < T::lit(1e-13) {
                return Ok(IcosaNewton {
                    u,
                    gamma: g,
                    residual: norm(r),
                    iterations: it,
                    curvature: ddf,
                });
            }
            return Err(Error::NoConvergence(format!(
                "icosahedral Newton stalled at residual {:e}",
                norm(r).as_f64()
            )));
        }
    }
    Err(Error::NoConvergence("icosahedral Newton exceeded 100 steps".into()))
}

fn quartic_params<T: Real>(q: &QuarticFamily<T>) -> Vec<(String, T)> {
    vec![
        ("alpha".into(), q.alpha),
        ("beta".into(), q.beta),
        ("gamma".into(), q.gamma),
        ("zeta".into(), q.zeta),
        ("xi".into(), q.xi),
    ]
}

/// Optimal quartic G¹ member for the given polyhedron and measure.
pub fn quartic_optimal<T: Real>(kind: PolyhedronKind, measure: Measure) -> Result<OptimalSolution<T>> {
    quartic_optimal_grid(kind, measure, DEFAULT_GRID)
}

pub fn quartic_optimal_grid<T: Real>(
    kind: PolyhedronKind,
    measure: Measure,
    grid_n: usize,
) -> Result<OptimalSolution<T>> {
    let (gamma, provenance) = match quartic_closed_gamma(kind, measure) {
        Some(g) => (g, Provenance::ClosedForm),
        None => (icosa_quartic_bisection(measure, grid_n)?.root, Provenance::Bisection),
    };
    let fam = quartic_g1_family(kind.c(), gamma, QuarticBranch::One);
    let d_r = extrema_over_delta(&fam.net(), grid_n)?.d_r;
    Ok(OptimalSolution {
        kind,
        degree: 4,
        smoothness: Level::G2,
        measure,
        params: quartic_params(&fam),
        d_r,
        provenance,
        family: Family::Quartic(fam),
    })
}

/// Optimal solution for any supported degree.
///
/// The cubic family has no free parameter, so `measure` only labels it.
pub fn optimal_solution<T: Real>(
    kind: PolyhedronKind,
    degree: usize,
    measure: Measure,
    grid_n: usize,
) -> Result<OptimalSolution<T>> {
    let c = kind.c::<T>();
    match degree {
        2 => {
            let alpha = quadratic_optimal(c, measure);
            let fam = QuadraticFamily::new(c, alpha);
            let d_r = extrema_over_delta(&fam.net(), grid_n)?.d_r;
            Ok(OptimalSolution {
                kind,
                degree,
                smoothness: Level::G0,
                measure,
                params: vec![("alpha".into(), alpha)],
                d_r,
                provenance: Provenance::ClosedForm,
                family: Family::Quadratic(fam),
            })
        }
        3 => {
            let fam = cubic_optimal(c);
            let d_r = extrema_over_delta(&fam.net(), grid_n)?.d_r;
            Ok(OptimalSolution {
                kind,
                degree,
                smoothness: Level::G2,
                measure,
                params: vec![
                    ("alpha".into(), fam.alpha),
                    ("beta".into(), fam.beta),
                    ("gamma".into(), fam.gamma),
                ],
                d_r,
                provenance: Provenance::ClosedForm,
                family: Family::Cubic(fam),
            })
        }
        4 => quartic_optimal_grid(kind, measure, grid_n),
        d => Err(Error::Unsupported(format!("no optimal family of degree {d}"))),
    }
}

/// Crossover of the second quartic branch for the tetrahedron.
pub fn tetra_branch_two_crossover<T: Real>() -> T {
    (T::lit(22229.0) - T::lit(216.0) * T::lit(2291.0).sqrt()) / T::lit(7602.0)
}

/// Result of sweeping the second quartic branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSweep<T> {
    /// Smallest grid lower bound of `d_s` over the sweep.
    pub min_ds: T,
    pub argmin_gamma: T,
    /// `d_s` of the first-branch simplified optimum.
    pub optimum_ds: T,
}

impl<T: Real> BranchSweep<T> {
    pub fn margin(&self) -> T {
        self.min_ds - self.optimum_ds
    }
}

/// Grid size for the branch sweep; grid maxima are lower bounds of `d_s`,
/// which is all the comparison needs.
const SWEEP_GRID: usize = 64;

/// `max |f|` over grid nodes only, a lower bound of `d_s`.
fn grid_ds<T: Real>(net: &ControlNet<T>, n: usize) -> T {
    let inv = T::one() / T::from_usize_lossy(n);
    let mut worst = T::zero();
    for i in 0..=n {
        for j in 0..=n - i {
            let p = BarycentricPoint::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv);
            worst = worst.max((net.position(p).norm_squared() - T::one()).abs());
        }
    }
    worst
}

/// Sweeps `γ ∈ [0, 3]` in steps of `1e-3` along the second branch.
pub fn quartic_branch_two_sweep<T: Real>(kind: PolyhedronKind) -> Result<BranchSweep<T>> {
    use rayon::prelude::*;
    if kind == PolyhedronKind::Icosahedron {
        return Err(Error::Unsupported(
            "the branch comparison is stated for the tetrahedron and octahedron".into(),
        ));
    }
    let c = kind.c::<T>();
    let optimum = quartic_optimal_grid::<T>(kind, Measure::Simplified, DEFAULT_GRID)?;
    let optimum_ds = extrema_over_delta(&optimum.net(), DEFAULT_GRID)?.d_s;
    let (min_ds, argmin_gamma) = (0..=3000usize)
        .into_par_iter()
        .map(|k| {
            let g = T::from_usize_lossy(k) * T::lit(1e-3);
            let net = quartic_g1_family(c, g, QuarticBranch::Two).net();
            (grid_ds(&net, SWEEP_GRID), g)
        })
        .reduce(
            || (T::infinity(), T::zero()),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(BranchSweep {
        min_ds,
        argmin_gamma,
        optimum_ds,
    })
}

/// Whether the second quartic branch is worse than the first for every
/// swept `γ`.
pub fn quartic_branch_two_inferior(kind: PolyhedronKind) -> Result<bool> {
    Ok(quartic_branch_two_sweep::<f64>(kind)?.margin() > 0.0)
}
