//! Numerical certification of G⁰, G¹ and G² continuity across a shared
//! boundary of two patches.
//!
//! A pair is glued along the `u = 0` edge of both nets, so the common
//! boundary is `c(τ) = p1(0, τ) = p2(0, τ)`. G² is certified by building a
//! transversal curve through both patches and checking that its one-sided
//! derivatives are related by a lower-triangular reparameterisation matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bezier::{ControlNet, DOMAIN_EPS};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::geometry::BarycentricPoint;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

pub const G0_TOL: f64 = 1e-13;
pub const G1_TOL: f64 = 1e-10;
pub const G2_TOL: f64 = 1e-8;

/// Uniform samples on `[0, 1]` used when the caller does not choose.
pub const DEFAULT_SAMPLES: usize = 101;

/// Corner points closer than this are considered the same vertex.
const CORNER_MATCH: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    G0,
    G1,
    G2,
}

impl Level {
    pub fn tolerance(self) -> f64 {
        match self {
            Level::G0 => G0_TOL,
            Level::G1 => G1_TOL,
            Level::G2 => G2_TOL,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::G0 => "G0",
            Level::G1 => "G1",
            Level::G2 => "G2",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "G0" | "0" => Ok(Level::G0),
            "G1" | "1" => Ok(Level::G1),
            "G2" | "2" => Ok(Level::G2),
            other => Err(Error::InvalidArgument(format!(
                "unknown continuity level '{other}' (expected G0, G1 or G2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCertificate<T> {
    pub level: Level,
    /// `(τ, residual)` per boundary sample.
    pub samples: Vec<(T, T)>,
    pub max_residual: T,
    pub pass: bool,
    /// Why the certificate failed before or while sampling, if it did.
    pub reason: Option<String>,
}

impl<T: Real> ContinuityCertificate<T> {
    fn from_samples(level: Level, samples: Vec<(T, T)>) -> Self {
        let max_residual = samples.iter().fold(T::zero(), |acc, &(_, r)| acc.max(r));
        // NaN residuals fail
        let pass =
            !samples.is_empty() && max_residual < T::lit(level.tolerance()) && samples.iter().all(|s| !s.1.is_nan());
        Self {
            level,
            samples,
            max_residual,
            pass,
            reason: None,
        }
    }

    fn failed(level: Level, samples: Vec<(T, T)>, reason: impl Into<String>) -> Self {
        let max_residual = samples
            .iter()
            .fold(T::zero(), |acc, &(_, r)| if r.is_nan() { acc } else { acc.max(r) });
        Self {
            level,
            samples,
            max_residual,
            pass: false,
            reason: Some(reason.into()),
        }
    }

    /// Carries a lower-level failure up to `level`.
    fn escalate(self, level: Level) -> Self {
        let reason = format!(
            "{} check failed{}",
            self.level,
            self.reason.as_deref().map(|r| format!(": {r}")).unwrap_or_default()
        );
        Self {
            level,
            reason: Some(reason),
            pass: false,
            ..self
        }
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {} max_residual={:.6e} samples={}{}",
            self.level,
            if self.pass { "PASS" } else { "FAIL" },
            self.max_residual.as_f64(),
            self.samples.len(),
            self.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default()
        )
    }
}

/// Boundary parameters: `n` uniform values on `[0, 1]`, the three
/// Chebyshev nodes of degree 3 mapped to `[0, 1]`, and `-ε/2`, `1 + ε/2`
/// just outside the edge.
pub fn sample_params<T: Real>(n: usize) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(n + 5);
    if n == 1 {
        out.push(T::lit(0.5));
    } else {
        let d = T::from_usize_lossy(n - 1);
        out.extend((0..n).map(|k| T::from_usize_lossy(k) / d));
    }
    for k in 1..=3 {
        let x = (T::lit((2 * k - 1) as f64) * T::PI() / T::lit(6.0)).cos();
        out.push((T::one() + x) * T::lit(0.5));
    }
    let half_eps = T::lit(DOMAIN_EPS / 2.0);
    out.push(-half_eps);
    out.push(T::one() + half_eps);
    out
}

/// Reflection across the plane through the origin and the `v1 v2` edge of
/// the canonical triangle, in closed form.
pub fn canonical_reflection<T: Real>(c: T) -> Mat3<T> {
    let l = |x: f64| T::lit(x);
    let c2 = c * c;
    let s = (T::one() - c2).sqrt();
    let d = l(3.0) * c2 - l(4.0);
    let off = l(4.0) * c * s / d;
    let z = T::zero();
    Mat3::from_rows([
        [(l(4.0) - l(5.0) * c2) / d, z, off],
        [z, T::one(), z],
        [off, z, (l(4.0) - l(5.0) * c2) / (l(4.0) - l(3.0) * c2)],
    ])
}

/// Two nets sharing their `u = 0` edge, optionally related by a reflection
/// whose mirror plane contains that edge and the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjoinedPair<T> {
    pub net1: ControlNet<T>,
    pub net2: ControlNet<T>,
    pub reflection: Option<Mat3<T>>,
}

impl<T: Real> AdjoinedPair<T> {
    /// Rejects a `reflection` that is not orthogonal with determinant -1.
    pub fn new(net1: ControlNet<T>, net2: ControlNet<T>, reflection: Option<Mat3<T>>) -> Result<Self> {
        if let Some(r) = reflection {
            let tol = T::lit(1e-12);
            if r.orthogonality_defect() > tol || (r.det() + T::one()).abs() > tol {
                return Err(Error::InvalidArgument(
                    "gluing matrix must be an orthogonal reflection (det = -1)".into(),
                ));
            }
        }
        Ok(Self { net1, net2, reflection })
    }

    /// `net2 = R net1` for the canonical reflection `R`.
    pub fn mirrored(net: ControlNet<T>, c: T) -> Self {
        let r = canonical_reflection(c);
        let net2 = net.transformed(&r);
        Self {
            net1: net,
            net2,
            reflection: Some(r),
        }
    }

    /// Unit normal of the mirror plane, if a reflection is attached.
    pub fn mirror_normal(&self) -> Option<Vec3<T>> {
        // I - R = 2 m mᵀ: its largest column is parallel to m
        let r = self.reflection?;
        let id = Mat3::identity();
        (0..3)
            .map(|j| id.column(j) - r.column(j))
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal))
            .map(Vec3::normalize)
    }
}

pub fn check_g0<T: Real>(pair: &AdjoinedPair<T>, samples: usize) -> ContinuityCertificate<T> {
    let pts = sample_params::<T>(samples)
        .into_iter()
        .map(|t| {
            let p = BarycentricPoint::new(T::zero(), t);
            (t, (pair.net1.position(p) - pair.net2.position(p)).norm())
        })
        .collect();
    ContinuityCertificate::from_samples(Level::G0, pts)
}

/// Tangent-plane continuity: normals of both patches agree up to sign
/// along the boundary and, for a mirrored pair, lie in the mirror plane.
pub fn check_g1<T: Real>(pair: &AdjoinedPair<T>, samples: usize) -> ContinuityCertificate<T> {
    let g0 = check_g0(pair, samples);
    if !g0.pass {
        return g0.escalate(Level::G1);
    }
    let m = pair.mirror_normal();
    let mut out = Vec::new();
    for t in sample_params::<T>(samples) {
        let p = BarycentricPoint::new(T::zero(), t);
        let (a, b) = (pair.net1.evaluate(p), pair.net2.evaluate(p));
        let (n1, n2) = match (a.normal, b.normal) {
            (Some(n1), Some(n2)) => (n1, n2),
            _ => {
                return ContinuityCertificate::failed(
                    Level::G1,
                    out,
                    format!("degenerate normal at tau = {}", t.as_f64()),
                )
            }
        };
        let mut r = n1.cross(n2).norm();
        if let Some(m) = m {
            r = r.max(n1.dot(m).abs());
        }
        out.push((t, r));
    }
    ContinuityCertificate::from_samples(Level::G1, out)
}

/// Derivatives of the reparameterisation `t ↦ (φ(t), ψ(t))` at `t = 0`
/// that carries a transversal curve from patch 1 into patch 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reparam<T> {
    pub phi1: T,
    pub phi2: T,
    pub psi1: T,
    pub psi2: T,
}

/// A family of transversal curves `γ_v` crossing the shared edge at `(0, v)`:
/// `γ(t) = p1(-t, v)` for `t ≤ 0` and `γ(t) = p2(φ(t), ψ(t))` for `t ≥ 0`.
pub trait TransversalCurve<T: Real> {
    fn reparam(&self, v: T) -> Result<Reparam<T>>;
}

/// Transversal curves for the regular G¹ cubic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicTransversal<T> {
    pub c: T,
}

impl<T: Real> TransversalCurve<T> for CubicTransversal<T> {
    fn reparam(&self, v: T) -> Result<Reparam<T>> {
        let l = |x: f64| T::lit(x);
        let c2 = self.c * self.c;
        let c4 = c2 * c2;
        let q = l(4.0) - l(3.0) * c2;
        let one_v = T::one() - v;
        let den = l(4.0) - l(4.0) * c2 + l(3.0) * c4 * one_v * v;
        let a = l(6.0) * c2 * (l(4.0) - l(5.0) * c2 + l(6.0) * c4 * one_v * v) / (q * den);
        let b = (l(6.0) * c2 * one_v - l(4.0)) / q;
        let cc =
            l(6.0) * c4 * (l(2.0) + l(9.0) * c4 * one_v * one_v * v - l(3.0) * c2 * (T::one() + v - l(2.0) * v * v))
                / (q * q * den);
        Ok(Reparam {
            phi1: T::one(),
            phi2: l(2.0) * a,
            psi1: b,
            psi2: l(2.0) * cc,
        })
    }
}

/// Transversal curves for the first quartic branch at parameter `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticTransversal<T> {
    pub c: T,
    pub gamma: T,
}

impl<T: Real> TransversalCurve<T> for QuarticTransversal<T> {
    fn reparam(&self, v: T) -> Result<Reparam<T>> {
        let l = |x: f64| T::lit(x);
        let c2 = self.c * self.c;
        let c4 = c2 * c2;
        let c6 = c4 * c2;
        let g = self.gamma;
        let q = l(4.0) - l(3.0) * c2;
        let b = l(2.0) * (l(2.0) - l(3.0) * c2 + l(3.0) * c2 * v) / (l(3.0) * c2 - l(4.0));
        let n = (l(27.0) * c6 * (T::one() - v) * (T::one() - v) * v - l(16.0) - l(6.0) * c2 * (l(4.0) * v - l(7.0))
            + l(9.0) * c4 * (l(2.0) * v * v + v - l(3.0)))
            * (l(2.0) + c2 - l(4.0) * g);
        let d = q
            * q
            * (l(6.0) * c4 * (v - T::one()) * v * g
                + l(2.0) * (l(2.0) * v * v - l(2.0) * v + T::one()) * (l(2.0) * g - T::one())
                + c2 * (l(2.0) + v * v * (l(7.0) - l(18.0) * g) - l(4.0) * g + v * (l(18.0) * g - l(7.0))));
        if d == T::zero() {
            return Err(Error::InvalidArgument(format!(
                "transversal curve undefined at v = {} for gamma = {}",
                v.as_f64(),
                g.as_f64()
            )));
        }
        Ok(Reparam {
            phi1: T::one(),
            phi2: T::zero(),
            psi1: b,
            psi2: l(4.0) * n / d,
        })
    }
}

/// Transversal curves matching a family, if it has any (G¹ families only).
pub fn transversal_for<T: Real>(family: &Family<T>) -> Option<Box<dyn TransversalCurve<T>>> {
    match family {
        Family::Quadratic(_) => None,
        Family::Cubic(f) => Some(Box::new(CubicTransversal { c: f.c })),
        Family::Quartic(f) => Some(Box::new(QuarticTransversal { c: f.c, gamma: f.gamma })),
    }
}

/// Lower-triangular matrix relating derivatives of two `C^k`
/// reparameterisations of one curve, for `k = alphas.len() ≤ 3`.
pub fn gk_matrix<T: Real>(alphas: &[T]) -> Result<Vec<Vec<T>>> {
    let z = T::zero();
    match *alphas {
        [a1] => Ok(vec![vec![a1]]),
        [a1, a2] => Ok(vec![vec![a1, z], vec![a2, a1 * a1]]),
        [a1, a2, a3] => Ok(vec![
            vec![a1, z, z],
            vec![a2, a1 * a1, z],
            vec![a3, T::lit(3.0) * a1 * a2, a1 * a1 * a1],
        ]),
        _ => Err(Error::Unsupported(format!("G^k matrix for k = {}", alphas.len()))),
    }
}

/// Solves `right = M_k(α) · left` for `α` by forward substitution (each row
/// projected onto `left[0]`) and returns the residual norm of all `3k`
/// scalar equations.
pub fn solve_gk<T: Real>(left: &[Vec3<T>], right: &[Vec3<T>]) -> Result<(Vec<T>, T)> {
    let k = left.len();
    if k == 0 || k > 3 || right.len() != k {
        return Err(Error::InvalidArgument(
            "solve_gk needs 1 to 3 matching derivatives".into(),
        ));
    }
    let l1 = left[0];
    let ll = l1.norm_squared();
    if ll == T::zero() {
        return Err(Error::InvalidArgument("first derivative of the curve vanishes".into()));
    }
    let mut alphas: Vec<T> = Vec::with_capacity(k);
    for row in 0..k {
        // known part of the row with the unknown α_{row+1} set to zero
        alphas.push(T::zero());
        let m = gk_matrix(&alphas)?;
        let mut known = Vec3::zero();
        for (col, &l) in left.iter().enumerate().take(row + 1).skip(1) {
            known += l * m[row][col];
        }
        alphas[row] = (right[row] - known).dot(l1) / ll;
    }
    let m = gk_matrix(&alphas)?;
    let mut sq = T::zero();
    for row in 0..k {
        let mut pred = Vec3::zero();
        for (col, &l) in left.iter().enumerate().take(row + 1) {
            pred += l * m[row][col];
        }
        sq = sq + (right[row] - pred).norm_squared();
    }
    Ok((alphas, sq.sqrt()))
}

/// G² across the boundary via transversal curves.
///
/// Runs the G⁰ and G¹ checks first. At each `v` the one-sided derivatives
/// of `γ_v` are computed from patch partials by the chain rule and matched
/// with a positive `α₁`.
pub fn check_g2_via_curve<T: Real>(
    pair: &AdjoinedPair<T>,
    curve: &dyn TransversalCurve<T>,
    samples: usize,
) -> ContinuityCertificate<T> {
    let g1 = check_g1(pair, samples);
    if !g1.pass {
        return g1.escalate(Level::G2);
    }
    let two = T::lit(2.0);
    let mut out = Vec::new();
    for v in sample_params::<T>(samples) {
        let rp = match curve.reparam(v) {
            Ok(r) => r,
            Err(e) => return ContinuityCertificate::failed(Level::G2, out, e.to_string()),
        };
        let p = BarycentricPoint::new(T::zero(), v);
        let a = pair.net1.evaluate(p);
        let b = pair.net2.evaluate(p);
        let left = [-a.du, a.duu];
        let r1 = b.du * rp.phi1 + b.dv * rp.psi1;
        let r2 = b.duu * (rp.phi1 * rp.phi1)
            + b.duv * (two * rp.phi1 * rp.psi1)
            + b.dvv * (rp.psi1 * rp.psi1)
            + b.du * rp.phi2
            + b.dv * rp.psi2;
        let (alphas, res) = match solve_gk(&left, &[r1, r2]) {
            Ok(x) => x,
            Err(e) => return ContinuityCertificate::failed(Level::G2, out, e.to_string()),
        };
        if !(alphas[0] > T::zero()) {
            out.push((v, res));
            return ContinuityCertificate::failed(Level::G2, out, "orientation-reversing match");
        }
        out.push((v, res));
    }
    ContinuityCertificate::from_samples(Level::G2, out)
}

/// Certifies `level` for a pair, using `curve` at G².
pub fn check_level<T: Real>(
    pair: &AdjoinedPair<T>,
    level: Level,
    curve: Option<&dyn TransversalCurve<T>>,
    samples: usize,
) -> ContinuityCertificate<T> {
    match (level, curve) {
        (Level::G0, _) => check_g0(pair, samples),
        (Level::G1, _) => check_g1(pair, samples),
        (Level::G2, Some(c)) => check_g2_via_curve(pair, c, samples),
        (Level::G2, None) => {
            let g1 = check_g1(pair, samples);
            if g1.pass {
                ContinuityCertificate::failed(Level::G2, g1.samples, "no transversal curve known for this family")
            } else {
                g1.escalate(Level::G2)
            }
        }
    }
}

fn corner_param<T: Real>(slot: usize) -> BarycentricPoint<T> {
    match slot {
        0 => BarycentricPoint::new(T::one(), T::zero()),
        1 => BarycentricPoint::new(T::zero(), T::one()),
        _ => BarycentricPoint::new(T::zero(), T::zero()),
    }
}

fn same_point<T: Real>(a: Vec3<T>, b: Vec3<T>) -> bool {
    (a - b).norm() < T::lit(CORNER_MATCH)
}

/// Re-indexes two nets so that the edge opposite corner `edge_a` of `a` and
/// the edge opposite `edge_b` of `b` both become the `u = 0` edge with
/// matching orientation, and attaches the reflection across the plane
/// through that edge and the origin.
pub fn pair_across_edge<T: Real>(
    a: &ControlNet<T>,
    edge_a: usize,
    b: &ControlNet<T>,
    edge_b: usize,
) -> Result<AdjoinedPair<T>> {
    if edge_a > 2 || edge_b > 2 {
        return Err(Error::InvalidArgument("edge index must be 0, 1 or 2".into()));
    }
    let mut perm_a = [0usize; 3];
    perm_a[edge_a] = 0;
    perm_a[(edge_a + 1) % 3] = 1;
    perm_a[(edge_a + 2) % 3] = 2;
    let na = a.permuted(perm_a);
    let ca = na.corners();

    let cb = b.corners();
    let (x, y) = ((edge_b + 1) % 3, (edge_b + 2) % 3);
    let mut perm_b = [0usize; 3];
    perm_b[edge_b] = 0;
    if same_point(cb[x], ca[1]) && same_point(cb[y], ca[2]) {
        perm_b[x] = 1;
        perm_b[y] = 2;
    } else if same_point(cb[y], ca[1]) && same_point(cb[x], ca[2]) {
        perm_b[y] = 1;
        perm_b[x] = 2;
    } else {
        let d = (cb[x] - ca[1]).norm().min((cb[y] - ca[1]).norm());
        return Err(Error::CornerMismatch(d.as_f64()));
    }
    let nb = b.permuted(perm_b);
    let h = Mat3::reflection(ca[1].cross(ca[2]));
    AdjoinedPair::new(na, nb, Some(h))
}

/// Corners of `a` and `b` that coincide, as `(slot in a, slot in b)`.
fn shared_corners<T: Real>(a: &ControlNet<T>, b: &ControlNet<T>) -> Vec<(usize, usize)> {
    let (ca, cb) = (a.corners(), b.corners());
    let mut out = Vec::new();
    for (i, &p) in ca.iter().enumerate() {
        for (j, &q) in cb.iter().enumerate() {
            if same_point(p, q) {
                out.push((i, j));
            }
        }
    }
    out
}

/// The edge (opposite corner) of each net along which they meet, if any.
pub fn shared_edge<T: Real>(a: &ControlNet<T>, b: &ControlNet<T>) -> Option<(usize, usize)> {
    let s = shared_corners(a, b);
    if s.len() != 2 {
        return None;
    }
    let ea = 3 - s[0].0 - s[1].0;
    let eb = 3 - s[0].1 - s[1].1;
    Some((ea, eb))
}

/// Continuity around a vertex shared by all `nets`.
///
/// Normals at the shared vertex must agree up to sign (G¹ at the vertex);
/// at G² every pair of nets that shares an edge is certified as well.
/// Samples record `(net index, residual)`.
pub fn check_vertex_ring<T: Real>(
    nets: &[ControlNet<T>],
    level: Level,
    curve: Option<&dyn TransversalCurve<T>>,
    samples: usize,
) -> ContinuityCertificate<T> {
    if nets.len() < 2 {
        return ContinuityCertificate::failed(level, vec![], "a vertex ring needs at least two patches");
    }
    // the vertex: a corner of the first net present in every other net
    let vertex = nets[0]
        .corners()
        .into_iter()
        .enumerate()
        .find(|&(_, p)| nets[1..].iter().all(|n| n.corners().iter().any(|&q| same_point(p, q))));
    let Some((slot0, vertex)) = vertex else {
        return ContinuityCertificate::failed(level, vec![], "nets do not share a vertex");
    };
    let mut normals = Vec::with_capacity(nets.len());
    for (k, net) in nets.iter().enumerate() {
        let slot = if k == 0 {
            slot0
        } else {
            net.corners()
                .iter()
                .position(|&q| same_point(vertex, q))
                .expect("checked above")
        };
        match net.evaluate(corner_param(slot)).normal {
            Some(n) => normals.push(n),
            None => {
                return ContinuityCertificate::failed(
                    level,
                    vec![],
                    format!("degenerate normal at the vertex in patch {k}"),
                )
            }
        }
    }
    let mut out: Vec<(T, T)> = normals
        .iter()
        .enumerate()
        .map(|(k, n)| (T::from_usize_lossy(k), n.cross(normals[0]).norm()))
        .collect();
    if level == Level::G0 {
        // a shared vertex point is all G⁰ asks for at the vertex
        out.iter_mut().for_each(|s| s.1 = T::zero());
        return ContinuityCertificate::from_samples(Level::G0, out);
    }
    let vertex_ok = out.iter().all(|&(_, r)| r < T::lit(G1_TOL));
    if !vertex_ok || level == Level::G1 {
        let mut cert = ContinuityCertificate::from_samples(Level::G1, out);
        cert.level = level;
        if !cert.pass {
            cert.reason = Some("normals disagree at the shared vertex".into());
        }
        return cert;
    }
    for i in 0..nets.len() {
        for j in i + 1..nets.len() {
            let Some((ea, eb)) = shared_edge(&nets[i], &nets[j]) else {
                continue;
            };
            let pair = match pair_across_edge(&nets[i], ea, &nets[j], eb) {
                Ok(p) => p,
                Err(e) => return ContinuityCertificate::failed(level, out, e.to_string()),
            };
            let cert = check_level(&pair, level, curve, samples);
            if !cert.pass {
                let reason = format!(
                    "patches {i} and {j}: {}",
                    cert.reason.clone().unwrap_or_else(|| cert.summary())
                );
                out.push((T::from_usize_lossy(i), cert.max_residual));
                return ContinuityCertificate::failed(level, out, reason);
            }
            out.push((T::from_usize_lossy(i), cert.max_residual));
        }
    }
    let mut cert = ContinuityCertificate::from_samples(level, out);
    // pair residuals were judged at their own level; the vertex part at G¹
    cert.pass = true;
    cert
}
