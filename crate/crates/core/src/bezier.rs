//! Triangular Bernstein–Bézier patches.
//!
//! A patch of total degree `n` has control points `b[i,j,k]`, `i + j + k = n`,
//! and is evaluated at `(u, v, w = 1 - u - v)`. Corner `b[n,0,0]` sits at
//! `(u, v) = (1, 0)`, `b[0,n,0]` at `(0, 1)` and `b[0,0,n]` at `(0, 0)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BarycentricPoint, SphericalTriangle};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// How far outside Δ (ℓ¹ distance) evaluation is considered meaningful.
pub const DOMAIN_EPS: f64 = 0.05;

/// `|du × dv|` below this counts as a vanishing normal.
pub const DEGENERATE_NORMAL: f64 = 1e-12;

/// Triangular control net. Points are stored in lexicographic `(i, j, k)`
/// order, the same order used by the text format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlNet<T> {
    degree: usize,
    points: Vec<Vec3<T>>,
}

/// Number of control points of a degree-`n` net.
pub const fn net_size(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

#[inline]
pub fn net_offset(n: usize, i: usize, j: usize) -> usize {
    // rows i' < i hold (n - i' + 1) entries each
    i * (n + 1) - i * i.saturating_sub(1) / 2 + j
}

/// Iterates the index triples of a degree-`n` net in storage order.
pub fn indices(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n).flat_map(move |i| (0..=n - i).map(move |j| (i, j, n - i - j)))
}

impl<T: Real> ControlNet<T> {
    pub fn from_fn(degree: usize, mut f: impl FnMut(usize, usize, usize) -> Vec3<T>) -> Self {
        let points = indices(degree).map(|(i, j, k)| f(i, j, k)).collect();
        Self { degree, points }
    }

    pub fn from_points(degree: usize, points: Vec<Vec3<T>>) -> Result<Self> {
        if points.len() != net_size(degree) {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} net needs {} points, got {}",
                net_size(degree),
                points.len()
            )));
        }
        Ok(Self { degree, points })
    }

    /// Degree-1 net through three points.
    pub fn linear(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Self {
        Self::from_fn(1, |i, j, _| match (i, j) {
            (1, 0) => a,
            (0, 1) => b,
            _ => c,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn index_of(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        (i + j + k == self.degree).then(|| net_offset(self.degree, i, j))
    }

    /// Control point `b[i,j,k]`. Panics if the indices do not sum to the degree.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec3<T> {
        assert_eq!(i + j + k, self.degree, "index does not match degree");
        self.points[net_offset(self.degree, i, j)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), Vec3<T>)> + '_ {
        indices(self.degree).zip(self.points.iter().copied())
    }

    pub fn corners(&self) -> [Vec3<T>; 3] {
        let n = self.degree;
        [self.get(n, 0, 0), self.get(0, n, 0), self.get(0, 0, n)]
    }

    pub fn map(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            degree: self.degree,
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn transformed(&self, m: &Mat3<T>) -> Self {
        self.map(|p| *m * p)
    }

    /// Relabels corners: the weight of corner `a` moves to corner `perm[a]`.
    /// The surface is unchanged; only its parameterisation is permuted.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let n = self.degree;
        let mut out = vec![Vec3::zero(); net_size(n)];
        for ((i, j, k), p) in self.iter() {
            let mut idx = [0usize; 3];
            let src = [i, j, k];
            for a in 0..3 {
                idx[perm[a]] = src[a];
            }
            out[net_offset(n, idx[0], idx[1])] = p;
        }
        Self { degree: n, points: out }
    }

    pub fn max_point_distance(&self, other: &Self) -> T {
        assert_eq!(self.degree, other.degree);
        self.points
            .iter()
            .zip(&other.points)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    /// Largest corner deviation from the given triangle's vertices.
    pub fn corner_deviation(&self, tri: &SphericalTriangle<T>) -> T {
        self.corners()
            .iter()
            .zip(tri.vertices())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - b).norm()))
    }

    /// Largest deviation from invariance under the symmetries of `tri`:
    /// each spatial symmetry `S` must map `b[idx]` to `b[perm(idx)]`.
    pub fn symmetry_defect(&self, tri: &SphericalTriangle<T>) -> T {
        let mut worst = T::zero();
        for (perm, m) in tri.symmetries() {
            let img = self.transformed(&m).permuted(perm);
            worst = worst.max(img.max_point_distance(self));
        }
        worst
    }

    /// Evaluates position, first and second partials by de Casteljau.
    pub fn evaluate(&self, p: BarycentricPoint<T>) -> SurfacePoint<T> {
        let n = self.degree;
        let (u, v, w) = (p.u, p.v, p.w());
        let mut buf = self.points.clone();
        let mut layer2 = None;
        let mut layer1 = None;
        for d in (1..=n).rev() {
            if d == 2 {
                layer2 = Some([buf[0], buf[1], buf[2], buf[3], buf[4], buf[5]]);
            }
            if d == 1 {
                layer1 = Some([buf[0], buf[1], buf[2]]);
            }
            casteljau_step(&mut buf, d, u, v, w);
        }
        let position = buf[0];
        let nn = T::from_usize_lossy(n);
        let (du, dv) = match layer1 {
            // degree-1 layer order: (0,0,1), (0,1,0), (1,0,0)
            Some([b001, b010, b100]) => ((b100 - b001) * nn, (b010 - b001) * nn),
            None => (Vec3::zero(), Vec3::zero()),
        };
        let (duu, duv, dvv) = match layer2 {
            // degree-2 layer order: 002, 011, 020, 101, 110, 200
            Some([b002, b011, b020, b101, b110, b200]) => {
                let s = nn * T::from_usize_lossy(n - 1);
                let two = T::lit(2.0);
                (
                    (b200 - b101 * two + b002) * s,
                    (b110 - b101 - b011 + b002) * s,
                    (b020 - b011 * two + b002) * s,
                )
            }
            None => (Vec3::zero(), Vec3::zero(), Vec3::zero()),
        };
        let normal = du.cross(dv).try_normalize(T::lit(DEGENERATE_NORMAL));
        SurfacePoint {
            p,
            position,
            du,
            dv,
            duu,
            duv,
            dvv,
            normal,
        }
    }

    /// Position only; cheaper than [`ControlNet::evaluate`].
    pub fn position(&self, p: BarycentricPoint<T>) -> Vec3<T> {
        let (u, v, w) = (p.u, p.v, p.w());
        let mut buf = self.points.clone();
        for d in (1..=self.degree).rev() {
            casteljau_step(&mut buf, d, u, v, w);
        }
        buf[0]
    }

    /// Degree elevation by one; describes the identical surface.
    pub fn elevate_degree(&self) -> Self {
        let n = self.degree;
        let m = n + 1;
        let inv = T::one() / T::from_usize_lossy(m);
        Self::from_fn(m, |i, j, k| {
            let mut acc = Vec3::zero();
            if i > 0 {
                acc += self.get(i - 1, j, k) * T::from_usize_lossy(i);
            }
            if j > 0 {
                acc += self.get(i, j - 1, k) * T::from_usize_lossy(j);
            }
            if k > 0 {
                acc += self.get(i, j, k - 1) * T::from_usize_lossy(k);
            }
            acc * inv
        })
    }

    pub fn cast<U: Real>(&self) -> ControlNet<U> {
        ControlNet {
            degree: self.degree,
            points: self.points.iter().map(|p| p.cast()).collect(),
        }
    }

    /// Serialises to the `TBNET` text format.
    pub fn to_tbnet(&self) -> String {
        let mut out = format!("TBNET n={}\n", self.degree);
        for ((i, j, k), p) in self.iter() {
            let _ = writeln!(
                out,
                "{i} {j} {k} {:.16e} {:.16e} {:.16e}",
                p.x.as_f64(),
                p.y.as_f64(),
                p.z.as_f64()
            );
        }
        out
    }

    /// Parses the `TBNET` text format. Errors carry 1-based line numbers.
    pub fn from_tbnet(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty input, expected 'TBNET n=<degree>'".into(),
        })?;
        let degree = header
            .strip_prefix("TBNET")
            .map(str::trim)
            .and_then(|rest| rest.strip_prefix("n="))
            .and_then(|d| d.trim().parse::<usize>().ok())
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Parse {
                line: hline,
                msg: format!("bad header '{header}', expected 'TBNET n=<degree>'"),
            })?;
        let mut points: Vec<Option<Vec3<T>>> = vec![None; net_size(degree)];
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 'i j k x y z', got {} fields", fields.len()),
                });
            }
            let idx: Vec<usize> = fields[..3]
                .iter()
                .map(|f| f.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad index: {e}"),
                })?;
            if idx[0] + idx[1] + idx[2] != degree {
                return Err(Error::Parse {
                    line,
                    msg: format!(
                        "index ({} {} {}) does not sum to degree {degree}",
                        idx[0], idx[1], idx[2]
                    ),
                });
            }
            let xyz: Vec<f64> = fields[3..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad coordinate: {e}"),
                })?;
            let slot = &mut points[net_offset(degree, idx[0], idx[1])];
            if slot.is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate control point ({} {} {})", idx[0], idx[1], idx[2]),
                });
            }
            *slot = Some(Vec3::from_f64(xyz[0], xyz[1], xyz[2]));
        }
        let missing = points.iter().filter(|p| p.is_none()).count();
        if missing > 0 {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                msg: format!("{missing} control point(s) missing"),
            });
        }
        Ok(Self {
            degree,
            points: points.into_iter().map(Option::unwrap).collect(),
        })
    }
}

/// One de Casteljau step from degree `d` to `d - 1`, in place.
#[inline]
fn casteljau_step<T: Real>(buf: &mut [Vec3<T>], d: usize, u: T, v: T, w: T) {
    let m = d - 1;
    for i in 0..=m {
        for j in 0..=m - i {
            // children (i+1,j,k), (i,j+1,k), (i,j,k+1) of (i,j,k) at degree d
            let a = buf[net_offset(d, i + 1, j)];
            let b = buf[net_offset(d, i, j + 1)];
            let c = buf[net_offset(d, i, j)];
            buf[net_offset(m, i, j)] = a * u + b * v + c * w;
        }
    }
}

/// Bivariate Bernstein polynomial `n!/(i!j!k!) uⁱ vʲ wᵏ`.
pub fn bernstein<T: Real>(n: usize, i: usize, j: usize, k: usize, p: BarycentricPoint<T>) -> Result<T> {
    if i + j + k != n {
        return Err(Error::IndexMismatch { n, i, j, k });
    }
    Ok(multinomial::<T>(n, i, j, k) * p.u.powi(i as i32) * p.v.powi(j as i32) * p.w().powi(k as i32))
}

fn multinomial<T: Real>(n: usize, i: usize, j: usize, k: usize) -> T {
    let fact = |m: usize| (1..=m).fold(T::one(), |acc, x| acc * T::from_usize_lossy(x));
    fact(n) / (fact(i) * fact(j) * fact(k))
}

/// Position and partial derivatives of a patch at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint<T> {
    pub p: BarycentricPoint<T>,
    pub position: Vec3<T>,
    pub du: Vec3<T>,
    pub dv: Vec3<T>,
    pub duu: Vec3<T>,
    pub duv: Vec3<T>,
    pub dvv: Vec3<T>,
    /// Unit `du × dv`; `None` where the patch is not regular.
    pub normal: Option<Vec3<T>>,
}

impl<T: Real> SurfacePoint<T> {
    pub fn normal(&self) -> Result<Vec3<T>> {
        self.normal.ok_or(Error::DegenerateNormal {
            u: self.p.u.as_f64(),
            v: self.p.v.as_f64(),
            norm: self.du.cross(self.dv).norm().as_f64(),
        })
    }
}
