//! Triangle meshes sampled from a sphere assembly, with OBJ and binary PLY
//! output and topology audits.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assembly::SphereSpline;
use crate::curvature::gaussian_curvature;
use crate::error::{Error, Result};
use crate::geometry::BarycentricPoint;
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Samples closer than this are merged into one vertex.
pub const WELD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(Error::InvalidArgument(format!(
                "unknown mesh format '{other}' (expected obj or ply)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub positions: Vec<Vec3<f64>>,
    /// Per-vertex Gaussian curvature, if requested.
    pub curvature: Option<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

/// Spatial hash for welding.
struct Welder {
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
    positions: Vec<Vec3<f64>>,
}

impl Welder {
    fn cell(p: Vec3<f64>) -> (i64, i64, i64) {
        let f = |x: f64| (x / WELD_TOL).floor() as i64;
        (f(p.x), f(p.y), f(p.z))
    }

    /// Index of an existing vertex within the weld tolerance, or a new one.
    fn insert(&mut self, p: Vec3<f64>) -> (usize, bool) {
        let (cx, cy, cz) = Self::cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = self.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &i in list {
                            if (self.positions[i] - p).norm() <= WELD_TOL {
                                return (i, false);
                            }
                        }
                    }
                }
            }
        }
        let i = self.positions.len();
        self.positions.push(p);
        self.cells.entry((cx, cy, cz)).or_default().push(i);
        (i, true)
    }
}

/// Samples every face on a uniform grid with `subdivisions²` triangles and
/// welds coincident samples along shared edges.
pub fn tessellate<T: Real>(sphere: &SphereSpline<T>, subdivisions: usize, with_curvature: bool) -> Result<Mesh> {
    if subdivisions == 0 {
        return Err(Error::InvalidArgument("subdivisions must be at least 1".into()));
    }
    let n = subdivisions;
    let inv = T::one() / T::from_usize_lossy(n);
    let mut welder = Welder {
        cells: HashMap::new(),
        positions: Vec::new(),
    };
    let mut curvature = Vec::new();
    let mut triangles = Vec::with_capacity(sphere.faces.len() * n * n);
    for face in &sphere.faces {
        let mut ids = vec![0usize; (n + 1) * (n + 2) / 2];
        let at = |i: usize, j: usize| crate::bezier::net_offset(n, i, j);
        for i in 0..=n {
            for j in 0..=n - i {
                let p = BarycentricPoint::new(T::from_usize_lossy(i) * inv, T::from_usize_lossy(j) * inv);
                let (id, fresh) = welder.insert(face.net.position(p).to_f64());
                if fresh && with_curvature {
                    curvature.push(gaussian_curvature(&face.net, p)?.k.as_f64());
                }
                ids[at(i, j)] = id;
            }
        }
        // counter-clockwise in (u, v), which faces outward
        for i in 0..n {
            for j in 0..n - i {
                triangles.push([ids[at(i, j)], ids[at(i + 1, j)], ids[at(i, j + 1)]]);
                if i + j + 1 < n {
                    triangles.push([ids[at(i + 1, j)], ids[at(i + 1, j + 1)], ids[at(i, j + 1)]]);
                }
            }
        }
    }
    Ok(Mesh {
        positions: welder.positions,
        curvature: with_curvature.then_some(curvature),
        triangles,
    })
}

impl Mesh {
    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# vertices {} triangles {}",
            self.positions.len(),
            self.triangles.len()
        );
        for (i, p) in self.positions.iter().enumerate() {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
            if let Some(k) = &self.curvature {
                let _ = writeln!(s, "# K {:.16e}", k[i]);
            }
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    pub fn to_ply(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut header = String::from("ply\nformat binary_little_endian 1.0\n");
        let _ = writeln!(header, "element vertex {}", self.positions.len());
        header.push_str("property double x\nproperty double y\nproperty double z\n");
        if self.curvature.is_some() {
            header.push_str("property double quality\n");
        }
        let _ = writeln!(header, "element face {}", self.triangles.len());
        header.push_str("property list uchar int vertex_indices\nend_header\n");
        out.extend_from_slice(header.as_bytes());
        for (i, p) in self.positions.iter().enumerate() {
            for x in [p.x, p.y, p.z] {
                out.extend_from_slice(&x.to_le_bytes());
            }
            if let Some(k) = &self.curvature {
                out.extend_from_slice(&k[i].to_le_bytes());
            }
        }
        for t in &self.triangles {
            out.push(3u8);
            for &v in t {
                out.extend_from_slice(&(v as i32).to_le_bytes());
            }
        }
        out
    }

    pub fn write(&self, path: &Path, format: MeshFormat) -> Result<()> {
        let bytes = match format {
            MeshFormat::Obj => self.to_obj().into_bytes(),
            MeshFormat::Ply => self.to_ply(),
        };
        let mut f = std::fs::File::create(path)?;
        f.write_all(&bytes)?;
        Ok(())
    }

    /// Reads the subset of OBJ written by [`Mesh::to_obj`].
    pub fn read_obj(text: &str) -> Result<Self> {
        let mut m = Mesh::default();
        let mut ks = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let bad = |msg: &str| Error::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("bad vertex"))?;
                    if c.len() != 3 {
                        return Err(bad("vertex needs three coordinates"));
                    }
                    m.positions.push(Vec3::new(c[0], c[1], c[2]));
                }
                Some("f") => {
                    let c: Vec<usize> = it
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("bad face"))?;
                    if c.len() != 3 || c.contains(&0) {
                        return Err(bad("face needs three 1-based indices"));
                    }
                    m.triangles.push([c[0] - 1, c[1] - 1, c[2] - 1]);
                }
                Some("#") if it.next() == Some("K") => {
                    let k = it
                        .next()
                        .and_then(|x| x.parse().ok())
                        .ok_or_else(|| bad("bad K value"))?;
                    ks.push(k);
                }
                _ => {}
            }
        }
        if !ks.is_empty() {
            m.curvature = Some(ks);
        }
        Ok(m)
    }

    /// Reads the binary PLY written by [`Mesh::to_ply`].
    pub fn read_ply(bytes: &[u8]) -> Result<Self> {
        let mut r = BufReader::new(bytes);
        let (mut nv, mut nf, mut quality) = (0usize, 0usize, false);
        let mut line = String::new();
        let mut ln = 0;
        loop {
            line.clear();
            ln += 1;
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "missing end_header".into(),
                });
            }
            let l = line.trim_end();
            if l == "end_header" {
                break;
            }
            let parts: Vec<&str> = l.split_whitespace().collect();
            match parts.as_slice() {
                ["element", "vertex", n] => {
                    nv = n.parse().map_err(|_| Error::Parse {
                        line: ln,
                        msg: "bad count".into(),
                    })?
                }
                ["element", "face", n] => {
                    nf = n.parse().map_err(|_| Error::Parse {
                        line: ln,
                        msg: "bad count".into(),
                    })?
                }
                ["property", "double", "quality"] => quality = true,
                _ => {}
            }
        }
        let f8 = |r: &mut BufReader<&[u8]>| -> Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let mut m = Mesh::default();
        let mut ks = Vec::new();
        for _ in 0..nv {
            let (x, y, z) = (f8(&mut r)?, f8(&mut r)?, f8(&mut r)?);
            m.positions.push(Vec3::new(x, y, z));
            if quality {
                ks.push(f8(&mut r)?);
            }
        }
        for _ in 0..nf {
            let mut cnt = [0u8; 1];
            r.read_exact(&mut cnt)?;
            if cnt[0] != 3 {
                return Err(Error::Parse {
                    line: ln,
                    msg: "only triangles are supported".into(),
                });
            }
            let mut t = [0usize; 3];
            for v in &mut t {
                let mut b = [0u8; 4];
                r.read_exact(&mut b)?;
                *v = i32::from_le_bytes(b) as usize;
            }
            m.triangles.push(t);
        }
        if quality {
            m.curvature = Some(ks);
        }
        Ok(m)
    }

    /// Every undirected edge is shared by exactly two triangles that use it
    /// in opposite directions (closed, consistently oriented surface).
    pub fn edge_manifold_defects(&self) -> usize {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed
            .iter()
            .filter(|(&(a, b), &count)| count != 1 || directed.get(&(b, a)) != Some(&1))
            .count()
    }

    /// Triangles whose normal does not point away from the origin.
    pub fn inward_triangles(&self) -> usize {
        self.triangles
            .iter()
            .filter(|t| {
                let (a, b, c) = (self.positions[t[0]], self.positions[t[1]], self.positions[t[2]]);
                (b - a).cross(c - a).dot(a + b + c) <= 0.0
            })
            .count()
    }

    /// `(min, max)` of the vertex norms.
    pub fn radial_span(&self) -> (f64, f64) {
        self.positions
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.norm()), hi.max(p.norm()))
            })
    }

    /// Euler characteristic `V - E + F`; 2 for a closed sphere.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.positions.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }
}
