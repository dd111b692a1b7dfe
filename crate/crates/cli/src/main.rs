//! `sphere-spline`: reproduces the optimal-parameter tables, certifies
//! continuity of patch pairs and exports assembled sphere meshes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sphere_spline::continuity::{
    canonical_reflection, check_level, CubicTransversal, QuarticTransversal, TransversalCurve, DEFAULT_SAMPLES,
};
use sphere_spline::metrics::DEFAULT_GRID;
use sphere_spline::tables::{table, ReportFile, TableOptions, PARAM_TOL};
use sphere_spline::{
    build_sphere_from_family, curvature_range, extrema_over_delta, optimal_solution, tessellate, AdjoinedPair, Error,
    Level, Mat3d, Measure, MeshFormat, Net, PolyhedronKind,
};

#[derive(Parser)]
#[command(
    name = "sphere-spline",
    version,
    about = "Optimal Bézier spline approximations of the sphere"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grid resolution for extremum searches over the parameter triangle.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Tolerance override (table cells, or the continuity residual for `check`).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute tables 1-3 and compare them with the printed values.
    Tables {
        /// 1, 2, 3 or all.
        #[arg(default_value = "all")]
        which: String,
        /// Write a JSON report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Assemble the optimal sphere spline and export a triangle mesh.
    Mesh {
        kind: PolyhedronKind,
        degree: usize,
        smoothness: Level,
        subdivisions: usize,
        format: MeshFormat,
        out: PathBuf,
        /// Omit the per-vertex Gaussian curvature channel.
        #[arg(long)]
        no_curvature: bool,
    },
    /// Certify continuity between two nets sharing their u = 0 edge.
    Check {
        net_a: PathBuf,
        net_b: PathBuf,
        /// none, mirror, c=<value>, a polyhedron name, or 9 comma separated matrix entries (row major).
        reflection: String,
        level: Level,
        /// γ of the quartic transversal curve (inferred from the first net otherwise).
        #[arg(long)]
        gamma: Option<f64>,
        /// Uniform boundary samples.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Print the optimal member of a family.
    Optimize {
        kind: PolyhedronKind,
        degree: usize,
        measure: Measure,
    },
    /// Print the error extremes of a net read from a file.
    Errors { net: PathBuf },
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Parse { .. } => 3,
            Error::InvalidArgument(_) | Error::Unsupported(_) => 2,
            _ => 1,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Tables { ref which, ref report } => cmd_tables(&cli.global, which, report.as_deref()),
        Command::Mesh {
            kind,
            degree,
            smoothness,
            subdivisions,
            format,
            ref out,
            no_curvature,
        } => cmd_mesh(
            &cli.global,
            kind,
            degree,
            smoothness,
            subdivisions,
            format,
            out,
            !no_curvature,
        ),
        Command::Check {
            ref net_a,
            ref net_b,
            ref reflection,
            level,
            gamma,
            samples,
        } => cmd_check(&cli.global, net_a, net_b, reflection, level, gamma, samples),
        Command::Optimize { kind, degree, measure } => cmd_optimize(&cli.global, kind, degree, measure),
        Command::Errors { ref net } => cmd_errors(&cli.global, net),
    };
    match out {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_tables(g: &Global, which: &str, report: Option<&Path>) -> CmdResult {
    let numbers: Vec<usize> = match which {
        "all" => vec![1, 2, 3],
        "1" | "2" | "3" => vec![which.parse().unwrap_or(1)],
        other => {
            return Err(Failure::usage(format!(
                "unknown table '{other}' (expected 1, 2, 3 or all)"
            )))
        }
    };
    let opts = TableOptions {
        grid: g.grid,
        curvature_grid: g.grid,
        tol: g.tol.unwrap_or(PARAM_TOL),
    };
    let mut tables = Vec::new();
    for n in numbers {
        let t = table(n, &opts)?;
        println!("{}", t.render());
        tables.push(t);
    }
    let rep = ReportFile::new(tables);
    if let Some(path) = report {
        fs::write(path, rep.to_json()?).map_err(Error::from)?;
    }
    let mismatches: usize = rep
        .tables
        .iter()
        .flat_map(|t| &t.rows)
        .flat_map(|r| &r.cells)
        .filter(|c| !c.pass)
        .count();
    println!("{mismatches} mismatching cell(s)");
    Ok(rep.pass())
}

#[allow(clippy::too_many_arguments)]
fn cmd_mesh(
    g: &Global,
    kind: PolyhedronKind,
    degree: usize,
    level: Level,
    subdivisions: usize,
    format: MeshFormat,
    out: &Path,
    with_curvature: bool,
) -> CmdResult {
    let valid = matches!(
        (degree, level),
        (2, Level::G0) | (3, Level::G1) | (3, Level::G2) | (4, Level::G1) | (4, Level::G2)
    );
    if !valid {
        return Err(Failure::usage(format!(
            "invalid combination degree {degree} {level}; valid: 2 G0, 3 G1, 3 G2, 4 G1, 4 G2"
        )));
    }
    let sol = optimal_solution::<f64>(kind, degree, Measure::Radial, g.grid)?;
    let sphere = build_sphere_from_family(kind, &sol.family)?;
    let mesh = tessellate(&sphere, subdivisions, with_curvature)?;
    mesh.write(out, format)?;
    let (rmin, rmax) = mesh.radial_span();
    println!(
        "{kind} degree {degree} {level}: {} vertices, {} triangles, radius [{rmin:.9}, {rmax:.9}], d_r {:.9e}",
        mesh.positions.len(),
        mesh.triangles.len(),
        sol.d_r
    );
    if let Some(k) = &mesh.curvature {
        let (lo, hi) = k
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        println!("vertex K in [{lo:.6}, {hi:.6}]");
    }
    println!("wrote {}", out.display());
    Ok(true)
}

fn read_net(path: &Path) -> std::result::Result<Net, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 3,
        msg: format!("{}: {e}", path.display()),
    })?;
    Net::from_tbnet(&text).map_err(|e| Failure {
        code: 3,
        msg: format!("{}: {e}", path.display()),
    })
}

fn corner_c(net: &Net) -> f64 {
    let v0 = net.corners()[0];
    (v0.x * v0.x + v0.y * v0.y).sqrt()
}

fn parse_reflection(spec: &str, net: &Net) -> std::result::Result<Option<Mat3d>, Failure> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    if spec.eq_ignore_ascii_case("mirror") {
        return Ok(Some(canonical_reflection(corner_c(net))));
    }
    if let Some(v) = spec.strip_prefix("c=") {
        let c: f64 = v.parse().map_err(|_| Failure::usage(format!("bad c value '{v}'")))?;
        return Ok(Some(canonical_reflection(c)));
    }
    if let Ok(kind) = spec.parse::<PolyhedronKind>() {
        return Ok(Some(canonical_reflection(kind.c())));
    }
    let vals: Vec<f64> = spec
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::usage(format!("bad reflection '{spec}'")))?;
    if vals.len() != 9 {
        return Err(Failure::usage(format!(
            "reflection matrix needs 9 entries, got {}",
            vals.len()
        )));
    }
    Ok(Some(Mat3d::from_rows([
        [vals[0], vals[1], vals[2]],
        [vals[3], vals[4], vals[5]],
        [vals[6], vals[7], vals[8]],
    ])))
}

fn cmd_check(
    g: &Global,
    a: &Path,
    b: &Path,
    reflection: &str,
    level: Level,
    gamma: Option<f64>,
    samples: usize,
) -> CmdResult {
    let (net1, net2) = (read_net(a)?, read_net(b)?);
    let r = parse_reflection(reflection, &net1)?;
    let pair = AdjoinedPair::new(net1.clone(), net2, r)?;
    let c = corner_c(&net1);
    let curve: Option<Box<dyn TransversalCurve<f64>>> = match (level, net1.degree()) {
        (Level::G2, 3) => Some(Box::new(CubicTransversal { c })),
        (Level::G2, 4) => {
            let gamma = gamma.unwrap_or_else(|| {
                let [v0, v1, _] = net1.corners();
                net1.get(2, 2, 0).norm() / (v0 + v1).norm()
            });
            Some(Box::new(QuarticTransversal { c, gamma }))
        }
        _ => None,
    };
    let mut cert = check_level(&pair, level, curve.as_deref(), samples);
    if let Some(tol) = g.tol {
        cert.pass = cert.reason.is_none() && cert.max_residual < tol;
    }
    println!("{}", cert.summary());
    for (t, r) in &cert.samples {
        println!("  t {t:+.6} residual {r:.3e}");
    }
    Ok(cert.pass)
}

fn cmd_optimize(g: &Global, kind: PolyhedronKind, degree: usize, measure: Measure) -> CmdResult {
    let sol = optimal_solution::<f64>(kind, degree, measure, g.grid)?;
    println!("kind = {}", sol.kind);
    println!("degree = {}", sol.degree);
    println!("smoothness = {}", sol.smoothness);
    println!("measure = {}", sol.measure);
    for (name, v) in &sol.params {
        println!("{name} = {v:.12}");
    }
    println!("d_r = {:.12e}", sol.d_r);
    println!("provenance = {}", sol.provenance);
    let k = curvature_range(&sol.net(), g.grid.max(128))?;
    println!("K_min = {:.9}", k.k_min);
    println!("K_max = {:.9}", k.k_max);
    Ok(true)
}

fn cmd_errors(g: &Global, path: &Path) -> CmdResult {
    let net = read_net(path)?;
    let rep = extrema_over_delta(&net, g.grid)?;
    print!("{}", rep.to_kv_string());
    Ok(true)
}
