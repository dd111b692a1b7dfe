use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bernstein index ({i},{j},{k}) does not sum to degree {n}")]
    IndexMismatch { n: usize, i: usize, j: usize, k: usize },

    #[error("e2 = {0} lies outside [0, 1/3]")]
    OutOfDomain(f64),

    #[error("degenerate normal at (u, v) = ({u}, {v}): |du x dv| = {norm:e}")]
    DegenerateNormal { u: f64, v: f64, norm: f64 },

    #[error("negative radicand: |p|^2 - 1 = {f} < -1 at (u, v) = ({u}, {v})")]
    NegativeRadicand { u: f64, v: f64, f: f64 },

    #[error("non-regular point (u, v) = ({u}, {v}): EG - F^2 = {det:e}")]
    NonRegular { u: f64, v: f64, det: f64 },

    #[error("bisection interval does not bracket a root: residual({lo}) = {r_lo:e}, residual({hi}) = {r_hi:e}")]
    NonBracketing { lo: f64, hi: f64, r_lo: f64, r_hi: f64 },

    #[error("Newton iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("net corners deviate from the canonical triangle by {0:e}")]
    CornerMismatch(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
