use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate parameter: n={n}, alpha={alpha} lies within {eps:e} of 1/2 or (2n-1)/(2n-2)")]
    DegenerateParameter { n: u32, alpha: Complex64, eps: f64 },
    #[error("numerator and denominator share the root {root}")]
    CommonRoot { root: Complex64 },
    #[error("indeterminate 0/0 at z={z}")]
    Indeterminate { z: Complex64 },
    #[error("z={z} is a pole of the map")]
    PoleAtPoint { z: Complex64 },
    #[error("free critical points undefined: vanishing denominator at alpha={alpha}")]
    DegenerateCriticalPoints { alpha: Complex64 },
    #[error("operation `{op}` is not defined for the {family} family")]
    UnsupportedFamily { op: &'static str, family: String },
    #[error("root finder did not converge: {unconverged} of {} roots unconverged", partial.len())]
    NonConvergence { unconverged: usize, partial: Vec<Complex64> },
    #[error("{root} is not a root (residual {residual:e} exceeds {bound:e})")]
    RootNotPresent { root: Complex64, residual: f64, bound: f64 },
    #[error("anchor pixel outcome is {found}, expected {expected}")]
    AnchorMisclassified { expected: String, found: String },
    #[error("point {point} lies outside the grid window")]
    OutsideWindow { point: Complex64 },
    #[error("window is not symmetric under rotation by 2*pi/{n}")]
    WindowNotSymmetric { n: u32 },
    #[error("sign check failed: S({lo})={s_lo:e}, S({hi})={s_hi:e}")]
    SignCheckFailed { lo: f64, hi: f64, s_lo: f64, s_hi: f64 },
    #[error("non-finite value produced: {0}")]
    NotFinite(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
