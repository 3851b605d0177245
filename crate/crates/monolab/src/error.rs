use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate domain: total mass is zero or not finite")]
    DegenerateDomain,

    #[error("general position violated: duplicate {axis}-coordinate between points {a} and {b}")]
    GeneralPosition {
        axis: &'static str,
        a: usize,
        b: usize,
    },

    #[error("could not restore general position after {0} redraws")]
    RedrawLimit(usize),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("grid is not doubly increasing near node ({ix}, {iy})")]
    NotMonotone { ix: usize, iy: usize },

    #[error("grid values escape the range [{lo}, {hi}]")]
    RangeViolation { lo: f64, hi: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("root finder failed for {what}: residual {residual} above tolerance")]
    RootFinder { what: &'static str, residual: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
