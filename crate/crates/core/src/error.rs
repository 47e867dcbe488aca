use std::io;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("lower-set enumeration limited to s <= {max_s} and d <= {max_d} (got s = {s}, d = {d})")]
    EnumerationGuard {
        s: usize,
        d: usize,
        max_s: usize,
        max_d: usize,
    },

    #[error("constraint infeasible: residual floor {floor:.3e} exceeds eta {eta:.3e}")]
    Infeasible { floor: f64, eta: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("design matrix is rank deficient (rank {rank} < {n} columns)")]
    RankDeficient { rank: usize, n: usize },

    #[error("oscillator is not underdamped: gamma^2 = {gamma_sq:.4e} >= 4k = {four_k:.4e}")]
    NotUnderdamped { gamma_sq: f64, four_k: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
