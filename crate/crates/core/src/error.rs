// src/error.rs
//
// Error type shared by every operation in the crate.

use std::fmt;

/// Everything that can go wrong in this crate.
///
/// `Config` covers rejected parameter values (nonpositive ε, bad fractions,
/// incompatible jump states), `Grid` covers shape/domain mismatches, `Solver`
/// covers ODE-integration and line-search failures, and `Span` is the
/// specific "profile was not integrated far enough" condition, which callers
/// may want to retry with a larger `t_max`.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Config(String),
    Grid(String),
    Solver(String),
    Span(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Grid(msg) => write!(f, "grid error: {msg}"),
            Error::Solver(msg) => write!(f, "solver error: {msg}"),
            Error::Span(msg) => write!(f, "span error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
