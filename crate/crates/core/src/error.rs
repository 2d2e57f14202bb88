use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("x = {x} lies outside the domain ({lo}, {hi})")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("argument {arg} is outside the evaluator's domain: {reason}")]
    Argument { arg: f64, reason: &'static str },

    #[error("series did not converge after {terms} terms (last tail estimate {tail:e})")]
    SeriesNonConvergence { terms: usize, tail: f64 },

    #[error("Jacobi P_{n}^({a},{b}) collapses to degree {actual:?}")]
    DegreeCollapse {
        n: usize,
        a: String,
        b: String,
        actual: Option<usize>,
    },

    #[error("deformation function changes sign near x = {near:.6} ({detail})")]
    NodefulDeformation { near: f64, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite value {what} at x = {x}")]
    NumericGuard { what: &'static str, x: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}
