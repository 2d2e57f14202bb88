//! Special functions: classical orthogonal polynomials as exact [`Poly`](crate::Poly)
//! values, and the hypergeometric and Gamma evaluators used by the
//! continuous-index families.

mod gamma;
mod hypergeometric;
mod orthopoly;

pub use gamma::gamma_ratio;
pub use hypergeometric::{hyp1f1, hyp2f1, hyp_derivative, HypKind, SeriesConfig};
pub use orthopoly::{
    jacobi, jacobi_binomial_sum, jacobi_leading, jacobi_ode_residual, jacobi_unchecked,
    laguerre, laguerre_neg_arg, laguerre_ode_residual,
};
