//! Truncated power series for ₁F₁ and ₂F₁ on real arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation controls for the hypergeometric series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Stop once the estimated tail is below `rel_tol * |partial sum|`.
    pub rel_tol: f64,
    pub max_terms: usize,
    /// ₂F₁ refuses non-terminating evaluation for `|z| > 1 - z_margin`.
    pub z_margin: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            rel_tol: 1e-14,
            max_terms: 400,
            z_margin: 0.05,
        }
    }
}

impl SeriesConfig {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let cfg = SeriesConfig {
            rel_tol,
            max_terms,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::Config(format!("series tolerance must be > 0, got {}", self.rel_tol)));
        }
        if self.max_terms < 2 {
            return Err(Error::Config(format!("max_terms must be >= 2, got {}", self.max_terms)));
        }
        if !(0.0..1.0).contains(&self.z_margin) || self.z_margin == 0.0 {
            return Err(Error::Config(format!("z_margin must lie in (0, 1), got {}", self.z_margin)));
        }
        Ok(())
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Sum `sum_k t_k` with `t_0 = 1`, `t_{k+1} = t_k * ratio(k)`.
///
/// `ratio_limit` is `lim |ratio(k)|` and feeds the geometric tail bound.
fn sum_series(ratio: impl Fn(f64) -> f64, ratio_limit: f64, cfg: &SeriesConfig) -> Result<f64> {
    let mut sum = 0.0;
    let mut term = 1.0;
    let mut tail = f64::INFINITY;
    for k in 0..cfg.max_terms {
        sum += term;
        let r = ratio(k as f64);
        let next = term * r;
        if next == 0.0 {
            return Ok(sum);
        }
        let rho = r.abs().max(ratio(k as f64 + 1.0).abs()).max(ratio_limit);
        if rho < 1.0 {
            tail = next.abs() / (1.0 - rho);
            if tail <= cfg.rel_tol * sum.abs() {
                return Ok(sum + next);
            }
        }
        if !next.is_finite() {
            break;
        }
        term = next;
    }
    Err(Error::SeriesNonConvergence {
        terms: cfg.max_terms,
        tail,
    })
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z).
///
/// For negative `z` with a non-terminating series the Kummer transformation
/// `e^z ₁F₁(b-a; b; -z)` is summed instead, so all terms share one sign.
pub fn hyp1f1(a: f64, b: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Argument {
            arg: b,
            reason: "1F1 lower parameter is a nonpositive integer",
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        let s = sum_series(|k| (b - a + k) / (b + k) * (-z) / (k + 1.0), 0.0, cfg)?;
        return Ok(z.exp() * s);
    }
    sum_series(|k| (a + k) / (b + k) * z / (k + 1.0), 0.0, cfg)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for `|z| < 1`.
///
/// Symmetric in `(a, b)` bit for bit: the parameters are put in a canonical
/// order before summation.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Argument {
            arg: c,
            reason: "2F1 lower parameter is a nonpositive integer",
        });
    }
    let (a, b) = if a.total_cmp(&b).is_le() { (a, b) } else { (b, a) };
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if !terminating && z.abs() > 1.0 - cfg.z_margin {
        return Err(Error::Argument {
            arg: z,
            reason: "2F1 argument too close to the unit circle",
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    sum_series(
        |k| (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z,
        z.abs(),
        cfg,
    )
}

/// A hypergeometric function with fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HypKind {
    F11 { a: f64, b: f64 },
    F21 { a: f64, b: f64, c: f64 },
}

impl HypKind {
    pub fn eval(&self, z: f64, cfg: &SeriesConfig) -> Result<f64> {
        match *self {
            HypKind::F11 { a, b } => hyp1f1(a, b, z, cfg),
            HypKind::F21 { a, b, c } => hyp2f1(a, b, c, z, cfg),
        }
    }

    /// Parameters shifted by one, as in `d/dz ₁F₁(a;b;z) = (a/b) ₁F₁(a+1;b+1;z)`.
    pub fn shifted(&self) -> (f64, HypKind) {
        match *self {
            HypKind::F11 { a, b } => (a / b, HypKind::F11 { a: a + 1.0, b: b + 1.0 }),
            HypKind::F21 { a, b, c } => (
                a * b / c,
                HypKind::F21 {
                    a: a + 1.0,
                    b: b + 1.0,
                    c: c + 1.0,
                },
            ),
        }
    }

    /// `d^order/dz^order` via repeated parameter shifts.
    pub fn derivative_n(&self, order: usize, z: f64, cfg: &SeriesConfig) -> Result<f64> {
        let mut factor = 1.0;
        let mut kind = *self;
        for _ in 0..order {
            let (f, next) = kind.shifted();
            if f == 0.0 {
                return Ok(0.0);
            }
            factor *= f;
            kind = next;
        }
        Ok(factor * kind.eval(z, cfg)?)
    }

    /// `(F, F', F'')` at `z`.
    pub fn jet(&self, z: f64, cfg: &SeriesConfig) -> Result<(f64, f64, f64)> {
        Ok((
            self.eval(z, cfg)?,
            self.derivative_n(1, z, cfg)?,
            self.derivative_n(2, z, cfg)?,
        ))
    }
}

/// Analytic first derivative in `z`.
pub fn hyp_derivative(kind: &HypKind, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    kind.derivative_n(1, z, cfg)
}
