//! Parameter sweeps shared by the integration tests.

#![allow(dead_code)]

use shapeinv::rational_poly::{int, rat, Rational};
use shapeinv::{Family, Params};

/// Highest integer deformation degree in the sweeps.
pub const MAX_L: i64 = 8;

/// Four couplings inside the validity window `g ≥ 3/2`.
pub fn g_grid() -> Vec<Rational> {
    vec![int(2), rat(5, 2), int(3), rat(7, 2)]
}

/// Four trigonometric `h` values inside `h ≥ 3/2`.
pub fn trig_h_grid() -> Vec<Rational> {
    vec![rat(7, 4), rat(9, 4), rat(11, 4), rat(13, 4)]
}

/// Four hyperbolic `h` values above `max(l + 3/2, 2l)`.
pub fn hyp_h_grid(l: i64) -> Vec<Rational> {
    let base = std::cmp::max(rat(2 * l + 3, 2), int(2 * l));
    [rat(1, 3), rat(2, 3), rat(4, 3), rat(5, 3)].into_iter().map(|d| &base + &d).collect()
}

/// Every `(family, params)` of the exact sweep for one polynomial family.
pub fn polynomial_sweep(family: Family) -> Vec<Params> {
    let mut out = Vec::new();
    for l in 0..=MAX_L {
        for g in g_grid() {
            match family {
                Family::RadialOscillator => out.push(Params::gl(g, int(l))),
                Family::TrigDpt => {
                    out.extend(trig_h_grid().into_iter().map(|h| Params::ghl(g.clone(), h, int(l))));
                }
                Family::HypDpt => {
                    out.extend(hyp_h_grid(l).into_iter().map(|h| Params::ghl(g.clone(), h, int(l))));
                }
                _ => unreachable!("not a polynomial family"),
            }
        }
    }
    out
}

/// All polynomial-family sweep points.
pub fn full_polynomial_sweep() -> Vec<(Family, Params)> {
    Family::POLYNOMIAL
        .iter()
        .flat_map(|&f| polynomial_sweep(f).into_iter().map(move |p| (f, p)))
        .collect()
}

/// Non-integer degrees for the series-backed families.
pub fn continuous_sweep() -> Vec<(Family, Params)> {
    let mut out = Vec::new();
    for l in [rat(1, 2), rat(3, 2), rat(27, 10)] {
        out.push((Family::RadialOscillatorContL, Params::gl(int(3), l.clone())));
        out.push((Family::TrigDptContL, Params::ghl(int(3), int(4), l)));
    }
    out
}
