//! Laguerre and Jacobi polynomials with exact rational coefficients.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational_poly::{format_rational, int, rat, Poly, Rational};

/// Generalized Laguerre polynomial `L_n^{(alpha)}(t)`.
///
/// Built from `(k+1) L_{k+1} = (2k+1+alpha-t) L_k - (k+alpha) L_{k-1}`.
pub fn laguerre(n: usize, alpha: &Rational) -> Poly {
    let mut prev = Poly::zero();
    let mut cur = Poly::one();
    for k in 0..n {
        let kk = int(k as i64);
        let lin = Poly::linear(&kk * int(2) + int(1) + alpha, int(-1));
        let next = &(&lin * &cur) - &prev.scale(&(&kk + alpha));
        prev = cur;
        cur = next.scale(&(Rational::one() / (kk + int(1))));
    }
    cur
}

/// `L_n^{(alpha)}(-z)` as a polynomial in `z`.
pub fn laguerre_neg_arg(n: usize, alpha: &Rational) -> Poly {
    laguerre(n, alpha).reflect()
}

/// Leading coefficient of `P_n^{(a,b)}`: `(n+a+b+1)_n / (2^n n!)`.
pub fn jacobi_leading(n: usize, a: &Rational, b: &Rational) -> Rational {
    let base = int(n as i64) + a + b + int(1);
    let mut acc = Rational::one();
    for k in 0..n {
        acc *= &base + int(k as i64);
        acc /= int(2 * (k as i64 + 1));
    }
    acc
}

/// Jacobi polynomial `P_n^{(a,b)}(y)`.
///
/// Fails with [`Error::DegreeCollapse`] when the leading coefficient vanishes.
/// Use [`jacobi_unchecked`] to get the lower-degree polynomial anyway.
pub fn jacobi(n: usize, a: &Rational, b: &Rational) -> Result<Poly> {
    let p = jacobi_unchecked(n, a, b);
    if p.degree() != Some(n) {
        return Err(Error::DegreeCollapse {
            n,
            a: format_rational(a),
            b: format_rational(b),
            actual: p.degree(),
        });
    }
    Ok(p)
}

/// Jacobi polynomial without the degree check.
///
/// Uses the three-term recurrence; if one of its divisors vanishes for these
/// parameters it falls back to [`jacobi_binomial_sum`].
pub fn jacobi_unchecked(n: usize, a: &Rational, b: &Rational) -> Poly {
    if n == 0 {
        return Poly::one();
    }
    let ab = a + b;
    let p1 = Poly::linear((a - b) / int(2), (&ab + int(2)) / int(2));
    if n == 1 {
        return p1;
    }
    let divisor_vanishes = (2..=n).any(|k| {
        let k = int(k as i64);
        (&k + &ab).is_zero() || (&k * int(2) + &ab - int(2)).is_zero()
    });
    if divisor_vanishes {
        return jacobi_binomial_sum(n, a, b);
    }
    let a2b2 = a * a - b * b;
    let mut prev = Poly::one();
    let mut cur = p1;
    for k in 2..=n {
        let k = int(k as i64);
        let s = &k * int(2) + &ab;
        // 2k(k+a+b)(2k+a+b-2) P_k = (2k+a+b-1)[(2k+a+b)(2k+a+b-2) y + a^2-b^2] P_{k-1}
        //                            - 2(k+a-1)(k+b-1)(2k+a+b) P_{k-2}
        let lhs = &k * int(2) * (&k + &ab) * (&s - int(2));
        let c1 = &s - int(1);
        let lin = Poly::linear(&c1 * &a2b2, &c1 * &s * (&s - int(2)));
        let c2 = int(2) * (&k + a - int(1)) * (&k + b - int(1)) * &s;
        let next = &(&lin * &cur) - &prev.scale(&c2);
        prev = cur;
        cur = next.scale(&(Rational::one() / lhs));
    }
    cur
}

/// Generalized binomial coefficient `C(r, k)`, polynomial in `r`.
fn binom(r: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= r - int(j as i64);
        acc /= int(j as i64 + 1);
    }
    acc
}

/// `P_n^{(a,b)}(y) = sum_k C(n+a, n-k) C(n+b, k) ((y-1)/2)^k ((y+1)/2)^(n-k)`.
///
/// Valid for every rational `a`, `b`; used as the fallback for the
/// recurrence and as an independent check on it.
pub fn jacobi_binomial_sum(n: usize, a: &Rational, b: &Rational) -> Poly {
    let nn = int(n as i64);
    let minus = Poly::linear(rat(-1, 2), rat(1, 2));
    let plus = Poly::linear(rat(1, 2), rat(1, 2));
    let mut pow_minus = vec![Poly::one()];
    let mut pow_plus = vec![Poly::one()];
    for k in 1..=n {
        pow_minus.push(&pow_minus[k - 1] * &minus);
        pow_plus.push(&pow_plus[k - 1] * &plus);
    }
    (0..=n).fold(Poly::zero(), |acc, k| {
        let c = binom(&(&nn + a), n - k) * binom(&(&nn + b), k);
        let term = (&pow_minus[k] * &pow_plus[n - k]).scale(&c);
        &acc + &term
    })
}

/// Laguerre ODE residual `t L'' + (alpha+1-t) L' + n L`, exact.
pub fn laguerre_ode_residual(n: usize, alpha: &Rational) -> Poly {
    let p = laguerre(n, alpha);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let t = Poly::t();
    let coef = Poly::linear(alpha + int(1), int(-1));
    &(&(&t * &d2) + &(&coef * &d1)) + &p.scale(&int(n as i64))
}

/// Jacobi ODE residual `(1-y^2) P'' + (b-a-(a+b+2) y) P' + n(n+a+b+1) P`, exact.
pub fn jacobi_ode_residual(n: usize, a: &Rational, b: &Rational) -> Poly {
    let p = jacobi_unchecked(n, a, b);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let one_minus_y2 = Poly::from_coeffs(vec![int(1), int(0), int(-1)]);
    let coef = Poly::linear(b - a, -(a + b + int(2)));
    let nn = int(n as i64);
    let lambda = &nn * (&nn + a + b + int(1));
    &(&(&one_minus_y2 * &d2) + &(&coef * &d1)) + &p.scale(&lambda)
}
