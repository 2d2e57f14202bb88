//! Exact rational scalars and dense univariate polynomials over them.
//!
//! Identity certificates are built on [`Poly`]: every coefficient is an exact
//! [`Rational`], so a residual either cancels to the zero polynomial or it
//! does not. Floating point only enters through [`NumPoly`], the evaluation
//! copy used on sample grids.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// `p/q` as a [`Rational`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parse `"p/q"`, an integer, or a finite decimal literal (`"2.75"`,
/// `"-1e-3"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational literal: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// Canonical `"p/q"` text (`"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Dense univariate polynomial with exact rational coefficients.
///
/// `coeffs[k]` multiplies `t^k`. The representation never has a trailing
/// zero coefficient, so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// `c0 + c1 t` from two rationals.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / int(k as i64 + 1)),
        );
        Poly::from_coeffs(coeffs)
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(-t)`.
    pub fn reflect(&self) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `p(q(t))`.
    pub fn compose(&self, q: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * q) + &Poly::constant(c.clone()))
    }

    /// Large coefficient ratio bound on every complex root: `1 + max |c_k / c_n|`.
    pub fn cauchy_root_bound(&self) -> Option<Rational> {
        let lead = self.leading()?.abs();
        let n = self.coeffs.len() - 1;
        let max = self.coeffs[..n]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        Some(Rational::one() + max)
    }

    /// True when every coefficient is strictly positive.
    pub fn all_coeffs_positive(&self) -> bool {
        !self.is_zero() && self.coeffs.iter().all(Signed::is_positive)
    }

    pub fn to_numeric(&self) -> NumPoly {
        NumPoly::new(self.coeffs.iter().map(to_f64).collect())
    }

    fn binary(a: &Poly, b: &Poly, op: impl Fn(&Rational, &Rational) -> Rational) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = Rational::zero();
        Poly::from_coeffs(
            (0..n)
                .map(|k| op(a.coeffs.get(k).unwrap_or(&zero), b.coeffs.get(k).unwrap_or(&zero)))
                .collect(),
        )
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::binary(self, rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::binary(self, rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&a))?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{}*t", format_rational(&a))?,
                (_, true) => write!(f, "t^{k}")?,
                (_, false) => write!(f, "{}*t^{k}", format_rational(&a))?,
            }
        }
        Ok(())
    }
}

/// Floating-point copy of a [`Poly`] for evaluation on sample grids.
#[derive(Clone, Debug, PartialEq)]
pub struct NumPoly {
    coeffs: Vec<f64>,
}

impl NumPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        NumPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_with_derivatives(t).0
    }

    /// `(p(t), p'(t), p''(t))` in one compensated Horner pass.
    ///
    /// Uses error-free transformations (TwoSum/TwoProd via `mul_add`) so the
    /// result is accurate to roughly twice working precision, which keeps the
    /// high-degree Jacobi evaluations near `y = ±1` clean.
    pub fn eval_with_derivatives(&self, t: f64) -> (f64, f64, f64) {
        let Some((&lead, rest)) = self.coeffs.split_last() else {
            return (0.0, 0.0, 0.0);
        };
        // Each accumulator carries (high, low) parts.
        let mut p = (lead, 0.0);
        let mut d1 = (0.0, 0.0);
        let mut d2 = (0.0, 0.0);
        for &c in rest.iter().rev() {
            d2 = comp_step(d2, t, (d1.0, d1.1));
            d1 = comp_step(d1, t, p);
            p = comp_step(p, t, (c, 0.0));
        }
        (p.0 + p.1, d1.0 + d1.1, 2.0 * (d2.0 + d2.1))
    }
}

/// One compensated Horner step: `acc * t + add` with error tracking.
#[inline]
fn comp_step(acc: (f64, f64), t: f64, add: (f64, f64)) -> (f64, f64) {
    let prod = acc.0 * t;
    let prod_err = acc.0.mul_add(t, -prod);
    let sum = prod + add.0;
    let bb = sum - prod;
    let sum_err = (prod - (sum - bb)) + (add.0 - bb);
    let low = acc.1 * t + prod_err + sum_err + add.1;
    let high = sum + low;
    (high, low - (high - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
    }

    #[test]
    fn additive_identity() {
        let q = p(&[3, 0, -2, 7]);
        assert_eq!(&q + &Poly::zero(), q);
    }

    #[test]
    fn hand_expansion_with_half_integers() {
        // (z + g + 3/2)(z + g + 1/2) with g = 3
        let a = Poly::linear(rat(9, 2), int(1));
        let b = Poly::linear(rat(7, 2), int(1));
        let expect = Poly::from_coeffs(vec![rat(63, 4), int(8), int(1)]);
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
        assert!(p(&[5]).derivative().is_zero());
        assert_eq!(p(&[0, 0, 0, 0, 0, 1]).derivative(), Poly::monomial(int(5), 4));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::linear(rat(7, 2), int(1)).eval(&rat(1, 2)), int(4));
        assert_eq!(Poly::zero().eval(&rat(-13, 7)), int(0));
        assert_eq!(p(&[-1, 0, 1]).eval(&int(3)), int(8));
    }

    #[test]
    fn zero_detection() {
        let q = p(&[2, -1, 4]);
        assert!((&q - &q).is_zero());
        assert!(!Poly::t().is_zero());
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_coeffs(vec![int(0), int(0)]).degree(), None);
    }

    #[test]
    fn integral_inverts_derivative() {
        let q = p(&[0, 4, -3, 8]);
        assert_eq!(q.derivative().integral(), q);
    }

    #[test]
    fn reflect_and_compose() {
        let q = p(&[1, 2, 3]);
        assert_eq!(q.reflect(), p(&[1, -2, 3]));
        assert_eq!(q.compose(&p(&[0, -1])), q.reflect());
        // (t+1)^2 composed into 1 + 2t + 3t^2
        let shifted = q.compose(&p(&[1, 1]));
        assert_eq!(shifted, p(&[6, 8, 3]));
    }

    #[test]
    fn cauchy_bound_covers_roots() {
        // roots 2, -3
        let q = p(&[-6, 1, 1]);
        assert!(q.cauchy_root_bound().unwrap() >= int(3));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("5/2").unwrap(), rat(5, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("2.7").unwrap(), rat(27, 10));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("1.5E2").unwrap(), int(150));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [rat(5, 2), int(-3), rat(-7, 9), int(0)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, 0, 1]).to_string(), "-1 + t^2");
        assert_eq!(Poly::from_coeffs(vec![rat(7, 2), int(-1)]).to_string(), "7/2 - t");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn numeric_derivatives_match_exact() {
        let q = Poly::from_coeffs(vec![rat(1, 3), int(-2), rat(5, 7), int(4), rat(-1, 2)]);
        let n = q.to_numeric();
        for &t in &[-1.3, 0.0, 0.4, 2.5] {
            let (v, d1, d2) = n.eval_with_derivatives(t);
            let tr = from_f64(t).unwrap();
            assert!((v - to_f64(&q.eval(&tr))).abs() < 1e-12);
            assert!((d1 - to_f64(&q.derivative().eval(&tr))).abs() < 1e-12);
            assert!((d2 - to_f64(&q.derivative().derivative().eval(&tr))).abs() < 1e-12);
        }
        assert_eq!(NumPoly::new(vec![]).eval_with_derivatives(2.0), (0.0, 0.0, 0.0));
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec((-9i64..=9, 1i64..=5), 0..6).prop_map(|cs| {
            Poly::from_coeffs(cs.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    proptest! {
        #[test]
        fn distributive(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        }

        #[test]
        fn leibniz_rule(a in small_poly(), b in small_poly()) {
            let lhs = (&a * &b).derivative();
            let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), n in -7i64..7, d in 1i64..6) {
            let x = rat(n, d);
            prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
            prop_assert_eq!((&a - &b).eval(&x), a.eval(&x) - b.eval(&x));
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        }

        #[test]
        fn canonical_form_is_idempotent(a in small_poly(), b in small_poly()) {
            let r = &a * &b;
            prop_assert_eq!(Poly::from_coeffs(r.coeffs().to_vec()), r.clone());
            prop_assert!(r.coeffs().last().is_none_or(|c| !c.is_zero()));
        }

        #[test]
        fn degree_of_product(a in small_poly(), b in small_poly()) {
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!((&a * &b).degree(), Some(da + db));
            }
            let s = &a + &b;
            prop_assert!(s.degree() <= a.degree().max(b.degree()));
        }
    }
}
