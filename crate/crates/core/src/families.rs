//! The five extended families: radial oscillator, trigonometric and
//! hyperbolic Darboux–Pöschl–Teller (polynomial deformations) and the
//! continuous-index radial oscillator and trigonometric DPT (hypergeometric
//! deformations).
//!
//! Each family supplies a classical superpotential `W0` evaluated at shifted
//! couplings, a pair of deformation functions `ψ±` whose logarithmic
//! derivatives are added to and subtracted from `W0`, and the parameter
//! translation `f(a)` that links `ψ-` at `a` to `ψ+` at `f(a)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational_poly::{format_rational, from_f64, int, parse_rational, rat, to_f64, NumPoly, Poly, Rational};
use crate::specfun::{gamma_ratio, jacobi, laguerre_neg_arg, HypKind, SeriesConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RadialOscillator,
    TrigDpt,
    HypDpt,
    RadialOscillatorContL,
    TrigDptContL,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::RadialOscillator,
        Family::TrigDpt,
        Family::HypDpt,
        Family::RadialOscillatorContL,
        Family::TrigDptContL,
    ];

    pub const POLYNOMIAL: [Family; 3] = [Family::RadialOscillator, Family::TrigDpt, Family::HypDpt];

    pub fn name(self) -> &'static str {
        match self {
            Family::RadialOscillator => "radial-oscillator",
            Family::TrigDpt => "trig-dpt",
            Family::HypDpt => "hyp-dpt",
            Family::RadialOscillatorContL => "radial-oscillator-contl",
            Family::TrigDptContL => "trig-dpt-contl",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            Family::TrigDpt | Family::TrigDptContL => Domain::new(0.0, FRAC_PI_2),
            _ => Domain::new(0.0, f64::INFINITY),
        }
    }

    pub fn is_polynomial(self) -> bool {
        matches!(self, Family::RadialOscillator | Family::TrigDpt | Family::HypDpt)
    }

    pub fn has_h(self) -> bool {
        !matches!(self, Family::RadialOscillator | Family::RadialOscillatorContL)
    }

    /// Variable in which the polynomial deformations are written.
    pub fn substitution(self) -> Substitution {
        match self {
            Family::RadialOscillator | Family::RadialOscillatorContL => Substitution::Square,
            Family::TrigDpt | Family::TrigDptContL => Substitution::Cos2x,
            Family::HypDpt => Substitution::Cosh2x,
        }
    }

    /// The remainder `R(f(a))` of the shape-invariance relation.
    ///
    /// Obtained by expanding the base relation for `W0` in the `1/x^2`
    /// (resp. `cot^2`, `tan^2` / `coth^2`, `tanh^2`) basis.
    pub fn expected_remainder(self, p: &Params) -> f64 {
        let (g, h, l) = (p.g_f64(), p.h_f64(), p.l_f64());
        match self {
            Family::RadialOscillator | Family::RadialOscillatorContL => -4.0,
            Family::TrigDpt | Family::TrigDptContL => -4.0 * (g + h + 2.0 * l - 1.0),
            Family::HypDpt => 4.0 * (g - h + 2.0 * l - 1.0),
        }
    }

    /// The conservative parameter window in which deformations are expected
    /// to be nodeless. Outside it construction still works if the node scan
    /// passes.
    pub fn in_default_window(self, p: &Params) -> bool {
        let three_halves = rat(3, 2);
        let g_ok = p.g >= three_halves;
        match self {
            Family::RadialOscillator | Family::RadialOscillatorContL => g_ok,
            Family::TrigDpt | Family::TrigDptContL => g_ok && *p.h() >= three_halves,
            Family::HypDpt => g_ok && *p.h() >= &p.l + three_halves,
        }
    }

    /// Checks the structural constraints on `p` for this family.
    pub fn check_params(self, p: &Params) -> Result<()> {
        if self.has_h() != p.h.is_some() {
            return Err(Error::InvalidParams(if self.has_h() {
                format!("{} needs a value for h", self.name())
            } else {
                format!("{} takes no h parameter", self.name())
            }));
        }
        if p.l.is_negative() {
            return Err(Error::InvalidParams(format!("l must be >= 0, got {}", format_rational(&p.l))));
        }
        if self.is_polynomial() && !p.l.is_integer() {
            return Err(Error::InvalidParams(format!(
                "{} needs an integer l, got {}",
                self.name(),
                format_rational(&p.l)
            )));
        }
        if !self.is_polynomial() && !p.l.is_positive() {
            return Err(Error::InvalidParams(format!("{} needs l > 0", self.name())));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "radial-oscillator" | "ro" => Ok(Family::RadialOscillator),
            "trig-dpt" | "tpt" => Ok(Family::TrigDpt),
            "hyp-dpt" | "hpt" => Ok(Family::HypDpt),
            "radial-oscillator-contl" | "ro-contl" => Ok(Family::RadialOscillatorContL),
            "trig-dpt-contl" | "tpt-contl" => Ok(Family::TrigDptContL),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// Open interval `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Self {
        Domain { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// Parameter tuple `a = (g, h, l)`.
///
/// Values are stored exactly. Continuous families read them as doubles, so
/// a decimal literal like `2.7` behaves as the double nearest to it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub g: Rational,
    pub h: Option<Rational>,
    pub l: Rational,
}

impl Params {
    pub fn new(g: Rational, h: Option<Rational>, l: Rational) -> Self {
        Params { g, h, l }
    }

    /// Radial-oscillator style parameters `(g, l)`.
    pub fn gl(g: Rational, l: Rational) -> Self {
        Params { g, h: None, l }
    }

    pub fn ghl(g: Rational, h: Rational, l: Rational) -> Self {
        Params { g, h: Some(h), l }
    }

    /// `h`, or zero when the family has none.
    pub fn h(&self) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        self.h.as_ref().unwrap_or_else(|| ZERO.get_or_init(Rational::zero))
    }

    pub fn g_f64(&self) -> f64 {
        to_f64(&self.g)
    }

    pub fn h_f64(&self) -> f64 {
        self.h.as_ref().map_or(0.0, to_f64)
    }

    pub fn l_f64(&self) -> f64 {
        to_f64(&self.l)
    }

    /// `l` as a degree, when it is a nonnegative integer.
    pub fn degree(&self) -> Option<usize> {
        if self.l.is_integer() && !self.l.is_negative() {
            num_traits::ToPrimitive::to_usize(self.l.numer())
        } else {
            None
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={}", format_rational(&self.g))?;
        if let Some(h) = &self.h {
            write!(f, " h={}", format_rational(h))?;
        }
        write!(f, " l={}", format_rational(&self.l))
    }
}

/// A family together with a point of its parameter space, with the
/// canonical text form `family=trig-dpt g=3 h=4 l=2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyPoint {
    pub family: Family,
    pub params: Params,
}

impl FamilyPoint {
    pub fn new(family: Family, params: Params) -> Result<Self> {
        family.check_params(&params)?;
        Ok(FamilyPoint { family, params })
    }
}

impl fmt::Display for FamilyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={} {}", self.family, self.params)
    }
}

impl FromStr for FamilyPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (mut family, mut g, mut h, mut l) = (None, None, None, None);
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {token:?}")))?;
            match key {
                "family" => family = Some(value.parse::<Family>()?),
                "g" => g = Some(parse_rational(value)?),
                "h" => h = Some(parse_rational(value)?),
                "l" => l = Some(parse_rational(value)?),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let family = family.ok_or_else(|| Error::Parse("missing family=".into()))?;
        let g = g.ok_or_else(|| Error::Parse("missing g=".into()))?;
        let l = l.ok_or_else(|| Error::Parse("missing l=".into()))?;
        FamilyPoint::new(family, Params::new(g, h, l))
    }
}

/// Value and first two derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const ONE: Jet = Jet {
        value: 1.0,
        d1: 0.0,
        d2: 0.0,
    };

    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }

    /// `ψ'/ψ`.
    pub fn log_d1(&self) -> f64 {
        self.d1 / self.value
    }

    /// `d/dx (ψ'/ψ) = ψ''/ψ - (ψ'/ψ)^2`.
    pub fn log_d1_prime(&self) -> f64 {
        let r = self.log_d1();
        self.d2 / self.value - r * r
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

type ScalarEval = dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync;

/// A real function on a domain together with its analytic derivative.
#[derive(Clone)]
pub struct ScalarFn {
    domain: Domain,
    f: Arc<ScalarEval>,
}

impl ScalarFn {
    pub fn new(domain: Domain, f: impl Fn(f64) -> Result<(f64, f64)> + Send + Sync + 'static) -> Self {
        ScalarFn {
            domain,
            f: Arc::new(f),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `(f(x), f'(x))`.
    pub fn eval_with_derivative(&self, x: f64) -> Result<(f64, f64)> {
        self.domain.check(x)?;
        let (v, d) = (self.f)(x)?;
        if !v.is_finite() || !d.is_finite() {
            return Err(Error::NumericGuard { what: "scalar function", x });
        }
        Ok((v, d))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.eval_with_derivative(x)?.0)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval_with_derivative(x)?.1)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn").field("domain", &self.domain).finish_non_exhaustive()
    }
}

/// Change of variable under which the deformation becomes a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Substitution {
    /// `z = x^2`
    Square,
    /// `y = cos 2x`
    Cos2x,
    /// `y = cosh 2x`
    Cosh2x,
}

impl Substitution {
    pub fn map(self, x: f64) -> f64 {
        match self {
            Substitution::Square => x * x,
            Substitution::Cos2x => (2.0 * x).cos(),
            Substitution::Cosh2x => (2.0 * x).cosh(),
        }
    }

    pub fn d1(self, x: f64) -> f64 {
        match self {
            Substitution::Square => 2.0 * x,
            Substitution::Cos2x => -2.0 * (2.0 * x).sin(),
            Substitution::Cosh2x => 2.0 * (2.0 * x).sinh(),
        }
    }

    pub fn d2(self, _x: f64) -> f64 {
        match self {
            Substitution::Square => 2.0,
            Substitution::Cos2x => -4.0 * (2.0 * _x).cos(),
            Substitution::Cosh2x => 4.0 * (2.0 * _x).cosh(),
        }
    }

    /// Forward map paired with its derivative.
    pub fn map_with_derivative(self, x: f64) -> (f64, f64) {
        (self.map(x), self.d1(x))
    }
}

/// Argument fed to the hypergeometric series of a continuous family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SeriesArgument {
    /// `u = -x^2`
    NegSquare,
    /// `u = (1 - cos 2x)/2 = sin^2 x`
    SinSquared,
}

impl SeriesArgument {
    fn jet(self, x: f64) -> (f64, f64, f64) {
        match self {
            SeriesArgument::NegSquare => (-x * x, -2.0 * x, -2.0),
            SeriesArgument::SinSquared => {
                let s = x.sin();
                (s * s, (2.0 * x).sin(), 2.0 * (2.0 * x).cos())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// Classical superpotential `W0` at the family's shifted couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseSuperpotential {
    pub family: Family,
    /// Coefficient of `1/x`, `cot x` or `coth x`.
    pub g_eff: f64,
    /// Coefficient of `-tan x` or `-tanh x`.
    pub h_eff: f64,
}

impl BaseSuperpotential {
    pub fn new(family: Family, p: &Params) -> Self {
        let (g, h, l) = (p.g_f64(), p.h_f64(), p.l_f64());
        let (g_eff, h_eff) = match family {
            Family::RadialOscillator | Family::RadialOscillatorContL => (g + l, 0.0),
            Family::TrigDpt | Family::TrigDptContL => (g + l, h + l),
            Family::HypDpt => (g + l, h - l),
        };
        BaseSuperpotential { family, g_eff, h_eff }
    }

    /// `(W0, W0', W0'')`
    pub fn jet(&self, x: f64) -> Result<Jet> {
        self.family.domain().check(x)?;
        let (g, h) = (self.g_eff, self.h_eff);
        let jet = match self.family {
            Family::RadialOscillator | Family::RadialOscillatorContL => {
                Jet::new(-x + g / x, -1.0 - g / (x * x), 2.0 * g / (x * x * x))
            }
            Family::TrigDpt | Family::TrigDptContL => {
                let (c, t) = (1.0 / x.tan(), x.tan());
                let csc2 = 1.0 + c * c;
                let sec2 = 1.0 + t * t;
                Jet::new(g * c - h * t, -g * csc2 - h * sec2, 2.0 * g * csc2 * c - 2.0 * h * sec2 * t)
            }
            Family::HypDpt => {
                let (c, t) = (1.0 / x.tanh(), x.tanh());
                let csch2 = c * c - 1.0;
                let sech2 = 1.0 - t * t;
                Jet::new(g * c - h * t, -g * csch2 - h * sech2, 2.0 * g * csch2 * c + 2.0 * h * sech2 * t)
            }
        };
        Ok(jet)
    }

    pub fn to_scalar_fn(&self) -> ScalarFn {
        let w0 = *self;
        ScalarFn::new(self.family.domain(), move |x| {
            let j = w0.jet(x)?;
            Ok((j.value, j.d1))
        })
    }
}

/// `W0(x, a)` as a [`ScalarFn`].
pub fn base_superpotential(family: Family, p: &Params) -> Result<ScalarFn> {
    family.check_params(p)?;
    Ok(BaseSuperpotential::new(family, p).to_scalar_fn())
}

/// Classical polynomial behind a polynomial deformation.
#[derive(Clone, Copy, Debug, PartialEq)]
enum PolyOde {
    Laguerre { n: f64, alpha: f64 },
    Jacobi { n: f64, a: f64, b: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Polynomial {
        exact: Poly,
        numeric: NumPoly,
        sub: Substitution,
        ode: PolyOde,
    },
    Series {
        kind: HypKind,
        arg: SeriesArgument,
        cfg: SeriesConfig,
    },
    Shifted {
        base: Box<Deformation>,
        delta: f64,
    },
    Gauged {
        base: Box<Deformation>,
        antiderivative: NumPoly,
        gauge: NumPoly,
    },
}

/// One deformation branch `ψ±(x, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub family: Family,
    pub branch: Branch,
    /// Γ-ratio prefactor of `ξ_l`; 1 for the polynomial families.
    pub normalization: f64,
    repr: Repr,
}

impl Deformation {
    /// `(ψ, ψ', ψ'')` at `x`.
    pub fn jet(&self, x: f64) -> Result<Jet> {
        self.family.domain().check(x)?;
        let jet = self.raw_jet(x)?;
        if !jet.is_finite() {
            return Err(Error::NumericGuard { what: "deformation", x });
        }
        Ok(jet)
    }

    fn raw_jet(&self, x: f64) -> Result<Jet> {
        match &self.repr {
            Repr::Polynomial { numeric, sub, .. } => {
                let t = sub.map(x);
                let (p, d1, d2) = numeric.eval_with_derivatives(t);
                let (s1, s2) = (sub.d1(x), sub.d2(x));
                Ok(Jet::new(p, d1 * s1, d2 * s1 * s1 + d1 * s2))
            }
            Repr::Series { kind, arg, cfg } => {
                let (u, u1, u2) = arg.jet(x);
                let (f, f1, f2) = kind.jet(u, cfg)?;
                Ok(Jet::new(f, f1 * u1, f2 * u1 * u1 + f1 * u2))
            }
            Repr::Shifted { base, delta } => {
                let j = base.raw_jet(x)?;
                Ok(Jet::new(j.value + delta, j.d1, j.d2))
            }
            Repr::Gauged {
                base,
                antiderivative,
                gauge,
            } => {
                let j = base.raw_jet(x)?;
                let e = antiderivative.eval(x).exp();
                let (g, g1, _) = gauge.eval_with_derivatives(x);
                Ok(Jet::new(
                    e * j.value,
                    e * (g * j.value + j.d1),
                    e * ((g1 + g * g) * j.value + 2.0 * g * j.d1 + j.d2),
                ))
            }
        }
    }

    /// `W1± = ψ'/ψ` with its derivative.
    pub fn log_derivative(&self, x: f64) -> Result<(f64, f64)> {
        let j = self.jet(x)?;
        Ok((j.log_d1(), j.log_d1_prime()))
    }

    pub fn to_scalar_fn(&self) -> ScalarFn {
        let this = self.clone();
        ScalarFn::new(self.family.domain(), move |x| {
            let j = this.jet(x)?;
            Ok((j.value, j.d1))
        })
    }

    /// Residual of the second-order relation satisfied by `ψ`, divided by `ψ`.
    ///
    /// Radial: `ψ'' + 2((α+1/2)/x + x) ψ' - 4n ψ`. Trigonometric:
    /// `ψ'' + 2((a+1/2) cot x - (b+1/2) tan x) ψ' + 4λ ψ`. Hyperbolic:
    /// `ψ'' + 2((a+1/2) coth x + (b+1/2) tanh x) ψ' - 4λ ψ`, with
    /// `λ = n(n+a+b+1)`. The hypergeometric branches use the Kummer and
    /// Gauss equations pulled back to `x`.
    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        let j = self.jet(x)?;
        let (psi, d1, d2) = (j.value, j.d1, j.d2);
        let r = match &self.repr {
            Repr::Polynomial { ode, sub, .. } => match (*ode, *sub) {
                (PolyOde::Laguerre { n, alpha }, _) => d2 + 2.0 * ((alpha + 0.5) / x + x) * d1 - 4.0 * n * psi,
                (PolyOde::Jacobi { n, a, b }, Substitution::Cos2x) => {
                    let lambda = n * (n + a + b + 1.0);
                    d2 + 2.0 * ((a + 0.5) / x.tan() - (b + 0.5) * x.tan()) * d1 + 4.0 * lambda * psi
                }
                (PolyOde::Jacobi { n, a, b }, _) => {
                    let lambda = n * (n + a + b + 1.0);
                    d2 + 2.0 * ((a + 0.5) / x.tanh() + (b + 0.5) * x.tanh()) * d1 - 4.0 * lambda * psi
                }
            },
            Repr::Series {
                kind: HypKind::F11 { a, b },
                ..
            } => d2 + 2.0 * ((b - 0.5) / x + x) * d1 + 4.0 * a * psi,
            Repr::Series {
                kind: HypKind::F21 { a, b, c },
                ..
            } => {
                let coef = (1.0 - 2.0 * c) / x.tan() + (2.0 * a + 2.0 * b + 1.0 - 2.0 * c) * x.tan();
                d2 - coef * d1 - 4.0 * a * b * psi
            }
            Repr::Shifted { .. } | Repr::Gauged { .. } => {
                return Err(Error::Config("modified deformations satisfy no stored ODE".into()))
            }
        };
        Ok(r / psi)
    }

    /// `ξ_l` itself, including the Γ-ratio prefactor.
    pub fn xi(&self, x: f64) -> Result<f64> {
        Ok(self.normalization * self.jet(x)?.value)
    }

    /// Exact polynomial in the substitution variable, for polynomial families.
    pub fn exact_poly(&self) -> Option<&Poly> {
        match &self.repr {
            Repr::Polynomial { exact, .. } => Some(exact),
            _ => None,
        }
    }

    /// `ψ + delta`; breaks the pairing between branches.
    pub fn shifted_by(&self, delta: f64) -> Deformation {
        Deformation {
            repr: Repr::Shifted {
                base: Box::new(self.clone()),
                delta,
            },
            ..self.clone()
        }
    }

    /// `χ = exp(∫gauge) ψ`, so that `χ'/χ = ψ'/ψ + gauge(x)`.
    pub fn gauged(&self, gauge: &Poly) -> Deformation {
        Deformation {
            repr: Repr::Gauged {
                base: Box::new(self.clone()),
                antiderivative: gauge.integral().to_numeric(),
                gauge: gauge.to_numeric(),
            },
            ..self.clone()
        }
    }

    /// Scans for a sign change of `ψ` over the family domain.
    pub fn check_nodeless(&self) -> Result<()> {
        if let Repr::Polynomial { exact, sub, .. } = &self.repr {
            return check_poly_nodeless(exact, *sub);
        }
        if let Repr::Shifted { base, delta } = &self.repr {
            if let (Repr::Polynomial { exact, sub, .. }, Some(d)) = (&base.repr, from_f64(*delta)) {
                return check_poly_nodeless(&(exact + &Poly::constant(d)), *sub);
            }
        }
        if let Repr::Series {
            kind: HypKind::F11 { b, .. },
            arg: SeriesArgument::NegSquare,
            ..
        } = self.repr
        {
            // e^{-z} 1F1(b+l; b; z) has positive terms for b > 0
            if b > 0.0 {
                return Ok(());
            }
        }
        let domain = self.family.domain();
        let hi = if domain.hi.is_finite() {
            self.evaluable_upper(domain.hi)
        } else {
            8.0
        };
        scan_sign(|x| Ok(self.jet(x)?.value), domain.lo, hi, 2000).map_err(|near| {
            Error::NodefulDeformation {
                near,
                detail: format!("{} branch of {}", branch_name(self.branch), self.family),
            }
        })?;
        if let Repr::Series {
            kind: HypKind::F21 { a, b, c },
            ..
        } = self.repr
        {
            // sign at z = 1 from Gauss's summation theorem
            if c - a - b > 0.0 {
                let at_one = gamma_ratio(&[c, c - a - b], &[c - a, c - b])?;
                let inside = self.jet(0.5 * hi)?.value;
                if at_one.signum() != inside.signum() {
                    return Err(Error::NodefulDeformation {
                        near: FRAC_PI_2,
                        detail: "sign flips before the right endpoint".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest `x` below `hi` where the series argument stays evaluable.
    fn evaluable_upper(&self, hi: f64) -> f64 {
        match self.repr {
            Repr::Series {
                arg: SeriesArgument::SinSquared,
                cfg,
                ..
            } => trig_series_upper(&cfg).min(hi),
            _ => hi,
        }
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    }
}

/// Largest `x` with `sin^2 x <= 1 - margin`, slightly inset.
pub fn trig_series_upper(cfg: &SeriesConfig) -> f64 {
    (1.0 - cfg.z_margin).sqrt().asin() * (1.0 - 1e-12)
}

/// Returns `Err(x)` near the first sign change or non-finite sample.
fn scan_sign(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, n: usize) -> std::result::Result<(), f64> {
    let mut sign = 0.0;
    for i in 0..n {
        let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let v = f(x).map_err(|_| x)?;
        if !v.is_finite() || v == 0.0 {
            return Err(x);
        }
        if sign == 0.0 {
            sign = v.signum();
        } else if v.signum() != sign {
            return Err(x);
        }
    }
    Ok(())
}

/// Nodelessness of `P(t(x))` on the family domain, checked in `t`.
fn check_poly_nodeless(p: &Poly, sub: Substitution) -> Result<()> {
    let Some(deg) = p.degree() else {
        return Err(Error::NodefulDeformation {
            near: 0.0,
            detail: "deformation is identically zero".into(),
        });
    };
    if deg == 0 {
        return Ok(());
    }
    let numeric = p.to_numeric();
    let fail = |t: f64, detail: &str| Error::NodefulDeformation {
        near: sub_inverse(sub, t),
        detail: detail.to_string(),
    };
    match sub {
        Substitution::Square => {
            if p.all_coeffs_positive() {
                return Ok(());
            }
            let bound = to_f64(&p.cauchy_root_bound().expect("nonzero")).max(1.0);
            if p.coeff(0).is_zero() {
                return Err(fail(0.0, "vanishes at the origin"));
            }
            scan_t(&numeric, 0.0, bound, true).map_err(|t| fail(t, "sign change in z"))
        }
        Substitution::Cos2x => {
            let end_sign = |t: &Rational| p.eval(t).signum();
            let (left, right) = (end_sign(&int(-1)), end_sign(&int(1)));
            if left != right || left.is_zero() {
                return Err(fail(0.0, "opposite signs at y = ±1"));
            }
            scan_t(&numeric, -1.0, 1.0, false).map_err(|t| fail(t, "sign change in y"))
        }
        Substitution::Cosh2x => {
            let at_one = p.eval(&Rational::one()).signum();
            let lead = p.leading().expect("nonzero").signum();
            if at_one != lead || at_one.is_zero() {
                return Err(fail(1.0, "sign at y = 1 differs from sign at infinity"));
            }
            let bound = to_f64(&p.cauchy_root_bound().expect("nonzero")).max(2.0);
            scan_t(&numeric, 1.0, bound, true).map_err(|t| fail(t, "sign change in y"))
        }
    }
}

/// Dense sign scan of a polynomial in its own variable.
///
/// `geometric` spaces samples geometrically away from `lo`, which resolves
/// roots clustered near the endpoint.
fn scan_t(p: &NumPoly, lo: f64, hi: f64, geometric: bool) -> std::result::Result<(), f64> {
    const N: usize = 8000;
    let span = hi - lo;
    let sample = |i: usize| {
        let s = (i as f64 + 0.5) / N as f64;
        if geometric {
            lo + span * (1e-12f64).powf(1.0 - s)
        } else {
            lo + span * s
        }
    };
    let mut sign = 0.0;
    for i in 0..N {
        let t = sample(i);
        let v = p.eval(t);
        if v == 0.0 || !v.is_finite() {
            return Err(t);
        }
        if sign == 0.0 {
            sign = v.signum();
        } else if v.signum() != sign {
            return Err(t);
        }
    }
    Ok(())
}

fn sub_inverse(sub: Substitution, t: f64) -> f64 {
    match sub {
        Substitution::Square => t.max(0.0).sqrt(),
        Substitution::Cos2x => 0.5 * t.clamp(-1.0, 1.0).acos(),
        Substitution::Cosh2x => 0.5 * t.max(1.0).acosh(),
    }
}

/// Couplings `(g, h)` entering `ξ_l` on the given branch.
fn branch_couplings(family: Family, p: &Params, branch: Branch) -> (Rational, Rational) {
    let (g, h) = (p.g.clone(), p.h().clone());
    match (family, branch) {
        (_, Branch::Minus) => (g, h),
        (Family::HypDpt, Branch::Plus) => (g + int(1), h - int(1)),
        (_, Branch::Plus) => (g + int(1), h + int(1)),
    }
}

/// Γ(g+2l-1/2) / (Γ(l+1) Γ(g+l-1/2))
fn xi_normalization(g: f64, l: f64) -> Result<f64> {
    gamma_ratio(&[g + 2.0 * l - 0.5], &[l + 1.0, g + l - 0.5])
}

/// Builds the unvalidated deformation for `branch` using the given series settings.
pub fn deformation_with(family: Family, p: &Params, branch: Branch, cfg: &SeriesConfig) -> Result<Deformation> {
    family.check_params(p)?;
    let (gb, hb) = branch_couplings(family, p, branch);
    let half = rat(1, 2);
    let three_halves = rat(3, 2);
    let (repr, normalization) = match family {
        Family::RadialOscillator => {
            let n = p.degree().expect("checked integer l");
            let alpha = &gb + &p.l - &three_halves;
            let exact = laguerre_neg_arg(n, &alpha);
            let ode = PolyOde::Laguerre {
                n: n as f64,
                alpha: to_f64(&alpha),
            };
            (poly_repr(exact, Substitution::Square, ode), 1.0)
        }
        Family::TrigDpt => {
            let n = p.degree().expect("checked integer l");
            let a = -(&gb) - &p.l - &half;
            let b = &hb + &p.l - &three_halves;
            let ode = jacobi_ode(n, &a, &b);
            (poly_repr(jacobi(n, &a, &b)?, Substitution::Cos2x, ode), 1.0)
        }
        Family::HypDpt => {
            let n = p.degree().expect("checked integer l");
            let a = -(&gb) - &p.l - &half;
            let b = -(&hb) + &p.l - &three_halves;
            let ode = jacobi_ode(n, &a, &b);
            (poly_repr(jacobi(n, &a, &b)?, Substitution::Cosh2x, ode), 1.0)
        }
        Family::RadialOscillatorContL => {
            let (g, l) = (to_f64(&gb), p.l_f64());
            let kind = HypKind::F11 { a: -l, b: g + l - 0.5 };
            let repr = Repr::Series {
                kind,
                arg: SeriesArgument::NegSquare,
                cfg: *cfg,
            };
            (repr, xi_normalization(g, l)?)
        }
        Family::TrigDptContL => {
            let (g, h, l) = (to_f64(&gb), to_f64(&hb), p.l_f64());
            let kind = HypKind::F21 {
                a: -l,
                b: g - h + l - 1.0,
                c: g + l - 0.5,
            };
            let repr = Repr::Series {
                kind,
                arg: SeriesArgument::SinSquared,
                cfg: *cfg,
            };
            (repr, xi_normalization(g, l)?)
        }
    };
    Ok(Deformation {
        family,
        branch,
        normalization,
        repr,
    })
}

fn poly_repr(exact: Poly, sub: Substitution, ode: PolyOde) -> Repr {
    Repr::Polynomial {
        numeric: exact.to_numeric(),
        exact,
        sub,
        ode,
    }
}

fn jacobi_ode(n: usize, a: &Rational, b: &Rational) -> PolyOde {
    PolyOde::Jacobi {
        n: n as f64,
        a: to_f64(a),
        b: to_f64(b),
    }
}

/// `ψ±(x, a)`, validated nodeless on the family domain.
pub fn deformation(family: Family, p: &Params, branch: Branch) -> Result<Deformation> {
    deformation_checked(family, p, branch, &SeriesConfig::default())
}

pub fn deformation_checked(family: Family, p: &Params, branch: Branch, cfg: &SeriesConfig) -> Result<Deformation> {
    let d = deformation_with(family, p, branch, cfg)?;
    d.check_nodeless()?;
    Ok(d)
}

/// The translation `f(a)`.
///
/// RO: `g -> g-1`; trigonometric: `(g, h) -> (g-1, h-1)`; hyperbolic:
/// `(g, h) -> (g-1, h+1)`; `l` is unchanged. The shifted point must still
/// carry nodeless deformations.
pub fn parameter_shift(family: Family, p: &Params) -> Result<Params> {
    parameter_shift_with(family, p, &SeriesConfig::default())
}

pub fn parameter_shift_with(family: Family, p: &Params, cfg: &SeriesConfig) -> Result<Params> {
    let shifted = raw_shift(family, p);
    family.check_params(&shifted)?;
    for branch in [Branch::Plus, Branch::Minus] {
        deformation_checked(family, &shifted, branch, cfg).map_err(|e| {
            Error::InvalidParams(format!("shifted parameters {shifted} are not admissible: {e}"))
        })?;
    }
    Ok(shifted)
}

/// `f(a)` without validation.
pub fn raw_shift(family: Family, p: &Params) -> Params {
    let one = int(1);
    let g = &p.g - &one;
    let h = p.h.as_ref().map(|h| match family {
        Family::HypDpt => h + &one,
        _ => h - &one,
    });
    Params::new(g, h, p.l.clone())
}

/// `f⁻¹(a)` without validation.
pub fn raw_unshift(family: Family, p: &Params) -> Params {
    let one = int(1);
    let g = &p.g + &one;
    let h = p.h.as_ref().map(|h| match family {
        Family::HypDpt => h - &one,
        _ => h + &one,
    });
    Params::new(g, h, p.l.clone())
}

/// A real map `x ↦ y(x)`.
pub type RealMap = fn(f64) -> f64;

/// The substitution map and its derivative for `family`.
pub fn substitution(family: Family) -> (RealMap, RealMap) {
    match family.substitution() {
        Substitution::Square => (|x| x * x, |x| 2.0 * x),
        Substitution::Cos2x => (|x| (2.0 * x).cos(), |x| -2.0 * (2.0 * x).sin()),
        Substitution::Cosh2x => (|x| (2.0 * x).cosh(), |x| 2.0 * (2.0 * x).sinh()),
    }
}
