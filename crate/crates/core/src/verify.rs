//! Compatibility residual ε(x), exact identity certificates, the
//! shape-invariance residual, ODE checks, gauge transforms and the
//! equivalence probe.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    deformation_with, parameter_shift, raw_shift, trig_series_upper, Branch, Family, Params,
    Substitution,
};
use crate::parallel::Execution;
use crate::rational_poly::{format_rational, int, parse_rational, rat, Poly, Rational};
use crate::report;
use crate::specfun::SeriesConfig;
use crate::superpotential::{Construction, ExtendedSuperpotential};

/// Spread tolerance for x-constancy, scaled by `1 + |mean|`.
pub const CONSTANCY_TOL: f64 = 1e-9;

/// Sampled residual with its constancy verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    #[serde(serialize_with = "report::sig17_vec")]
    pub xs: Vec<f64>,
    #[serde(serialize_with = "report::sig17_vec")]
    pub values: Vec<f64>,
    #[serde(serialize_with = "report::sig17")]
    pub max_abs: f64,
    /// `max - min` over the samples.
    #[serde(serialize_with = "report::sig17")]
    pub spread: f64,
    #[serde(serialize_with = "report::sig17")]
    pub mean: f64,
    pub is_constant: bool,
    #[serde(serialize_with = "report::sig17_opt")]
    pub constant_value: Option<f64>,
}

impl ResidualReport {
    pub fn from_samples(xs: Vec<f64>, values: Vec<f64>, tol: f64) -> Self {
        let n = values.len().max(1) as f64;
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = if values.is_empty() { 0.0 } else { hi - lo };
        let mean = values.iter().sum::<f64>() / n;
        let is_constant = spread <= tol * (1.0 + mean.abs());
        ResidualReport {
            xs,
            values,
            max_abs,
            spread,
            mean,
            is_constant,
            constant_value: is_constant.then_some(mean),
        }
    }
}

/// Checks that `xs` is strictly increasing and interior to the family domain.
pub fn check_grid(family: Family, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Config("empty sample grid".into()));
    }
    let domain = family.domain();
    for (i, &x) in xs.iter().enumerate() {
        domain.check(x)?;
        if i > 0 && x <= xs[i - 1] {
            return Err(Error::Config(format!("grid not strictly increasing at index {i}")));
        }
    }
    Ok(())
}

pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    uniform_grid(a, b, n).into_iter().map(f64::exp).collect()
}

/// The 60-point sample grid used by default for each family.
///
/// Radial and hyperbolic: log-spaced on `[0.05, 4]`. Trigonometric: uniform
/// on `[0.05, π/2 - 0.05]`, with the continuous family stopping where
/// `sin^2 x` reaches the ₂F₁ margin.
pub fn standard_grid(family: Family) -> Vec<f64> {
    match family {
        Family::RadialOscillator | Family::RadialOscillatorContL | Family::HypDpt => log_grid(0.05, 4.0, 60),
        Family::TrigDpt => uniform_grid(0.05, FRAC_PI_2 - 0.05, 60),
        Family::TrigDptContL => {
            let hi = (FRAC_PI_2 - 0.05).min(trig_series_upper(&SeriesConfig::default()));
            uniform_grid(0.05, hi, 60)
        }
    }
}

/// ψ-form of the compatibility expression for an assembled superpotential.
pub fn compatibility_samples(esp: &ExtendedSuperpotential, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let w0 = esp.base.jet(x)?.value;
            let p = esp.psi_plus.jet(x)?;
            let m = esp.psi_minus.jet(x)?;
            let eps = (p.d2 + 2.0 * w0 * p.d1) / p.value + (m.d2 - 2.0 * w0 * m.d1) / m.value
                - 2.0 * p.d1 * m.d1 / (p.value * m.value);
            if eps.is_finite() {
                Ok(eps)
            } else {
                Err(Error::NumericGuard {
                    what: "compatibility residual",
                    x,
                })
            }
        })
        .collect()
}

/// ε(x) on `xs`.
pub fn cc_residual(family: Family, p: &Params, xs: &[f64]) -> Result<ResidualReport> {
    check_grid(family, xs)?;
    let esp = ExtendedSuperpotential::new(family, p)?;
    let values = compatibility_samples(&esp, xs)?;
    Ok(ResidualReport::from_samples(xs.to_vec(), values, CONSTANCY_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proven,
    Refuted,
}

/// Exact check of the compatibility condition in the substitution variable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCertificate {
    pub family: Family,
    #[serde(serialize_with = "report::rational")]
    pub g: Rational,
    #[serde(serialize_with = "report::rational_opt")]
    pub h: Option<Rational>,
    pub l: usize,
    pub substitution: Substitution,
    /// The family's reduced identity; zero iff the condition holds.
    #[serde(serialize_with = "report::poly")]
    pub residual_poly: Poly,
    /// `ε ψ1+ ψ1-` rewritten in the substitution variable.
    #[serde(serialize_with = "report::poly")]
    pub direct_poly: Poly,
    /// Degree bound of the identity as a polynomial in `g` (and in `h`).
    pub parameter_degree_bound: usize,
    pub verdict: Verdict,
}

impl IdentityCertificate {
    pub fn is_proven(&self) -> bool {
        self.verdict == Verdict::Proven
    }

    /// Both exact routes agree on the verdict.
    pub fn routes_agree(&self) -> bool {
        self.residual_poly.is_zero() == self.direct_poly.is_zero()
    }
}

fn exact_branches(family: Family, p: &Params) -> Result<(Poly, Poly)> {
    let cfg = SeriesConfig::default();
    let plus = deformation_with(family, p, Branch::Plus, &cfg)?;
    let minus = deformation_with(family, p, Branch::Minus, &cfg)?;
    match (plus.exact_poly(), minus.exact_poly()) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(Error::InvalidParams(format!("{family} has no polynomial deformation"))),
    }
}

/// Reduced identity for given `P1+`, `P1-`.
///
/// Radial (`z = x^2`): `8l P+P- + 4(1-2g-2l) P+P-' - 8z P-P+' - 8z P+'P-'`.
/// Trigonometric (`y = cos 2x`): `-8l(h-g+l-1) P+P- - 4(2h+2l-1)(1-y) P+P-'
/// - 4(2g+2l+1)(1+y) P-P+' - 8(1-y^2) P+'P-'`. Hyperbolic (`y = cosh 2x`):
/// `-8l(h+g-l+1) P+P- + 4(1+2h-2l)(y-1) P+P-' + 4(1+2g+2l)(y+1) P-P+'
/// - 8(y^2-1) P+'P-'`.
pub fn reduced_identity(family: Family, p: &Params, pp: &Poly, pm: &Poly) -> Poly {
    let (g, h, l) = (&p.g, p.h(), &p.l);
    let (dp, dm) = (pp.derivative(), pm.derivative());
    let prod = pp * pm;
    let p_dm = pp * &dm;
    let m_dp = pm * &dp;
    let dd = &dp * &dm;
    let t = Poly::t();
    let one = int(1);
    let two = int(2);
    match family.substitution() {
        Substitution::Square => {
            let a = prod.scale(&(int(8) * l));
            let b = p_dm.scale(&(int(4) * (&one - &two * g - &two * l)));
            let c = (&t * &m_dp).scale(&int(-8));
            let d = (&t * &dd).scale(&int(-8));
            &(&(&a + &b) + &c) + &d
        }
        Substitution::Cos2x => {
            let one_m = Poly::linear(int(1), int(-1));
            let one_p = Poly::linear(int(1), int(1));
            let a = prod.scale(&(int(-8) * l * (h - g + l - &one)));
            let b = (&one_m * &p_dm).scale(&(int(-4) * (&two * h + &two * l - &one)));
            let c = (&one_p * &m_dp).scale(&(int(-4) * (&two * g + &two * l + &one)));
            let d = (&(&one_m * &one_p) * &dd).scale(&int(-8));
            &(&(&a + &b) + &c) + &d
        }
        Substitution::Cosh2x => {
            let y_m = Poly::linear(int(-1), int(1));
            let y_p = Poly::linear(int(1), int(1));
            let a = prod.scale(&(int(-8) * l * (h + g - l + &one)));
            let b = (&y_m * &p_dm).scale(&(int(4) * (&one + &two * h - &two * l)));
            let c = (&y_p * &m_dp).scale(&(int(4) * (&one + &two * g + &two * l)));
            let d = (&(&y_m * &y_p) * &dd).scale(&int(-8));
            &(&(&a + &b) + &c) + &d
        }
    }
}

/// `ε ψ1+ ψ1-` for given `P1+`, `P1-`, without using any ODE.
///
/// Each of `ψ''`, `2 W0 ψ'` and `ψ1+' ψ1-'` is a polynomial in the
/// substitution variable times a common factor, so the ψ-form of the
/// compatibility expression, multiplied by `ψ1+ ψ1-`, is a polynomial.
pub fn direct_identity(family: Family, p: &Params, pp: &Poly, pm: &Poly) -> Poly {
    let l = &p.l;
    let (g_eff, h_eff) = match family {
        Family::HypDpt => (&p.g + l, p.h() - l),
        _ => (&p.g + l, p.h() + l),
    };
    let sub = family.substitution();
    let (second, w0_first, cross): (Poly, Poly, Poly) = match sub {
        // ψ'' = 2P' + 4zP'', 2W0ψ' = 4(G - z)P', ψ+'ψ-' = 4z P+'P-'
        Substitution::Square => (
            Poly::from_ints(&[2]),
            Poly::linear(int(4) * &g_eff, int(-4)),
            Poly::from_coeffs(vec![int(0), int(4)]),
        ),
        // ψ'' = -4yP' + 4(1-y^2)P'', 2W0ψ' = -4(G(1+y) - H(1-y))P', ψ+'ψ-' = 4(1-y^2)P+'P-'
        Substitution::Cos2x => (
            Poly::from_ints(&[0, -4]),
            Poly::linear(int(-4) * (&g_eff - &h_eff), int(-4) * (&g_eff + &h_eff)),
            Poly::from_ints(&[4, 0, -4]),
        ),
        // ψ'' = 4yP' + 4(y^2-1)P'', 2W0ψ' = 4(G(y+1) - H(y-1))P', ψ+'ψ-' = 4(y^2-1)P+'P-'
        Substitution::Cosh2x => (
            Poly::from_ints(&[0, 4]),
            Poly::linear(int(4) * (&g_eff + &h_eff), int(4) * (&g_eff - &h_eff)),
            Poly::from_ints(&[-4, 0, 4]),
        ),
    };
    let psi2 = |q: &Poly| {
        let d1 = q.derivative();
        &(&second * &d1) + &(&cross * &d1.derivative())
    };
    let (dp, dm) = (pp.derivative(), pm.derivative());
    let plus = &(&psi2(pp) + &(&w0_first * &dp)) * pm;
    let minus = &(&psi2(pm) - &(&w0_first * &dm)) * pp;
    let mixed = (&cross * &(&dp * &dm)).scale(&int(-2));
    &(&plus + &minus) + &mixed
}

/// Exact certificate for a polynomial family at rational parameters.
pub fn cc_residual_exact(family: Family, p: &Params) -> Result<IdentityCertificate> {
    cc_residual_exact_perturbed(family, p, None)
}

/// As [`cc_residual_exact`], optionally adding a constant to `P1-`.
pub fn cc_residual_exact_perturbed(family: Family, p: &Params, perturb: Option<&Rational>) -> Result<IdentityCertificate> {
    if !family.is_polynomial() {
        return Err(Error::InvalidParams(format!("{family} has no exact polynomial form")));
    }
    family.check_params(p)?;
    let (pp, mut pm) = exact_branches(family, p)?;
    if let Some(delta) = perturb {
        pm = &pm + &Poly::constant(delta.clone());
    }
    let l = p.degree().expect("checked integer l");
    let residual_poly = reduced_identity(family, p, &pp, &pm);
    let direct_poly = direct_identity(family, p, &pp, &pm);
    let verdict = if residual_poly.is_zero() {
        Verdict::Proven
    } else {
        Verdict::Refuted
    };
    Ok(IdentityCertificate {
        family,
        g: p.g.clone(),
        h: p.h.clone(),
        l,
        substitution: family.substitution(),
        residual_poly,
        direct_poly,
        parameter_degree_bound: 2 * l + 2,
        verdict,
    })
}

/// Identity certified as a polynomial in the couplings at fixed `l`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolicCertificate {
    pub family: Family,
    pub l: usize,
    pub parameter_degree_bound: usize,
    /// Number of instantiation points per coupling.
    pub points_per_parameter: usize,
    pub instantiations: usize,
    pub verdict: Verdict,
}

/// Certifies the identity for all `g` (and `h`) at degree `l`.
///
/// The reduced identity has degree at most `2l + 2` in each coupling, so
/// vanishing on a tensor grid of `2l + 4` distinct values per coupling
/// proves it identically. The sample couplings avoid Jacobi degree collapse.
pub fn certify_symbolic(family: Family, l: usize, exec: Execution) -> Result<SymbolicCertificate> {
    if !family.is_polynomial() {
        return Err(Error::InvalidParams(format!("{family} has no exact polynomial form")));
    }
    let bound = 2 * l + 2;
    let k = bound + 2;
    // fractional parts 5/23 and 7/29 keep g ± h away from integers
    let values: Vec<Rational> = (0..k).map(|i| int(2 + i as i64) + rat(5, 23)).collect();
    let h_values: Vec<Rational> = (0..k).map(|i| int(2 + i as i64) + rat(7, 29)).collect();
    let points: Vec<Params> = if family.has_h() {
        values
            .iter()
            .flat_map(|g| h_values.iter().map(move |h| Params::ghl(g.clone(), h.clone(), int(l as i64))))
            .collect()
    } else {
        values.iter().map(|g| Params::gl(g.clone(), int(l as i64))).collect()
    };
    let results = exec.map(&points, |p| cc_residual_exact(family, p).map(|c| c.is_proven()));
    let mut proven = true;
    for r in results {
        proven &= r?;
    }
    Ok(SymbolicCertificate {
        family,
        l,
        parameter_degree_bound: bound,
        points_per_parameter: k,
        instantiations: points.len(),
        verdict: if proven { Verdict::Proven } else { Verdict::Refuted },
    })
}

/// Shape-invariance residual for assembled superpotentials at `a` and `f(a)`.
pub fn si_samples(at_a: &ExtendedSuperpotential, at_fa: &ExtendedSuperpotential, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let (w, wd) = at_a.w(x)?;
            let (wf, wfd) = at_fa.w(x)?;
            Ok(w * w - wf * wf + wfd + wd)
        })
        .collect()
}

/// Shape-invariance residual; its constant value is `R(f(a))`.
pub fn si_residual(family: Family, p: &Params, xs: &[f64]) -> Result<ResidualReport> {
    check_grid(family, xs)?;
    let fa = parameter_shift(family, p)?;
    let at_a = ExtendedSuperpotential::new(family, p)?;
    let at_fa = ExtendedSuperpotential::new(family, &fa)?;
    let values = si_samples(&at_a, &at_fa, xs)?;
    Ok(ResidualReport::from_samples(xs.to_vec(), values, CONSTANCY_TOL))
}

/// Normalized residual of the branch's second-order relation.
pub fn ode_residual(family: Family, p: &Params, branch: Branch, xs: &[f64]) -> Result<ResidualReport> {
    check_grid(family, xs)?;
    let psi = crate::families::deformation(family, p, branch)?;
    let values = xs.iter().map(|&x| psi.ode_residual(x)).collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_samples(xs.to_vec(), values, CONSTANCY_TOL))
}

/// A polynomial gauge function `g(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeSpec {
    #[serde(serialize_with = "report::poly")]
    pub poly: Poly,
    pub description: String,
}

impl GaugeSpec {
    pub fn new(poly: Poly) -> Self {
        let description = poly.to_string().replace('t', "x");
        GaugeSpec { poly, description }
    }

    /// Parses sums of terms `c`, `c*x`, `c x^k`, `x^k` with rational `c`.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty gauge polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            let prev = bytes[i - 1];
            if (bytes[i] == b'+' || bytes[i] == b'-') && prev != b'^' && prev != b'e' && prev != b'E' {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut poly = Poly::zero();
        for term in terms {
            poly = &poly + &parse_term(term)?;
        }
        Ok(GaugeSpec {
            poly,
            description: text.trim().to_string(),
        })
    }

    pub fn derivative(&self) -> Poly {
        self.poly.derivative()
    }
}

impl FromStr for GaugeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GaugeSpec::parse(s)
    }
}

fn parse_term(term: &str) -> Result<Poly> {
    let bad = || Error::Parse(format!("cannot parse gauge term {term:?}"));
    let (sign, body) = match term.as_bytes().first() {
        Some(b'+') => (int(1), &term[1..]),
        Some(b'-') => (int(-1), &term[1..]),
        _ => (int(1), term),
    };
    let Some(xpos) = body.find('x') else {
        return Ok(Poly::constant(sign * parse_rational(body)?));
    };
    let coef_text = body[..xpos].trim_end_matches('*');
    let coef = if coef_text.is_empty() {
        int(1)
    } else {
        parse_rational(coef_text)?
    };
    let rest = &body[xpos + 1..];
    let degree = if rest.is_empty() {
        1
    } else {
        rest.strip_prefix('^').and_then(|d| d.parse::<usize>().ok()).ok_or_else(bad)?
    };
    Ok(Poly::monomial(sign * coef, degree))
}

/// Outcome of the gauge-covariance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub gauge: GaugeSpec,
    /// Generalized compatibility expression minus `2 g'(x)`.
    pub residual: ResidualReport,
    /// `2 g'(x)` on the grid.
    #[serde(serialize_with = "report::sig17_vec")]
    pub predicted: Vec<f64>,
    /// Largest change of `V` or `Ṽ` caused by the gauge.
    #[serde(serialize_with = "report::sig17")]
    pub max_potential_shift: f64,
}

impl GaugeReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual.max_abs < tol && self.max_potential_shift < tol
    }
}

/// Applies `χ1± = exp(∫g) ψ1±` and compares the generalized compatibility
/// expression in `U1± = W1± + g` with `2 g'(x)`.
pub fn gauge_transform(family: Family, p: &Params, gauge: &GaugeSpec, xs: &[f64]) -> Result<GaugeReport> {
    check_grid(family, xs)?;
    let esp = ExtendedSuperpotential::new(family, p)?;
    let gauged = esp.gauged(&gauge.poly);
    let dg = gauge.derivative().to_numeric();
    let plain = esp.partner_pair(Construction::Full);
    let moved = gauged.partner_pair(Construction::Full);
    let mut values = Vec::with_capacity(xs.len());
    let mut predicted = Vec::with_capacity(xs.len());
    let mut shift = 0.0f64;
    for &x in xs {
        let expect = 2.0 * dg.eval(x);
        values.push(gauged.components(x)?.compatibility() - expect);
        predicted.push(expect);
        shift = shift
            .max((plain.v.eval(x)? - moved.v.eval(x)?).abs())
            .max((plain.v_tilde.eval(x)? - moved.v_tilde.eval(x)?).abs());
    }
    Ok(GaugeReport {
        gauge: gauge.clone(),
        residual: ResidualReport::from_samples(xs.to_vec(), values, CONSTANCY_TOL),
        predicted,
        max_potential_shift: shift,
    })
}

/// Joint x-constancy of the compatibility expression and the SI residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    #[serde(serialize_with = "report::sig17")]
    pub delta: f64,
    /// `l = 0`: the deformations are constants and a constant shift changes nothing.
    pub degenerate: bool,
    pub cc_constant_in_x: bool,
    pub si_constant_in_x: bool,
    #[serde(serialize_with = "report::sig17")]
    pub cc_spread: f64,
    #[serde(serialize_with = "report::sig17")]
    pub si_spread: f64,
}

impl EquivalenceReport {
    /// Both expressions agree on constancy.
    pub fn consistent(&self) -> bool {
        self.cc_constant_in_x == self.si_constant_in_x
    }
}

/// Adds `delta` to `ψ1-` at `a` and at `f(a)`, breaking `W1-(a) = W1+(f(a))`,
/// and reports whether each expression stays constant in `x`.
pub fn equivalence_probe(family: Family, p: &Params, delta: f64, xs: &[f64]) -> Result<EquivalenceReport> {
    check_grid(family, xs)?;
    let fa = raw_shift(family, p);
    let at_a = ExtendedSuperpotential::new(family, p)?.with_minus_shifted(delta);
    let at_fa = ExtendedSuperpotential::new(family, &fa)?.with_minus_shifted(delta);
    for esp in [&at_a, &at_fa] {
        esp.psi_minus.check_nodeless().map_err(|e| Error::NodefulDeformation {
            near: match e {
                Error::NodefulDeformation { near, .. } => near,
                _ => f64::NAN,
            },
            detail: format!("perturbation by {delta} creates a node"),
        })?;
    }
    let cc = ResidualReport::from_samples(xs.to_vec(), compatibility_samples(&at_a, xs)?, CONSTANCY_TOL);
    let si = ResidualReport::from_samples(xs.to_vec(), si_samples(&at_a, &at_fa, xs)?, CONSTANCY_TOL);
    Ok(EquivalenceReport {
        delta,
        degenerate: p.l.is_zero(),
        cc_constant_in_x: cc.is_constant,
        si_constant_in_x: si.is_constant,
        cc_spread: cc.spread,
        si_spread: si.spread,
    })
}

/// Exact certificates for many configurations, in input order.
pub fn certificate_sweep(points: &[(Family, Params)], exec: Execution) -> Vec<Result<IdentityCertificate>> {
    exec.map(points, |(f, p)| cc_residual_exact(*f, p))
}

/// Numeric compatibility and SI reports for many configurations, in input order.
pub fn check_sweep(points: &[(Family, Params)], exec: Execution) -> Vec<Result<(ResidualReport, ResidualReport)>> {
    exec.map(points, |(f, p)| {
        let xs = standard_grid(*f);
        Ok((cc_residual(*f, p, &xs)?, si_residual(*f, p, &xs)?))
    })
}

/// Human-readable parameter label.
pub fn describe(family: Family, p: &Params) -> String {
    let mut s = format!("{family} g={}", format_rational(&p.g));
    if let Some(h) = &p.h {
        s.push_str(&format!(" h={}", format_rational(h)));
    }
    s.push_str(&format!(" l={}", format_rational(&p.l)));
    s
}
