//! The extended superpotential `W = W0 + W1+ - W1-` and its partner
//! potentials in full, reduced and classical form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{deformation, BaseSuperpotential, Branch, Deformation, Domain, Family, Params, ScalarFn};
use crate::rational_poly::Poly;

/// `W0`, `W1+`, `W1-` and their first derivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Components {
    pub w0: f64,
    pub w0_d1: f64,
    pub w1p: f64,
    pub w1p_d1: f64,
    pub w1m: f64,
    pub w1m_d1: f64,
}

impl Components {
    pub fn w(&self) -> f64 {
        self.w0 + self.w1p - self.w1m
    }

    pub fn w_d1(&self) -> f64 {
        self.w0_d1 + self.w1p_d1 - self.w1m_d1
    }

    /// Left side of the compatibility condition.
    pub fn compatibility(&self) -> f64 {
        let (w0, p, m) = (self.w0, self.w1p, self.w1m);
        p * p + self.w1p_d1 + m * m + self.w1m_d1 - 2.0 * w0 * m + 2.0 * w0 * p - 2.0 * m * p
    }

    /// `V` expanded term by term.
    pub fn v_full(&self) -> f64 {
        self.w0 * self.w0 - self.w0_d1 + self.compatibility() - 2.0 * self.w1p_d1
    }

    /// `Ṽ` expanded term by term.
    pub fn v_tilde_full(&self) -> f64 {
        self.w0 * self.w0 + self.w0_d1 + self.compatibility() - 2.0 * self.w1m_d1
    }

    pub fn v0(&self) -> f64 {
        self.w0 * self.w0 - self.w0_d1
    }

    pub fn v0_tilde(&self) -> f64 {
        self.w0 * self.w0 + self.w0_d1
    }

    /// `V0 - 2 W1+'`
    pub fn v_reduced(&self) -> f64 {
        self.v0() - 2.0 * self.w1p_d1
    }

    /// `Ṽ0 - 2 W1-'`
    pub fn v_tilde_reduced(&self) -> f64 {
        self.v0_tilde() - 2.0 * self.w1m_d1
    }

    fn pair(&self, construction: Construction) -> (f64, f64) {
        match construction {
            Construction::Full => (self.v_full(), self.v_tilde_full()),
            Construction::Reduced => (self.v_reduced(), self.v_tilde_reduced()),
            Construction::Classical => (self.v0(), self.v0_tilde()),
        }
    }
}

/// The triple `(W0, ψ1+, ψ1-)` for one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedSuperpotential {
    pub family: Family,
    pub params: Params,
    pub base: BaseSuperpotential,
    pub psi_plus: Deformation,
    pub psi_minus: Deformation,
}

impl ExtendedSuperpotential {
    /// Builds both branches, validating that each is nodeless.
    pub fn new(family: Family, params: &Params) -> Result<Self> {
        let psi_plus = deformation(family, params, Branch::Plus)?;
        let psi_minus = deformation(family, params, Branch::Minus)?;
        Ok(Self::from_parts(family, params, psi_plus, psi_minus))
    }

    pub fn from_parts(family: Family, params: &Params, psi_plus: Deformation, psi_minus: Deformation) -> Self {
        ExtendedSuperpotential {
            family,
            params: params.clone(),
            base: BaseSuperpotential::new(family, params),
            psi_plus,
            psi_minus,
        }
    }

    pub fn domain(&self) -> Domain {
        self.family.domain()
    }

    pub fn components(&self, x: f64) -> Result<Components> {
        let w0 = self.base.jet(x)?;
        let (w1p, w1p_d1) = self.psi_plus.log_derivative(x)?;
        let (w1m, w1m_d1) = self.psi_minus.log_derivative(x)?;
        let c = Components {
            w0: w0.value,
            w0_d1: w0.d1,
            w1p,
            w1p_d1,
            w1m,
            w1m_d1,
        };
        if [c.w1p, c.w1p_d1, c.w1m, c.w1m_d1].iter().all(|v| v.is_finite()) {
            Ok(c)
        } else {
            Err(Error::NumericGuard {
                what: "logarithmic derivative",
                x,
            })
        }
    }

    /// `(W, W')` at `x`.
    pub fn w(&self, x: f64) -> Result<(f64, f64)> {
        let c = self.components(x)?;
        Ok((c.w(), c.w_d1()))
    }

    pub fn to_scalar_fn(&self) -> ScalarFn {
        let this = self.clone();
        ScalarFn::new(self.domain(), move |x| this.w(x))
    }

    /// Same `W0` and `ψ1+`, with `ψ1- + delta`.
    pub fn with_minus_shifted(&self, delta: f64) -> Self {
        ExtendedSuperpotential {
            psi_minus: self.psi_minus.shifted_by(delta),
            ..self.clone()
        }
    }

    /// Both branches multiplied by `exp(∫gauge)`; `W` is unchanged.
    pub fn gauged(&self, gauge: &Poly) -> Self {
        ExtendedSuperpotential {
            psi_plus: self.psi_plus.gauged(gauge),
            psi_minus: self.psi_minus.gauged(gauge),
            ..self.clone()
        }
    }

    /// Only `ψ1+` multiplied by `exp(∫gauge)`, which breaks the branch pairing.
    pub fn gauged_plus_only(&self, gauge: &Poly) -> Self {
        ExtendedSuperpotential {
            psi_plus: self.psi_plus.gauged(gauge),
            ..self.clone()
        }
    }

    pub fn partner_pair(&self, construction: Construction) -> PartnerPair {
        let this = Arc::new(self.clone());
        let (a, b) = (Arc::clone(&this), this);
        PartnerPair {
            v: Potential::new(self.domain(), move |x| Ok(a.components(x)?.pair(construction).0)),
            v_tilde: Potential::new(self.domain(), move |x| Ok(b.components(x)?.pair(construction).1)),
            construction,
        }
    }
}

/// A potential evaluated pointwise.
#[derive(Clone)]
pub struct Potential {
    domain: Domain,
    f: Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>,
}

impl Potential {
    pub fn new(domain: Domain, f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        Potential { domain, f: Arc::new(f) }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        let v = (self.f)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NumericGuard { what: "potential", x })
        }
    }
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential").field("domain", &self.domain).finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// Term-by-term expansion of `W^2 ∓ W'`.
    Full,
    /// `V0 - 2 W1+'` and `Ṽ0 - 2 W1-'`.
    Reduced,
    /// `W0^2 ∓ W0'`.
    Classical,
}

/// The potentials `V` and `Ṽ`.
#[derive(Clone, Debug)]
pub struct PartnerPair {
    pub v: Potential,
    pub v_tilde: Potential,
    pub construction: Construction,
}

/// `W(x, a)` with its analytic derivative.
pub fn full_superpotential(family: Family, p: &Params) -> Result<ScalarFn> {
    Ok(ExtendedSuperpotential::new(family, p)?.to_scalar_fn())
}

pub fn partner_pair_full(family: Family, p: &Params) -> Result<PartnerPair> {
    Ok(ExtendedSuperpotential::new(family, p)?.partner_pair(Construction::Full))
}

pub fn partner_pair_reduced(family: Family, p: &Params) -> Result<PartnerPair> {
    Ok(ExtendedSuperpotential::new(family, p)?.partner_pair(Construction::Reduced))
}

pub fn classical_partners(family: Family, p: &Params) -> Result<PartnerPair> {
    family.check_params(p)?;
    let base = BaseSuperpotential::new(family, p);
    let (a, b) = (base, base);
    Ok(PartnerPair {
        v: Potential::new(family.domain(), move |x| {
            let j = a.jet(x)?;
            Ok(j.value * j.value - j.d1)
        }),
        v_tilde: Potential::new(family.domain(), move |x| {
            let j = b.jet(x)?;
            Ok(j.value * j.value + j.d1)
        }),
        construction: Construction::Classical,
    })
}
