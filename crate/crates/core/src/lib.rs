//! Extended translationally shape-invariant superpotentials: construction,
//! exact and numeric verification of the compatibility and shape-invariance
//! conditions, and a finite-difference spectral oracle.
//!
//! Work is organized bottom-up: [`rational_poly`] and [`specfun`] supply
//! exact polynomials and series evaluators, [`families`] builds `W0` and the
//! deformations `ψ1±`, [`superpotential`] assembles `W` and the partner
//! potentials, [`verify`] checks the identities and [`spectral`] compares
//! spectra. Sweeps run through [`parallel::Execution`].

pub mod error;
pub mod families;
pub mod parallel;
pub mod rational_poly;
pub mod report;
pub mod specfun;
pub mod spectral;
pub mod superpotential;
pub mod verify;

pub use error::{Error, Result};
pub use families::{
    base_superpotential, deformation, parameter_shift, substitution, Branch, Family, FamilyPoint, Params, ScalarFn,
};
pub use parallel::Execution;
pub use rational_poly::{parse_rational, Poly, Rational};
pub use specfun::SeriesConfig;
pub use spectral::{isospectrality_report, solve_bound_states, Grid, IsospectralityReport, Spectrum};
pub use superpotential::{
    classical_partners, full_superpotential, partner_pair_full, partner_pair_reduced, ExtendedSuperpotential,
    PartnerPair,
};
pub use verify::{
    cc_residual, cc_residual_exact, equivalence_probe, gauge_transform, ode_residual, si_residual, GaugeSpec,
    IdentityCertificate, ResidualReport,
};
