//! Command implementations. Each returns a finished [`Outcome`]; the caller
//! only writes it and maps the status to an exit code.

use std::fmt::Write as _;

use serde::Serialize;
use shapeinv::families::Family;
use shapeinv::parallel::Execution;
use shapeinv::rational_poly::parse_rational;
use shapeinv::report::{csv_columns, format_f64, SCHEMA_VERSION};
use shapeinv::spectral::{isospectrality_report_with, Grid, IsospectralityReport};
use shapeinv::superpotential::{classical_partners, Construction, ExtendedSuperpotential};
use shapeinv::verify::{
    cc_residual, cc_residual_exact_perturbed, certify_symbolic, gauge_transform, ode_residual, si_residual,
    standard_grid, uniform_grid, GaugeReport, GaugeSpec, IdentityCertificate, ResidualReport, SymbolicCertificate,
};
use shapeinv::{Branch, Error, FamilyPoint, Result};

use crate::args::{Format, GaugeArgs, IdentityArgs, RunConfig, SpectrumArgs};

/// Default ε tolerance for polynomial families.
pub const POLY_TOL: f64 = 1e-10;
/// Default ε tolerance for the series-backed families.
pub const SERIES_TOL: f64 = 1e-8;
pub const GAUGE_TOL: f64 = 1e-9;
pub const SPECTRUM_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Passed,
    CheckFailed,
}

pub struct Outcome {
    pub status: Status,
    pub body: String,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    family: Family,
    ok: bool,
    results: &'a [T],
    #[serde(skip_serializing_if = "Option::is_none")]
    symbolic: Option<&'a [SymbolicCertificate]>,
}

fn render_json<T: Serialize>(command: &str, family: Family, ok: bool, results: &[T], symbolic: Option<&[SymbolicCertificate]>) -> String {
    let doc = Document {
        schema: SCHEMA_VERSION,
        command,
        family,
        ok,
        results,
        symbolic,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report types serialize");
    s.push('\n');
    s
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Passed
    } else {
        Status::CheckFailed
    }
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn sample_grid(cfg: &RunConfig, family: Family) -> Vec<f64> {
    match cfg.grid {
        Some(g) => uniform_grid(g.min, g.max, g.n),
        None => standard_grid(family),
    }
}

#[derive(Serialize)]
struct IdentityEntry {
    config: String,
    certificate: IdentityCertificate,
}

pub fn identity(args: &IdentityArgs) -> Result<Outcome> {
    let cfg = args.common.to_config()?;
    if !cfg.family.is_polynomial() {
        return Err(Error::InvalidParams(format!("{} has no exact polynomial form", cfg.family)));
    }
    if cfg.format == Format::Csv {
        return Err(Error::Config("identity certificates have no CSV form; use json or text".into()));
    }
    let perturb = args.perturb.as_deref().map(parse_rational).transpose()?;
    let entries = Execution::default()
        .map(&cfg.points, |fp| {
            cc_residual_exact_perturbed(fp.family, &fp.params, perturb.as_ref()).map(|certificate| IdentityEntry {
                config: fp.to_string(),
                certificate,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let symbolic = if args.symbolic {
        let mut ls: Vec<usize> = cfg.points.iter().filter_map(|p| p.params.degree()).collect();
        ls.sort_unstable();
        ls.dedup();
        Some(
            ls.into_iter()
                .map(|l| certify_symbolic(cfg.family, l, Execution::default()))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let ok = entries.iter().all(|e| e.certificate.is_proven())
        && symbolic.iter().flatten().all(|s| s.verdict == shapeinv::verify::Verdict::Proven);
    let body = match cfg.format {
        Format::Json => render_json("identity", cfg.family, ok, &entries, symbolic.as_deref()),
        _ => {
            let mut t = format!("identity {}\n", cfg.family);
            for e in &entries {
                let c = &e.certificate;
                let _ = writeln!(
                    t,
                    "  {:<44} {:<8} residual degree {:>4}  g-degree bound {}",
                    e.config,
                    format!("{:?}", c.verdict).to_lowercase(),
                    c.residual_poly.degree().map_or("zero".to_string(), |d| d.to_string()),
                    c.parameter_degree_bound
                );
            }
            for s in symbolic.iter().flatten() {
                let _ = writeln!(
                    t,
                    "  symbolic l={} ({} instantiations, {} per coupling): {:?}",
                    s.l, s.instantiations, s.points_per_parameter, s.verdict
                );
            }
            let proven = entries.iter().filter(|e| e.certificate.is_proven()).count();
            let _ = writeln!(t, "{} {proven}/{} proven", mark(ok), entries.len());
            t
        }
    };
    Ok(Outcome {
        status: status(ok),
        body,
    })
}

#[derive(Serialize)]
struct CheckEntry {
    config: String,
    tolerance: ReportFloat,
    expected_remainder: ReportFloat,
    compatibility: ResidualReport,
    shape_invariance: ResidualReport,
    ode_plus: ResidualReport,
    ode_minus: ResidualReport,
    passed: bool,
}

/// An `f64` serialized with 17 significant digits.
#[derive(Clone, Copy)]
struct ReportFloat(f64);

impl Serialize for ReportFloat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        shapeinv::report::sig17(&self.0, s)
    }
}

fn check_point(fp: &FamilyPoint, xs: &[f64], tol: f64) -> Result<CheckEntry> {
    let (f, p) = (fp.family, &fp.params);
    let compatibility = cc_residual(f, p, xs)?;
    let shape_invariance = si_residual(f, p, xs)?;
    let ode_plus = ode_residual(f, p, Branch::Plus, xs)?;
    let ode_minus = ode_residual(f, p, Branch::Minus, xs)?;
    let passed = compatibility.max_abs < tol && shape_invariance.is_constant;
    Ok(CheckEntry {
        config: fp.to_string(),
        tolerance: ReportFloat(tol),
        expected_remainder: ReportFloat(f.expected_remainder(p)),
        compatibility,
        shape_invariance,
        ode_plus,
        ode_minus,
        passed,
    })
}

pub fn check(cfg: &RunConfig) -> Result<Outcome> {
    let xs = sample_grid(cfg, cfg.family);
    shapeinv::verify::check_grid(cfg.family, &xs)?;
    let tol = cfg.tol.unwrap_or(if cfg.family.is_polynomial() { POLY_TOL } else { SERIES_TOL });
    let entries = Execution::default()
        .map(&cfg.points, |fp| check_point(fp, &xs, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ok = entries.iter().all(|e| e.passed);
    let body = match cfg.format {
        Format::Json => render_json("check", cfg.family, ok, &entries, None),
        Format::Csv => {
            let mut out = String::new();
            for e in &entries {
                let _ = writeln!(out, "# {}", e.config);
                out.push_str(&csv_columns(
                    &["x", "epsilon", "si_residual", "ode_plus", "ode_minus"],
                    &[
                        &e.compatibility.xs,
                        &e.compatibility.values,
                        &e.shape_invariance.values,
                        &e.ode_plus.values,
                        &e.ode_minus.values,
                    ],
                ));
            }
            out
        }
        Format::Text => {
            let mut t = format!("check {} ({} samples, tol {:e})\n", cfg.family, xs.len(), tol);
            for e in &entries {
                let si = &e.shape_invariance;
                let _ = writeln!(
                    t,
                    "  {:<44} max|eps| {:<10.3e} R {} (expected {}) spread {:.3e} ode {:.3e}/{:.3e}  {}",
                    e.config,
                    e.compatibility.max_abs,
                    si.constant_value.map_or("non-constant".to_string(), |r| format!("{r:.12}")),
                    e.expected_remainder.0,
                    si.spread,
                    e.ode_plus.max_abs,
                    e.ode_minus.max_abs,
                    mark(e.passed)
                );
            }
            let _ = writeln!(t, "{}", mark(ok));
            t
        }
    };
    Ok(Outcome {
        status: status(ok),
        body,
    })
}

#[derive(Serialize)]
struct SpectrumEntry {
    config: String,
    tolerance: ReportFloat,
    report: IsospectralityReport,
    passed: bool,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome> {
    let cfg = args.common.to_config()?;
    let grid = match cfg.grid {
        Some(g) => Grid::new(g.min, g.max, g.n)?,
        None => Grid::for_family(cfg.family),
    };
    let tol = cfg.tol.unwrap_or(SPECTRUM_TOL);
    let mut entries = Vec::with_capacity(cfg.points.len());
    for fp in &cfg.points {
        let report = isospectrality_report_with(fp.family, &fp.params, args.k, &grid, Execution::default())?;
        entries.push(SpectrumEntry {
            config: fp.to_string(),
            tolerance: ReportFloat(tol),
            passed: report.passes(tol),
            report,
        });
    }
    let ok = entries.iter().all(|e| e.passed);
    let body = match cfg.format {
        Format::Json => render_json("spectrum", cfg.family, ok, &entries, None),
        Format::Csv => {
            let nodes = grid.nodes();
            let xs: Vec<f64> = nodes.iter().step_by((grid.n / 400).max(1)).copied().collect();
            let mut out = String::new();
            for fp in &cfg.points {
                let ext = ExtendedSuperpotential::new(fp.family, &fp.params)?.partner_pair(Construction::Reduced);
                let cls = classical_partners(fp.family, &fp.params)?;
                let col = |f: &dyn Fn(f64) -> Result<f64>| xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>();
                let (v, vt) = (col(&|x| ext.v.eval(x))?, col(&|x| ext.v_tilde.eval(x))?);
                let (v0, v0t) = (col(&|x| cls.v.eval(x))?, col(&|x| cls.v_tilde.eval(x))?);
                let _ = writeln!(out, "# {fp}");
                out.push_str(&csv_columns(&["x", "v", "v_tilde", "v0", "v0_tilde"], &[&xs, &v, &vt, &v0, &v0t]));
            }
            out
        }
        Format::Text => {
            let mut t = format!(
                "spectrum {} (grid [{}, {}], n={}, k={}, tol {:e})\n",
                cfg.family, grid.x_min, grid.x_max, grid.n, args.k, tol
            );
            for e in &entries {
                let r = &e.report;
                let levels = |s: &[f64]| s.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(" ");
                let _ = writeln!(t, "  {}", e.config);
                let _ = writeln!(t, "    V  ext {}", levels(&r.extended_v.eigenvalues));
                let _ = writeln!(t, "    Ṽ  ext {}", levels(&r.extended_v_tilde.eigenvalues));
                let _ = writeln!(t, "    V0     {}", levels(&r.classical_v.eigenvalues));
                let _ = writeln!(t, "    Ṽ0     {}", levels(&r.classical_v_tilde.eigenvalues));
                let _ = writeln!(
                    t,
                    "    V/Ṽ offset {} shared {} max rel {:.2e}; Ṽ/Ṽ0 {:.2e}; V/V0 {:.2e}",
                    r.partner_match.offset,
                    r.partner_match.shared,
                    r.partner_match.max_rel,
                    r.tilde_match.max_rel,
                    r.v_match.max_rel
                );
                let _ = writeln!(
                    t,
                    "    gaps first {:.6} mean {:.6} expected {}  wall margin {:.1}",
                    r.first_gap, r.mean_gap, r.expected_gap, r.right_wall_margin
                );
                if let (Some(th), Some(nb)) = (r.continuum_threshold, r.bound_states_below_threshold) {
                    let _ = writeln!(t, "    continuum threshold {th:.6}, {nb} of {} levels below it", r.k);
                }
                let _ = writeln!(t, "    {}", mark(e.passed));
            }
            let _ = writeln!(t, "{}", mark(ok));
            t
        }
    };
    Ok(Outcome {
        status: status(ok),
        body,
    })
}

#[derive(Serialize)]
struct GaugeEntry {
    config: String,
    tolerance: ReportFloat,
    report: GaugeReport,
    passed: bool,
}

pub fn gauge(args: &GaugeArgs) -> Result<Outcome> {
    let cfg = args.common.to_config()?;
    let spec = GaugeSpec::parse(&args.gauge)?;
    let xs = sample_grid(&cfg, cfg.family);
    shapeinv::verify::check_grid(cfg.family, &xs)?;
    let tol = cfg.tol.unwrap_or(GAUGE_TOL);
    let entries = Execution::default()
        .map(&cfg.points, |fp| {
            gauge_transform(fp.family, &fp.params, &spec, &xs).map(|report| GaugeEntry {
                config: fp.to_string(),
                tolerance: ReportFloat(tol),
                passed: report.passes(tol),
                report,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ok = entries.iter().all(|e| e.passed);
    let body = match cfg.format {
        Format::Json => render_json("gauge", cfg.family, ok, &entries, None),
        Format::Csv => {
            let mut out = String::new();
            for e in &entries {
                let _ = writeln!(out, "# {}", e.config);
                let r = &e.report;
                let generalized: Vec<f64> = r.residual.values.iter().zip(&r.predicted).map(|(a, b)| a + b).collect();
                out.push_str(&csv_columns(
                    &["x", "generalized", "predicted_2dg", "difference"],
                    &[&r.residual.xs, &generalized, &r.predicted, &r.residual.values],
                ));
            }
            out
        }
        Format::Text => {
            let dg = spec.derivative().scale(&shapeinv::rational_poly::int(2));
            let mut t = format!(
                "gauge {} g(x) = {}  predicted eps = 2g'(x) = {}\n",
                cfg.family,
                spec.description,
                dg.to_string().replace('t', "x")
            );
            for e in &entries {
                let _ = writeln!(
                    t,
                    "  {:<44} max|eps - 2g'| {}  potential shift {}  {}",
                    e.config,
                    format_f64(e.report.residual.max_abs),
                    format_f64(e.report.max_potential_shift),
                    mark(e.passed)
                );
            }
            let _ = writeln!(t, "{}", mark(ok));
            t
        }
    };
    Ok(Outcome {
        status: status(ok),
        body,
    })
}
