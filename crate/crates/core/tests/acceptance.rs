//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report reads top to
//! bottom; the process exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use shapeinv::parallel::Execution;
use shapeinv::rational_poly::{from_f64, int, rat, to_f64, Rational};
use shapeinv::spectral::{relative_gap, Grid};
use shapeinv::specfun::{hyp1f1, hyp2f1, jacobi_ode_residual, jacobi_unchecked, laguerre, laguerre_ode_residual};
use shapeinv::verify::{standard_grid, GaugeSpec};
use shapeinv::{
    cc_residual, cc_residual_exact, equivalence_probe, gauge_transform, isospectrality_report, partner_pair_full,
    partner_pair_reduced, si_residual, Family, Params, SeriesConfig,
};

mod tolerances {
    //! Every threshold the suite compares against.

    /// Spread of the SI residual across x, absolute.
    pub const SI_SPREAD: f64 = 1e-9;

    /// Extracted remainder against its closed form, absolute.
    pub const REMAINDER: f64 = 1e-9;

    /// Gauge-covariant compatibility `|ε - 2g'|` and the induced change in
    /// the partner potentials.
    pub const GAUGE: f64 = 1e-9;

    /// Perturbation added to ψ1- in the negative control.
    pub const NEGATIVE_CONTROL_DELTA: f64 = 0.01;

    /// Relative level deviation of the finite-difference spectra at n = 4000.
    pub const LEVELS_REL: f64 = 1e-4;

    /// Relative deviation of the mean level gap from |R| = 4.
    pub const MEAN_GAP_REL: f64 = 1e-3;

    /// Number of finite-difference nodes for the isospectrality runs.
    pub const SPECTRAL_NODES: usize = 4000;

    /// Pointwise agreement of the reduced and fully expanded partner potentials.
    pub const CONSTRUCTIONS: f64 = 1e-9;

    /// Terminating hypergeometric series against exact orthogonal polynomials.
    pub const SERIES_VS_EXACT_REL: f64 = 1e-12;

    /// Numeric compatibility residual where the exact certificate holds.
    pub const NUMERIC_CC: f64 = 1e-10;
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn sweep_with_continuous() -> Vec<(Family, Params)> {
    let mut pts = common::full_polynomial_sweep();
    pts.extend(common::continuous_sweep());
    pts
}

fn exact_certificates() -> Verdict {
    let pts = common::full_polynomial_sweep();
    let results = Execution::default().map(&pts, |(f, p)| cc_residual_exact(*f, p));
    let mut proven = 0;
    let mut first_failure = None;
    for ((f, p), r) in pts.iter().zip(&results) {
        match r {
            Ok(c) if c.is_proven() && c.routes_agree() => proven += 1,
            Ok(c) => {
                first_failure.get_or_insert_with(|| format!("{f} {p}: residual {}", c.residual_poly));
            }
            Err(e) => {
                first_failure.get_or_insert_with(|| format!("{f} {p}: {e}"));
            }
        }
    }
    let detail = match first_failure {
        None => format!("{proven}/{} zero residual polynomials", pts.len()),
        Some(f) => format!("{proven}/{} proven; first failure {f}", pts.len()),
    };
    Verdict::new(proven == pts.len(), detail)
}

fn remainder_consistency() -> Verdict {
    let pts = sweep_with_continuous();
    let results = Execution::default().map(&pts, |(f, p)| si_residual(*f, p, &standard_grid(*f)));
    let mut worst_spread: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    let mut failures = Vec::new();
    for ((f, p), r) in pts.iter().zip(results) {
        match r {
            Ok(rep) => {
                let expected = f.expected_remainder(p);
                let dr = rep.constant_value.map_or(f64::INFINITY, |v| (v - expected).abs());
                worst_spread = worst_spread.max(rep.spread);
                worst_r = worst_r.max(dr);
                if !rep.is_constant || rep.spread >= tolerances::SI_SPREAD || dr >= tolerances::REMAINDER {
                    failures.push(format!("{f} {p}"));
                }
            }
            Err(e) => failures.push(format!("{f} {p}: {e}")),
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{} configurations, max spread {worst_spread:.2e}, max |R - R_formula| {worst_r:.2e}{}",
            pts.len(),
            failures.first().map_or(String::new(), |f| format!("; failing {f}"))
        ),
    )
}

fn gauge_covariance() -> Verdict {
    let p = Params::gl(int(3), int(1));
    let f = Family::RadialOscillator;
    let xs = standard_grid(f);
    let mut lines = Vec::new();
    let mut ok = true;
    for g in ["0", "5", "x^2", "1+x^3"] {
        let spec = GaugeSpec::parse(g).expect("gauge parses");
        match gauge_transform(f, &p, &spec, &xs) {
            Ok(r) => {
                ok &= r.residual.max_abs < tolerances::GAUGE && r.max_potential_shift < tolerances::GAUGE;
                lines.push(format!("{g}: {:.1e}/{:.1e}", r.residual.max_abs, r.max_potential_shift));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("{g}: {e}"));
            }
        }
    }
    Verdict::new(ok, format!("|ε-2g'| / potential shift  {}", lines.join(", ")))
}

fn negative_control() -> Verdict {
    let pts: Vec<(Family, Params)> = common::full_polynomial_sweep()
        .into_iter()
        .filter(|(_, p)| p.degree().is_some_and(|l| l >= 1))
        .collect();
    let results = Execution::default().map(&pts, |(f, p)| {
        let xs = standard_grid(*f);
        let broken = equivalence_probe(*f, p, tolerances::NEGATIVE_CONTROL_DELTA, &xs)?;
        let intact = equivalence_probe(*f, p, 0.0, &xs)?;
        Ok::<_, shapeinv::Error>((broken, intact))
    });
    let mut failures = Vec::new();
    for ((f, p), r) in pts.iter().zip(results) {
        match r {
            Ok((broken, intact)) => {
                let both_fail = !broken.cc_constant_in_x && !broken.si_constant_in_x;
                let both_hold = intact.cc_constant_in_x && intact.si_constant_in_x;
                if !(both_fail && both_hold) {
                    failures.push(format!("{f} {p}"));
                }
            }
            Err(e) => failures.push(format!("{f} {p}: {e}")),
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!(
            "{} configurations with l ≥ 1, δ = {}: {} inconsistent{}",
            pts.len(),
            tolerances::NEGATIVE_CONTROL_DELTA,
            failures.len(),
            failures.first().map_or(String::new(), |f| format!(" (first {f})"))
        ),
    )
}

fn isospectrality() -> Verdict {
    let f = Family::RadialOscillator;
    let base = Grid::for_family(f);
    let grid = Grid::new(base.x_min, base.x_max, tolerances::SPECTRAL_NODES).expect("grid");
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [1, 2] {
        let p = Params::gl(int(3), int(l));
        match isospectrality_report(f, &p, 5, &grid) {
            Ok(r) => {
                let tilde = r.tilde_match.offset == 0 && r.tilde_match.shared == 5 && r.tilde_match.within(tolerances::LEVELS_REL);
                let partner = r.partner_match.offset.abs() == 1
                    && r.partner_match.shared == 4
                    && r.partner_match.within(tolerances::LEVELS_REL);
                let gap = relative_gap(r.mean_gap, 4.0) < tolerances::MEAN_GAP_REL;
                ok &= tilde && partner && gap;
                parts.push(format!(
                    "l={l}: Ṽ/Ṽ0 {:.1e}, V/Ṽ {} shared (offset {}) {:.1e}, mean gap {:.6}",
                    r.tilde_match.max_rel, r.partner_match.shared, r.partner_match.offset, r.partner_match.max_rel, r.mean_gap
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("l={l}: {e}"));
            }
        }
    }
    Verdict::new(ok, parts.join("; "))
}

fn construction_equality() -> Verdict {
    let pts = sweep_with_continuous();
    let results = Execution::default().map(&pts, |(f, p)| {
        let full = partner_pair_full(*f, p)?;
        let reduced = partner_pair_reduced(*f, p)?;
        let mut worst: f64 = 0.0;
        for x in standard_grid(*f) {
            worst = worst.max((full.v.eval(x)? - reduced.v.eval(x)?).abs());
            worst = worst.max((full.v_tilde.eval(x)? - reduced.v_tilde.eval(x)?).abs());
        }
        Ok::<_, shapeinv::Error>(worst)
    });
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for ((f, p), r) in pts.iter().zip(results) {
        match r {
            Ok(d) => {
                worst = worst.max(d);
                if d > tolerances::CONSTRUCTIONS {
                    failures.push(format!("{f} {p}: {d:.2e}"));
                }
            }
            Err(e) => failures.push(format!("{f} {p}: {e}")),
        }
    }
    let families = pts.iter().map(|(f, _)| *f).collect::<std::collections::BTreeSet<_>>().len();
    Verdict::new(
        failures.is_empty(),
        format!(
            "{} configurations over {families} families, max |V_full - V_reduced| {worst:.2e}{}",
            pts.len(),
            failures.first().map_or(String::new(), |f| format!("; failing {f}"))
        ),
    )
}

fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|k| a + k as f64).product()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn special_functions() -> Verdict {
    let cfg = SeriesConfig::default();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let mut worst_1f1: f64 = 0.0;
    let mut worst_2f1: f64 = 0.0;
    let mut errors = Vec::new();
    for n in 0..=4usize {
        for b in [rat(1, 2), rat(5, 2), rat(25, 4), rat(17, 3)] {
            let lag = laguerre(n, &(&b - &int(1)));
            let bf = to_f64(&b);
            for t in [-3.0, -0.4, 0.7, 2.0, 9.5] {
                let exact = to_f64(&lag.eval(&from_f64(t).unwrap())) * factorial(n) / pochhammer(bf, n);
                match hyp1f1(-(n as f64), bf, t, &cfg) {
                    Ok(v) => worst_1f1 = worst_1f1.max(rel(v, exact)),
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
        for (a, b) in [(rat(3, 2), rat(-1, 2)), (rat(-1, 4), rat(7, 2)), (rat(5, 2), rat(9, 2))] {
            let jac = jacobi_unchecked(n, &a, &b);
            let (af, bf) = (to_f64(&a), to_f64(&b));
            for z in [0.05, 0.3, 0.5, 0.77, 0.95] {
                let exact = to_f64(&jac.eval(&from_f64(1.0 - 2.0 * z).unwrap()));
                match hyp2f1(-(n as f64), n as f64 + af + bf + 1.0, af + 1.0, z, &cfg) {
                    Ok(v) => worst_2f1 = worst_2f1.max(rel(pochhammer(af + 1.0, n) / factorial(n) * v, exact)),
                    Err(e) => errors.push(e.to_string()),
                }
            }
        }
    }
    let params: [(Rational, Rational); 4] =
        [(rat(1, 2), rat(-1, 2)), (rat(3, 2), rat(7, 3)), (rat(-3, 4), rat(5, 2)), (int(4), int(0))];
    let mut ode_nonzero = 0;
    let mut ode_checked = 0;
    for n in 0..=8usize {
        for (a, b) in &params {
            ode_checked += 2;
            ode_nonzero += usize::from(!laguerre_ode_residual(n, a).is_zero());
            ode_nonzero += usize::from(!jacobi_ode_residual(n, a, b).is_zero());
        }
    }
    let ok = errors.is_empty()
        && worst_1f1 <= tolerances::SERIES_VS_EXACT_REL
        && worst_2f1 <= tolerances::SERIES_VS_EXACT_REL
        && ode_nonzero == 0;
    Verdict::new(
        ok,
        format!(
            "1F1/Laguerre {worst_1f1:.1e}, 2F1/Jacobi {worst_2f1:.1e}, {}/{ode_checked} ODE identities exact{}",
            ode_checked - ode_nonzero,
            errors.first().map_or(String::new(), |e| format!("; error {e}"))
        ),
    )
}

fn numeric_exact_consistency() -> Verdict {
    let pts = common::full_polynomial_sweep();
    let results = Execution::default().map(&pts, |(f, p)| {
        let cert = cc_residual_exact(*f, p)?;
        let num = cc_residual(*f, p, &standard_grid(*f))?;
        Ok::<_, shapeinv::Error>((cert.is_proven(), num.max_abs))
    });
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut failures = Vec::new();
    for ((f, p), r) in pts.iter().zip(results) {
        match r {
            Ok((true, m)) => {
                compared += 1;
                worst = worst.max(m);
                if m.is_nan() || m >= tolerances::NUMERIC_CC {
                    failures.push(format!("{f} {p}: {m:.2e}"));
                }
            }
            Ok((false, _)) => {}
            Err(e) => failures.push(format!("{f} {p}: {e}")),
        }
    }
    Verdict::new(
        failures.is_empty() && compared > 0,
        format!(
            "{compared} proven configurations, max |ε| {worst:.2e}{}",
            failures.first().map_or(String::new(), |f| format!("; failing {f}"))
        ),
    )
}

const CRITERIA: [Criterion; 8] = [
    Criterion {
        id: 1,
        name: "exact identity certificates",
        budget: Duration::from_secs(10),
        run: exact_certificates,
    },
    Criterion {
        id: 2,
        name: "shape-invariance remainder",
        budget: Duration::from_secs(30),
        run: remainder_consistency,
    },
    Criterion {
        id: 3,
        name: "gauge covariance",
        budget: Duration::from_secs(5),
        run: gauge_covariance,
    },
    Criterion {
        id: 4,
        name: "negative control",
        budget: Duration::from_secs(10),
        run: negative_control,
    },
    Criterion {
        id: 5,
        name: "isospectrality",
        budget: Duration::from_secs(60),
        run: isospectrality,
    },
    Criterion {
        id: 6,
        name: "reduced vs full partner potentials",
        budget: Duration::from_secs(10),
        run: construction_equality,
    },
    Criterion {
        id: 7,
        name: "special-function cross-checks",
        budget: Duration::from_secs(5),
        run: special_functions,
    },
    Criterion {
        id: 8,
        name: "numeric/exact consistency",
        budget: Duration::from_secs(10),
        run: numeric_exact_consistency,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let v = (c.run)();
        let took = start.elapsed();
        let timing = if took <= c.budget { "" } else { " over budget" };
        println!(
            "{} [{}] {:<36} {:>7.2}s / {}s{timing}  {}",
            if v.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            took.as_secs_f64(),
            c.budget.as_secs(),
            v.detail
        );
        failed += usize::from(!v.passed);
    }
    println!("acceptance: {}/{} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
