//! Bound states of `-d²/dx² + V` from a second-order finite-difference
//! discretization, and the isospectrality report built on them.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{raw_unshift, BaseSuperpotential, Family, Params};
use crate::parallel::Execution;
use crate::report;
use crate::superpotential::{classical_partners, Construction, ExtendedSuperpotential, PartnerPair, Potential};

/// Uniform grid of `n` interior nodes; Dirichlet conditions at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    #[serde(serialize_with = "report::sig17")]
    pub x_min: f64,
    #[serde(serialize_with = "report::sig17")]
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 200;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
            return Err(Error::Config(format!("grid needs x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < Self::MIN_NODES {
            return Err(Error::Config(format!("grid needs at least {} nodes, got {n}", Self::MIN_NODES)));
        }
        Ok(Grid { x_min, x_max, n })
    }

    /// Default eigensolver grid for a family, with 4000 interior nodes.
    pub fn for_family(family: Family) -> Self {
        let (lo, hi) = match family {
            Family::TrigDpt | Family::TrigDptContL => (1e-3, FRAC_PI_2 - 1e-3),
            _ => (1e-3, 12.0),
        };
        Grid { x_min: lo, x_max: hi, n: 4000 }
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n as f64 + 1.0)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 1.0) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }
}

/// Lowest eigenvalues in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(serialize_with = "report::sig17_vec")]
    pub eigenvalues: Vec<f64>,
    pub k: usize,
    pub discretization: Grid,
}

/// Symmetric tridiagonal matrix with constant off-diagonal `off`.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda` (Sturm count through
    /// the `LDL^T` pivots).
    fn count_below(&self, lambda: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - lambda } else { a - lambda - off2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &a| m.min(a - r));
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a + r));
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, j: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (lo.abs().max(hi.abs())).max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Lowest `k` eigenvalues of `-d²/dx² + V` on `grid`.
pub fn solve_bound_states(potential: &Potential, grid: &Grid, k: usize) -> Result<Spectrum> {
    if k == 0 || k > grid.n / 10 {
        return Err(Error::Config(format!("k must lie in 1..={}, got {k}", grid.n / 10)));
    }
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let diag = (0..grid.n)
        .map(|i| Ok(2.0 * inv_h2 + potential.eval(grid.node(i))?))
        .collect::<Result<Vec<_>>>()?;
    let matrix = Tridiagonal { diag, off: -inv_h2 };
    let (lo, hi) = matrix.gershgorin();
    let eigenvalues: Vec<f64> = (0..k).map(|j| matrix.eigenvalue(j, lo, hi)).collect();
    Ok(Spectrum {
        eigenvalues,
        k,
        discretization: *grid,
    })
}

/// Relative deviation with the reference floored at 1 (levels may be 0).
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Best alignment of two spectra, `upper[i + offset] ≈ lower[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelMatch {
    /// Index offset of the second spectrum relative to the first.
    pub offset: i64,
    pub shared: usize,
    #[serde(serialize_with = "report::sig17")]
    pub max_rel: f64,
}

impl LevelMatch {
    pub fn within(&self, tol: f64) -> bool {
        self.max_rel <= tol
    }
}

/// Tries offsets 0, +1 and -1 and keeps the one with the smallest deviation.
pub fn match_levels(first: &[f64], second: &[f64]) -> LevelMatch {
    let mut best: Option<LevelMatch> = None;
    for offset in [0i64, 1, -1] {
        let pairs: Vec<(f64, f64)> = (0..first.len())
            .filter_map(|i| {
                let j = i as i64 + offset;
                (j >= 0 && (j as usize) < second.len()).then(|| (first[i], second[j as usize]))
            })
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let max_rel = pairs.iter().fold(0.0f64, |m, &(a, b)| m.max(relative_gap(a, b)));
        let cand = LevelMatch {
            offset,
            shared: pairs.len(),
            max_rel,
        };
        if best.is_none_or(|b| cand.max_rel < b.max_rel) {
            best = Some(cand);
        }
    }
    let nothing_to_compare = first.is_empty() && second.is_empty();
    best.unwrap_or(LevelMatch {
        offset: 0,
        shared: 0,
        max_rel: if nothing_to_compare { 0.0 } else { f64::INFINITY },
    })
}

/// Spectra of the extended and classical pairs and their comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsospectralityReport {
    pub family: Family,
    pub grid: Grid,
    pub k: usize,
    pub extended_v: Spectrum,
    pub extended_v_tilde: Spectrum,
    pub classical_v: Spectrum,
    pub classical_v_tilde: Spectrum,
    /// Extended `V` against extended `Ṽ`.
    pub partner_match: LevelMatch,
    /// Extended `Ṽ` against classical `Ṽ0`.
    pub tilde_match: LevelMatch,
    /// Extended `V` against classical `V0`.
    pub v_match: LevelMatch,
    #[serde(serialize_with = "report::sig17")]
    pub first_gap: f64,
    #[serde(serialize_with = "report::sig17")]
    pub mean_gap: f64,
    /// First level gap of `Ṽ(a)` predicted by shape invariance, `|R(f⁻¹(a))|`.
    #[serde(serialize_with = "report::sig17")]
    pub expected_gap: f64,
    /// `V(x_max) - λ_max` for the extended `V`.
    #[serde(serialize_with = "report::sig17")]
    pub right_wall_margin: f64,
    /// Asymptotic value of the hyperbolic potentials, `(G - H)^2`.
    #[serde(serialize_with = "report::sig17_opt")]
    pub continuum_threshold: Option<f64>,
    /// Levels of the extended `Ṽ` below the continuum threshold.
    pub bound_states_below_threshold: Option<usize>,
    /// Levels of the extended `V` entering the comparison: all `k`, or for
    /// the hyperbolic family only those below the continuum threshold.
    pub compared_levels: usize,
}

impl IsospectralityReport {
    /// `V` and `Ṽ` share all but one level and both extended spectra match
    /// their classical counterparts, all within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.partner_match.within(tol)
            && self.partner_match.shared + 1 >= self.compared_levels
            && self.tilde_match.within(tol)
            && self.v_match.within(tol)
    }
}

fn spectra(pairs: [&PartnerPair; 2], grid: &Grid, k: usize, exec: Execution) -> Result<Vec<Spectrum>> {
    let potentials = [&pairs[0].v, &pairs[0].v_tilde, &pairs[1].v, &pairs[1].v_tilde];
    exec.map(&potentials, |v| solve_bound_states(v, grid, k)).into_iter().collect()
}

pub fn isospectrality_report(family: Family, p: &Params, k: usize, grid: &Grid) -> Result<IsospectralityReport> {
    isospectrality_report_with(family, p, k, grid, Execution::default())
}

pub fn isospectrality_report_with(
    family: Family,
    p: &Params,
    k: usize,
    grid: &Grid,
    exec: Execution,
) -> Result<IsospectralityReport> {
    let domain = family.domain();
    domain.check(grid.node(0))?;
    domain.check(grid.node(grid.n - 1))?;
    let esp = ExtendedSuperpotential::new(family, p)?;
    let extended = esp.partner_pair(Construction::Reduced);
    let classical = classical_partners(family, p)?;
    let mut s = spectra([&extended, &classical], grid, k, exec)?.into_iter();
    let (ev, evt, cv, cvt) = (
        s.next().expect("four spectra"),
        s.next().expect("four spectra"),
        s.next().expect("four spectra"),
        s.next().expect("four spectra"),
    );
    let threshold = (family == Family::HypDpt).then(|| {
        let w0 = BaseSuperpotential::new(family, p);
        (w0.g_eff - w0.h_eff).powi(2)
    });
    let bound = |sp: &Spectrum| -> Vec<f64> {
        match threshold {
            Some(t) => sp.eigenvalues.iter().copied().filter(|&e| e < t).collect(),
            None => sp.eigenvalues.clone(),
        }
    };
    let (bv, bvt, bcv, bcvt) = (bound(&ev), bound(&evt), bound(&cv), bound(&cvt));
    let gaps: Vec<f64> = bvt.windows(2).map(|w| w[1] - w[0]).collect();
    let first_gap = gaps.first().copied().unwrap_or(f64::NAN);
    let mean_gap = if gaps.is_empty() {
        f64::NAN
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    let top = bv.last().copied().unwrap_or(*ev.eigenvalues.last().expect("k >= 1"));
    let right_wall_margin = extended.v.eval(grid.node(grid.n - 1))? - top;
    let bound_states_below_threshold = threshold.map(|_| bvt.len());
    Ok(IsospectralityReport {
        family,
        grid: *grid,
        k,
        partner_match: match_levels(&bv, &bvt),
        tilde_match: match_levels(&bvt, &bcvt),
        v_match: match_levels(&bv, &bcv),
        compared_levels: bv.len(),
        extended_v: ev,
        extended_v_tilde: evt,
        classical_v: cv,
        classical_v_tilde: cvt,
        first_gap,
        mean_gap,
        expected_gap: family.expected_remainder(&raw_unshift(family, p)).abs(),
        right_wall_margin,
        continuum_threshold: threshold,
        bound_states_below_threshold,
    })
}

/// `(x, V, Ṽ)` columns on the interior nodes, as CSV.
pub fn potential_csv(pair: &PartnerPair, xs: &[f64]) -> Result<String> {
    let v = xs.iter().map(|&x| pair.v.eval(x)).collect::<Result<Vec<_>>>()?;
    let vt = xs.iter().map(|&x| pair.v_tilde.eval(x)).collect::<Result<Vec<_>>>()?;
    Ok(report::csv_columns(&["x", "v", "v_tilde"], &[xs, &v, &vt]))
}
