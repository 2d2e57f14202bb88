//! Property-based invariants across the public API.

mod common;

use proptest::prelude::*;
use shapeinv::parallel::Execution;
use shapeinv::rational_poly::{int, rat, to_f64, Poly, Rational};
use shapeinv::spectral::{match_levels, relative_gap};
use shapeinv::specfun::hyp2f1;
use shapeinv::verify::{cc_residual_exact_perturbed, standard_grid, GaugeSpec};
use shapeinv::{
    cc_residual, cc_residual_exact, gauge_transform, si_residual, Family, FamilyPoint, Params, SeriesConfig,
};

/// Rationals `n/d` in `[lo, hi]` with small denominators.
fn rational_in(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (1i64..=12).prop_flat_map(move |d| (lo * d..=hi * d).prop_map(move |n| rat(n, d)))
}

fn radial() -> impl Strategy<Value = (Family, Params)> {
    (rational_in(2, 6), 0i64..=5).prop_map(|(g, l)| (Family::RadialOscillator, Params::gl(g, int(l))))
}

/// Trigonometric `h` with denominator 13, so `h - g` is never an integer
/// and the Jacobi deformation keeps its full degree.
fn trig_h() -> impl Strategy<Value = Rational> {
    (26i64..=78).prop_filter("non-integer", |n| n % 13 != 0).prop_map(|n| rat(n, 13))
}

fn trig() -> impl Strategy<Value = (Family, Params)> {
    (rational_in(2, 6), trig_h(), 0i64..=5)
        .prop_map(|(g, h, l)| (Family::TrigDpt, Params::ghl(g, h, int(l))))
}

fn hyp() -> impl Strategy<Value = (Family, Params)> {
    (rational_in(2, 6), 0i64..=5, 0usize..4).prop_map(|(g, l, k)| {
        let h = common::hyp_h_grid(l).swap_remove(k);
        (Family::HypDpt, Params::ghl(g, h, int(l)))
    })
}

fn polynomial_point() -> impl Strategy<Value = (Family, Params)> {
    prop_oneof![radial(), trig(), hyp()]
}

fn small_gauge() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 0..=4).prop_map(|c| Poly::from_ints(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_identity_holds((f, p) in polynomial_point()) {
        let cert = cc_residual_exact(f, &p).unwrap();
        prop_assert!(cert.is_proven(), "{f} {p}: {}", cert.residual_poly);
        prop_assert!(cert.routes_agree());
    }

    #[test]
    fn nonzero_perturbation_is_refuted((f, p) in polynomial_point(), num in 1i64..=50, neg in any::<bool>()) {
        prop_assume!(p.degree().unwrap() >= 1);
        let delta = rat(if neg { -num } else { num }, 100);
        let cert = cc_residual_exact_perturbed(f, &p, Some(&delta)).unwrap();
        prop_assert!(!cert.is_proven());
    }

    #[test]
    fn remainder_matches_closed_form((f, p) in polynomial_point()) {
        let r = si_residual(f, &p, &standard_grid(f)).unwrap();
        prop_assert!(r.is_constant);
        let expected = f.expected_remainder(&p);
        prop_assert!((r.constant_value.unwrap() - expected).abs() < 1e-8 * (1.0 + expected.abs()));
    }

    #[test]
    fn numeric_compatibility_vanishes((f, p) in polynomial_point()) {
        prop_assert!(cc_residual(f, &p, &standard_grid(f)).unwrap().max_abs < 1e-9);
    }

    #[test]
    fn gauge_predicts_twice_derivative((f, p) in polynomial_point(), gauge in small_gauge()) {
        let spec = GaugeSpec::new(gauge);
        let r = gauge_transform(f, &p, &spec, &standard_grid(f)).unwrap();
        prop_assert!(r.passes(1e-7), "{}: {:e}", spec.description, r.residual.max_abs);
    }

    #[test]
    fn family_point_text_round_trips((f, p) in polynomial_point()) {
        let fp = FamilyPoint::new(f, p).unwrap();
        let back: FamilyPoint = fp.to_string().parse().unwrap();
        prop_assert_eq!(back, fp);
    }

    #[test]
    fn continuous_radial_matches_polynomial_at_integer_l(g in rational_in(2, 6), l in 1i64..=4) {
        let xs = standard_grid(Family::RadialOscillator);
        let p = Params::gl(g, int(l));
        let a = si_residual(Family::RadialOscillator, &p, &xs).unwrap();
        let b = si_residual(Family::RadialOscillatorContL, &p, &xs).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn sequential_and_default_execution_agree(pts in prop::collection::vec(polynomial_point(), 1..6)) {
        let f = |(fam, p): &(Family, Params)| cc_residual(*fam, p, &standard_grid(*fam)).unwrap().values;
        prop_assert_eq!(Execution::Sequential.map(&pts, f), Execution::default().map(&pts, f));
    }
}

proptest! {
    #[test]
    fn relative_gap_is_scale_aware(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let r = relative_gap(a, b);
        prop_assert!(r >= 0.0);
        prop_assert!(r <= (a - b).abs());
        prop_assert_eq!(relative_gap(b, b), 0.0);
    }

    #[test]
    fn ground_state_offset_is_detected(levels in prop::collection::vec(0.5f64..100.0, 3..8)) {
        let mut upper = levels.clone();
        upper.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut lower = vec![0.0];
        lower.extend(upper.iter().take(upper.len() - 1));
        let m = match_levels(&upper, &lower);
        prop_assert_eq!(m.offset, 1);
        prop_assert_eq!(m.shared, upper.len() - 1);
        prop_assert_eq!(m.max_rel, 0.0);
    }

    #[test]
    fn gauss_series_symmetric_in_numerator(a in -3.0f64..3.0, b in -3.0f64..3.0, c in 0.5f64..4.0, z in -0.9f64..0.9) {
        let cfg = SeriesConfig::default();
        let x = hyp2f1(a, b, c, z, &cfg).map(f64::to_bits);
        let y = hyp2f1(b, a, c, z, &cfg).map(f64::to_bits);
        prop_assert_eq!(x, y);
    }

    #[test]
    fn trig_remainder_depends_on_g_plus_h(g in rational_in(2, 6), h in trig_h(), l in 0i64..=3) {
        let p = Params::ghl(g.clone(), h.clone(), int(l));
        let q = Params::ghl(h, g, int(l));
        prop_assert_eq!(Family::TrigDpt.expected_remainder(&p), Family::TrigDpt.expected_remainder(&q));
        let s = to_f64(&(&p.g + p.h()));
        prop_assert!((Family::TrigDpt.expected_remainder(&p) + 4.0 * (s + 2.0 * l as f64 - 1.0)).abs() < 1e-12);
    }
}
