use ckn_core::closedform::{radial_constant_sr, rellich_candidates};
use ckn_core::identities::{equivalence_ratio, verify_hardy_identity, verify_iid, xi_sign, Sign};
use ckn_core::numerics::{integrate, LogGrid, RadialProfile};
use ckn_core::params::{derive, felli_schneider, lower_beta, upper_beta, RegionClass};
use ckn_core::spectral::gamma_comparison;
use ckn_core::variational::weighted_quotient;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = u32> {
    5u32..=10
}

/// An interior admissible point, with `β` a fraction of the way up the
/// admissible interval.
fn interior() -> impl Strategy<Value = (u32, f64, f64)> {
    (dims(), -0.9f64..3.0, 0.05f64..0.95).prop_map(|(n, s, f)| {
        let alpha = s * (n as f64 - 2.0) / 3.0;
        let lo = lower_beta(n, alpha);
        (n, alpha, lo + f * (upper_beta(alpha) - lo))
    })
}

fn bump_grid() -> LogGrid<f64> {
    LogGrid::new(-10.0, 10.0, 2001).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_scalars_are_consistent((n, a, b) in interior()) {
        let p = derive(n, a, b).unwrap();
        let nf = n as f64;
        let x = nf + b;
        let y = nf + 2.0 * a - b - 4.0;
        prop_assert!((p.p - 2.0 * y / x).abs() <= 1e-12 * p.p);
        prop_assert!((p.gamma - (y * y / x - nf)).abs() <= 1e-12 * (1.0 + p.gamma.abs()));
        prop_assert!((p.kappa1 + p.kappa2 - (nf + a - 2.0)).abs() <= 1e-12 * (1.0 + nf + a));
        prop_assert!(p.p > 2.0 && p.p <= 2.0 * nf / (nf - 4.0) + 1e-12);
        prop_assert!(p.c_amp > 0.0 && p.cosh_amp > 0.0);
    }

    #[test]
    fn region_matches_felli_schneider((n, a, b) in interior()) {
        let p = derive(n, a, b).unwrap();
        let fs = felli_schneider(n, a);
        match p.region {
            RegionClass::SymmetryBreaking => prop_assert!(a > 0.0 && b < fs),
            RegionClass::ConjecturedSymmetry => prop_assert!(a <= 0.0 || b > fs),
            RegionClass::FSCurve => prop_assert_eq!(b, fs),
            other => prop_assert!(false, "interior point classified as {other:?}"),
        }
    }

    #[test]
    fn out_of_range_beta_is_rejected(n in dims(), a in -0.5f64..2.0, d in 1e-6f64..1.0) {
        prop_assert!(derive(n, a, upper_beta(a) + d).is_err());
        prop_assert!(derive(n, a, lower_beta(n, a) - d).is_err());
    }

    #[test]
    fn quadrature_is_linear(c in -3.0f64..3.0, w in 0.3f64..1.5, k in -5.0f64..5.0, e in 0.0f64..3.0) {
        let g = bump_grid();
        let f = RadialProfile::gaussian_mix(&g, &[(1.0, c, w)]);
        let h = RadialProfile::gaussian_mix(&g, &[(1.0, -c, w)]);
        let sum: Vec<f64> = f.values().iter().zip(h.values()).map(|(a, b)| a + k * b).collect();
        let lhs = integrate(&sum, &g, e).value;
        let rhs = integrate(f.values(), &g, e).value + k * integrate(h.values(), &g, e).value;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn quotient_is_scale_and_dilation_invariant(c in -1.0f64..1.0, w in 0.6f64..1.2, s in 0.2f64..5.0, l in -1.0f64..1.0) {
        let p = derive(5, 1.0, -2.0).unwrap();
        let g = LogGrid::default_grid();
        let u = RadialProfile::gaussian_mix(&g, &[(1.0, c, w)]);
        let v = RadialProfile::gaussian_mix(&g, &[(s, c + l, w)]);
        let a = weighted_quotient(&u, &p).unwrap();
        let b = weighted_quotient(&v, &p).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-8);
        prop_assert!(a >= radial_constant_sr(&p).unwrap() * (1.0 - 1e-9));
    }

    #[test]
    fn mode_identities_hold(n in dims(), k in 0u32..=3, c in -2.0f64..2.0, w in 0.4f64..1.0) {
        let g = LogGrid::default_grid();
        let v = RadialProfile::gaussian_mix(&g, &[(1.0, c, w), (-0.5, c + 0.7, w)]);
        prop_assert!(verify_iid(&v, k, n).unwrap().relerr < 1e-5);
        prop_assert!(verify_hardy_identity(&v, k, n).unwrap().relerr < 1e-5);
    }

    #[test]
    fn xi_sign_follows_alpha(n in dims(), s in -0.999f64..4.0) {
        let a = s * (n as f64 - 2.0);
        prop_assert_eq!(xi_sign(n, a).unwrap().1, Sign::of(a));
    }

    #[test]
    fn rellich_forms_coincide(n in dims(), s in -0.999f64..4.0) {
        let (s1, s2) = rellich_candidates(n, s * (n as f64 - 2.0)).unwrap();
        prop_assert!((s1 - s2).abs() <= 1e-10 * s1.abs().max(1.0));
    }

    #[test]
    fn equivalence_ratio_scale_and_dilation(c in -1.5f64..1.5, w in 0.4f64..1.0, s in 0.1f64..10.0, l in -1.0f64..1.0, k in 0u32..=3) {
        let p = derive(5, 1.0, -2.0).unwrap();
        let g = LogGrid::default_grid();
        let u = RadialProfile::gaussian_mix(&g, &[(1.0, c, w), (0.4, c - 0.8, w)]);
        let v = RadialProfile::gaussian_mix(&g, &[(s, c + l, w), (0.4 * s, c - 0.8 + l, w)]);
        let a = equivalence_ratio(&u, k, &p).unwrap();
        let b = equivalence_ratio(&v, k, &p).unwrap();
        prop_assert!(a.inside);
        prop_assert!(((a.ratio - b.ratio) / a.ratio).abs() < 1e-9);
    }

    #[test]
    fn gamma_comparison_strict_beyond_first_mode(m in 4.01f64..40.0, k in 2u32..8) {
        let (lhs, rhs, holds) = gamma_comparison(m, k).unwrap();
        prop_assert!(holds && lhs < rhs);
        let (l1, r1, h1) = gamma_comparison(m, 1).unwrap();
        prop_assert!(h1 && ((l1 - r1) / r1).abs() < 1e-13);
    }
}
