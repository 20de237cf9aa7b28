use proptest::prelude::*;

use smoothzeta::funcmodel::{BumpFunction, FlatFactor, SmoothModelFunction};
use smoothzeta::model1d::{continue_l_unbounded, ProfileJet};
use smoothzeta::quad::{QuadratureConfig, Tolerance};
use smoothzeta::zeta::{
    bound_cusp, bound_rest, compute_r_m, continue_zeta_case_c, decomposition_bound, eval_zeta_direct,
    eval_zeta_direct_orthant, h0_estimate, orthant_decompose, piece_residues, ZetaOptions,
};
use smoothzeta::C64;

fn case_c() -> SmoothModelFunction {
    SmoothModelFunction::monomial(2, 3).with_h(0, FlatFactor::pure(2))
}

fn bump() -> BumpFunction {
    BumpFunction::product([1.0, 1.0], [0.5, 0.5])
}

fn with_m(m: u32) -> ZetaOptions {
    ZetaOptions {
        m: Some(m),
        ..ZetaOptions::default()
    }
}

fn one_d(a: u32, profile: smoothzeta::funcmodel::Profile, s: C64) -> C64 {
    let cfg = QuadratureConfig::default();
    continue_l_unbounded(a, 0, profile.inner, profile.outer, &ProfileJet(profile), s, None, &cfg)
        .unwrap()
        .value
}

#[test]
fn decomposition_sums_to_direct_for_each_m() {
    let (f, phi) = (case_c(), bump());
    let ss = [C64::new(0.15, 0.0), C64::new(0.5, -0.4), C64::new(1.0, 0.9)];
    let direct = eval_zeta_direct_orthant(&f, &phi, &ss, &QuadratureConfig::default()).unwrap();
    for m in [2, 4, 6] {
        let cont = continue_zeta_case_c(&f, &phi, &ss, &with_m(m)).unwrap();
        for (c, d) in cont.iter().zip(&direct) {
            let sum = c.axis + c.correction + c.cusp + c.rest;
            assert!((sum - d.value).norm() <= 1e-7, "m = {m}, s = {}: {sum} vs {}", c.s, d.value);
        }
    }
}

#[test]
fn m_consistency_inside_the_strip() {
    let (f, phi) = (case_c(), bump());
    let ss = [C64::new(-0.4, 0.0), C64::new(-0.25, 0.3), C64::new(-0.1, -0.2)];
    let a = continue_zeta_case_c(&f, &phi, &ss, &with_m(6)).unwrap();
    let b = continue_zeta_case_c(&f, &phi, &ss, &with_m(8)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.value).norm() <= 1e-4 * y.value.norm(), "{}: {} vs {}", x.s, x.value, y.value);
    }
}

/// Separable case: `Z̃(s) = ∫ x^{2s} P(x) dx · ∫ y^{3s} P(y) dy`, each factor
/// continued on its own.
#[test]
fn monomial_matches_product_of_one_dimensional_continuations() {
    let f = SmoothModelFunction::monomial(2, 3);
    let phi = bump();
    let ss = [C64::new(-0.45, 0.0), C64::new(-0.2, 0.35)];
    let got = continue_zeta_case_c(&f, &phi, &ss, &ZetaOptions::default()).unwrap();
    for z in &got {
        let want = one_d(2, phi.px, z.s) * one_d(3, phi.py, z.s);
        assert!((z.value - want).norm() <= 1e-8 * want.norm(), "{}: {} vs {want}", z.s, z.value);
    }
    // residue at -1/3 is L_x(-1/3) / 3
    let pr = piece_residues(&f, &phi, C64::new(-1.0 / 3.0, 0.0), 1e-2, 128, &with_m(6)).unwrap();
    let want = one_d(2, phi.px, C64::new(-1.0 / 3.0, 0.0)) / 3.0;
    let total = pr.axis + pr.correction + pr.cusp + pr.rest;
    assert!((total - want).norm() <= 1e-4 * want.norm(), "{total} vs {want}");
}

/// Only the axis part carries the residue at `-1/b`; the flat correction,
/// the cusp and the rest integrate to zero around it.
#[test]
fn non_axis_pieces_are_holomorphic_at_the_pole() {
    let (f, phi) = (case_c(), bump());
    let pr = piece_residues(&f, &phi, C64::new(-1.0 / 3.0, 0.0), 1e-2, 128, &with_m(6)).unwrap();
    let want = one_d(2, phi.px, C64::new(-1.0 / 3.0, 0.0)) / 3.0;
    assert!((pr.axis - want).norm() <= 1e-6 * want.norm(), "{} vs {want}", pr.axis);
    for (name, z) in [("correction", pr.correction), ("cusp", pr.cusp), ("rest", pr.rest)] {
        assert!(z.norm() <= 1e-8, "{name}: {z}");
    }
    assert_eq!(pr.dominant(), "axis");
}

#[test]
fn flat_in_x_example_is_self_consistent() {
    // x y² + x e^{-1/|x|}
    let f = SmoothModelFunction::monomial(1, 2).with_g(0, FlatFactor::new(1, vec![(1.0, 1)]));
    let phi = bump();
    let s = [C64::new(0.5, 0.0)];
    let coarse = eval_zeta_direct(&f, &phi, &s, &QuadratureConfig::default()).unwrap()[0].value;
    let fine_cfg = QuadratureConfig {
        tol: Tolerance::new(1e-15, 1e-13).with_max_intervals(2000),
        ..QuadratureConfig::default()
    };
    let fine = eval_zeta_direct(&f, &phi, &s, &fine_cfg).unwrap()[0].value;
    assert!(coarse.re.is_finite() && (coarse - fine).norm() <= 1e-6 * fine.norm());
}

#[test]
fn s_zero_gives_the_mass_of_the_weight() {
    let phi = bump();
    let z = eval_zeta_direct(&case_c(), &phi, &[C64::new(0.0, 0.0)], &QuadratureConfig::default()).unwrap();
    let mass_1d = one_d(1, phi.px, C64::new(0.0, 0.0)).re * 2.0;
    assert!((z[0].value.re - mass_1d * mass_1d).abs() <= 1e-9);
}

#[test]
fn cusp_bound_blows_up_at_the_strip_edge() {
    let (f, phi) = (case_c(), bump());
    let cfg = QuadratureConfig::default();
    let edge = decomposition_bound(2, 3, 4);
    let near = bound_cusp(&f, &phi, 4, edge + 1e-6, &cfg).unwrap();
    let far = bound_cusp(&f, &phi, 4, edge + 0.1, &cfg).unwrap();
    assert!(near.admissible && near.bound > 1e3 * far.bound);
    assert!(!bound_cusp(&f, &phi, 4, edge - 0.01, &cfg).unwrap().admissible);
    // a larger m moves the edge toward -1/a
    assert!(decomposition_bound(2, 3, 8) < edge);
    let rest = bound_rest(&f, &phi, 4, 0.2, &cfg).unwrap();
    assert!(rest.bound.is_finite() && rest.direct <= rest.bound);
    assert!(bound_rest(&f, &phi, 4, -0.25, &cfg).unwrap().bound.is_finite());
}

#[test]
fn threshold_of_xy_is_one() {
    let e = h0_estimate(&SmoothModelFunction::monomial(1, 1), &bump(), &QuadratureConfig::default()).unwrap();
    assert!((e.h0 - 1.0).abs() < 0.05, "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn orthants_add_up(cx in -0.3f64..0.3, cy in -0.3f64..0.3, re in 0.2f64..1.0, im in -1.0f64..1.0) {
        let f = case_c();
        let phi = BumpFunction::product_at([cx, cy], [0.9, 0.8], [0.6, 0.5]);
        let cfg = QuadratureConfig::default();
        let s = [C64::new(re, im)];
        let whole = eval_zeta_direct(&f, &phi, &s, &cfg).unwrap()[0].value;
        let mut sum = C64::new(0.0, 0.0);
        for o in orthant_decompose(&f, &phi) {
            sum += eval_zeta_direct_orthant(&o.f, &o.phi, &s, &cfg).unwrap()[0].value;
        }
        prop_assert!((sum - whole).norm() <= 1e-8, "{} vs {}", sum, whole);
    }

    #[test]
    fn r_m_shrinks_with_m(m in 1u32..10, extra in 1u32..6) {
        let f = case_c();
        prop_assert!(compute_r_m(&f, m + extra).unwrap() <= compute_r_m(&f, m).unwrap());
    }

    #[test]
    fn continuation_is_stable_in_m(re in -0.42f64..-0.05, im in -0.3f64..0.3) {
        let s = C64::new(re, im);
        prop_assume!((s + 1.0 / 3.0).norm() > 0.02);
        let (f, phi) = (case_c(), bump());
        let a = continue_zeta_case_c(&f, &phi, &[s], &with_m(6)).unwrap()[0].value;
        let b = continue_zeta_case_c(&f, &phi, &[s], &with_m(8)).unwrap()[0].value;
        prop_assert!((a - b).norm() <= 1e-4 * b.norm(), "{}: {} vs {}", s, a, b);
    }
}
