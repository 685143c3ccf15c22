use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use grl_core::cocycle::phase::{
    cluster_set_c1, cluster_set_c2, phase_cocycle_iterate, ClusterKind, PhaseSetup, SyntheticPhaseField,
};
use grl_core::cocycle::{case3_verdict, propagate, theta_birkhoff, theta_haar, Case3Verdict};
use grl_core::numerics::{Coordinate, QuadratureSpec, TorusPoint};
use grl_core::orbit::{classify, orbit_iterate, subgroup_closure, subgroup_from_annihilator, Gamma};
use grl_core::remark::{default_quadrature, first_closed_form, first_polynomial, second_polynomial, vertical_circle};
use grl_core::trigpoly::TrigPolynomial;

fn gamma(s: &str) -> Gamma {
    Gamma::parse(s).unwrap()
}

fn c(s: &str) -> Coordinate {
    Coordinate::parse(s).unwrap()
}

fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Roots of a monic cubic by Durand–Kerner iteration.
fn cubic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let f = |z: Complex64| ((z + c2) * z + c1) * z + c0;
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [Complex64::new(1.0, 0.0), seed, seed * seed];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= f(r[i]) / den;
        }
        if prev.iter().zip(&r).all(|(a, b)| (a - b).norm() < 1e-16 * (1.0 + b.norm())) {
            break;
        }
    }
    r
}

/// `∫₀¹ ln |p₂(t, w)| dw` by Jensen's formula.
///
/// With `v = e^{2πiw}`, `a = e^{2πit}`, `b = e^{8πit}` one has
/// `v² p₂ = (a/4) v³ + v² + b/4`, so the integral is
/// `ln(1/4) + Σ ln max(1, |r|)` over the roots of `v³ + (4/a) v² + b/a`.
fn second_jensen(t: f64) -> f64 {
    let a = Complex64::from_polar(1.0, 2.0 * PI * t);
    let b = Complex64::from_polar(1.0, 8.0 * PI * t);
    let roots = cubic_roots(4.0 / a, Complex64::new(0.0, 0.0), b / a);
    0.25f64.ln() + roots.iter().map(|r| r.norm().max(1.0).ln()).sum::<f64>()
}

#[test]
fn second_polynomial_along_vertical_circles_matches_jensen() {
    let p = second_polynomial();
    let h = vertical_circle();
    let g = gamma("0,sqrt2");
    let mut largest: f64 = 0.0;
    for j in 0..20 {
        let t = j as f64 / 20.0 + 0.013;
        let lam = TorusPoint::new(&[t, 0.0]).unwrap();
        let oracle = second_jensen(t);
        let quad = theta_haar(&p, &lam, &h, &default_quadrature(), f64::MIN_POSITIVE).unwrap().value;
        assert!((quad - oracle).abs() < 1e-10, "t = {t}: {quad} vs {oracle}");
        largest = largest.max(oracle.abs());
        if j % 5 == 0 {
            let b = theta_birkhoff(&p, &lam, &g, 200_000, 1e-8).unwrap().value;
            assert!((b - oracle).abs() < 1e-3, "t = {t}: Birkhoff {b} vs {oracle}");
        }
    }
    // Θ is not identically zero along this orbit closure: about 0.016 at its peak
    assert!(largest > 1e-2, "{largest}");
}

#[test]
fn birkhoff_agrees_with_haar_on_a_dense_orbit() {
    let p = second_polynomial();
    let g = gamma("sqrt2,sqrt3");
    let cls = classify(&g, 30, 1e-9).unwrap();
    let h = subgroup_closure(&g, &cls).unwrap();
    let lam = TorusPoint::new(&[0.1, 0.6]).unwrap();
    let haar = theta_haar(&p, &lam, &h, &default_quadrature(), f64::MIN_POSITIVE).unwrap().value;
    // the full-torus integral is independent of λ and vanishes since the constant term dominates
    assert!(haar.abs() < 1e-10, "{haar}");
    let b = theta_birkhoff(&p, &lam, &g, 500_000, 1e-8).unwrap();
    assert!(b.value.abs() < 1e-3 && b.reliable);
}

#[test]
fn first_polynomial_birkhoff_matches_closed_form() {
    let p = first_polynomial();
    let g = gamma("0,sqrt2");
    for &t in &[0.0, 0.1, 0.2, 0.3, 0.45] {
        let lam = TorusPoint::new(&[t, 0.37]).unwrap();
        let b = theta_birkhoff(&p, &lam, &g, 400_000, 1e-8).unwrap();
        assert!(b.reliable);
        assert!((b.value - first_closed_form(t)).abs() < 2e-3, "t = {t}: {}", b.value);
    }
}

#[test]
fn balanced_and_growth_verdicts() {
    let p = first_polynomial();
    let h = vertical_circle();
    let q = default_quadrature();
    let at = |t: f64| theta_haar(&p, &TorusPoint::new(&[t, 0.0]).unwrap(), &h, &q, f64::MIN_POSITIVE).unwrap();
    assert_eq!(case3_verdict(&at(0.4), 1e-8).unwrap(), Case3Verdict::Balanced);
    assert_eq!(case3_verdict(&at(0.1), 1e-8).unwrap(), Case3Verdict::Growth);
    // a constant below one decays
    let small = TrigPolynomial::constant(2, Complex64::new(0.5, 0.0));
    let z = TorusPoint::origin(2);
    let e = theta_haar(&small, &z, &h, &q, f64::MIN_POSITIVE).unwrap();
    assert_eq!(case3_verdict(&e, 1e-8).unwrap(), Case3Verdict::Decay);
}

#[test]
fn zero_base_value_stays_zero_everywhere() {
    let tr = propagate(0.0, &TorusPoint::new(&[0.2, 0.3]).unwrap(), &gamma("0,sqrt2"), &second_polynomial(), 100, 1e-8)
        .unwrap();
    assert!((0..tr.len()).all(|n| tr.is_zero_at(n)));
    let tr = propagate(1.0, &TorusPoint::new(&[0.2, 0.3]).unwrap(), &gamma("0,sqrt2"), &second_polynomial(), 100, 1e-8)
        .unwrap();
    assert!((0..tr.len()).all(|n| !tr.is_zero_at(n) && tr.log_f[n].is_finite()));
}

#[test]
fn phase_with_constant_polynomial_telescopes() {
    // α = 1/3, β = 5/7: the quadratic term is an exact rational
    let setup = PhaseSetup::new(vec![0.2], vec![0.1], vec![c("1/3")], vec![c("5/7")]).unwrap();
    let k = Complex64::from_polar(2.0, 2.0 * PI * 0.125);
    let p = TrigPolynomial::constant(2, k);
    let theta0 = 0.3;
    for n in [1usize, 2, 7, 100, 12_345] {
        let got = phase_cocycle_iterate(theta0, &p, &setup, n, 1e-8).unwrap();
        let nn = n as i128;
        let tri = (nn * (nn - 1) / 2 * 5).rem_euclid(21) as f64 / 21.0;
        let expect = theta0 + (n as f64 * 0.125).rem_euclid(1.0) + (n as f64 * 0.2 * 5.0 / 7.0).rem_euclid(1.0) - tri;
        assert!(circle_dist(got, expect) < 1e-9, "n = {n}: {got} vs {expect}");
    }
}

#[test]
fn closed_form_matches_stepwise_propagation() {
    let p = second_polynomial();
    for (a, b) in [("sqrt2", "1"), ("1/2", "sqrt3"), ("sqrt2", "sqrt3")] {
        let setup = PhaseSetup::new(vec![0.21], vec![0.64], vec![c(a)], vec![c(b)]).unwrap();
        let field = SyntheticPhaseField::build(0.15, &p, setup.clone(), 300, 1e-8).unwrap();
        for n in [0usize, 1, 2, 17, 150, 300] {
            let lhs = field.value(n).unwrap();
            let rhs = phase_cocycle_iterate(0.15, &p, &setup, n, 1e-8).unwrap();
            assert!(circle_dist(lhs, rhs) < 1e-9, "({a},{b}) n = {n}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn single_phase_step() {
    let p = second_polynomial();
    let setup = PhaseSetup::new(vec![0.21], vec![0.64], vec![c("sqrt2")], vec![c("sqrt3")]).unwrap();
    let got = phase_cocycle_iterate(0.4, &p, &setup, 1, 1e-8).unwrap();
    let phi = p.eval_at(&[0.21, 0.64]).unwrap().arg() / (2.0 * PI);
    let expect = 0.4 + phi + 0.21 * 3f64.sqrt();
    assert!(circle_dist(got, expect) < 1e-13);
}

#[test]
fn c2_for_integer_beta_is_a_single_point() {
    let pts = cluster_set_c2(&[c("sqrt2")], &[c("1")], &TorusPoint::new(&[0.3]).unwrap(), 500).unwrap();
    assert_eq!(pts.len(), 1);
    let expect = Complex64::from_polar(1.0, -2.0 * PI * 2f64.sqrt() * 0.3);
    assert!((pts[0] - expect).norm() < 1e-12);
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_products_are_consistent(t in 0.0f64..1.0, w in 0.0f64..1.0, m in 1usize..40, k in 1usize..40) {
        let g = gamma("sqrt2,sqrt3");
        let p = second_polynomial();
        let base = TorusPoint::new(&[t, w]).unwrap();
        let whole = propagate(1.0, &base, &g, &p, m + k, 1e-8).unwrap();
        let mid = orbit_iterate(&base, &g, m as u64).unwrap();
        let tail = propagate(1.0, &mid, &g, &p, k, 1e-8).unwrap();
        prop_assert!(whole.comparable(m, m + k));
        let a = whole.log_f[m + k] - whole.log_f[m];
        prop_assert!((a - tail.log_f[k]).abs() < 1e-10);
    }

    #[test]
    fn c1_size_is_the_reduced_denominator(p in -40i64..=40, q in 1i64..=40) {
        let ab = Coordinate::rational(p, q).unwrap();
        let set = cluster_set_c1(&ab);
        let (p, q) = { let g = gcd(p, q); (p / g, q / g) };
        let expect = if p == 0 { 1 } else { (2 * q / gcd(p, 2 * q)) as usize };
        prop_assert_eq!(set.size(), Some(expect));
        if let ClusterKind::FiniteRoots { points } = &set.kind {
            for (k, z) in points.iter().enumerate() {
                let w = Complex64::from_polar(1.0, -PI * k as f64 * p as f64 / q as f64);
                prop_assert!((z - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_sets_are_invariant(t in 0.0f64..1.0) {
        // Θ(λ + γ) = Θ(λ): translating along the orbit leaves the coset integral unchanged
        let p = first_polynomial();
        let h = subgroup_from_annihilator(2, &[vec![1, 0]]).unwrap();
        let q = QuadratureSpec::gauss(16).refined();
        let a = theta_haar(&p, &TorusPoint::new(&[t, 0.0]).unwrap(), &h, &q, f64::MIN_POSITIVE).unwrap().value;
        let b = theta_haar(&p, &TorusPoint::new(&[t, 2f64.sqrt().fract()]).unwrap(), &h, &q, f64::MIN_POSITIVE).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert_eq!(a.abs() <= 1e-9, first_closed_form(t) == 0.0 || first_closed_form(t).abs() <= 1e-9);
    }
}
