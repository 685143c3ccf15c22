use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use grl_core::gabor::{atom_eval, DependenceCoefficients, GaborConfig, TFPoint};
use grl_core::numerics::Coordinate;
use grl_core::trigpoly::TrigPolynomial;
use grl_core::windows::Window;
use grl_core::zak::{
    functional_equation_residual, lattice_sum, quasi_periodicity_residual, zak_eval, zak_sum, zak_transform,
};

fn one(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn integer_shift_and_modulation_give_exact_functional_equations() {
    let z = zak_transform(&Window::gaussian(1), 32, 8).unwrap();
    // Zf(t − 1, ω) = e^{−2πiω} Zf(t, ω)
    let p = TrigPolynomial::new(2, vec![(vec![0, -1], one(1.0))]).unwrap();
    assert!(functional_equation_residual(&z, &p, &[1.0], &[0.0]).unwrap() < 1e-13);
    // e^{−2πit} Zf(t, ω + 1) = e^{−2πit} Zf(t, ω)
    let p = TrigPolynomial::new(2, vec![(vec![-1, 0], one(1.0))]).unwrap();
    assert!(functional_equation_residual(&z, &p, &[0.0], &[1.0]).unwrap() < 1e-13);
    // the wrong polynomial is detected
    let p = TrigPolynomial::new(2, vec![(vec![0, 1], one(1.0))]).unwrap();
    assert!(functional_equation_residual(&z, &p, &[1.0], &[0.0]).unwrap() > 0.1);
}

#[test]
fn lattice_combinations_become_multipliers() {
    let g = Window::gaussian(1);
    let pts = vec![
        TFPoint::scalar(Coordinate::integer(0), Coordinate::integer(0)),
        TFPoint::scalar(Coordinate::integer(2), Coordinate::integer(-1)),
        TFPoint::scalar(Coordinate::integer(-1), Coordinate::integer(3)),
        TFPoint::scalar(Coordinate::parse("sqrt2").unwrap(), Coordinate::parse("sqrt3").unwrap()),
    ];
    let cfg = GaborConfig::from_points(1, pts).unwrap();
    let coef = DependenceCoefficients {
        c: vec![Complex64::new(0.5, 0.25), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0)],
        target_index: 3,
    };
    let p = TrigPolynomial::from_lattice_config(&cfg, &coef).unwrap();
    let combo = |s: &[f64]| -> Complex64 {
        cfg.points()[..3].iter().zip(&coef.c).map(|(pt, c)| c * atom_eval(&g, pt, s).unwrap()).sum()
    };
    for &(t, w) in &[(0.1, 0.2), (0.5, 0.5), (0.77, 0.03), (0.33, 0.9)] {
        let lhs = lattice_sum(combo, &[t], &[w], 12);
        let rhs = p.eval_at(&[t, w]).unwrap() * zak_sum(&g, &[t], &[w], 12).unwrap();
        assert!((lhs - rhs).norm() < 1e-13, "({t},{w}): {lhs} vs {rhs}");
    }
}

#[test]
fn grid_norm_is_unitary() {
    for w in [Window::gaussian(1), Window::hermite(1), Window::hermite(3)] {
        let z = zak_transform(&w, 64, 10).unwrap();
        assert!((z.grid_l2_squared() - 1.0).abs() < 1e-10, "{}", z.grid_l2_squared());
    }
    let z = zak_transform(&Window::gaussian(2), 12, 6).unwrap();
    assert!((z.grid_l2_squared() - 1.0).abs() < 1e-8);
}

#[test]
fn gaussian_zak_vanishes_only_at_the_half_point() {
    let g = Window::gaussian(1);
    assert!(zak_eval(&g, &[0.5], &[0.5], 10).unwrap().norm() < 1e-15);
    let z = zak_transform(&g, 16, 10).unwrap();
    let small: Vec<_> = (0..z.len()).filter(|&i| z.values[i].norm() < 1e-3).map(|i| z.point(i)).collect();
    assert_eq!(small, vec![(vec![0.5], vec![0.5])]);
}

#[test]
fn hermite_odd_orders_vanish_at_the_origin() {
    // odd functions sum to zero over a symmetric lattice at t = ω = 0
    for n in [1, 3, 5] {
        assert!(zak_eval(&Window::hermite(n), &[0.0], &[0.0], 12).unwrap().norm() < 1e-14);
    }
}

#[test]
fn quasi_periodicity_holds_on_grids() {
    let z = zak_transform(&Window::hermite(2), 16, 8).unwrap();
    assert!(quasi_periodicity_residual(&z).unwrap() < 1e-13);
}

#[test]
fn modulation_by_sqrt2_is_not_a_multiplier() {
    // for β ∉ Z the functional equation with p ≡ 1 fails
    let z = zak_transform(&Window::gaussian(1), 32, 8).unwrap();
    let p = TrigPolynomial::constant(2, one(1.0));
    assert!(functional_equation_residual(&z, &p, &[0.0], &[2f64.sqrt()]).unwrap() > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_evaluation_respects_quasi_periodicity(t in -3.0f64..3.0, w in -3.0f64..3.0, n in -3i32..=3) {
        let g = Window::hermite(1);
        let a = zak_eval(&g, &[t], &[w], 10).unwrap();
        let b = zak_eval(&g, &[t + n as f64], &[w], 10).unwrap();
        prop_assert!((b - a * Complex64::from_polar(1.0, 2.0 * PI * n as f64 * w)).norm() < 1e-12);
        let c = zak_eval(&g, &[t], &[w + n as f64], 10).unwrap();
        prop_assert!((c - a).norm() < 1e-12);
    }

    #[test]
    fn reduced_and_raw_sums_agree(t in -1.5f64..1.5, w in 0.0f64..1.0) {
        let g = Window::gaussian(1);
        let a = zak_eval(&g, &[t], &[w], 10).unwrap();
        let b = zak_sum(&g, &[t], &[w], 10).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }
}
