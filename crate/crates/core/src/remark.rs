//! The two worked trigonometric polynomials on `T²` where the modulus
//! equation is inconclusive, with their `Θ` profiles.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::theta_haar;
use crate::error::Result;
use crate::numerics::{QuadratureSpec, TorusPoint};
use crate::orbit::{subgroup_from_annihilator, SubgroupH};
use crate::trigpoly::TrigPolynomial;

/// `p(t, w) = 1 + e^{−2πit} − e^{−2πiw}`.
pub fn first_polynomial() -> TrigPolynomial {
    let c = |re: f64| Complex64::new(re, 0.0);
    TrigPolynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![-1, 0], c(1.0)), (vec![0, -1], c(-1.0))])
        .expect("valid polynomial")
}

/// `p(t, w) = 1 + ¼ e^{2πi(t+w)} + ¼ e^{4πi(2t−w)}`; `|p| ≥ 1/2` everywhere.
pub fn second_polynomial() -> TrigPolynomial {
    let c = |re: f64| Complex64::new(re, 0.0);
    TrigPolynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![1, 1], c(0.25)), (vec![4, -2], c(0.25))])
        .expect("valid polynomial")
}

/// `∫₀¹ ln |p₁(t, w)| dw = ln max(2|cos πt|, 1)` by Jensen's formula.
pub fn first_closed_form(t: f64) -> f64 {
    (2.0 * (PI * t).cos().abs()).max(1.0).ln()
}

/// `H = {0} × T`, the orbit closure of `γ = (0, √2)`.
pub fn vertical_circle() -> SubgroupH {
    subgroup_from_annihilator(2, &[vec![1, 0]]).expect("valid lattice")
}

/// `H = T × {0}`, integrating over `t`.
pub fn horizontal_circle() -> SubgroupH {
    subgroup_from_annihilator(2, &[vec![0, 1]]).expect("valid lattice")
}

pub fn default_quadrature() -> QuadratureSpec {
    QuadratureSpec::gauss(16).refined()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstProfileRow {
    pub t: f64,
    pub theta_quadrature: f64,
    pub theta_closed_form: f64,
}

/// `Θ(t)` at `points` equispaced `t ∈ [0, 1]`.
pub fn first_profile(points: usize, quad: &QuadratureSpec) -> Result<Vec<FirstProfileRow>> {
    let p = first_polynomial();
    let h = vertical_circle();
    let n = points.max(2);
    (0..n)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / (n - 1) as f64;
            let lam = TorusPoint::new(&[t, 0.0])?;
            Ok(FirstProfileRow {
                t,
                theta_quadrature: theta_haar(&p, &lam, &h, quad, f64::MIN_POSITIVE)?.value,
                theta_closed_form: first_closed_form(t),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondProfileRow {
    pub w: f64,
    pub theta: f64,
}

/// `Θ(w) = ∫₀¹ ln |p₂(t, w)| dt` at `points` values `w = j/points`.
pub fn second_profile(points: usize, quad: &QuadratureSpec) -> Result<Vec<SecondProfileRow>> {
    let p = second_polynomial();
    let h = horizontal_circle();
    let n = points.max(1);
    (0..n)
        .into_par_iter()
        .map(|j| {
            let w = j as f64 / n as f64;
            let lam = TorusPoint::new(&[0.0, w])?;
            Ok(SecondProfileRow {
                w,
                theta: theta_haar(&p, &lam, &h, quad, f64::MIN_POSITIVE)?.value,
            })
        })
        .collect()
}

pub fn max_profile_error(rows: &[FirstProfileRow]) -> f64 {
    rows.iter()
        .map(|r| (r.theta_quadrature - r.theta_closed_form).abs())
        .fold(0.0, f64::max)
}

pub fn write_first_csv<W: Write>(rows: &[FirstProfileRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "theta_quadrature", "theta_closed_form"])?;
    for r in rows {
        w.write_record([fmt(r.t), fmt(r.theta_quadrature), fmt(r.theta_closed_form)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_second_csv<W: Write>(rows: &[SecondProfileRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["w", "theta"])?;
    for r in rows {
        w.write_record([fmt(r.w), fmt(r.theta)])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}
