//! Trigonometric polynomials `p(z) = Σ c_ν e^{2πi⟨ν,z⟩}` on `T^m`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::gabor::{DependenceCoefficients, GaborConfig};
use crate::linalg::intlat;
use crate::numerics::sum::{StableComplexSum, StableSum};
use crate::numerics::torus::frac;
use crate::numerics::TorusPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dimension: usize,
    /// Sorted by frequency, no zero coefficients.
    terms: Vec<(Vec<i64>, Complex64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinModulus {
    pub min: f64,
    pub argmin: TorusPoint,
    pub grid_min: f64,
    /// `grid_min − L·h`, a certified lower bound for `min |p|` on the torus.
    pub lower_bound: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    freq: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    dimension: usize,
    terms: Vec<TermRepr>,
}

impl TrigPolynomial {
    /// Merges repeated frequencies and drops exact zeros.
    pub fn new(dimension: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (f, c) in terms {
            if f.len() != dimension {
                return Err(GrlError::invalid(format!(
                    "frequency {f:?} does not have length {dimension}"
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(GrlError::invalid("coefficients must be finite"));
            }
            *map.entry(f).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(TrigPolynomial {
            dimension,
            terms: map.into_iter().filter(|(_, c)| c.re != 0.0 || c.im != 0.0).collect(),
        })
    }

    pub fn constant(dimension: usize, c: Complex64) -> Self {
        TrigPolynomial::new(dimension, vec![(vec![0; dimension], c)]).expect("valid constant")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[(Vec<i64>, Complex64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial of the lattice part: the point `(x_k, y_k)` becomes
    /// frequency `(−y_k, −x_k)` in `(t, ω)` order with coefficient `c_k`.
    pub fn from_lattice_config(cfg: &GaborConfig, c: &DependenceCoefficients) -> Result<Self> {
        let d = cfg.dimension();
        let others = cfg.non_target_indices(c.target_index)?;
        if others.len() != c.c.len() {
            return Err(GrlError::invalid(format!(
                "{} coefficients for {} lattice points",
                c.c.len(),
                others.len()
            )));
        }
        let mut terms = Vec::with_capacity(others.len());
        for (&k, &ck) in others.iter().zip(&c.c) {
            let pt = &cfg.points()[k];
            let mut freq = Vec::with_capacity(2 * d);
            for (part, name) in [(&pt.y, "y"), (&pt.x, "x")] {
                for coord in part {
                    let n = coord.as_integer().ok_or_else(|| {
                        GrlError::invalid(format!("point {k} has non-integer {name} coordinate {coord}"))
                    })?;
                    freq.push(-n);
                }
            }
            terms.push((freq, ck));
        }
        TrigPolynomial::new(2 * d, terms)
    }

    pub fn eval(&self, z: &TorusPoint) -> Result<Complex64> {
        self.eval_at(z.coords())
    }

    /// Evaluation at an unreduced point (the polynomial is 1-periodic).
    pub fn eval_at(&self, z: &[f64]) -> Result<Complex64> {
        if z.len() != self.dimension {
            return Err(GrlError::invalid(format!(
                "polynomial on T^{} evaluated at a point of dimension {}",
                self.dimension,
                z.len()
            )));
        }
        Ok(self.eval_raw(z))
    }

    /// Evaluation without the dimension check.
    #[inline]
    pub fn eval_raw(&self, z: &[f64]) -> Complex64 {
        let mut acc = StableComplexSum::new();
        for (f, c) in &self.terms {
            let mut phase = 0.0;
            for (n, x) in f.iter().zip(z) {
                if *n != 0 {
                    phase += frac(*n as f64 * x);
                }
            }
            acc.add(c * Complex64::from_polar(1.0, 2.0 * PI * frac(phase)));
        }
        acc.value()
    }

    /// `ln max(|p(z)|, floor)`.
    pub fn log_modulus(&self, z: &TorusPoint, floor: f64) -> Result<f64> {
        if !(floor > 0.0) {
            return Err(GrlError::invalid(format!("log floor must be positive, got {floor}")));
        }
        Ok(self.eval(z)?.norm().max(floor).ln())
    }

    /// `2π Σ |ν|₂ |c_ν|`, a global Lipschitz constant of `p` (hence of `|p|`).
    pub fn lipschitz(&self) -> f64 {
        2.0 * PI
            * self
                .terms
                .iter()
                .map(|(f, c)| f.iter().map(|&n| (n as f64).powi(2)).sum::<f64>().sqrt() * c.norm())
                .sum::<f64>()
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn max_frequency(&self) -> i64 {
        self.terms.iter().flat_map(|(f, _)| f.iter().map(|n| n.abs())).max().unwrap_or(0)
    }

    /// Grid minimum of `|p|` followed by golden-section coordinate descent
    /// from the best node, with a Lipschitz lower-bound certificate.
    pub fn min_modulus(&self, resolution: usize) -> Result<MinModulus> {
        if resolution < 16 {
            return Err(GrlError::invalid(format!("min_modulus needs resolution >= 16, got {resolution}")));
        }
        let m = self.dimension;
        let total = resolution
            .checked_pow(m as u32)
            .filter(|&n| n <= 1 << 30)
            .ok_or_else(|| GrlError::invalid("min_modulus grid is too large"))?;
        let h = 1.0 / resolution as f64;
        let node = |idx: usize| -> Vec<f64> {
            let mut z = vec![0.0; m];
            let mut rest = idx;
            for c in z.iter_mut().rev() {
                *c = (rest % resolution) as f64 * h;
                rest /= resolution;
            }
            z
        };
        let (best_idx, grid_min) = (0..total)
            .into_par_iter()
            .map(|i| (i, self.eval_raw(&node(i)).norm()))
            .reduce(
                || (usize::MAX, f64::INFINITY),
                |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
            );
        let mut z = node(best_idx);
        let mut best = grid_min;
        // improvements smaller than the evaluation rounding are not trusted
        let noise = 8.0 * f64::EPSILON * self.coefficient_l1().max(1.0);
        // coordinate sweeps converge only linearly near a simple zero, so
        // keep sweeping until a full pass stops improving
        let window = h;
        for _ in 0..MAX_SWEEPS {
            let before = best;
            for j in 0..m {
                let (x, v) = golden_section(
                    |s| {
                        let mut zz = z.clone();
                        zz[j] = s;
                        self.eval_raw(&zz).norm()
                    },
                    z[j] - window,
                    z[j] + window,
                );
                if v < best - noise {
                    best = v;
                    z[j] = x;
                }
            }
            if best >= before - noise {
                break;
            }
        }
        let spread = (m as f64).sqrt() / 2.0;
        let lower_bound = grid_min - self.lipschitz() * h * spread.max(1.0);
        let argmin = TorusPoint::new(&z)?;
        Ok(MinModulus {
            min: best,
            argmin,
            grid_min,
            lower_bound,
        })
    }

    /// Keeps the terms whose frequency lies in the integer span of `hperp`:
    /// the Haar average of `p` over the subgroup annihilated by `hperp`.
    pub fn haar_average(&self, hperp: &[Vec<i64>]) -> Result<TrigPolynomial> {
        if hperp.iter().any(|b| b.len() != self.dimension) {
            return Err(GrlError::invalid("annihilator basis vectors have the wrong length"));
        }
        let rows: Vec<Vec<i128>> = hperp.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let basis = intlat::hnf(&rows)?;
        let mut kept = Vec::new();
        for (f, c) in &self.terms {
            let v: Vec<i128> = f.iter().map(|&x| x as i128).collect();
            if intlat::in_span(&basis, &v)? {
                kept.push((f.clone(), *c));
            }
        }
        Ok(TrigPolynomial {
            dimension: self.dimension,
            terms: kept,
        })
    }

    /// `z ↦ p(z + h)`: coefficients pick up `e^{2πi⟨ν,h⟩}`.
    pub fn translate(&self, h: &[f64]) -> Result<TrigPolynomial> {
        if h.len() != self.dimension {
            return Err(GrlError::invalid("translation has the wrong dimension"));
        }
        Ok(TrigPolynomial {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| {
                    let phase: f64 = f.iter().zip(h).map(|(n, x)| frac(*n as f64 * x)).sum();
                    (f.clone(), c * Complex64::from_polar(1.0, 2.0 * PI * frac(phase)))
                })
                .collect(),
        })
    }

    /// `Σ |c_ν|²`.
    pub fn coefficient_energy(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Mean of `|p|²` over the uniform grid with `resolution` nodes per axis.
    pub fn grid_mean_square(&self, resolution: usize) -> f64 {
        let m = self.dimension;
        let total = resolution.pow(m as u32);
        let mut acc = StableSum::new();
        let mut z = vec![0.0; m];
        for idx in 0..total {
            let mut rest = idx;
            for c in z.iter_mut().rev() {
                *c = (rest % resolution) as f64 / resolution as f64;
                rest /= resolution;
            }
            acc.add(self.eval_raw(&z).norm_sqr());
        }
        acc.value() / total as f64
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = PolyRepr {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermRepr {
                    freq: f.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: PolyRepr = serde_json::from_str(text)?;
        TrigPolynomial::new(
            repr.dimension,
            repr.terms.into_iter().map(|t| (t.freq, Complex64::new(t.re, t.im))).collect(),
        )
    }
}

impl Serialize for TrigPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            dimension: self.dimension,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermRepr {
                    freq: f.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Validates that a basis given as floats is integral.
pub fn integer_basis(basis: &[Vec<f64>]) -> Result<Vec<Vec<i64>>> {
    basis
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| {
                    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
                        Ok(x as i64)
                    } else {
                        Err(GrlError::invalid(format!("annihilator basis entry {x} is not an integer")))
                    }
                })
                .collect()
        })
        .collect()
}

/// Golden-section search for a minimum on `[a, b]`.
const MAX_SWEEPS: usize = 200;

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn p1() -> TrigPolynomial {
        TrigPolynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![-1, 0], c(1.0)), (vec![0, -1], c(-1.0))]).unwrap()
    }

    fn p2() -> TrigPolynomial {
        TrigPolynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![1, 1], c(0.25)), (vec![4, -2], c(0.25))]).unwrap()
    }

    #[test]
    fn merging_and_cancellation() {
        let p = TrigPolynomial::new(1, vec![(vec![2], c(1.0)), (vec![2], c(-1.0))]).unwrap();
        assert!(p.is_empty());
        assert!(TrigPolynomial::new(2, vec![(vec![1], c(1.0))]).is_err());
    }

    #[test]
    fn first_example_values() {
        let p = p1();
        assert!((p.eval_at(&[0.0, 0.0]).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((p.eval_at(&[0.5, 0.5]).unwrap() - c(1.0)).norm() < 1e-15);
        // |1 + e^{-2πi/3}| = 1, so p(1/3, w) = e^{-iπ/3} - e^{-2πiw}
        for w in [0.0, 0.2, 0.7] {
            let v = p.eval_at(&[1.0 / 3.0, w]).unwrap();
            let expect = Complex64::from_polar(1.0, -PI / 3.0) - Complex64::from_polar(1.0, -2.0 * PI * w);
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn min_modulus_examples() {
        let m = p2().min_modulus(256).unwrap();
        assert!(m.min >= 0.5 && m.min <= 0.5 + 1e-3, "{}", m.min);
        assert!(m.lower_bound <= m.min);
        let m = TrigPolynomial::constant(2, c(1.0)).min_modulus(16).unwrap();
        assert_eq!(m.min, 1.0);
        let m = p1().min_modulus(64).unwrap();
        assert!(m.min < 1e-3, "{}", m.min);
        assert!(p1().min_modulus(8).is_err());
    }

    #[test]
    fn haar_filter_examples() {
        let p = p1();
        let avg = p.haar_average(&[vec![1, 0]]).unwrap();
        assert_eq!(avg.terms(), &[(vec![-1, 0], c(1.0)), (vec![0, 0], c(1.0))]);
        let mean = p.haar_average(&[]).unwrap();
        assert_eq!(mean.terms(), &[(vec![0, 0], c(1.0))]);
        let same = p.haar_average(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(same, p);
        assert!(integer_basis(&[vec![1.0, 0.5]]).is_err());
    }

    #[test]
    fn log_modulus_examples() {
        let z = TorusPoint::new(&[0.3, 0.9]).unwrap();
        assert!((TrigPolynomial::constant(2, c(2.0)).log_modulus(&z, 1e-300).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(TrigPolynomial::constant(2, c(1.0)).log_modulus(&z, 1e-300).unwrap().abs() < 1e-15);
        assert!(p2().log_modulus(&z, 1e-300).unwrap() >= 0.5f64.ln());
        assert!(p2().log_modulus(&z, 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = p2();
        let back = TrigPolynomial::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
