//! The modulus cocycle `F(z + γ) = |p(z)| F(z)` and its log-growth
//! functional `Θ`.

pub mod phase;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::numerics::quadrature::integrate_nd;
use crate::numerics::{stable_sum_real, QuadratureSpec, StableSum, TorusPoint};
use crate::orbit::{haar_sample_points_at, transversal_points, Gamma, OrbitStepper, SubgroupH};
use crate::trigpoly::TrigPolynomial;

pub const DEFAULT_SKIP_THRESHOLD: f64 = 1e-8;
/// Estimates skipping at least this fraction of the orbit are unreliable.
pub const UNRELIABLE_SKIP_FRACTION: f64 = 0.01;
pub const MIN_BIRKHOFF_STEPS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub n: usize,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleTrajectory {
    pub base: TorusPoint,
    pub gamma: Gamma,
    /// `ln F(base + nγ)`, `n = 0..=n_max`.
    pub log_f: Vec<f64>,
    /// Steps where `|p| < δ`; the value is carried over unchanged.
    pub skipped: Vec<SkipRecord>,
    /// Indices where a new comparable segment begins (always starts with 0).
    pub segment_starts: Vec<usize>,
    /// `F(base) = 0`; then every orbit point is zero as well.
    pub zero: bool,
}

impl CocycleTrajectory {
    pub fn len(&self) -> usize {
        self.log_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_f.is_empty()
    }

    /// Values at `i` and `j` lie in the same gap-free segment.
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        let seg = |k: usize| self.segment_starts.partition_point(|&s| s <= k);
        !self.zero && seg(i) == seg(j)
    }

    pub fn is_zero_at(&self, n: usize) -> bool {
        self.zero || self.log_f.get(n).is_some_and(|v| *v == f64::NEG_INFINITY)
    }

    /// `(ln F(base + nγ) − ln F(base)) / n` for the last step.
    pub fn growth_rate(&self) -> f64 {
        let n = self.log_f.len() - 1;
        (self.log_f[n] - self.log_f[0]) / n as f64
    }
}

/// Iterates the modulus cocycle from `F(base) = f0` for `n_max` steps.
pub fn propagate(
    f0: f64,
    base: &TorusPoint,
    gamma: &Gamma,
    p: &TrigPolynomial,
    n_max: usize,
    delta: f64,
) -> Result<CocycleTrajectory> {
    if !(f0 >= 0.0 && f0.is_finite()) {
        return Err(GrlError::invalid(format!("F0 must be finite and non-negative, got {f0}")));
    }
    if n_max < 1 {
        return Err(GrlError::invalid("n_max must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(GrlError::invalid("skip threshold must be positive"));
    }
    if p.dimension() != gamma.dimension() || base.dimension() != gamma.dimension() {
        return Err(GrlError::invalid("polynomial, base point and γ dimensions differ"));
    }
    let zero = f0 == 0.0;
    let mut log_f = Vec::with_capacity(n_max + 1);
    let mut skipped = Vec::new();
    let mut segment_starts = vec![0];
    let mut acc = StableSum::new();
    acc.add(if zero { 0.0 } else { f0.ln() });
    log_f.push(if zero { f64::NEG_INFINITY } else { acc.value() });
    for (n, z) in OrbitStepper::new(base, gamma)?.take(n_max).enumerate() {
        let q = p.eval_raw(&z).norm();
        if q < delta {
            skipped.push(SkipRecord { n, modulus: q });
            segment_starts.push(n + 1);
        } else {
            acc.add(q.ln());
        }
        log_f.push(if zero { f64::NEG_INFINITY } else { acc.value() });
    }
    Ok(CocycleTrajectory {
        base: base.clone(),
        gamma: gamma.clone(),
        log_f,
        skipped,
        segment_starts,
        zero,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThetaMethod {
    Birkhoff { n: u64 },
    HaarQuadrature { points: usize },
    HaarSample { points: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub value: f64,
    pub method: ThetaMethod,
    pub skipped_fraction: f64,
    pub reliable: bool,
}

/// `(1/n) Σ_{j<n} ln |p(λ + jγ)|` over the steps with `|p| ≥ δ`.
pub fn theta_birkhoff(p: &TrigPolynomial, lambda: &TorusPoint, gamma: &Gamma, n: u64, delta: f64) -> Result<ThetaEstimate> {
    if n < MIN_BIRKHOFF_STEPS {
        return Err(GrlError::invalid(format!("Birkhoff averages need n >= {MIN_BIRKHOFF_STEPS}, got {n}")));
    }
    if !(delta > 0.0) {
        return Err(GrlError::invalid("skip threshold must be positive"));
    }
    if p.dimension() != gamma.dimension() || lambda.dimension() != gamma.dimension() {
        return Err(GrlError::invalid("polynomial, base point and γ dimensions differ"));
    }
    let z0 = lambda.coords();
    let logs: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let z: Vec<f64> = z0
                .iter()
                .zip(&gamma.coords)
                .map(|(a, c)| crate::numerics::frac(a + crate::orbit::multiple_frac(c, j)))
                .collect();
            let q = p.eval_raw(&z).norm();
            (q >= delta).then(|| q.ln())
        })
        .collect();
    let skipped = logs.iter().filter(|v| v.is_none()).count();
    let sum = stable_sum_real(logs.iter().flatten().copied());
    let skipped_fraction = skipped as f64 / n as f64;
    Ok(ThetaEstimate {
        value: sum / n as f64,
        method: ThetaMethod::Birkhoff { n },
        skipped_fraction,
        reliable: skipped_fraction < UNRELIABLE_SKIP_FRACTION,
    })
}

/// `∫_H ln max(|p(λ + h)|, δ) dm_H(h)` by adaptive nested quadrature along
/// the connected directions, averaged over the components.
pub fn theta_haar(p: &TrigPolynomial, lambda: &TorusPoint, h: &SubgroupH, quad: &QuadratureSpec, delta: f64) -> Result<ThetaEstimate> {
    if !(delta > 0.0) {
        return Err(GrlError::invalid("log floor must be positive"));
    }
    check_dims(p, lambda, h)?;
    let k = h.connected_dimension();
    let dirs: Vec<Vec<f64>> = h
        .connected_directions
        .iter()
        .map(|v| v.iter().map(|&x| x as f64).collect())
        .collect();
    let values: Vec<f64> = h
        .component_representatives
        .par_iter()
        .map(|rep| {
            let origin: Vec<f64> = rep.iter().zip(lambda.coords()).map(|(a, b)| a + b).collect();
            integrate_nd(
                |s: &[f64]| {
                    let mut z = origin.clone();
                    for (si, v) in s.iter().zip(&dirs) {
                        for (zi, vi) in z.iter_mut().zip(v) {
                            *zi += si * vi;
                        }
                    }
                    p.eval_raw(&z).norm().max(delta).ln()
                },
                k,
                quad,
            )
        })
        .collect::<Result<_>>()?;
    Ok(ThetaEstimate {
        value: stable_sum_real(values.iter().copied()) / values.len() as f64,
        method: ThetaMethod::HaarQuadrature {
            points: quad.points_per_axis,
        },
        skipped_fraction: 0.0,
        reliable: true,
    })
}

/// Mean of `ln |p|` over [`haar_sample_points_at`], skipping `|p| < δ`.
pub fn theta_haar_sampled(p: &TrigPolynomial, lambda: &TorusPoint, h: &SubgroupH, points: usize, delta: f64) -> Result<ThetaEstimate> {
    if !(delta > 0.0) {
        return Err(GrlError::invalid("skip threshold must be positive"));
    }
    check_dims(p, lambda, h)?;
    let pts = haar_sample_points_at(h, lambda.coords(), points)?;
    let logs: Vec<Option<f64>> = pts
        .par_iter()
        .map(|z| {
            let q = p.eval_raw(z.coords()).norm();
            (q >= delta).then(|| q.ln())
        })
        .collect();
    let skipped = logs.iter().filter(|v| v.is_none()).count();
    let skipped_fraction = skipped as f64 / pts.len() as f64;
    Ok(ThetaEstimate {
        value: stable_sum_real(logs.iter().flatten().copied()) / pts.len() as f64,
        method: ThetaMethod::HaarSample { points },
        skipped_fraction,
        reliable: skipped_fraction < UNRELIABLE_SKIP_FRACTION,
    })
}

fn check_dims(p: &TrigPolynomial, lambda: &TorusPoint, h: &SubgroupH) -> Result<()> {
    if p.dimension() != h.dimension || lambda.dimension() != h.dimension {
        return Err(GrlError::invalid("polynomial, base point and subgroup dimensions differ"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case3Verdict {
    /// `Θ > 0`: `F` would grow without bound along the orbit.
    Growth,
    /// `Θ < 0`: `F` would decay to zero, contradicting recurrence.
    Decay,
    /// `|Θ| ≤ tol`: the modulus equation alone decides nothing.
    Balanced,
}

impl Case3Verdict {
    pub fn interpretation(self) -> &'static str {
        match self {
            Case3Verdict::Growth => {
                "Θ > 0: F grows along the orbit, contradicting boundedness of a continuous F; F vanishes on the coset"
            }
            Case3Verdict::Decay => {
                "Θ < 0: F decays along the orbit, contradicting recurrence to the base point; F vanishes on the coset"
            }
            Case3Verdict::Balanced => "Θ = 0: the modulus arguments alone cannot settle this coset",
        }
    }
}

pub fn case3_verdict(theta: &ThetaEstimate, tolerance: f64) -> Result<Case3Verdict> {
    if !(tolerance > 0.0) {
        return Err(GrlError::invalid("tolerance must be positive"));
    }
    if !theta.reliable {
        return Err(GrlError::numerical(format!(
            "Θ estimate skipped {:.2}% of the orbit; no verdict",
            100.0 * theta.skipped_fraction
        )));
    }
    Ok(if theta.value.abs() <= tolerance {
        Case3Verdict::Balanced
    } else if theta.value > 0.0 {
        Case3Verdict::Growth
    } else {
        Case3Verdict::Decay
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFraction {
    pub fraction: f64,
    pub points: usize,
    pub tolerance: f64,
}

/// Fraction of a transversal grid where `|Θ| ≤ tolerance`. A positive fraction
/// at grid scale does not decide whether the vanishing set has positive measure.
pub fn theta_zero_fraction(
    p: &TrigPolynomial,
    h: &SubgroupH,
    points_per_dimension: usize,
    quad: &QuadratureSpec,
    tolerance: f64,
) -> Result<ZeroFraction> {
    let pts = transversal_points(h, points_per_dimension)?;
    let hits: Vec<bool> = pts
        .iter()
        .map(|lam| Ok(theta_haar(p, lam, h, quad, f64::MIN_POSITIVE)?.value.abs() <= tolerance))
        .collect::<Result<_>>()?;
    Ok(ZeroFraction {
        fraction: hits.iter().filter(|&&b| b).count() as f64 / pts.len() as f64,
        points: pts.len(),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{classify, subgroup_closure, subgroup_from_annihilator};
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn p1() -> TrigPolynomial {
        TrigPolynomial::new(2, vec![(vec![0, 0], c(1.0)), (vec![-1, 0], c(1.0)), (vec![0, -1], c(-1.0))]).unwrap()
    }

    fn gamma() -> Gamma {
        Gamma::parse("0,sqrt2").unwrap()
    }

    #[test]
    fn trivial_and_geometric_cocycles() {
        let base = TorusPoint::new(&[0.1, 0.2]).unwrap();
        let t = propagate(3.0, &base, &gamma(), &TrigPolynomial::constant(2, c(1.0)), 10, 1e-8).unwrap();
        assert!(t.log_f.iter().all(|v| (v - 3f64.ln()).abs() < 1e-15));
        let t = propagate(3.0, &base, &gamma(), &TrigPolynomial::constant(2, c(2.0)), 10, 1e-8).unwrap();
        for (n, v) in t.log_f.iter().enumerate() {
            assert!((v - 3f64.ln() - n as f64 * 2f64.ln()).abs() < 1e-13);
        }
        assert_eq!(t.segment_starts, vec![0]);
    }

    #[test]
    fn zero_base_stays_zero() {
        let base = TorusPoint::new(&[0.1, 0.2]).unwrap();
        let t = propagate(0.0, &base, &gamma(), &p1(), 50, 1e-8).unwrap();
        assert!((0..=50).all(|n| t.is_zero_at(n)));
        assert!(!t.comparable(0, 1));
    }

    #[test]
    fn skips_open_new_segments() {
        // the zero polynomial skips every step
        let zero = TrigPolynomial::new(2, vec![]).unwrap();
        let base = TorusPoint::new(&[0.1, 0.2]).unwrap();
        let t = propagate(1.0, &base, &gamma(), &zero, 5, 1e-8).unwrap();
        assert_eq!(t.skipped.len(), 5);
        assert_eq!(t.segment_starts, vec![0, 1, 2, 3, 4, 5]);
        assert!(t.comparable(2, 2) && !t.comparable(1, 2));
    }

    #[test]
    fn birkhoff_constant_is_exact() {
        let lam = TorusPoint::new(&[0.3, 0.9]).unwrap();
        let e = theta_birkhoff(&TrigPolynomial::constant(2, c(2.0)), &lam, &gamma(), 1000, 1e-8).unwrap();
        assert!((e.value - 2f64.ln()).abs() < 1e-14);
        assert!(e.reliable && e.skipped_fraction == 0.0);
        assert!(theta_birkhoff(&p1(), &lam, &gamma(), 999, 1e-8).is_err());
    }

    #[test]
    fn haar_matches_jensen_for_first_example() {
        let g = gamma();
        let h = subgroup_closure(&g, &classify(&g, 50, 1e-9).unwrap()).unwrap();
        let quad = QuadratureSpec::gauss(16).refined();
        let e = theta_haar(&p1(), &TorusPoint::new(&[0.25, 0.0]).unwrap(), &h, &quad, f64::MIN_POSITIVE).unwrap();
        assert!((e.value - 0.5 * 2f64.ln()).abs() < 1e-10, "{}", e.value);
        let e = theta_haar(&p1(), &TorusPoint::new(&[0.4, 0.0]).unwrap(), &h, &quad, f64::MIN_POSITIVE).unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn sampled_haar_agrees_with_quadrature_off_singularities() {
        let h = subgroup_from_annihilator(2, &[vec![1, 0]]).unwrap();
        let lam = TorusPoint::new(&[0.1, 0.0]).unwrap();
        let s = theta_haar_sampled(&p1(), &lam, &h, 512, 1e-8).unwrap();
        let expect = (2.0 * (std::f64::consts::PI * 0.1).cos()).ln();
        assert!((s.value - expect).abs() < 1e-10);
    }

    #[test]
    fn verdicts() {
        let est = |v: f64| ThetaEstimate {
            value: v,
            method: ThetaMethod::Birkhoff { n: 1000 },
            skipped_fraction: 0.0,
            reliable: true,
        };
        assert_eq!(case3_verdict(&est(2f64.ln()), 1e-6).unwrap(), Case3Verdict::Growth);
        assert_eq!(case3_verdict(&est(-0.3), 1e-6).unwrap(), Case3Verdict::Decay);
        assert_eq!(case3_verdict(&est(1e-9), 1e-6).unwrap(), Case3Verdict::Balanced);
        let mut bad = est(1.0);
        bad.reliable = false;
        assert!(case3_verdict(&bad, 1e-6).is_err());
    }

    #[test]
    fn zero_fraction_of_first_example() {
        let h = subgroup_from_annihilator(2, &[vec![1, 0]]).unwrap();
        let z = theta_zero_fraction(&p1(), &h, 60, &QuadratureSpec::gauss(16).refined(), 1e-9).unwrap();
        // t = j/60 lies in [1/3, 2/3] for j = 20..=40
        assert_eq!(z.points, 60);
        assert!((z.fraction - 21.0 / 60.0).abs() < 1e-12, "{}", z.fraction);
    }
}
