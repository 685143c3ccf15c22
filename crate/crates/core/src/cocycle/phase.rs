//! Phase branch, the iterated phase cocycle
//! `θ(t−α, ω+β) = θ(t,ω) + φ(t,ω) + ⟨t,β⟩ (mod 1)`, normalized phases
//! `ζ_n` and the two cluster-set descriptions.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::numerics::dd::DoubleDouble;
use crate::numerics::symbolic::SymbolicReal;
use crate::numerics::torus::{circle_dist, frac};
use crate::numerics::{inner_product, Coordinate, StableSum, TorusPoint};
use crate::orbit::{multiple_frac, Gamma, OrbitStepper, SubgroupH};
use crate::trigpoly::TrigPolynomial;
use crate::windows::Window;
use crate::zak::zak_eval;

/// Cluster-set points closer than this collapse.
pub const CLUSTER_DEDUP: f64 = 1e-10;
/// Tolerance for matching two cluster-set descriptions.
pub const CLUSTER_MATCH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchCase {
    RePositive,
    ReNegative,
    ImPositive,
    ImNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBranch {
    /// In `[0, 1)`.
    pub theta: f64,
    pub case: BranchCase,
}

/// The four-case arctangent branch divided by `2π` and reduced to `[0, 1)`.
pub fn phase_branch(value: Complex64) -> Result<PhaseBranch> {
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(GrlError::invalid("phase of a non-finite value"));
    }
    let (rad, case) = if value.re > 0.0 {
        ((value.im / value.re).atan(), BranchCase::RePositive)
    } else if value.re < 0.0 {
        ((value.im / value.re).atan() + PI, BranchCase::ReNegative)
    } else if value.im > 0.0 {
        (PI / 2.0, BranchCase::ImPositive)
    } else if value.im < 0.0 {
        (3.0 * PI / 2.0, BranchCase::ImNegative)
    } else {
        return Err(GrlError::invalid("phase of zero is undefined"));
    };
    Ok(PhaseBranch {
        theta: frac(rad / (2.0 * PI)),
        case,
    })
}

/// Base point and shift of a phase-cocycle iteration; orbit points are
/// `(t − jα, ω + jβ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSetup {
    pub t: Vec<f64>,
    pub omega: Vec<f64>,
    pub alpha: Vec<Coordinate>,
    pub beta: Vec<Coordinate>,
}

impl PhaseSetup {
    pub fn new(t: Vec<f64>, omega: Vec<f64>, alpha: Vec<Coordinate>, beta: Vec<Coordinate>) -> Result<Self> {
        let d = t.len();
        if d == 0 || omega.len() != d || alpha.len() != d || beta.len() != d {
            return Err(GrlError::invalid("t, ω, α and β must share one positive dimension"));
        }
        if t.iter().chain(&omega).any(|v| !v.is_finite()) {
            return Err(GrlError::invalid("non-finite base point"));
        }
        Ok(PhaseSetup { t, omega, alpha, beta })
    }

    pub fn dimension(&self) -> usize {
        self.t.len()
    }

    pub fn gamma(&self) -> Gamma {
        Gamma {
            coords: self.alpha.iter().map(Coordinate::neg).chain(self.beta.iter().cloned()).collect(),
        }
    }

    pub fn alpha_beta(&self) -> Result<Coordinate> {
        inner_product(&self.alpha, &self.beta)
    }

    fn base_point(&self) -> Result<TorusPoint> {
        let z: Vec<f64> = self.t.iter().chain(&self.omega).copied().collect();
        crate::numerics::reduce_mod1(&z)
    }

    /// `⟨t, β⟩` in double-double.
    fn t_beta(&self) -> DoubleDouble {
        self.t
            .iter()
            .zip(&self.beta)
            .fold(DoubleDouble::ZERO, |acc, (ti, bi)| acc + bi.value_dd().mul_f64(*ti))
    }

    /// `⟨t − jα, β⟩ mod 1`, formed from the unreduced time coordinate.
    fn step_inner(&self, j: u64, ab: &Coordinate) -> f64 {
        frac(self.t_beta().frac() - multiple_frac(ab, j))
    }
}

/// Phases `φ_j` of `p` at the first `n` orbit points, each checked against `δ`.
pub fn orbit_phases(p: &TrigPolynomial, setup: &PhaseSetup, n: usize, delta: f64) -> Result<Vec<f64>> {
    if p.dimension() != 2 * setup.dimension() {
        return Err(GrlError::invalid("polynomial dimension must be 2d"));
    }
    let gamma = setup.gamma();
    let base = setup.base_point()?;
    OrbitStepper::new(&base, &gamma)?
        .take(n)
        .enumerate()
        .map(|(j, z)| {
            let v = p.eval_raw(&z);
            if v.norm() < delta {
                return Err(GrlError::PhaseUndefined {
                    step: j,
                    modulus: v.norm(),
                });
            }
            Ok(phase_branch(v)?.theta)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseIterate {
    /// Right-hand side of the n-fold phase identity, mod 1.
    pub value: f64,
    /// Same quantity before reduction.
    pub lift: f64,
    /// Integer turns picked up by unwrapping `φ` along the orbit.
    pub winding: i64,
    /// Largest principal jump between consecutive unwrapped phases.
    pub max_step: f64,
}

/// `θ0 + Σ_{j<n} φ(t−jα, ω+jβ) + n⟨t,β⟩ − n(n−1)/2 ⟨α,β⟩ (mod 1)`.
pub fn phase_cocycle_iterate(theta0: f64, p: &TrigPolynomial, setup: &PhaseSetup, n: usize, delta: f64) -> Result<f64> {
    Ok(phase_cocycle_lift(theta0, p, setup, n, delta)?.value)
}

pub fn phase_cocycle_lift(theta0: f64, p: &TrigPolynomial, setup: &PhaseSetup, n: usize, delta: f64) -> Result<PhaseIterate> {
    if !theta0.is_finite() {
        return Err(GrlError::invalid("θ0 must be finite"));
    }
    let ab = setup.alpha_beta()?;
    let phis = orbit_phases(p, setup, n, delta)?;
    let unwrap = unwrap_phases(&phis);
    let mut s = StableSum::new();
    for v in &unwrap.values {
        s.add(*v);
    }
    let mut principal = StableSum::new();
    for v in &phis {
        principal.add(*v);
    }
    let n64 = n as u64;
    let tri = n64 * n64.saturating_sub(1) / 2;
    let linear = setup.t_beta().mul_f64(n as f64);
    let quad = scaled_dd(&ab, tri);
    let lift_dd = DoubleDouble::from_f64(theta0) + DoubleDouble::from_f64(s.value()) + linear - quad;
    let value = frac(
        frac(theta0) + principal.value().rem_euclid(1.0) + linear.frac() - multiple_frac(&ab, tri),
    );
    Ok(PhaseIterate {
        value: frac(value),
        lift: lift_dd.to_f64(),
        winding: unwrap.winding,
        max_step: unwrap.max_step,
    })
}

fn scaled_dd(c: &Coordinate, k: u64) -> DoubleDouble {
    let v = c.value_dd();
    DoubleDouble::from_f64(v.hi).mul_f64(k as f64) + DoubleDouble::from_f64(v.lo).mul_f64(k as f64)
}

struct Unwrapped {
    values: Vec<f64>,
    winding: i64,
    max_step: f64,
}

fn unwrap_phases(phis: &[f64]) -> Unwrapped {
    let mut values = Vec::with_capacity(phis.len());
    let mut max_step: f64 = 0.0;
    for (j, &phi) in phis.iter().enumerate() {
        if j == 0 {
            values.push(phi);
            continue;
        }
        let prev = values[j - 1];
        let mut step = phi - frac(prev);
        step -= step.round();
        max_step = max_step.max(step.abs());
        values.push(prev + step);
    }
    let winding = values
        .last()
        .zip(phis.last())
        .map(|(u, p)| (u - p).round() as i64)
        .unwrap_or(0);
    Unwrapped {
        values,
        winding,
        max_step,
    }
}

/// A phase defined along the orbit `(t − nα, ω + nβ)`.
pub trait PhaseField: Sync {
    /// `θ(t − nα, ω + nβ) / n (mod 1)` for `n ≥ 1`.
    fn normalized_phase(&self, n: u64) -> Result<f64>;
}

/// `θ ≡ c`.
pub struct ConstantPhase(pub f64);

impl PhaseField for ConstantPhase {
    fn normalized_phase(&self, n: u64) -> Result<f64> {
        Ok(frac(self.0 / n as f64))
    }
}

/// `θ(z) = ⟨c, z⟩` on the reduced orbit point, so the phase stays bounded.
pub struct LinearPhase {
    pub coefficients: Vec<f64>,
    pub setup: PhaseSetup,
}

impl PhaseField for LinearPhase {
    fn normalized_phase(&self, n: u64) -> Result<f64> {
        let z = crate::orbit::orbit_iterate(&self.setup.base_point()?, &self.setup.gamma(), n)?;
        if z.dimension() != self.coefficients.len() {
            return Err(GrlError::invalid("linear phase has the wrong dimension"));
        }
        let theta: f64 = self.coefficients.iter().zip(z.coords()).map(|(c, x)| c * x).sum();
        Ok(frac(theta / n as f64))
    }
}

/// Principal phase of a freshly summed Zak transform at each orbit point.
pub struct ZakPhase {
    pub window: Window,
    pub truncation: usize,
    pub setup: PhaseSetup,
    pub delta: f64,
}

impl PhaseField for ZakPhase {
    fn normalized_phase(&self, n: u64) -> Result<f64> {
        let d = self.setup.dimension();
        let z = crate::orbit::orbit_iterate(&self.setup.base_point()?, &self.setup.gamma(), n)?;
        let v = zak_eval(&self.window, &z.coords()[..d], &z.coords()[d..], self.truncation)?;
        if v.norm() < self.delta {
            return Err(GrlError::PhaseUndefined {
                step: n as usize,
                modulus: v.norm(),
            });
        }
        Ok(frac(phase_branch(v)?.theta / n as f64))
    }
}

/// A field satisfying the one-step phase equation by construction: a seed
/// `θ0` at the base point, propagated stepwise along the orbit.
pub struct SyntheticPhaseField {
    setup: PhaseSetup,
    theta0: f64,
    /// `θ_n mod 1` from stepwise propagation.
    values: Vec<f64>,
    /// `Σ_{j<n} φ_j`, principal phases in `[0, 1)`.
    phi_sums: Vec<f64>,
    alpha_beta: Coordinate,
}

impl SyntheticPhaseField {
    pub fn build(theta0: f64, p: &TrigPolynomial, setup: PhaseSetup, n_max: usize, delta: f64) -> Result<Self> {
        let ab = setup.alpha_beta()?;
        let phis = orbit_phases(p, &setup, n_max, delta)?;
        let mut values = Vec::with_capacity(n_max + 1);
        let mut phi_sums = Vec::with_capacity(n_max + 1);
        let mut theta = DoubleDouble::from_f64(frac(theta0));
        let mut sum = StableSum::new();
        values.push(theta.frac());
        phi_sums.push(0.0);
        for (j, phi) in phis.iter().enumerate() {
            // θ_{j+1} = θ_j + φ_j + ⟨t − jα, β⟩
            let step = DoubleDouble::from_f64(*phi) + DoubleDouble::from_f64(setup.step_inner(j as u64, &ab));
            theta = DoubleDouble::from_f64((theta + step).frac());
            values.push(theta.hi);
            sum.add(*phi);
            phi_sums.push(sum.value());
        }
        Ok(SyntheticPhaseField {
            setup,
            theta0,
            values,
            phi_sums,
            alpha_beta: ab,
        })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `θ(t − nα, ω + nβ) mod 1`.
    pub fn value(&self, n: usize) -> Result<f64> {
        self.values
            .get(n)
            .copied()
            .ok_or_else(|| GrlError::invalid(format!("synthetic field only holds {} steps", self.n_max())))
    }

    pub fn setup(&self) -> &PhaseSetup {
        &self.setup
    }
}

impl PhaseField for SyntheticPhaseField {
    fn normalized_phase(&self, n: u64) -> Result<f64> {
        let sum = *self
            .phi_sums
            .get(n as usize)
            .ok_or_else(|| GrlError::invalid(format!("synthetic field only holds {} steps", self.n_max())))?;
        // lift / n = θ0/n + Σφ/n + ⟨t,β⟩ − (n−1)/2 ⟨α,β⟩
        let half = half_of(&self.alpha_beta);
        Ok(frac(
            (self.theta0 + sum) / n as f64 + self.setup.t_beta().frac() - multiple_frac(&half, n - 1),
        ))
    }
}

fn half_of(c: &Coordinate) -> Coordinate {
    let s = c.symbolic().mul(&SymbolicReal::rational(Rational64::new(1, 2)));
    Coordinate::from_symbolic(&s, c.value_dd().mul_f64(0.5))
}

/// `ζ_n = exp(2πi θ(t − nα, ω + nβ) / n)` for each `n` in `ns`.
pub fn normalized_phase_sequence<F: PhaseField + ?Sized>(field: &F, ns: &[u64]) -> Result<Vec<Complex64>> {
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(GrlError::invalid("normalized phases start at n = 1"));
            }
            Ok(unit(field.normalized_phase(n)?))
        })
        .collect()
}

fn unit(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * frac(turns))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClusterKind {
    FiniteRoots { points: Vec<Complex64> },
    FullCircle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    #[serde(flatten)]
    pub kind: ClusterKind,
    /// Angle of the generator `e^{−πi⟨α,β⟩}` in radians.
    pub generator_angle: f64,
}

impl ClusterSet {
    pub fn size(&self) -> Option<usize> {
        match &self.kind {
            ClusterKind::FiniteRoots { points } => Some(points.len()),
            ClusterKind::FullCircle => None,
        }
    }
}

/// Closure of `{e^{−πi k⟨α,β⟩} : k ≥ 0}`.
pub fn cluster_set_c1(alpha_beta: &Coordinate) -> ClusterSet {
    let generator_angle = -PI * alpha_beta.value();
    match alpha_beta.as_rational() {
        Some(r) => {
            let (p, q) = (*r.numer(), *r.denom());
            let two_q = 2 * q;
            let size = if p == 0 { 1 } else { two_q / p.gcd(&two_q) };
            // e^{−πi k p/q} = e^{−2πi (kp mod 2q)/(2q)}
            let points = (0..size)
                .map(|k| {
                    let num = ((k as i128 * p as i128).rem_euclid(two_q as i128)) as f64;
                    unit(-num / two_q as f64)
                })
                .collect();
            ClusterSet {
                kind: ClusterKind::FiniteRoots { points },
                generator_angle,
            }
        }
        None => ClusterSet {
            kind: ClusterKind::FullCircle,
            generator_angle,
        },
    }
}

/// Sample of `{e^{−2πi⟨α, [ω + nβ]⟩} : 1 ≤ n ≤ n_max}` with near-duplicates
/// collapsed, sorted by angle.
pub fn cluster_set_c2(alpha: &[Coordinate], beta: &[Coordinate], omega: &TorusPoint, n_max: u64) -> Result<Vec<Complex64>> {
    if n_max < 1 {
        return Err(GrlError::invalid("n_max must be at least 1"));
    }
    if alpha.len() != beta.len() || omega.dimension() != beta.len() {
        return Err(GrlError::invalid("α, β and ω dimensions differ"));
    }
    let avals: Vec<DoubleDouble> = alpha.iter().map(Coordinate::value_dd).collect();
    let mut angles: Vec<f64> = (1..=n_max)
        .map(|n| {
            let mut acc = DoubleDouble::ZERO;
            for ((a, b), w) in avals.iter().zip(beta).zip(omega.coords()) {
                let f = frac(w + multiple_frac(b, n));
                acc = acc + a.mul_f64(f);
            }
            frac(-acc.frac())
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut kept: Vec<f64> = Vec::new();
    for a in angles {
        if kept.last().is_none_or(|&b| a - b > CLUSTER_DEDUP) {
            kept.push(a);
        }
    }
    if kept.len() > 1 && circle_dist(kept[0], *kept.last().unwrap()) <= CLUSTER_DEDUP {
        kept.pop();
    }
    Ok(kept.into_iter().map(unit).collect())
}

/// Largest angular gap (in turns) between consecutive points on the circle.
pub fn max_angular_gap(points: &[Complex64]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let mut t: Vec<f64> = points.iter().map(|z| frac(z.arg() / (2.0 * PI))).collect();
    t.sort_by(f64::total_cmp);
    let mut gap = 1.0 - t[t.len() - 1] + t[0];
    for w in t.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// Every point of `a` lies within `tol` of `factor · b_k` for some `k`, and
/// conversely (Hausdorff distance on the circle).
pub fn cluster_sets_match(a: &[Complex64], b: &[Complex64], factor: Complex64, tol: f64) -> bool {
    let scaled: Vec<Complex64> = b.iter().map(|z| z * factor).collect();
    let near = |x: &Complex64, set: &[Complex64]| set.iter().any(|y| (x - y).norm() <= tol);
    a.iter().all(|x| near(x, &scaled)) && scaled.iter().all(|y| near(y, a))
}

/// Nearest element of a finite cluster set, with its distance.
pub fn nearest_cluster_point(z: Complex64, set: &ClusterSet, factor: Complex64) -> Option<(usize, f64)> {
    match &set.kind {
        ClusterKind::FiniteRoots { points } => points
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (z - p * factor).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1)),
        ClusterKind::FullCircle => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityDefect {
    pub shift: Vec<i64>,
    pub defect: f64,
}

/// `dist(⟨ℓ, β⟩, Z)` for every shift; all zero exactly when the integer-shift
/// constraint can hold.
pub fn rigidity_scan(beta: &[Coordinate], shifts: &[Vec<i64>]) -> Result<Vec<RigidityDefect>> {
    shifts
        .iter()
        .map(|l| {
            if l.len() != beta.len() {
                return Err(GrlError::invalid("shift and β dimensions differ"));
            }
            if l.iter().all(|&x| x == 0) {
                return Err(GrlError::invalid("shifts must be nonzero"));
            }
            let coords: Vec<Coordinate> = l.iter().map(|&x| Coordinate::integer(x)).collect();
            let ip = inner_product(&coords, beta)?;
            let defect = match ip.as_rational() {
                Some(r) => {
                    let f = r - r.floor();
                    let f = f.min(Rational64::from_integer(1) - f);
                    *f.numer() as f64 / *f.denom() as f64
                }
                None => ip.value_dd().dist_to_integer(),
            };
            Ok(RigidityDefect {
                shift: l.clone(),
                defect,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAverage {
    /// Birkhoff average of the unwrapped phase.
    pub value: f64,
    /// Birkhoff average of the principal phase in `[0, 1)`.
    pub principal: f64,
    pub winding: i64,
    pub max_step: f64,
    pub steps: usize,
}

/// Birkhoff average of `φ` along the orbit from the base of `setup`.
pub fn phase_average(p: &TrigPolynomial, setup: &PhaseSetup, n: usize, delta: f64) -> Result<PhaseAverage> {
    if n == 0 {
        return Err(GrlError::invalid("phase average needs at least one step"));
    }
    let phis = orbit_phases(p, setup, n, delta)?;
    let un = unwrap_phases(&phis);
    let mean = |v: &[f64]| {
        let mut s = StableSum::new();
        v.iter().for_each(|x| s.add(*x));
        s.value() / v.len() as f64
    };
    Ok(PhaseAverage {
        value: mean(&un.values),
        principal: mean(&phis),
        winding: un.winding,
        max_step: un.max_step,
        steps: n,
    })
}

/// [`phase_average`] started from `base + r` for every component
/// representative `r` of `H`; components are reported, not chosen.
pub fn phase_average_by_component(
    p: &TrigPolynomial,
    setup: &PhaseSetup,
    h: &SubgroupH,
    n: usize,
    delta: f64,
) -> Result<Vec<(Vec<f64>, Result<PhaseAverage>)>> {
    let d = setup.dimension();
    if h.dimension != 2 * d {
        return Err(GrlError::invalid("subgroup dimension must be 2d"));
    }
    Ok(h.component_representatives
        .iter()
        .map(|rep| {
            let mut s = setup.clone();
            for i in 0..d {
                s.t[i] += rep[i];
                s.omega[i] += rep[d + i];
            }
            (rep.clone(), phase_average(p, &s, n, delta))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords(s: &str) -> Vec<Coordinate> {
        Coordinate::parse_list(s).unwrap()
    }

    fn one() -> TrigPolynomial {
        TrigPolynomial::constant(2, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn branch_examples() {
        assert_eq!(phase_branch(Complex64::new(1.0, 0.0)).unwrap().theta, 0.0);
        let b = phase_branch(Complex64::new(0.0, 1.0)).unwrap();
        assert_eq!((b.theta, b.case), (0.25, BranchCase::ImPositive));
        assert_eq!(phase_branch(Complex64::new(-1.0, 0.0)).unwrap().theta, 0.5);
        assert_eq!(phase_branch(Complex64::new(0.0, -2.0)).unwrap().theta, 0.75);
        assert!(phase_branch(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn branch_reconstructs_direction() {
        for k in 0..64 {
            let a = 0.1 + k as f64 * 0.097;
            let z = Complex64::from_polar(2.5, a);
            let b = phase_branch(z).unwrap();
            assert!((0.0..1.0).contains(&b.theta));
            assert!((Complex64::from_polar(1.0, 2.0 * PI * b.theta) - z / z.norm()).norm() < 1e-12);
        }
    }

    #[test]
    fn iterate_examples() {
        let setup = PhaseSetup::new(vec![0.3], vec![0.6], coords("sqrt2"), coords("0")).unwrap();
        assert_eq!(phase_cocycle_iterate(0.37, &one(), &setup, 0, 1e-8).unwrap(), 0.37);
        for n in [1, 5, 40] {
            assert!((phase_cocycle_iterate(0.37, &one(), &setup, n, 1e-8).unwrap() - 0.37).abs() < 1e-14);
        }
        // t = 1/4, β = 1, α = 0.3: n = 2 gives θ0 + 1/2 − 0.3
        let setup = PhaseSetup::new(vec![0.25], vec![0.0], coords("3/10"), coords("1")).unwrap();
        let v = phase_cocycle_iterate(0.1, &one(), &setup, 2, 1e-8).unwrap();
        assert!((v - 0.3).abs() < 1e-14, "{v}");
    }

    #[test]
    fn zero_of_p_is_reported_with_its_step() {
        let zero = TrigPolynomial::new(2, vec![]).unwrap();
        let setup = PhaseSetup::new(vec![0.3], vec![0.6], coords("sqrt2"), coords("0")).unwrap();
        match phase_cocycle_iterate(0.0, &zero, &setup, 3, 1e-8) {
            Err(GrlError::PhaseUndefined { step: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_and_linear_fields() {
        let ns: Vec<u64> = (1..=50).collect();
        assert!(normalized_phase_sequence(&ConstantPhase(0.0), &ns)
            .unwrap()
            .iter()
            .all(|z| (z - 1.0).norm() < 1e-15));
        let field = LinearPhase {
            coefficients: vec![3.0, -2.0],
            setup: PhaseSetup::new(vec![0.2], vec![0.4], coords("sqrt2"), coords("sqrt3")).unwrap(),
        };
        let z = normalized_phase_sequence(&field, &[100_000]).unwrap();
        assert!((z[0] - 1.0).norm() < 2.0 * PI * 5.0 / 100_000.0);
    }

    #[test]
    fn c1_sizes() {
        assert_eq!(cluster_set_c1(&Coordinate::integer(2)).size(), Some(1));
        assert_eq!(cluster_set_c1(&Coordinate::integer(1)).size(), Some(2));
        assert_eq!(cluster_set_c1(&Coordinate::rational(1, 2).unwrap()).size(), Some(4));
        assert_eq!(cluster_set_c1(&Coordinate::rational(3, 4).unwrap()).size(), Some(8));
        assert_eq!(cluster_set_c1(&Coordinate::labelled("sqrt2").unwrap()).kind, ClusterKind::FullCircle);
    }

    #[test]
    fn c2_examples() {
        let om = TorusPoint::new(&[0.3]).unwrap();
        let pts = cluster_set_c2(&coords("sqrt2"), &coords("1"), &om, 500).unwrap();
        assert_eq!(pts.len(), 1);
        let expect = Complex64::from_polar(1.0, -2.0 * PI * std::f64::consts::SQRT_2 * 0.3);
        assert!((pts[0] - expect).norm() < 1e-10);
        let pts = cluster_set_c2(&coords("0"), &coords("sqrt3"), &om, 100).unwrap();
        assert_eq!(pts.len(), 1);
        let pts = cluster_set_c2(&coords("1"), &coords("sqrt2"), &TorusPoint::origin(1), 10_000).unwrap();
        assert!(2.0 * PI * max_angular_gap(&pts) < 0.01);
    }

    #[test]
    fn synthetic_field_lands_on_fourth_roots() {
        // ⟨α,β⟩ = 1/2, p ≡ 1: ζ_n ≈ e^{2πi⟨t,β⟩} e^{−πi(n−1)/2}
        let setup = PhaseSetup::new(vec![0.2], vec![0.7], coords("1/2"), coords("1")).unwrap();
        let field = SyntheticPhaseField::build(0.3, &one(), setup, 4000, 1e-8).unwrap();
        let c1 = cluster_set_c1(&Coordinate::rational(1, 2).unwrap());
        let factor = Complex64::from_polar(1.0, 2.0 * PI * 0.2);
        for n in 3996..=4000u64 {
            let z = normalized_phase_sequence(&field, &[n]).unwrap()[0];
            let (k, dist) = nearest_cluster_point(z, &c1, factor).unwrap();
            assert!(dist < 2.0 * PI * 0.3 / n as f64 + 1e-12);
            assert_eq!(k as u64, (n - 1) % 4);
        }
    }

    #[test]
    fn rigidity_examples() {
        let r = rigidity_scan(&coords("1"), &[vec![1]]).unwrap();
        assert_eq!(r[0].defect, 0.0);
        let r = rigidity_scan(&coords("sqrt3"), &[vec![1]]).unwrap();
        assert!((r[0].defect - 0.267_949_192_431_122_7).abs() < 1e-15);
        let r = rigidity_scan(&coords("1/2"), &[vec![2], vec![1]]).unwrap();
        assert_eq!((r[0].defect, r[1].defect), (0.0, 0.5));
        assert!(rigidity_scan(&coords("1"), &[vec![0]]).is_err());
    }

    #[test]
    fn unwrapping_counts_turns() {
        let u = unwrap_phases(&[0.9, 0.1, 0.3, 0.6, 0.95, 0.2]);
        assert_eq!(u.winding, 2);
        assert!((u.values[5] - 2.2).abs() < 1e-12);
        assert!((u.max_step - 0.35).abs() < 1e-12);
    }
}
