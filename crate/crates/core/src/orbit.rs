//! The translation `τ(z) = z + γ` on `T^m`, the orbit trichotomy, the
//! annihilator lattice `H⊥` and sampling of the orbit closure `H`.
//!
//! `H⊥` is computed exactly from the declared coordinate tags. A bounded
//! numerical relation search runs alongside it; its findings only change the
//! lattice when they involve unlabelled floats, whose relations no tag can
//! declare. Anything else it finds is reported as an advisory.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::gabor::GaborConfig;
use crate::linalg::intlat::{self, IMatrix};
use crate::linalg::lll;
use crate::numerics::dd::DoubleDouble;
use crate::numerics::symbolic::{Monomial, SymbolicReal};
use crate::numerics::torus::frac;
use crate::numerics::{Coordinate, TorusPoint};
use crate::trigpoly::TrigPolynomial;

pub const DEFAULT_SEARCH_BOUND: i64 = 50;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Exhaustive searches beyond this many vectors switch to lattice reduction.
const EXHAUSTIVE_LIMIT: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    pub coords: Vec<Coordinate>,
}

impl Gamma {
    pub fn new(coords: Vec<Coordinate>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GrlError::invalid("γ needs at least one coordinate"));
        }
        Ok(Gamma { coords })
    }

    /// `γ = (−α, β)` from the configuration's off-lattice point.
    pub fn from_config(cfg: &GaborConfig) -> Self {
        let p = cfg.off_lattice_point();
        let coords = p.x.iter().map(Coordinate::neg).chain(p.y.iter().cloned()).collect();
        Gamma { coords }
    }

    /// Comma-separated coordinates, e.g. `"0,sqrt2"`.
    pub fn parse(text: &str) -> Result<Self> {
        Gamma::new(Coordinate::parse_list(text)?)
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().map(Coordinate::value).collect()
    }

    pub fn values_dd(&self) -> Vec<DoubleDouble> {
        self.coords.iter().map(Coordinate::value_dd).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(Coordinate::is_rational)
    }

    /// `dist(⟨r, γ⟩, Z)` in double-double arithmetic.
    pub fn relation_residual(&self, r: &[i64]) -> f64 {
        let mut acc = DoubleDouble::ZERO;
        for (ri, c) in r.iter().zip(&self.coords) {
            if *ri != 0 {
                acc = acc + c.value_dd().mul_f64(*ri as f64);
            }
        }
        acc.dist_to_integer()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    Finite { order: u64 },
    Dense { search_bound: i64, tolerance: f64 },
    InfiniteNonDense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub vector: Vec<i64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub verdict: Verdict,
    /// Hermite basis of `H⊥`; each vector `r` has `⟨r, γ⟩ ∈ Z`.
    pub relations: Vec<Relation>,
    /// Relations found numerically up to the search bound.
    pub numerical_relations: usize,
    pub search: SearchKind,
    pub advisories: Vec<String>,
}

impl OrbitClass {
    pub fn annihilator(&self) -> Vec<Vec<i64>> {
        self.relations.iter().map(|r| r.vector.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    None,
    Exhaustive,
    LatticeReduction,
}

/// Classifies the orbit of `γ`: finite, dense, or infinite but not dense.
pub fn classify(gamma: &Gamma, search_bound: i64, tolerance: f64) -> Result<OrbitClass> {
    if search_bound < 1 {
        return Err(GrlError::invalid(format!("search bound must be at least 1, got {search_bound}")));
    }
    if !(tolerance > 0.0 && tolerance <= 1e-6) {
        return Err(GrlError::invalid(format!("tolerance must lie in (0, 1e-6], got {tolerance}")));
    }
    check_ambiguity(gamma, search_bound, tolerance)?;
    let m = gamma.dimension();
    let mut generators = exact_annihilator(gamma)?;
    let mut advisories = Vec::new();
    let mut numerical = 0;
    let mut search = SearchKind::None;
    if !gamma.is_rational() {
        let (found, kind) = numerical_relations(gamma, search_bound, tolerance);
        search = kind;
        numerical = found.len();
        let basis = intlat::hnf(&to_i128(&generators))?;
        for r in found {
            let v: Vec<i128> = r.iter().map(|&x| x as i128).collect();
            if intlat::in_span(&basis, &v)? {
                continue;
            }
            let touches_float = r
                .iter()
                .zip(&gamma.coords)
                .any(|(ri, c)| *ri != 0 && matches!(c, Coordinate::Irrational { label: None, .. }));
            if touches_float {
                generators.push(r);
            } else if advisories.len() < 16 {
                advisories.push(format!(
                    "numerical relation {:?} (residual {:.2e}) is not implied by the declared labels; ignored",
                    r,
                    gamma.relation_residual(&r)
                ));
            }
        }
    }
    let basis = intlat::hnf(&to_i128(&generators))?;
    let relations: Vec<Relation> = basis
        .iter()
        .map(|row| {
            let vector: Vec<i64> = row.iter().map(|&x| x as i64).collect();
            let residual = gamma.relation_residual(&vector);
            Relation { vector, residual }
        })
        .collect();
    if let Some(bad) = relations.iter().find(|r| r.residual > tolerance.max(1e-12)) {
        return Err(GrlError::numerical(format!(
            "annihilator vector {:?} has residual {:.3e}; labels and values disagree",
            bad.vector, bad.residual
        )));
    }
    let verdict = if gamma.is_rational() {
        let order = gamma
            .coords
            .iter()
            .map(|c| c.as_rational().unwrap().denom().unsigned_abs())
            .fold(1u64, |a, b| a.lcm(&b));
        Verdict::Finite { order }
    } else if relations.is_empty() {
        Verdict::Dense {
            search_bound,
            tolerance,
        }
    } else {
        Verdict::InfiniteNonDense
    };
    debug_assert!(relations.len() <= m);
    Ok(OrbitClass {
        verdict,
        relations,
        numerical_relations: numerical,
        search,
        advisories,
    })
}

fn to_i128(rows: &[Vec<i64>]) -> IMatrix {
    rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

/// An irrational coordinate within `tolerance` of `p/q`, `q ≤ bound`, is ambiguous.
fn check_ambiguity(gamma: &Gamma, bound: i64, tolerance: f64) -> Result<()> {
    for (index, c) in gamma.coords.iter().enumerate() {
        if c.is_rational() {
            continue;
        }
        let v = c.value_dd();
        for q in 1..=bound {
            let scaled = v.mul_f64(q as f64);
            let dist = scaled.dist_to_integer() / q as f64;
            if dist < tolerance {
                let p = (scaled + DoubleDouble::from_f64(0.5)).floor().to_f64() as i64;
                let r = Rational64::new(p, q);
                return Err(GrlError::AmbiguousClassification {
                    index,
                    value: c.value(),
                    near: format!("{}/{}", r.numer(), r.denom()),
                    distance: dist,
                });
            }
        }
    }
    Ok(())
}

/// `{μ ∈ Z^m : ⟨μ, γ⟩ ∈ Z}` from the symbolic form of the coordinates.
pub fn exact_annihilator(gamma: &Gamma) -> Result<Vec<Vec<i64>>> {
    let m = gamma.dimension();
    let syms: Vec<SymbolicReal> = gamma.coords.iter().map(Coordinate::symbolic).collect();
    let mut monomials: Vec<Monomial> = syms
        .iter()
        .flat_map(|s| s.terms().map(|(mono, _)| mono.clone()))
        .filter(|mono| !mono.is_one())
        .collect();
    monomials.sort();
    monomials.dedup();
    // irrational parts must cancel: Σ μ_i c_{i,m} = 0 for every monomial
    let rows: IMatrix = monomials
        .iter()
        .map(|mono| integer_row(&syms.iter().map(|s| s.coefficient(mono)).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let kernel = intlat::kernel(&rows, m)?;
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    // rational parts must sum to an integer on the kernel
    let q: Vec<Rational64> = syms.iter().map(|s| s.coefficient(&Monomial::one())).collect();
    let values: Vec<Rational64> = kernel
        .iter()
        .map(|k| {
            k.iter()
                .zip(&q)
                .fold(Rational64::zero(), |acc, (ki, qi)| acc + *qi * Rational64::from_integer(*ki as i64))
        })
        .collect();
    let l = values.iter().fold(1i64, |acc, v| acc.lcm(v.denom())) as i128;
    let mut congruence: Vec<i128> = values.iter().map(|v| (*v * Rational64::from_integer(l as i64)).to_integer() as i128).collect();
    congruence.push(l);
    let s = kernel.len();
    let combos = intlat::kernel(&[congruence], s + 1)?;
    let mut gens: IMatrix = Vec::new();
    for a in combos {
        let mut mu = vec![0i128; m];
        for (aj, kj) in a[..s].iter().zip(&kernel) {
            for (x, y) in mu.iter_mut().zip(kj) {
                *x += aj * y;
            }
        }
        gens.push(mu);
    }
    let basis = intlat::hnf(&gens)?;
    basis
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| GrlError::numerical("annihilator entry overflows i64")))
                .collect()
        })
        .collect()
}

fn integer_row(coefs: &[Rational64]) -> Result<Vec<i128>> {
    let l = coefs.iter().fold(1i64, |acc, c| acc.lcm(c.denom()));
    coefs
        .iter()
        .map(|c| {
            (*c * Rational64::from_integer(l))
                .to_integer()
                .to_i128()
                .ok_or_else(|| GrlError::numerical("rational overflow"))
        })
        .collect()
}

/// Integer vectors `r ≠ 0` (first nonzero entry positive) with
/// `dist(⟨r,γ⟩, Z) < tolerance`.
fn numerical_relations(gamma: &Gamma, bound: i64, tolerance: f64) -> (Vec<Vec<i64>>, SearchKind) {
    let m = gamma.dimension();
    let side = (2 * bound + 1) as u64;
    let exhaustive = m <= 4 && side.checked_pow(m as u32).is_some_and(|n| n <= EXHAUSTIVE_LIMIT);
    if exhaustive {
        let g = gamma.values_dd();
        let total = side.pow(m as u32);
        let found: Vec<Vec<i64>> = (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                let mut rest = idx;
                let mut r = vec![0i64; m];
                for x in r.iter_mut().rev() {
                    *x = (rest % side) as i64 - bound;
                    rest /= side;
                }
                match r.iter().find(|&&x| x != 0) {
                    Some(&first) if first > 0 => {}
                    _ => return None,
                }
                let mut acc = DoubleDouble::ZERO;
                for (ri, gi) in r.iter().zip(&g) {
                    if *ri != 0 {
                        acc = acc + gi.mul_f64(*ri as f64);
                    }
                }
                (acc.dist_to_integer() < tolerance).then_some(r)
            })
            .collect();
        (found, SearchKind::Exhaustive)
    } else {
        // relations of (1, γ_1, …, γ_m) from a reduced basis
        let mut x = vec![1.0];
        x.extend(gamma.values_dd().iter().map(|v| frac(v.to_f64())));
        let weight = 1.0 / tolerance;
        let mut found = Vec::new();
        for cand in lll::relation_candidates(&x, weight) {
            let r: Vec<i64> = cand[1..].to_vec();
            if r.iter().all(|&v| v == 0) || r.iter().any(|v| v.abs() > bound) {
                continue;
            }
            // relation on the reduced values holds for γ up to an integer vector
            let sign = if r.iter().find(|&&v| v != 0).copied().unwrap_or(1) < 0 { -1 } else { 1 };
            let r: Vec<i64> = r.iter().map(|v| v * sign).collect();
            if gamma.relation_residual(&r) < tolerance {
                found.push(r);
            }
        }
        (found, SearchKind::LatticeReduction)
    }
}

/// The closed subgroup `H` generated by `γ`, described through `H⊥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupH {
    pub dimension: usize,
    pub annihilator_basis: Vec<Vec<i64>>,
    pub component_count: u64,
    /// Integer basis of the tangent lattice of the identity component.
    pub connected_directions: Vec<Vec<i64>>,
    /// One point of each connected component (`Q·(k/d)` from the Smith form).
    pub component_representatives: Vec<Vec<f64>>,
    /// Columns of the Smith transform spanning a complement of `H`'s directions,
    /// with their invariant factors.
    #[serde(skip)]
    complement: Vec<(Vec<i64>, i64)>,
}

/// `H` from the annihilator found by [`classify`].
pub fn subgroup_closure(gamma: &Gamma, cls: &OrbitClass) -> Result<SubgroupH> {
    let m = gamma.dimension();
    let basis = cls.annihilator();
    for r in &basis {
        if r.len() != m {
            return Err(GrlError::numerical("relation vector has the wrong length"));
        }
        if gamma.relation_residual(r) > 1e-6 {
            return Err(GrlError::numerical(format!(
                "relation {r:?} is inconsistent with γ (residual {:.3e})",
                gamma.relation_residual(r)
            )));
        }
    }
    subgroup_from_annihilator(m, &basis)
}

/// `H = {h : ⟨μ, h⟩ ∈ Z for μ in span(basis)}`.
pub fn subgroup_from_annihilator(m: usize, basis: &[Vec<i64>]) -> Result<SubgroupH> {
    let b = intlat::hnf(&to_i128(basis))?;
    let to_i64 = |v: &[i128]| -> Result<Vec<i64>> {
        v.iter()
            .map(|&x| i64::try_from(x).map_err(|_| GrlError::numerical("lattice entry overflows i64")))
            .collect()
    };
    if b.is_empty() {
        return Ok(SubgroupH {
            dimension: m,
            annihilator_basis: Vec::new(),
            component_count: 1,
            connected_directions: (0..m).map(|i| (0..m).map(|j| i64::from(i == j)).collect()).collect(),
            component_representatives: vec![vec![0.0; m]],
            complement: Vec::new(),
        });
    }
    let s = intlat::smith(&b, m)?;
    let r = s.rank();
    let dirs: IMatrix = (r..m).map(|j| s.q_column(j)).collect();
    let dirs = intlat::hnf(&dirs)?;
    let mut count: u64 = 1;
    for &d in &s.diag {
        count = count
            .checked_mul(d as u64)
            .filter(|&c| c <= 1 << 24)
            .ok_or_else(|| GrlError::Unsupported("orbit closure has too many components".into()))?;
    }
    let complement: Vec<(Vec<i64>, i64)> = (0..r)
        .map(|j| Ok((to_i64(&s.q_column(j))?, s.diag[j] as i64)))
        .collect::<Result<_>>()?;
    // torsion representatives Σ (k_j / d_j) q_j, k_j < d_j
    let mut reps = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut rest = idx;
        let mut h = vec![DoubleDouble::ZERO; m];
        for (q, d) in complement.iter().rev() {
            let k = (rest % *d as u64) as i64;
            rest /= *d as u64;
            if k != 0 {
                for (hi, qi) in h.iter_mut().zip(q) {
                    *hi = *hi + DoubleDouble::from_ratio(k * qi, *d);
                }
            }
        }
        reps.push(h.iter().map(|x| x.frac()).collect());
    }
    Ok(SubgroupH {
        dimension: m,
        annihilator_basis: b.iter().map(|r| to_i64(r)).collect::<Result<_>>()?,
        component_count: count,
        connected_directions: dirs.iter().map(|v| to_i64(v)).collect::<Result<_>>()?,
        component_representatives: reps,
        complement,
    })
}

impl SubgroupH {
    pub fn connected_dimension(&self) -> usize {
        self.connected_directions.len()
    }

    /// Number of points produced by [`haar_sample_points`].
    pub fn sample_count(&self, points_per_dimension: usize) -> Option<usize> {
        points_per_dimension
            .checked_pow(self.connected_dimension() as u32)?
            .checked_mul(self.component_count as usize)
    }
}

/// Equispaced product grid along the connected directions, repeated over
/// every component.
pub fn haar_sample_points(h: &SubgroupH, points_per_dimension: usize) -> Result<Vec<TorusPoint>> {
    haar_sample_points_at(h, &vec![0.0; h.dimension], points_per_dimension)
}

/// [`haar_sample_points`] translated by `lambda`.
pub fn haar_sample_points_at(h: &SubgroupH, lambda: &[f64], points_per_dimension: usize) -> Result<Vec<TorusPoint>> {
    if points_per_dimension < 2 {
        return Err(GrlError::invalid("points per dimension must be at least 2"));
    }
    if lambda.len() != h.dimension {
        return Err(GrlError::invalid("translation has the wrong dimension"));
    }
    let n = points_per_dimension;
    let k = h.connected_dimension();
    let grid = h
        .sample_count(n)
        .filter(|&c| c <= 1 << 26)
        .ok_or_else(|| GrlError::invalid("Haar sample grid is too large"))?
        / h.component_count as usize;
    let mut out = Vec::with_capacity(grid * h.component_count as usize);
    for rep in &h.component_representatives {
        for idx in 0..grid {
            let mut rest = idx;
            let mut z: Vec<f64> = rep.iter().zip(lambda).map(|(a, b)| a + b).collect();
            let mut coef = vec![0usize; k];
            for c in coef.iter_mut().rev() {
                *c = rest % n;
                rest /= n;
            }
            for (dir, &j) in h.connected_directions.iter().zip(&coef) {
                if j == 0 {
                    continue;
                }
                for (zi, vi) in z.iter_mut().zip(dir) {
                    // j·v_i / n reduced exactly before adding
                    let num = (j as i64 * vi).rem_euclid(n as i64);
                    *zi += num as f64 / n as f64;
                }
            }
            out.push(TorusPoint::from_reduced(z.iter().map(|&x| frac(x)).collect()));
        }
    }
    Ok(out)
}

/// Points of the transversal `{Q y : y_j ∈ [0, 1/d_j)}` on a grid with
/// `points_per_dimension` nodes per complementary direction.
pub fn transversal_points(h: &SubgroupH, points_per_dimension: usize) -> Result<Vec<TorusPoint>> {
    if points_per_dimension < 1 {
        return Err(GrlError::invalid("points per dimension must be positive"));
    }
    let m = h.dimension;
    let n = points_per_dimension;
    let r = h.complement.len();
    let total = n
        .checked_pow(r as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| GrlError::invalid("transversal grid is too large"))?;
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut z = vec![0.0; m];
        for (q, d) in h.complement.iter().rev() {
            let j = rest % n;
            rest /= n;
            let y = j as f64 / (n as f64 * *d as f64);
            for (zi, qi) in z.iter_mut().zip(q) {
                *zi += y * *qi as f64;
            }
        }
        out.push(TorusPoint::from_reduced(z.iter().map(|&x| frac(x)).collect()));
    }
    Ok(out)
}

/// `z0 + n·γ mod 1`, with `n·γ` formed directly.
pub fn orbit_iterate(z0: &TorusPoint, gamma: &Gamma, n: u64) -> Result<TorusPoint> {
    if z0.dimension() != gamma.dimension() {
        return Err(GrlError::invalid("base point and γ have different dimensions"));
    }
    if n == 0 {
        return Ok(z0.clone());
    }
    let coords = z0
        .coords()
        .iter()
        .zip(&gamma.coords)
        .map(|(z, c)| frac(z + multiple_frac(c, n)))
        .collect();
    Ok(TorusPoint::from_reduced(coords))
}

/// `n·c mod 1`: exact for rationals, double-double otherwise.
pub fn multiple_frac(c: &Coordinate, n: u64) -> f64 {
    match c {
        Coordinate::Rational(r) => {
            let q = *r.denom() as i128;
            let p = (*r.numer() as i128 * (n as i128 % q)).rem_euclid(q);
            p as f64 / q as f64
        }
        Coordinate::Irrational { .. } => {
            let v = c.value_dd();
            let hi = DoubleDouble::from_f64(v.hi).mul_f64(n as f64).frac();
            let lo = DoubleDouble::from_f64(v.lo).mul_f64(n as f64).frac();
            frac(hi + lo)
        }
    }
}

/// Orbit points `z0 + jγ`, `j = 0, 1, …`, each formed from `j·γ` directly.
pub struct OrbitStepper<'a> {
    z0: Vec<f64>,
    gamma: &'a Gamma,
    j: u64,
}

impl<'a> OrbitStepper<'a> {
    pub fn new(z0: &TorusPoint, gamma: &'a Gamma) -> Result<Self> {
        if z0.dimension() != gamma.dimension() {
            return Err(GrlError::invalid("base point and γ have different dimensions"));
        }
        Ok(OrbitStepper {
            z0: z0.coords().to_vec(),
            gamma,
            j: 0,
        })
    }
}

impl Iterator for OrbitStepper<'_> {
    type Item = Vec<f64>;
    fn next(&mut self) -> Option<Vec<f64>> {
        let j = self.j;
        self.j += 1;
        Some(
            self.z0
                .iter()
                .zip(&self.gamma.coords)
                .map(|(z, c)| frac(z + multiple_frac(c, j)))
                .collect(),
        )
    }
}

/// `min |p|` over the Haar sample of `λ + H`.
pub fn coset_min_modulus(p: &TrigPolynomial, lambda: &TorusPoint, h: &SubgroupH, points_per_dimension: usize) -> Result<f64> {
    if p.dimension() != h.dimension {
        return Err(GrlError::invalid("polynomial and subgroup dimensions differ"));
    }
    let pts = haar_sample_points_at(h, lambda.coords(), points_per_dimension)?;
    Ok(pts
        .par_iter()
        .map(|z| p.eval_raw(z.coords()).norm())
        .reduce(|| f64::INFINITY, f64::min))
}
