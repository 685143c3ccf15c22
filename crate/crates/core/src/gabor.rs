//! Finite Gabor systems: configurations, atoms, Gram matrices and the
//! least-squares dependence residual.
//!
//! Atoms follow the sign convention `a(t) = e^{-2πi⟨y,t⟩} f(t−x)` and Gram
//! entries are `G[j][k] = ∫ conj(a_j) a_k`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::linalg::{hermitian_eigen, pinv_solve, CMatrix};
use crate::numerics::quadrature::{QuadratureSpec, Rule};
use crate::numerics::sum::StableComplexSum;
use crate::numerics::torus::frac;
use crate::numerics::Coordinate;
use crate::windows::Window;
use crate::zak;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TFPoint {
    pub x: Vec<Coordinate>,
    pub y: Vec<Coordinate>,
}

impl TFPoint {
    pub fn new(x: Vec<Coordinate>, y: Vec<Coordinate>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(GrlError::invalid(format!(
                "time-frequency point needs x and y of equal positive length, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        Ok(TFPoint { x, y })
    }

    /// A one-dimensional point from two coordinates.
    pub fn scalar(x: Coordinate, y: Coordinate) -> Self {
        TFPoint { x: vec![x], y: vec![y] }
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    pub fn is_integer(&self) -> bool {
        self.x.iter().chain(&self.y).all(Coordinate::is_integer)
    }

    pub fn exact_eq(&self, other: &TFPoint) -> bool {
        self.x.len() == other.x.len()
            && self.x.iter().zip(&other.x).all(|(a, b)| a.exact_eq(b))
            && self.y.iter().zip(&other.y).all(|(a, b)| a.exact_eq(b))
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.x.iter().map(Coordinate::value).collect()
    }

    pub fn y_values(&self) -> Vec<f64> {
        self.y.iter().map(Coordinate::value).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaborConfig {
    dimension: usize,
    points: Vec<TFPoint>,
    lattice: Vec<bool>,
    duplicates: bool,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    x: Vec<Coordinate>,
    y: Vec<Coordinate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lattice: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    dimension: usize,
    points: Vec<PointRepr>,
}

impl GaborConfig {
    /// Validated configuration; exact duplicates are rejected.
    pub fn new(dimension: usize, points: Vec<TFPoint>, lattice: Vec<bool>) -> Result<Self> {
        let cfg = Self::build(dimension, points, lattice)?;
        if cfg.duplicates {
            return Err(GrlError::invalid("configuration contains duplicate points"));
        }
        Ok(cfg)
    }

    /// Like [`GaborConfig::new`] but keeps exact duplicates (a degenerate system).
    pub fn allowing_duplicates(dimension: usize, points: Vec<TFPoint>, lattice: Vec<bool>) -> Result<Self> {
        Self::build(dimension, points, lattice)
    }

    /// Lattice flags inferred from integrality.
    pub fn from_points(dimension: usize, points: Vec<TFPoint>) -> Result<Self> {
        let lattice = points.iter().map(TFPoint::is_integer).collect();
        Self::new(dimension, points, lattice)
    }

    fn build(dimension: usize, points: Vec<TFPoint>, lattice: Vec<bool>) -> Result<Self> {
        if dimension == 0 {
            return Err(GrlError::invalid("dimension must be at least 1"));
        }
        if points.is_empty() {
            return Err(GrlError::invalid("configuration has no points"));
        }
        if lattice.len() != points.len() {
            return Err(GrlError::invalid("lattice mask length differs from point count"));
        }
        for (k, (p, &l)) in points.iter().zip(&lattice).enumerate() {
            if p.dimension() != dimension || p.y.len() != dimension {
                return Err(GrlError::invalid(format!("point {k} does not have dimension {dimension}")));
            }
            if l && !p.is_integer() {
                return Err(GrlError::invalid(format!(
                    "point {k} is declared a lattice point but has non-integer coordinates"
                )));
            }
        }
        let mut duplicates = false;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                duplicates |= points[i].exact_eq(&points[j]);
            }
        }
        Ok(GaborConfig {
            dimension,
            points,
            lattice,
            duplicates,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[TFPoint] {
        &self.points
    }

    pub fn lattice_mask(&self) -> &[bool] {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_duplicates(&self) -> bool {
        self.duplicates
    }

    /// The unique non-lattice point if there is exactly one, otherwise the last point.
    pub fn target_index(&self) -> usize {
        let off: Vec<usize> = (0..self.len()).filter(|&k| !self.lattice[k]).collect();
        if off.len() == 1 {
            off[0]
        } else {
            self.len() - 1
        }
    }

    /// The off-lattice point `(α, β)`.
    pub fn off_lattice_point(&self) -> &TFPoint {
        &self.points[self.target_index()]
    }

    pub fn non_target_indices(&self, target: usize) -> Result<Vec<usize>> {
        if target >= self.len() {
            return Err(GrlError::invalid(format!("target index {target} out of range")));
        }
        Ok((0..self.len()).filter(|&k| k != target).collect())
    }

    /// Reorders points, `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() || perm.iter().any(|&p| p >= self.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(GrlError::invalid("not a permutation of the configuration"));
        }
        Self::build(
            self.dimension,
            perm.iter().map(|&p| self.points[p].clone()).collect(),
            perm.iter().map(|&p| self.lattice[p]).collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = ConfigRepr {
            dimension: self.dimension,
            points: self
                .points
                .iter()
                .zip(&self.lattice)
                .map(|(p, &l)| PointRepr {
                    x: p.x.clone(),
                    y: p.y.clone(),
                    lattice: Some(l),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    /// Parses the JSON layout; a missing `lattice` flag is inferred from integrality.
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ConfigRepr = serde_json::from_str(text)?;
        let mut points = Vec::with_capacity(repr.points.len());
        let mut lattice = Vec::with_capacity(repr.points.len());
        for p in repr.points {
            let pt = TFPoint::new(p.x, p.y)?;
            lattice.push(p.lattice.unwrap_or_else(|| pt.is_integer()));
            points.push(pt);
        }
        Self::new(repr.dimension, points, lattice)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `e^{-2πi⟨y,t⟩} f(t − x)`.
pub fn atom_eval(w: &Window, pt: &TFPoint, t: &[f64]) -> Result<Complex64> {
    if pt.dimension() != w.dimension() || t.len() != w.dimension() {
        return Err(GrlError::invalid("atom, window and point dimensions disagree"));
    }
    Ok(atom_eval_values(w, &pt.x_values(), &pt.y_values(), t))
}

#[inline]
fn atom_eval_values(w: &Window, x: &[f64], y: &[f64], t: &[f64]) -> Complex64 {
    let shifted: Vec<f64> = t.iter().zip(x).map(|(a, b)| a - b).collect();
    let phase: f64 = y.iter().zip(t).map(|(a, b)| frac(a * b)).sum();
    w.eval_unchecked(&shifted) * Complex64::from_polar(1.0, -2.0 * PI * frac(phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramMethod {
    TimeDomain,
    ZakDomain,
    ClosedForm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    /// `λ_min > threshold`.
    pub independent: bool,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramResult {
    pub matrix: CMatrix,
    pub eigenvalues: Vec<f64>,
    pub smallest_eigenvalue: f64,
    /// `‖G v − λ_min v‖` for the computed unit eigenvector `v`.
    pub residual_vector_norm: f64,
    pub method: GramMethod,
    pub warnings: Vec<String>,
    pub certificate: Certificate,
}

impl GramResult {
    fn from_matrix(matrix: CMatrix, method: GramMethod, mut warnings: Vec<String>, duplicates: bool) -> Result<Self> {
        let eig = hermitian_eigen(&matrix)?;
        let n = matrix.dim();
        let smallest = eig.values[0];
        let v: Vec<Complex64> = (0..n).map(|r| eig.vectors[(r, 0)]).collect();
        let gv = matrix.mul_vec(&v);
        let residual_vector_norm = gv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * smallest).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let trace = matrix.trace().re;
        let threshold = 1e-10 * trace.abs().max(f64::MIN_POSITIVE);
        if duplicates {
            warnings.push("degenerate configuration: duplicate points give a zero eigenvalue".into());
        }
        Ok(GramResult {
            eigenvalues: eig.values,
            smallest_eigenvalue: smallest,
            residual_vector_norm,
            method,
            warnings,
            certificate: Certificate {
                independent: smallest > threshold,
                threshold,
            },
            matrix,
        })
    }
}

fn check_window(w: &Window, cfg: &GaborConfig) -> Result<()> {
    if w.dimension() != cfg.dimension() {
        return Err(GrlError::invalid(format!(
            "window dimension {} differs from configuration dimension {}",
            w.dimension(),
            cfg.dimension()
        )));
    }
    if w.is_zero() {
        return Err(GrlError::invalid("window is zero"));
    }
    Ok(())
}

fn max_shift(cfg: &GaborConfig) -> f64 {
    cfg.points()
        .iter()
        .flat_map(|p| p.x_values())
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Tensor rule on `[-R, R]^d`: the requested rule on each unit-or-smaller panel.
fn time_nodes(w: &Window, cfg: &GaborConfig, quad: &QuadratureSpec) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let d = cfg.dimension();
    let radius = w.effective_radius() + max_shift(cfg) + 2.0;
    let panels = (2.0 * radius).ceil() as usize;
    let rule = Rule::for_spec(quad).composite(-radius, radius, panels);
    let per_axis = rule.len();
    let total = per_axis
        .checked_pow(d as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| GrlError::invalid("time-domain quadrature grid exceeds 2^24 nodes"))?;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut t = vec![0.0; d];
        let mut wgt = 1.0;
        for c in t.iter_mut().rev() {
            let i = rest % per_axis;
            rest /= per_axis;
            *c = rule.nodes[i];
            wgt *= rule.weights[i];
        }
        nodes.push(t);
        weights.push(wgt);
    }
    Ok((nodes, weights))
}

/// Assembles `G[j][k] = Σ_n w_n conj(a_j(n)) a_k(n)` from sampled atoms.
fn assemble(samples: &[Vec<Complex64>], weights: &[f64]) -> Result<CMatrix> {
    let n = samples.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let entries: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let mut acc = StableComplexSum::new();
            for ((a, b), w) in samples[j].iter().zip(&samples[k]).zip(weights) {
                acc.add(a.conj() * b * *w);
            }
            acc.value()
        })
        .collect();
    let mut g = CMatrix::zeros(n);
    for (&(j, k), &z) in pairs.iter().zip(&entries) {
        if j == k {
            g[(j, j)] = Complex64::new(z.re, 0.0);
        } else {
            g[(j, k)] = z;
            g[(k, j)] = z.conj();
        }
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GrlError::numerical("Gram quadrature produced non-finite entries"));
    }
    Ok(g)
}

/// Gram matrix by tensor quadrature over `[-R, R]^d`, `R` = window radius +
/// largest shift + 2, with the requested rule repeated on unit panels.
pub fn gram_matrix(w: &Window, cfg: &GaborConfig, quad: &QuadratureSpec) -> Result<GramResult> {
    check_window(w, cfg)?;
    let matrix = time_domain_matrix(w, cfg, quad)?;
    GramResult::from_matrix(matrix, GramMethod::TimeDomain, Vec::new(), cfg.has_duplicates())
}

fn time_domain_matrix(w: &Window, cfg: &GaborConfig, quad: &QuadratureSpec) -> Result<CMatrix> {
    let (nodes, weights) = time_nodes(w, cfg, quad)?;
    let samples: Vec<Vec<Complex64>> = cfg
        .points()
        .par_iter()
        .map(|p| {
            let (x, y) = (p.x_values(), p.y_values());
            nodes.iter().map(|t| atom_eval_values(w, &x, &y, t)).collect()
        })
        .collect();
    assemble(&samples, &weights)
}

/// Default Zak grid resolution per axis for the Zak-domain Gram matrix.
pub fn zak_gram_resolution(d: usize) -> usize {
    if d == 1 {
        64
    } else {
        16
    }
}

/// Gram matrix as the grid mean of `conj(Z a_j) Z a_k` over `[0,1)^{2d}`.
pub fn gram_matrix_zak(w: &Window, cfg: &GaborConfig, resolution: usize) -> Result<GramResult> {
    check_window(w, cfg)?;
    let matrix = zak_domain_matrix(w, cfg, resolution)?;
    GramResult::from_matrix(matrix, GramMethod::ZakDomain, Vec::new(), cfg.has_duplicates())
}

fn zak_domain_matrix(w: &Window, cfg: &GaborConfig, resolution: usize) -> Result<CMatrix> {
    let d = cfg.dimension();
    let total = zak::grid_size(d, resolution)?;
    let base_k = zak::default_truncation(w, zak::DEFAULT_TAIL)?;
    let k = base_k + max_shift(cfg).ceil() as usize + 1;
    let samples: Vec<Vec<Complex64>> = cfg
        .points()
        .iter()
        .map(|p| {
            let (x, y) = (p.x_values(), p.y_values());
            (0..total)
                .into_par_iter()
                .map(|idx| {
                    let (t, om) = zak::grid_point(idx, d, resolution);
                    zak::lattice_sum(|s| atom_eval_values(w, &x, &y, s), &t, &om, k)
                })
                .collect()
        })
        .collect();
    let weights = vec![1.0 / total as f64; total];
    assemble(&samples, &weights)
}

/// Closed-form Gram matrix for Gaussian windows:
/// `G[j][k] = s² e^{-π|Δx|²/2} e^{-π|Δy|²/2} e^{-2πi⟨y_k − y_j, (x_j + x_k)/2⟩}`.
pub fn gaussian_gram_closed_form(w: &Window, cfg: &GaborConfig) -> Result<GramResult> {
    if !w.is_gaussian() {
        return Err(GrlError::Unsupported("closed-form Gram matrix needs a Gaussian window".into()));
    }
    check_window(w, cfg)?;
    let matrix = closed_form_matrix(cfg, w.normalization);
    GramResult::from_matrix(matrix, GramMethod::ClosedForm, Vec::new(), cfg.has_duplicates())
}

fn closed_form_matrix(cfg: &GaborConfig, s: f64) -> CMatrix {
    let n = cfg.len();
    let pts: Vec<(Vec<f64>, Vec<f64>)> = cfg.points().iter().map(|p| (p.x_values(), p.y_values())).collect();
    let mut g = CMatrix::zeros(n);
    for j in 0..n {
        g[(j, j)] = Complex64::new(s * s, 0.0);
        for k in j + 1..n {
            let (xj, yj) = &pts[j];
            let (xk, yk) = &pts[k];
            let dx2: f64 = xj.iter().zip(xk).map(|(a, b)| (a - b).powi(2)).sum();
            let dy2: f64 = yj.iter().zip(yk).map(|(a, b)| (a - b).powi(2)).sum();
            let phase: f64 = (0..xj.len()).map(|i| (yk[i] - yj[i]) * 0.5 * (xj[i] + xk[i])).sum();
            let mag = s * s * (-PI * (dx2 + dy2) / 2.0).exp();
            let z = Complex64::from_polar(mag, -2.0 * PI * frac(phase));
            g[(j, k)] = z;
            g[(k, j)] = z.conj();
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceCoefficients {
    pub c: Vec<Complex64>,
    pub target_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualMethod {
    TimeDomain,
    ZakDomain,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DependenceResidual {
    pub coefficients: DependenceCoefficients,
    pub residual: f64,
    pub method: ResidualMethod,
    /// Set when the reduced Gram block was numerically singular.
    pub pseudo_inverse: bool,
    pub warnings: Vec<String>,
}

/// Least-squares distance from the target atom to the span of the others.
pub fn dependence_residual(w: &Window, cfg: &GaborConfig, method: ResidualMethod) -> Result<DependenceResidual> {
    check_window(w, cfg)?;
    let g = match method {
        ResidualMethod::TimeDomain => time_domain_matrix(w, cfg, &QuadratureSpec::gauss(16))?,
        ResidualMethod::ZakDomain => zak_domain_matrix(w, cfg, zak_gram_resolution(cfg.dimension()))?,
    };
    residual_from_gram(&g, cfg, method)
}

/// Residual and coefficients from a precomputed Gram matrix.
pub fn residual_from_gram(g: &CMatrix, cfg: &GaborConfig, method: ResidualMethod) -> Result<DependenceResidual> {
    if cfg.len() < 2 {
        return Err(GrlError::invalid("a dependence residual needs at least two points"));
    }
    let target = cfg.target_index();
    let others = cfg.non_target_indices(target)?;
    let gll = g.submatrix(&others);
    let b: Vec<Complex64> = others.iter().map(|&l| g[(l, target)]).collect();
    let (c, pseudo_inverse) = pinv_solve(&gll, &b, 1e-12)?;
    let explained: Complex64 = b.iter().zip(&c).map(|(bi, ci)| bi.conj() * ci).sum();
    let r2 = g[(target, target)].re - explained.re;
    let mut warnings = Vec::new();
    if pseudo_inverse {
        warnings.push("reduced Gram block is singular; pseudo-inverse used".into());
    }
    if cfg.has_duplicates() {
        warnings.push("degenerate configuration: duplicate points".into());
    }
    Ok(DependenceResidual {
        coefficients: DependenceCoefficients { c, target_index: target },
        residual: r2.max(0.0).sqrt(),
        method,
        pseudo_inverse,
        warnings,
    })
}

/// `(x, y) ↦ (−y, x)` on every point; lattice flags are kept.
pub fn fourier_dual_config(cfg: &GaborConfig) -> GaborConfig {
    let points = cfg
        .points()
        .iter()
        .map(|p| TFPoint {
            x: p.y.iter().map(Coordinate::neg).collect(),
            y: p.x.clone(),
        })
        .collect();
    GaborConfig {
        dimension: cfg.dimension,
        points,
        lattice: cfg.lattice.clone(),
        duplicates: cfg.duplicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Coordinate {
        Coordinate::integer(n)
    }

    fn lab(s: &str) -> Coordinate {
        Coordinate::labelled(s).unwrap()
    }

    fn cfg(points: Vec<(Coordinate, Coordinate)>) -> GaborConfig {
        GaborConfig::from_points(1, points.into_iter().map(|(x, y)| TFPoint::scalar(x, y)).collect()).unwrap()
    }

    #[test]
    fn atom_examples() {
        let g = Window::gaussian(1);
        let o = TFPoint::scalar(int(0), int(0));
        assert_eq!(atom_eval(&g, &o, &[0.3]).unwrap(), g.eval(&[0.3]).unwrap());
        let tr = TFPoint::scalar(int(2), int(0));
        assert_eq!(atom_eval(&g, &tr, &[0.3]).unwrap(), g.eval(&[-1.7]).unwrap());
        let m = TFPoint::scalar(int(0), int(1));
        let v = atom_eval(&g, &m, &[0.25]).unwrap();
        let expect = Complex64::new(0.0, -1.0) * 2f64.powf(0.25) * (-PI / 16.0).exp();
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn single_point_gram() {
        let c = cfg(vec![(int(0), int(0))]);
        let r = gram_matrix(&Window::gaussian(1), &c, &QuadratureSpec::gauss(16)).unwrap();
        assert!((r.smallest_eigenvalue - 1.0).abs() < 1e-8);
    }

    #[test]
    fn duplicates_need_explicit_opt_in() {
        let pts = vec![TFPoint::scalar(int(0), int(0)), TFPoint::scalar(int(0), int(0))];
        assert!(GaborConfig::new(1, pts.clone(), vec![true, true]).is_err());
        let c = GaborConfig::allowing_duplicates(1, pts, vec![true, true]).unwrap();
        let r = gram_matrix(&Window::gaussian(1), &c, &QuadratureSpec::gauss(16)).unwrap();
        assert!(r.smallest_eigenvalue.abs() < 1e-10);
        assert!(!r.warnings.is_empty());
        let d = dependence_residual(&Window::gaussian(1), &c, ResidualMethod::TimeDomain).unwrap();
        assert!(d.residual < 1e-7);
        assert!((d.coefficients.c[0] - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn lattice_flag_requires_integers() {
        let pts = vec![TFPoint::scalar(lab("sqrt2"), int(0))];
        assert!(GaborConfig::new(1, pts, vec![true]).is_err());
    }

    #[test]
    fn closed_form_magnitudes() {
        let c = cfg(vec![(int(0), int(0)), (int(1), int(0)), (lab("sqrt2"), lab("sqrt2"))]);
        let r = gaussian_gram_closed_form(&Window::gaussian(1), &c).unwrap();
        assert_eq!(r.matrix[(0, 0)].re, 1.0);
        assert!((r.matrix[(0, 1)].norm() - (-PI / 2.0).exp()).abs() < 1e-15);
        assert!((r.matrix[(0, 1)].norm() - 0.207_880).abs() < 1e-6);
        assert!((r.matrix[(0, 2)].norm() - (-2.0 * PI).exp()).abs() < 1e-15);
        assert!(gaussian_gram_closed_form(&Window::hermite(1), &c).is_err());
    }

    #[test]
    fn dual_map_examples() {
        let c = cfg(vec![(int(1), int(0)), (lab("sqrt2"), lab("sqrt3"))]);
        let d = fourier_dual_config(&c);
        assert!(d.points()[0].exact_eq(&TFPoint::scalar(int(0), int(1))));
        assert!(d.points()[1].exact_eq(&TFPoint::scalar(lab("-sqrt3"), lab("sqrt2"))));
        let back = fourier_dual_config(&fourier_dual_config(&fourier_dual_config(&d)));
        assert_eq!(back, c);
    }

    #[test]
    fn json_round_trip() {
        let c = cfg(vec![(int(0), int(0)), (int(1), int(0)), (lab("sqrt2"), lab("sqrt3"))]);
        let back = GaborConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.target_index(), 2);
    }
}
