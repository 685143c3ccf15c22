//! Window functions: Gaussians, Hermite functions and sampled grids.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::numerics::sum::StableSum;

/// Beyond this radius a unit Gaussian is below `1e-49`.
pub const GAUSSIAN_RADIUS: f64 = 6.0;
const SCAN_RADIUS: f64 = 12.0;
const SCAN_STEP: f64 = 1.0 / 256.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WindowKind {
    Gaussian { dimension: usize },
    Hermite { order: usize },
    SampledGrid(SampledGrid),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub normalization: f64,
}

/// Samples on a regular grid `lower_j + i·step`, `i < counts_j`, interpolated
/// by tensor Catmull-Rom cubics and zero outside the grid box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    pub lower: Vec<f64>,
    pub counts: Vec<usize>,
    pub step: f64,
    /// Row-major, last axis fastest.
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub constant: f64,
    pub order: u32,
}

impl DecayBound {
    /// `C (1+r)^{-M}`.
    pub fn at(&self, r: f64) -> f64 {
        self.constant * (1.0 + r).powi(-(self.order as i32))
    }
}

impl Window {
    pub fn gaussian(dimension: usize) -> Self {
        Window {
            kind: WindowKind::Gaussian { dimension },
            normalization: 1.0,
        }
    }

    pub fn hermite(order: usize) -> Self {
        Window {
            kind: WindowKind::Hermite { order },
            normalization: 1.0,
        }
    }

    pub fn sampled(grid: SampledGrid) -> Result<Self> {
        grid.validate()?;
        Ok(Window {
            kind: WindowKind::SampledGrid(grid),
            normalization: 1.0,
        })
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.normalization *= s;
        self
    }

    /// Parses `gaussian`, `hermite:N` or `csv:PATH`.
    pub fn parse(text: &str, dimension: usize) -> Result<Self> {
        let text = text.trim();
        if text == "gaussian" {
            return Ok(Window::gaussian(dimension));
        }
        if let Some(n) = text.strip_prefix("hermite:") {
            if dimension != 1 {
                return Err(GrlError::invalid("Hermite windows are one-dimensional"));
            }
            let n: usize = n.parse().map_err(|_| GrlError::Parse(format!("bad Hermite order '{n}'")))?;
            return Ok(Window::hermite(n));
        }
        if let Some(path) = text.strip_prefix("csv:") {
            let w = Window::sampled(SampledGrid::from_csv(path)?)?;
            if w.dimension() != dimension {
                return Err(GrlError::invalid(format!(
                    "sampled window has dimension {}, configuration has {dimension}",
                    w.dimension()
                )));
            }
            return Ok(w);
        }
        Err(GrlError::Parse(format!("unknown window '{text}'")))
    }

    pub fn dimension(&self) -> usize {
        match &self.kind {
            WindowKind::Gaussian { dimension } => *dimension,
            WindowKind::Hermite { .. } => 1,
            WindowKind::SampledGrid(g) => g.counts.len(),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.kind, WindowKind::Gaussian { .. })
    }

    pub fn is_real(&self) -> bool {
        match &self.kind {
            WindowKind::SampledGrid(g) => g.values.iter().all(|v| v.im == 0.0),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.normalization == 0.0
            || matches!(&self.kind, WindowKind::SampledGrid(g) if g.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)))
    }

    /// Radius of a ball outside which the window is negligible (or zero).
    pub fn effective_radius(&self) -> f64 {
        match &self.kind {
            WindowKind::Gaussian { .. } => GAUSSIAN_RADIUS,
            WindowKind::Hermite { order } => GAUSSIAN_RADIUS + (*order as f64).sqrt(),
            WindowKind::SampledGrid(g) => g.support_radius(),
        }
    }

    pub fn eval(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dimension() {
            return Err(GrlError::invalid(format!(
                "window of dimension {} evaluated at a point of dimension {}",
                self.dimension(),
                t.len()
            )));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(GrlError::invalid("window evaluated at a non-finite point"));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Evaluation without the dimension check; callers guarantee `t.len()`.
    #[inline]
    pub fn eval_unchecked(&self, t: &[f64]) -> Complex64 {
        let s = self.normalization;
        match &self.kind {
            WindowKind::Gaussian { dimension } => {
                let r2: f64 = t.iter().map(|x| x * x).sum();
                Complex64::new(s * gaussian_factor(*dimension) * (-std::f64::consts::PI * r2).exp(), 0.0)
            }
            WindowKind::Hermite { order } => Complex64::new(s * hermite_function(*order, t[0]), 0.0),
            WindowKind::SampledGrid(g) => g.interpolate(t) * s,
        }
    }

    /// `‖f‖₂` by a Riemann sum over nodes `i·step` inside `[-radius, radius]^d`.
    pub fn l2_norm(&self, step: f64, radius: f64) -> Result<f64> {
        if !(step > 0.0 && radius > 0.0) {
            return Err(GrlError::invalid("step and radius must be positive"));
        }
        let d = self.dimension();
        let n = (radius / step).floor() as i64;
        let side = (2 * n + 1) as usize;
        let total = side.checked_pow(d as u32).filter(|&v| v <= 1 << 28).ok_or_else(|| {
            GrlError::invalid("l2_norm grid is too large; increase the step or lower the radius")
        })?;
        let mut acc = StableSum::new();
        let mut t = vec![0.0; d];
        for idx in 0..total {
            let mut rest = idx;
            for x in t.iter_mut().rev() {
                *x = ((rest % side) as i64 - n) as f64 * step;
                rest /= side;
            }
            acc.add(self.eval_unchecked(&t).norm_sqr());
        }
        Ok((acc.value() * step.powi(d as i32)).sqrt())
    }

    /// Smallest `C` with `|f(t)|(1+|t|)^M ≤ C` on the verification grid.
    pub fn decay_bound(&self, order: u32) -> Result<DecayBound> {
        let weight = |r: f64| (1.0 + r).powi(order as i32);
        let mut c = 0.0f64;
        match &self.kind {
            WindowKind::Gaussian { dimension } => {
                // isotropic: scan the radius
                let k = gaussian_factor(*dimension) * self.normalization.abs();
                let steps = (SCAN_RADIUS / SCAN_STEP) as usize;
                for i in 0..=steps {
                    let r = i as f64 * SCAN_STEP;
                    c = c.max(k * (-std::f64::consts::PI * r * r).exp() * weight(r));
                }
            }
            WindowKind::Hermite { order: n } => {
                let steps = (2.0 * SCAN_RADIUS / SCAN_STEP) as usize;
                for i in 0..=steps {
                    let t = -SCAN_RADIUS + i as f64 * SCAN_STEP;
                    c = c.max((self.normalization * hermite_function(*n, t)).abs() * weight(t.abs()));
                }
            }
            WindowKind::SampledGrid(g) => {
                g.check_support()?;
                let d = g.counts.len();
                let mut t = vec![0.0; d];
                for (idx, v) in g.values.iter().enumerate() {
                    g.node(idx, &mut t);
                    let r = t.iter().map(|x| x * x).sum::<f64>().sqrt();
                    c = c.max(v.norm() * self.normalization.abs() * weight(r));
                }
            }
        }
        Ok(DecayBound { constant: c, order })
    }
}

/// `2^{d/4}`, the normalising factor of the unit Gaussian in dimension `d`.
pub fn gaussian_factor(d: usize) -> f64 {
    2f64.powf(d as f64 / 4.0)
}

/// L²-normalised Hermite function `(2π)^{1/4} ψ_n(√(2π) t)`; order 0 is the unit Gaussian.
pub fn hermite_function(n: usize, t: f64) -> f64 {
    let x = (2.0 * std::f64::consts::PI).sqrt() * t;
    let pref = (2.0 * std::f64::consts::PI).powf(0.25);
    let mut p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return pref * p0;
    }
    let mut p1 = std::f64::consts::SQRT_2 * x * p0;
    for k in 1..n {
        let k = k as f64;
        let p2 = (2.0 / (k + 1.0)).sqrt() * x * p1 - (k / (k + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    pref * p1
}

impl SampledGrid {
    pub fn new(lower: Vec<f64>, counts: Vec<usize>, step: f64, values: Vec<Complex64>) -> Result<Self> {
        let g = SampledGrid {
            lower,
            counts,
            step,
            values,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let d = self.counts.len();
        if d == 0 || self.lower.len() != d {
            return Err(GrlError::invalid("sampled grid needs at least one axis"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(GrlError::invalid("sampled grid step must be positive"));
        }
        if self.counts.iter().any(|&c| c < 2) {
            return Err(GrlError::invalid("sampled grid needs at least two samples per axis"));
        }
        let total: usize = self.counts.iter().product();
        if total != self.values.len() {
            return Err(GrlError::invalid(format!(
                "sampled grid has {} values for {} nodes",
                self.values.len(),
                total
            )));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GrlError::invalid("sampled grid values must be finite"));
        }
        if self.support_radius() <= 0.0 {
            return Err(GrlError::invalid("sampled grid support radius must be positive"));
        }
        Ok(())
    }

    /// Largest `|t|_∞` reached by the grid box.
    pub fn support_radius(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.counts)
            .map(|(&lo, &n)| lo.abs().max((lo + (n - 1) as f64 * self.step).abs()))
            .fold(0.0, f64::max)
    }

    fn node(&self, mut idx: usize, t: &mut [f64]) {
        for j in (0..self.counts.len()).rev() {
            t[j] = self.lower[j] + (idx % self.counts[j]) as f64 * self.step;
            idx /= self.counts[j];
        }
    }

    /// Samples on the outer faces must be negligible (`≤ 1e-8 · max`).
    fn check_support(&self) -> Result<()> {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return Ok(());
        }
        let d = self.counts.len();
        let mut worst = 0.0f64;
        for (idx, v) in self.values.iter().enumerate() {
            let mut rest = idx;
            let mut on_edge = false;
            for j in (0..d).rev() {
                let i = rest % self.counts[j];
                rest /= self.counts[j];
                on_edge |= i == 0 || i + 1 == self.counts[j];
            }
            if on_edge {
                worst = worst.max(v.norm());
            }
        }
        if worst > 1e-8 * max {
            return Err(GrlError::InsufficientSupport(format!(
                "sampled window reaches {:.3e} of its maximum on the grid boundary (radius {})",
                worst / max,
                self.support_radius()
            )));
        }
        Ok(())
    }

    fn interpolate(&self, t: &[f64]) -> Complex64 {
        let d = self.counts.len();
        let mut base = [0i64; 8];
        let mut frac = [0f64; 8];
        if d > 8 {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        for j in 0..d {
            let u = (t[j] - self.lower[j]) / self.step;
            let last = (self.counts[j] - 1) as f64;
            if !(0.0..=last).contains(&u) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (u.floor() as i64).min(self.counts[j] as i64 - 2);
            base[j] = i;
            frac[j] = u - i as f64;
        }
        // tensor product over 4^d stencil points
        let mut acc = Complex64::new(0.0, 0.0);
        let stencil = 4usize.pow(d as u32);
        for s in 0..stencil {
            let mut rest = s;
            let mut w = 1.0;
            let mut flat = 0usize;
            for j in 0..d {
                let o = (rest % 4) as i64 - 1;
                rest /= 4;
                w *= catmull_rom_weight(o, frac[j]);
                let idx = (base[j] + o).clamp(0, self.counts[j] as i64 - 1) as usize;
                flat = flat * self.counts[j] + idx;
            }
            if w != 0.0 {
                acc += self.values[flat] * w;
            }
        }
        acc
    }

    /// Loads rows `t_1, …, t_d, value[, value_im]`; a header row is optional.
    pub fn from_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if line == 0 => continue,
                Err(_) => return Err(GrlError::Parse(format!("non-numeric CSV row {}", line + 1))),
            }
        }
        SampledGrid::from_rows(&rows, None)
    }

    /// Builds a grid from sample rows; `complex` forces the last column to be
    /// read as an imaginary part (otherwise inferred from a consistent width).
    pub fn from_rows(rows: &[Vec<f64>], dimension: Option<usize>) -> Result<Self> {
        let width = rows.first().map(|r| r.len()).ok_or_else(|| GrlError::Parse("empty sample file".into()))?;
        if rows.iter().any(|r| r.len() != width) || width < 2 {
            return Err(GrlError::Parse("sample rows have inconsistent widths".into()));
        }
        // width = d + 1 (real) or d + 2 (complex); pick the reading whose
        // axes form a full regular grid
        let candidates: Vec<usize> = match dimension {
            Some(d) => vec![d],
            None => (1..width).rev().collect(),
        };
        let mut last_err = GrlError::Parse("samples do not form a regular grid".into());
        for d in candidates {
            let complex = match width - d {
                1 => false,
                2 => true,
                _ => continue,
            };
            match Self::assemble(rows, d, complex) {
                Ok(g) => return Ok(g),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    fn assemble(rows: &[Vec<f64>], d: usize, complex: bool) -> Result<Self> {
        let mut axes: Vec<Vec<f64>> = vec![Vec::new(); d];
        for r in rows {
            for j in 0..d {
                axes[j].push(r[j]);
            }
        }
        for a in axes.iter_mut() {
            a.sort_by(f64::total_cmp);
            a.dedup();
        }
        let step = axes[0].get(1).map(|x| x - axes[0][0]).unwrap_or(0.0);
        if step <= 0.0 {
            return Err(GrlError::Parse("sample grid needs two distinct nodes per axis".into()));
        }
        for a in &axes {
            for w in a.windows(2) {
                if ((w[1] - w[0]) - step).abs() > 1e-9 * step {
                    return Err(GrlError::Parse("sample grid spacing is not uniform".into()));
                }
            }
        }
        let counts: Vec<usize> = axes.iter().map(|a| a.len()).collect();
        let lower: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        let total: usize = counts.iter().product();
        if total != rows.len() {
            return Err(GrlError::Parse(format!(
                "{} samples do not fill a {:?} grid",
                rows.len(),
                counts
            )));
        }
        let mut values = vec![Complex64::new(f64::NAN, 0.0); total];
        for r in rows {
            let mut flat = 0usize;
            for j in 0..d {
                let i = ((r[j] - lower[j]) / step).round() as usize;
                flat = flat * counts[j] + i;
            }
            values[flat] = Complex64::new(r[d], if complex { r[d + 1] } else { 0.0 });
        }
        if values.iter().any(|v| v.re.is_nan()) {
            return Err(GrlError::Parse("sample grid has duplicate nodes".into()));
        }
        SampledGrid::new(lower, counts, step, values)
    }

    /// Samples `f` on `[-radius, radius]^d` with the given step.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(f: F, d: usize, step: f64, radius: f64) -> Result<Self> {
        let n = (radius / step).round() as usize;
        let counts = vec![2 * n + 1; d];
        let lower = vec![-(n as f64) * step; d];
        let total: usize = counts.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut t = vec![0.0; d];
        let proto = SampledGrid {
            lower: lower.clone(),
            counts: counts.clone(),
            step,
            values: Vec::new(),
        };
        for idx in 0..total {
            proto.node(idx, &mut t);
            values.push(f(&t));
        }
        SampledGrid::new(lower, counts, step, values)
    }
}

/// Catmull-Rom weight of the stencil offset `o ∈ {-1,0,1,2}` at fraction `u`.
fn catmull_rom_weight(o: i64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    match o {
        -1 => 0.5 * (-u3 + 2.0 * u2 - u),
        0 => 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0),
        1 => 0.5 * (-3.0 * u3 + 4.0 * u2 + u),
        2 => 0.5 * (u3 - u2),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_values() {
        let g = Window::gaussian(1);
        assert!((g.eval(&[0.0]).unwrap().re - 2f64.powf(0.25)).abs() < 1e-15);
        // 2^{1/4} e^{-π} = 0.051390299066423992... (mpmath, 40 digits)
        let v = g.eval(&[1.0]).unwrap().re;
        assert!((v - 1.189_207_115_002_721 * (-PI).exp()).abs() < 1e-16);
        assert!((v - 0.051_390_299_066_423_99).abs() < 1e-16);
        assert!(g.eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn hermite_values() {
        assert_eq!(Window::hermite(1).eval(&[0.0]).unwrap().re, 0.0);
        for t in [-1.3, 0.0, 0.4] {
            let h0 = hermite_function(0, t);
            assert!((h0 - Window::gaussian(1).eval(&[t]).unwrap().re).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_norms() {
        let n1 = Window::gaussian(1).l2_norm(1.0 / 64.0, 6.0).unwrap();
        assert!((n1 - 1.0).abs() < 1e-8, "{n1}");
        let n2 = Window::gaussian(2).l2_norm(1.0 / 64.0, 6.0).unwrap();
        assert!((n2 - 1.0).abs() < 1e-7, "{n2}");
        for n in [1usize, 2, 5] {
            let v = Window::hermite(n).l2_norm(1.0 / 64.0, 9.0).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "order {n}: {v}");
        }
        assert_eq!(Window::gaussian(1).scaled(0.0).l2_norm(1.0 / 64.0, 6.0).unwrap(), 0.0);
    }

    #[test]
    fn decay_bounds() {
        let g = Window::gaussian(1);
        assert!((g.decay_bound(0).unwrap().constant - 2f64.powf(0.25)).abs() < 1e-15);
        let b = g.decay_bound(2).unwrap();
        // maximiser of e^{-πr²}(1+r)² solves πr(1+r) = 1
        let r = (-1.0 + (1.0f64 + 4.0 / PI).sqrt()) / 2.0;
        let exact = 2f64.powf(0.25) * (-PI * r * r).exp() * (1.0 + r).powi(2);
        assert!(b.constant <= exact && b.constant > exact * (1.0 - 1e-4));
        assert_eq!(g.scaled(0.0).decay_bound(3).unwrap().constant, 0.0);
    }

    #[test]
    fn sampled_grid_interpolates_and_vanishes_outside() {
        let g = Window::gaussian(1);
        let grid = SampledGrid::sample(|t| g.eval_unchecked(t), 1, 1.0 / 32.0, 7.0).unwrap();
        let w = Window::sampled(grid).unwrap();
        for t in [0.0, 0.013, -0.77, 1.5] {
            let exact = g.eval(&[t]).unwrap().re;
            assert!((w.eval(&[t]).unwrap().re - exact).abs() < 1e-5);
        }
        assert_eq!(w.eval(&[7.5]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(w.decay_bound(2).is_ok());
    }

    #[test]
    fn truncated_sampled_grid_is_rejected_by_decay_bound() {
        let g = Window::gaussian(1);
        let grid = SampledGrid::sample(|t| g.eval_unchecked(t), 1, 1.0 / 16.0, 1.0).unwrap();
        let w = Window::sampled(grid).unwrap();
        assert!(matches!(w.decay_bound(2), Err(GrlError::InsufficientSupport(_))));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let mut text = String::from("t,value,value_im\n");
        for i in -40..=40 {
            let t = i as f64 / 8.0;
            text.push_str(&format!("{t},{},{}\n", (-PI * t * t).exp(), 0.5 * (-PI * t * t).exp()));
        }
        std::fs::write(&path, text).unwrap();
        let w = Window::parse(&format!("csv:{}", path.display()), 1).unwrap();
        assert!(!w.is_real());
        let v = w.eval(&[0.0]).unwrap();
        assert!((v - Complex64::new(1.0, 0.5)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn gaussian_is_even(t in -8.0f64..8.0) {
            let g = Window::gaussian(1);
            prop_assert_eq!(g.eval(&[t]).unwrap(), g.eval(&[-t]).unwrap());
        }

        #[test]
        fn hermite_parity(n in 0usize..12, t in -5.0f64..5.0) {
            let h = Window::hermite(n);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = h.eval(&[-t]).unwrap().re;
            let b = h.eval(&[t]).unwrap().re;
            prop_assert!((a - sign * b).abs() <= 1e-14 * b.abs().max(1e-300));
        }

        #[test]
        fn norm_is_homogeneous(s in -4.0f64..4.0) {
            let base = Window::gaussian(1).l2_norm(1.0 / 32.0, 6.0).unwrap();
            let scaled = Window::gaussian(1).scaled(s).l2_norm(1.0 / 32.0, 6.0).unwrap();
            prop_assert!((scaled - s.abs() * base).abs() < 1e-12);
        }
    }
}
