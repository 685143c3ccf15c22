//! Truncated Zak transform `Zf(t,ω) = Σ_κ e^{-2πi⟨ω,κ⟩} f(t+κ)` on `[0,1)^{2d}`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};
use crate::numerics::sum::{StableComplexSum, StableSum};
use crate::numerics::torus::frac_int_split;
use crate::numerics::TorusPoint;
use crate::trigpoly::TrigPolynomial;
use crate::windows::Window;

/// Tail bound accepted by [`zak_transform`].
pub const DEFAULT_TAIL: f64 = 1e-10;
pub const DEFAULT_RESOLUTION: usize = 128;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZakGrid {
    pub dimension: usize,
    pub resolution: usize,
    /// Index `(t_1..t_d, ω_1..ω_d)` flattened with the last axis fastest.
    pub values: Vec<Complex64>,
    pub truncation: usize,
    pub tail_bound: f64,
    /// The window, when the grid came from one; synthetic grids carry none.
    #[serde(skip)]
    pub window: Option<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub points: Vec<TorusPoint>,
    pub threshold: f64,
}

/// Rigorous bound on `sup_t |Σ_{|κ|∞>K} f(t+κ)|` for `t ∈ [0,1)^d`, minimised
/// over the polynomial decay order.
///
/// With `|f(s)| ≤ C_M (1+|s|)^{-M}` and `|t+κ| ≥ |κ|∞ - 1`, the shell
/// `|κ|∞ = j` contributes at most `((2j+1)^d - (2j-1)^d) C_M j^{-M}`.
pub fn tail_bound(w: &Window, k: usize) -> Result<f64> {
    let d = w.dimension() as i32;
    let mut best = f64::INFINITY;
    for m in (d as u32 + 2)..=60 {
        let c = w.decay_bound(m)?.constant;
        if c == 0.0 {
            return Ok(0.0);
        }
        best = best.min(c * shell_sum(d, m as i32, k));
    }
    Ok(best)
}

fn shell_sum(d: i32, m: i32, k: usize) -> f64 {
    const TERMS: usize = 100_000;
    let mut acc = StableSum::new();
    let j0 = k + 1;
    for j in j0..j0 + TERMS {
        let jf = j as f64;
        let shell = (2.0 * jf + 1.0).powi(d) - (2.0 * jf - 1.0).powi(d);
        acc.add(shell * jf.powi(-m));
    }
    let big_j = (j0 + TERMS) as f64;
    // remainder: shell ≤ 2d·3^{d-1} j^{d-1}, summed by an integral
    let rem = 2.0 * d as f64 * 3f64.powi(d - 1) * big_j.powi(d - m) / (m - d) as f64;
    acc.value() + rem
}

/// Smallest `K` with [`tail_bound`] below `tail`.
pub fn default_truncation(w: &Window, tail: f64) -> Result<usize> {
    for k in 1..=64 {
        if tail_bound(w, k)? < tail {
            return Ok(k);
        }
    }
    Err(GrlError::numerical("no truncation up to K=64 meets the requested tail bound"))
}

/// Truncated lattice sum `Σ_{|κ|∞ ≤ K} e^{-2πi⟨ω,κ⟩} f(t+κ)` in lexicographic κ order.
pub fn lattice_sum<F: Fn(&[f64]) -> Complex64>(f: F, t: &[f64], omega: &[f64], k: usize) -> Complex64 {
    let d = t.len();
    let side = 2 * k + 1;
    let total = side.pow(d as u32);
    let mut acc = StableComplexSum::new();
    let mut shifted = vec![0.0; d];
    for idx in 0..total {
        let mut rest = idx;
        let mut phase = 0.0;
        for j in (0..d).rev() {
            let kappa = (rest % side) as f64 - k as f64;
            rest /= side;
            shifted[j] = t[j] + kappa;
            phase += omega[j] * kappa;
        }
        let v = f(&shifted);
        if v.re != 0.0 || v.im != 0.0 {
            acc.add(v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase));
        }
    }
    acc.value()
}

/// Raw truncated sum at `(t, ω)` with no reduction of the arguments.
pub fn zak_sum(w: &Window, t: &[f64], omega: &[f64], k: usize) -> Result<Complex64> {
    check_dims(w, t, omega)?;
    Ok(lattice_sum(|s| w.eval_unchecked(s), t, omega, k))
}

/// `Zf(t,ω)` at an arbitrary point: `t` is reduced into `[0,1)^d` through
/// quasi-periodicity and `ω` modulo 1 before summing.
pub fn zak_eval(w: &Window, t: &[f64], omega: &[f64], k: usize) -> Result<Complex64> {
    check_dims(w, t, omega)?;
    let mut t0 = Vec::with_capacity(t.len());
    let mut om = Vec::with_capacity(t.len());
    let mut phase = 0.0;
    for (&tj, &wj) in t.iter().zip(omega) {
        let (ft, it) = frac_int_split(tj)?;
        let (fw, _) = frac_int_split(wj)?;
        t0.push(ft);
        om.push(fw);
        phase += fw * it as f64;
    }
    let z = lattice_sum(|s| w.eval_unchecked(s), &t0, &om, k);
    Ok(z * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase.rem_euclid(1.0)))
}

fn check_dims(w: &Window, t: &[f64], omega: &[f64]) -> Result<()> {
    let d = w.dimension();
    if t.len() != d || omega.len() != d {
        return Err(GrlError::invalid(format!(
            "Zak transform of a {d}-dimensional window at a point of dimension ({}, {})",
            t.len(),
            omega.len()
        )));
    }
    if t.iter().chain(omega).any(|x| !x.is_finite()) {
        return Err(GrlError::invalid("Zak transform evaluated at a non-finite point"));
    }
    Ok(())
}

/// Grid point coordinates for a flat index.
pub fn grid_point(index: usize, d: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut coords = vec![0.0; 2 * d];
    let mut rest = index;
    for c in coords.iter_mut().rev() {
        *c = (rest % m) as f64 / m as f64;
        rest /= m;
    }
    let omega = coords.split_off(d);
    (coords, omega)
}

/// Samples `Zf` at `(i/M, j/M)` with truncation `K`; the tail bound must be
/// below `1e-10`.
pub fn zak_transform(w: &Window, resolution: usize, k: usize) -> Result<ZakGrid> {
    zak_transform_with_tail(w, resolution, k, DEFAULT_TAIL)
}

pub fn zak_transform_with_tail(w: &Window, resolution: usize, k: usize, max_tail: f64) -> Result<ZakGrid> {
    if resolution < 4 {
        return Err(GrlError::invalid(format!("Zak grid resolution must be at least 4, got {resolution}")));
    }
    let d = w.dimension();
    let tail = tail_bound(w, k)?;
    if tail >= max_tail {
        let suggested = default_truncation(w, max_tail)?;
        return Err(GrlError::Truncation {
            requested: k,
            suggested,
            tail,
        });
    }
    let total = grid_size(d, resolution)?;
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (t, om) = grid_point(idx, d, resolution);
            lattice_sum(|s| w.eval_unchecked(s), &t, &om, k)
        })
        .collect();
    Ok(ZakGrid {
        dimension: d,
        resolution,
        values,
        truncation: k,
        tail_bound: tail,
        window: Some(w.clone()),
    })
}

/// `M^{2d}`, refusing grids beyond `2^30` nodes.
pub fn grid_size(d: usize, m: usize) -> Result<usize> {
    m.checked_pow(2 * d as u32)
        .filter(|&n| n <= 1 << 30)
        .ok_or_else(|| GrlError::invalid(format!("a {m}^{} grid is too large", 2 * d)))
}

impl ZakGrid {
    /// A grid built from given values, e.g. for synthetic tests.
    pub fn from_values(dimension: usize, resolution: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid_size(dimension, resolution)? {
            return Err(GrlError::invalid("value count does not match the grid shape"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GrlError::invalid("grid values must be finite"));
        }
        Ok(ZakGrid {
            dimension,
            resolution,
            values,
            truncation: 0,
            tail_bound: 0.0,
            window: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, index: usize) -> (Vec<f64>, Vec<f64>) {
        grid_point(index, self.dimension, self.resolution)
    }

    fn window(&self) -> Result<&Window> {
        self.window
            .as_ref()
            .ok_or_else(|| GrlError::Unsupported("synthetic Zak grid has no window for fresh evaluations".into()))
    }

    /// Fresh lattice sum at an off-grid point.
    pub fn eval_at(&self, t: &[f64], omega: &[f64]) -> Result<Complex64> {
        zak_eval(self.window()?, t, omega, self.truncation)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(1/M^{2d}) Σ |Zf|²`, the grid estimate of `‖f‖₂²`.
    pub fn grid_l2_squared(&self) -> f64 {
        let mut acc = StableSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.value() / self.values.len() as f64
    }

    /// Writes `t..., omega..., re, im, abs` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let d = self.dimension;
        let mut header: Vec<String> = Vec::new();
        for j in 1..=d {
            header.push(if d == 1 { "t".into() } else { format!("t{j}") });
        }
        for j in 1..=d {
            header.push(if d == 1 { "omega".into() } else { format!("omega{j}") });
        }
        header.extend(["re".into(), "im".into(), "abs".into()]);
        wtr.write_record(&header)?;
        for (i, v) in self.values.iter().enumerate() {
            let (t, om) = self.point(i);
            let mut rec: Vec<String> = t.iter().chain(&om).map(|x| x.to_string()).collect();
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
            rec.push(v.norm().to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Max over the grid of `|Zf(t+e_j,ω) − e^{2πiω_j} Zf(t,ω)|` and
/// `|Zf(t,ω+e_j) − Zf(t,ω)|`, every term a fresh raw sum.
pub fn quasi_periodicity_residual(z: &ZakGrid) -> Result<f64> {
    let w = z.window()?;
    let d = z.dimension;
    let k = z.truncation;
    let worst = (0..z.len())
        .into_par_iter()
        .map(|idx| {
            let (t, om) = z.point(idx);
            let base = lattice_sum(|s| w.eval_unchecked(s), &t, &om, k);
            let mut worst = 0.0f64;
            for j in 0..d {
                let mut ts = t.clone();
                ts[j] += 1.0;
                let shifted = lattice_sum(|s| w.eval_unchecked(s), &ts, &om, k);
                let expect = base * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * om[j]);
                worst = worst.max((shifted - expect).norm());
                let mut ws = om.clone();
                ws[j] += 1.0;
                let shifted = lattice_sum(|s| w.eval_unchecked(s), &t, &ws, k);
                worst = worst.max((shifted - base).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// Grid L² norm of `p·Zf − e^{-2πi⟨t,β⟩} Zf(t−α, ω+β)`.
pub fn functional_equation_residual(z: &ZakGrid, p: &TrigPolynomial, alpha: &[f64], beta: &[f64]) -> Result<f64> {
    let d = z.dimension;
    if alpha.len() != d || beta.len() != d || p.dimension() != 2 * d {
        return Err(GrlError::invalid("functional equation arguments have mismatched dimensions"));
    }
    let w = z.window()?;
    let k = z.truncation;
    let terms: Vec<f64> = (0..z.len())
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let (t, om) = z.point(idx);
            let mut full = t.clone();
            full.extend_from_slice(&om);
            let lhs = p.eval_raw(&full) * z.values[idx];
            let ts: Vec<f64> = t.iter().zip(alpha).map(|(a, b)| a - b).collect();
            let ws: Vec<f64> = om.iter().zip(beta).map(|(a, b)| a + b).collect();
            let tb: f64 = t.iter().zip(beta).map(|(a, b)| a * b).sum();
            let rhs = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * tb) * zak_eval(w, &ts, &ws, k)?;
            Ok((lhs - rhs).norm_sqr())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut acc = StableSum::new();
    for v in terms {
        acc.add(v);
    }
    Ok((acc.value() / z.len() as f64).sqrt())
}

/// Grid points with `|Zf| < threshold`; `None` uses `1e-3 · max|Zf|`.
pub fn locate_zero_set(z: &ZakGrid, threshold: Option<f64>) -> Result<ZeroSet> {
    let threshold = match threshold {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(GrlError::invalid(format!("zero-set threshold must be positive, got {t}"))),
        None => {
            let m = z.max_abs();
            if m == 0.0 {
                f64::MIN_POSITIVE
            } else {
                1e-3 * m
            }
        }
    };
    let points = z
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() < threshold)
        .map(|(i, _)| {
            let (mut t, om) = z.point(i);
            t.extend(om);
            TorusPoint::from_reduced(t)
        })
        .collect();
    Ok(ZeroSet { points, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_theta_value_at_origin() {
        // 2^{1/4} Σ e^{-πκ²} with the lattice sum to |κ| ≤ 20 as oracle
        let oracle: f64 = 2f64.powf(0.25) * (-20i32..=20).map(|k| (-PI * (k * k) as f64).exp()).sum::<f64>();
        let v = zak_sum(&Window::gaussian(1), &[0.0], &[0.0], 6).unwrap();
        assert!((v.re - oracle).abs() < 1e-14 && v.im.abs() < 1e-15);
        // 1.2919960074815038919... (mpmath, 40 digits)
        assert!((v.re - 1.291_996_007_481_504).abs() < 1e-14);
    }

    #[test]
    fn gaussian_zero_at_half_half() {
        let v = zak_sum(&Window::gaussian(1), &[0.5], &[0.5], 6).unwrap();
        assert!(v.norm() < 1e-8);
    }

    #[test]
    fn zero_window_grid() {
        let w = Window::gaussian(1).scaled(0.0);
        let z = zak_transform(&w, 8, 3).unwrap();
        assert!(z.values.iter().all(|v| v.norm() == 0.0));
        assert_eq!(quasi_periodicity_residual(&z).unwrap(), 0.0);
        let zs = locate_zero_set(&z, Some(1e-3)).unwrap();
        assert_eq!(zs.points.len(), 64);
        let zs = locate_zero_set(&z, None).unwrap();
        assert_eq!(zs.points.len(), 64);
    }

    #[test]
    fn constant_grid_has_no_zeros() {
        let z = ZakGrid::from_values(1, 8, vec![Complex64::new(1.0, 0.0); 64]).unwrap();
        assert!(locate_zero_set(&z, None).unwrap().points.is_empty());
    }

    #[test]
    fn truncation_error_suggests_k() {
        let err = zak_transform_with_tail(&Window::gaussian(1), 8, 1, 1e-30).unwrap_err();
        match err {
            GrlError::Truncation { requested, suggested, .. } => {
                assert_eq!(requested, 1);
                assert!(suggested > 1);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn off_grid_reduction_matches_raw_sum() {
        let w = Window::gaussian(1);
        let raw = zak_sum(&w, &[2.3], &[-0.7], 12).unwrap();
        let red = zak_eval(&w, &[2.3], &[-0.7], 6).unwrap();
        assert!((raw - red).norm() < 1e-12);
    }

    #[test]
    fn csv_has_documented_columns() {
        let z = zak_transform(&Window::gaussian(1), 4, 6).unwrap();
        let mut buf = Vec::new();
        z.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,omega,re,im,abs\n"));
        assert_eq!(text.lines().count(), 17);
    }
}
