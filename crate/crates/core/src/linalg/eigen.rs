//! Dense complex Hermitian matrices and a cyclic Jacobi eigensolver.
//!
//! The sweep order is fixed (row-major over the strict upper triangle), so
//! results are bit-reproducible for identical input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GrlError::invalid("matrix rows must form a square"));
        }
        Ok(CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `v^H A v`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> CMatrix {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    /// Symmetric permutation `P A P^T` with `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> CMatrix {
        self.submatrix(perm)
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
            .collect();
        CMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues (ascending) and unit eigenvectors (columns of `vectors`).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi for a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> Result<Eigen> {
    let n = a.dim();
    if n > 64 {
        return Err(GrlError::Unsupported(format!("eigensolver supports N <= 64, got {n}")));
    }
    let scale = a.frobenius();
    if a.hermitian_defect() > 1e-10 * scale.max(1.0) {
        return Err(GrlError::invalid("matrix is not Hermitian"));
    }
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GrlError::numerical("matrix has non-finite entries"));
    }
    // symmetrise so that rounding asymmetry cannot leak into the rotation
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let threshold = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && m.off_norm() > threshold {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if m.off_norm() > 1e3 * threshold {
        return Err(GrlError::numerical("Jacobi sweeps did not converge"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, new)] = v[(r, old)];
        }
    }
    Ok(Eigen { values, vectors, sweeps })
}

/// One unitary rotation zeroing `m[p][q]`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let e = apq / r; // e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ec = e.conj();
    // U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -s * ec;
    let u_qq = c * ec;
    let n = m.dim();
    // A <- A U
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * u_pp + akq * u_qp;
        m[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U^H A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Minimum-norm least-squares solution of `A x = b` for Hermitian PSD `A`.
///
/// Eigenvalues at most `rel_tol · λ_max` are treated as zero; the returned
/// flag reports whether any were.
pub fn pinv_solve(a: &CMatrix, b: &[Complex64], rel_tol: f64) -> Result<(Vec<Complex64>, bool)> {
    let n = a.dim();
    if b.len() != n {
        return Err(GrlError::invalid("right-hand side length mismatch"));
    }
    if n == 0 {
        return Ok((Vec::new(), false));
    }
    let eig = hermitian_eigen(a)?;
    let lmax = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = rel_tol * lmax;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut deficient = false;
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= cut {
            deficient = true;
            continue;
        }
        let coef: Complex64 = (0..n).map(|r| eig.vectors[(r, k)].conj() * b[r]).sum::<Complex64>() / lam;
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += eig.vectors[(r, k)] * coef;
        }
    }
    Ok((x, deficient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(hermitian_eigen(&a).is_err());
    }

    #[test]
    fn rank_one_has_zero_eigenvalue() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let e = hermitian_eigen(&a).unwrap();
        assert!(e.values[0].abs() < 1e-15);
        let (x, deficient) = pinv_solve(&a, &[c(1.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap();
        assert!(deficient);
        assert!((x[0] - c(0.5, 0.0)).norm() < 1e-14);
    }

    fn random_hermitian(n: usize, entries: &[(f64, f64)]) -> CMatrix {
        let mut a = CMatrix::zeros(n);
        let mut it = entries.iter().cycle();
        for i in 0..n {
            a[(i, i)] = c(it.next().unwrap().0, 0.0);
            for j in i + 1..n {
                let &(re, im) = it.next().unwrap();
                a[(i, j)] = c(re, im);
                a[(j, i)] = c(re, -im);
            }
        }
        a
    }

    proptest! {
        #[test]
        fn reconstructs_matrix(
            n in 1usize..9,
            entries in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 45),
        ) {
            let a = random_hermitian(n, &entries);
            let e = hermitian_eigen(&a).unwrap();
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..n {
                for j in 0..n {
                    let mut s = c(0.0, 0.0);
                    for k in 0..n {
                        s += e.vectors[(i, k)] * e.values[k] * e.vectors[(j, k)].conj();
                    }
                    prop_assert!((s - a[(i, j)]).norm() < 1e-11);
                }
            }
            let tr: f64 = e.values.iter().sum();
            prop_assert!((tr - a.trace().re).abs() < 1e-11);
        }

        #[test]
        fn eigenvalues_are_reproducible(
            entries in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 21),
        ) {
            let a = random_hermitian(6, &entries);
            let x = hermitian_eigen(&a).unwrap();
            let y = hermitian_eigen(&a).unwrap();
            for (u, v) in x.values.iter().zip(&y.values) {
                prop_assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }
}
