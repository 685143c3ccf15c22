//! Floating-point LLL, used to look for small integer relations among reals.

/// LLL-reduces the rows of `basis` in place (`δ = 0.99`).
pub fn lll_reduce(basis: &mut [Vec<f64>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        let (mu, bstar) = gram_schmidt(basis);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let src = basis[j].clone();
                for (x, s) in basis[k].iter_mut().zip(&src) {
                    *x -= q * s;
                }
            }
        }
        let (mu, _) = gram_schmidt(basis);
        let lhs = bstar[k];
        let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = k.saturating_sub(1).max(1);
        }
    }
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] > 0.0 { dot(&b[i], &star[j]) / norms[j] } else { 0.0 };
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * s;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, norms)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Candidate integer relations `r` with `Σ r_i x_i ≈ 0`, read off the
/// reduced basis of the lattice `[I | W·x]`.
pub fn relation_candidates(x: &[f64], weight: f64) -> Vec<Vec<i64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n + 1];
            row[i] = 1.0;
            row[n] = weight * x[i];
            row
        })
        .collect();
    lll_reduce(&mut basis);
    basis
        .iter()
        .map(|row| row[..n].iter().map(|v| v.round() as i64).collect::<Vec<i64>>())
        .filter(|r| r.iter().any(|&v| v != 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_golden_relation() {
        // φ² - φ - 1 = 0
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let cands = relation_candidates(&[1.0, phi, phi * phi], 1e10);
        let found = cands.iter().any(|r| {
            let s = r[0] as f64 + r[1] as f64 * phi + r[2] as f64 * phi * phi;
            s.abs() < 1e-9 && r.iter().any(|&v| v != 0)
        });
        assert!(found, "{cands:?}");
    }

    #[test]
    fn reduced_basis_is_short() {
        let mut b = vec![vec![1.0, 1.0, 1.0], vec![-1.0, 0.0, 2.0], vec![3.0, 5.0, 6.0]];
        lll_reduce(&mut b);
        let shortest = b.iter().map(|r| dot(r, r)).fold(f64::INFINITY, f64::min);
        assert!(shortest <= 3.0);
    }
}
