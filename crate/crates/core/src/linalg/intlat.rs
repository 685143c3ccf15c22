//! Integer lattices: Hermite and Smith normal forms, span membership, kernels.
//!
//! Matrices are row lists of `i128`. A lattice is the integer row span.

use crate::error::{GrlError, Result};

pub type IMatrix = Vec<Vec<i128>>;

fn checked(v: Option<i128>) -> Result<i128> {
    v.ok_or_else(|| GrlError::numerical("integer overflow in lattice arithmetic"))
}

fn row_axpy(target: &mut [i128], k: i128, src: &[i128]) -> Result<()> {
    for (t, s) in target.iter_mut().zip(src) {
        *t = checked(s.checked_mul(k).and_then(|p| t.checked_sub(p)))?;
    }
    Ok(())
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// The result has no zero rows, strictly increasing pivot columns, positive
/// pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hnf(rows: &[Vec<i128>]) -> Result<IMatrix> {
    let Some(m) = rows.first().map(|r| r.len()) else {
        return Ok(Vec::new());
    };
    if rows.iter().any(|r| r.len() != m) {
        return Err(GrlError::invalid("lattice generators have different lengths"));
    }
    let mut a: IMatrix = rows.to_vec();
    let mut out: IMatrix = Vec::new();
    for col in 0..m {
        // gcd elimination on this column among remaining rows
        loop {
            let mut piv: Option<usize> = None;
            for (i, r) in a.iter().enumerate() {
                if r[col] != 0 && piv.is_none_or(|p| r[col].abs() < a[p][col].abs()) {
                    piv = Some(i);
                }
            }
            let Some(p) = piv else { break };
            let mut done = true;
            for i in 0..a.len() {
                if i != p && a[i][col] != 0 {
                    let k = a[i][col] / a[p][col];
                    let src = a[p].clone();
                    row_axpy(&mut a[i], k, &src)?;
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                let mut row = a.swap_remove(p);
                if row[col] < 0 {
                    for x in row.iter_mut() {
                        *x = -*x;
                    }
                }
                out.push(row);
                break;
            }
        }
        a.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce above pivots
    for i in 0..out.len() {
        let col = pivot(&out[i]).unwrap();
        let p = out[i][col];
        for j in 0..i {
            let k = out[j][col].div_euclid(p);
            if k != 0 {
                let src = out[i].clone();
                row_axpy(&mut out[j], k, &src)?;
            }
        }
    }
    Ok(out)
}

fn pivot(row: &[i128]) -> Option<usize> {
    row.iter().position(|&x| x != 0)
}

/// Whether `v` lies in the row span of a Hermite normal form `basis`.
pub fn in_span(basis: &[Vec<i128>], v: &[i128]) -> Result<bool> {
    let mut w = v.to_vec();
    for row in basis {
        let col = pivot(row).ok_or_else(|| GrlError::invalid("zero row in a Hermite basis"))?;
        let p = row[col];
        if w[col] % p != 0 {
            return Ok(false);
        }
        let k = w[col] / p;
        row_axpy(&mut w, k, row)?;
    }
    Ok(w.iter().all(|&x| x == 0))
}

/// Smith normal form `P · B · Q = D` of an `r × m` matrix.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
    pub diag: Vec<i128>,
    pub p: IMatrix,
    pub q: IMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Column `j` of `Q`.
    pub fn q_column(&self, j: usize) -> Vec<i128> {
        self.q.iter().map(|r| r[j]).collect()
    }
}

fn identity(n: usize) -> IMatrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn swap_cols(a: &mut IMatrix, i: usize, j: usize) {
    for r in a.iter_mut() {
        r.swap(i, j);
    }
}

fn col_axpy(a: &mut IMatrix, target: usize, k: i128, src: usize) -> Result<()> {
    for r in a.iter_mut() {
        r[target] = checked(r[src].checked_mul(k).and_then(|p| r[target].checked_sub(p)))?;
    }
    Ok(())
}

pub fn smith(b: &[Vec<i128>], m: usize) -> Result<Smith> {
    let r = b.len();
    if b.iter().any(|row| row.len() != m) {
        return Err(GrlError::invalid("matrix rows have different lengths"));
    }
    let mut a: IMatrix = b.to_vec();
    let mut p = identity(r);
    let mut q = identity(m);
    let mut t = 0;
    while t < r.min(m) {
        // smallest nonzero entry in the remaining block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..m {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        p.swap(t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut q, t, bj);
        let mut clean = true;
        for i in t + 1..r {
            let k = a[i][t] / a[t][t];
            if k != 0 {
                let (src, srcp) = (a[t].clone(), p[t].clone());
                row_axpy(&mut a[i], k, &src)?;
                row_axpy(&mut p[i], k, &srcp)?;
            }
            clean &= a[i][t] == 0;
        }
        for j in t + 1..m {
            let k = a[t][j] / a[t][t];
            if k != 0 {
                col_axpy(&mut a, j, k, t)?;
                col_axpy(&mut q, j, k, t)?;
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // divisibility: fold any offending entry into row t and retry
        let d = a[t][t];
        let mut offender = None;
        'scan: for i in t + 1..r {
            for j in t + 1..m {
                if a[i][j] % d != 0 {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let (src, srcp) = (a[i].clone(), p[i].clone());
            row_axpy(&mut a[t], -1, &src)?;
            row_axpy(&mut p[t], -1, &srcp)?;
            continue;
        }
        if d < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in p[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag = (0..t).map(|i| a[i][i]).collect();
    Ok(Smith { diag, p, q })
}

/// Basis of the integer kernel `{x ∈ Z^m : B x = 0}`.
pub fn kernel(b: &[Vec<i128>], m: usize) -> Result<IMatrix> {
    if b.is_empty() {
        return Ok(identity(m));
    }
    let s = smith(b, m)?;
    Ok((s.rank()..m).map(|j| s.q_column(j)).collect())
}

/// Matrix-vector product `A v`.
pub fn mat_vec(a: &[Vec<i128>], v: &[i128]) -> Vec<i128> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}
