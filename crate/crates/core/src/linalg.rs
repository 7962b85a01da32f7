//! Small dense helpers shared by the geometric modules. Matrices are row-major
//! `Vec<Vec<f64>>`; anything heavier goes through nalgebra.

use nalgebra::DMatrix;

pub type Matrix = Vec<Vec<f64>>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn mat_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j]).collect())
        .collect()
}

pub fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    let n = m.len();
    let c = m.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, c, |i, j| m[i][j])
}

pub fn from_dmatrix(m: &DMatrix<f64>) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn determinant(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    to_dmatrix(m).determinant()
}

pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if m.is_empty() {
        return Some(Vec::new());
    }
    to_dmatrix(m).try_inverse().map(|inv| from_dmatrix(&inv))
}

pub fn max_entry_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Extends the orthonormal rows in `rows` to an orthonormal basis of R^n by
/// Gram-Schmidt over the standard basis, taken in increasing index order.
/// Candidates whose residual falls below `1e-8` are skipped.
pub fn complete_orthonormal(rows: &[Vec<f64>], n: usize) -> Matrix {
    let mut basis: Matrix = rows.to_vec();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        if let Some(v) = orthogonalize(&e, &basis) {
            basis.push(v);
        }
    }
    basis[rows.len()..].to_vec()
}

/// Two passes of modified Gram-Schmidt against `basis`; `None` when the
/// residual is numerically zero.
pub fn orthogonalize(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let nw = norm(&w);
    if nw < 1e-8 {
        return None;
    }
    Some(w.into_iter().map(|x| x / nw).collect())
}
