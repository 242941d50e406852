//! Reference implementations used as test oracles.
//!
//! Plain `Vec<Vec<Complex64>>` arithmetic only: cyclic Jacobi for Hermitian
//! spectra, Gaussian elimination for inverses and determinants. Nothing here
//! touches nalgebra's decompositions.

#![allow(dead_code)]

use gframemod_core::{CMatrix, Complex64};

pub type Mat = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn from_cmatrix(m: &CMatrix) -> Mat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn zeros(r: usize, k: usize) -> Mat {
    vec![vec![c(0.0); k]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0);
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, inner) = (a.len(), b[0].len(), b.len());
    let mut out = zeros(r, k);
    for i in 0..r {
        for t in 0..inner {
            let x = a[i][t];
            if x == c(0.0) {
                continue;
            }
            for j in 0..k {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Mat) -> Mat {
    let (r, k) = (a.len(), a[0].len());
    (0..k)
        .map(|j| (0..r).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, k) = (a.len(), a[0].len());
    (0..k).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
        .collect()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues (ascending) of a Hermitian matrix via cyclic Jacobi on its
/// real `2n x 2n` embedding `[[Re, -Im], [Im, Re]]`.
pub fn hermitian_eigenvalues(h: &Mat) -> Vec<f64> {
    let n = h.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = (h[i][j] + h[j][i].conj()) * 0.5;
            a[i][j] = z.re;
            a[i + n][j + n] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
        }
    }
    let mut eig = jacobi_symmetric(a);
    eig.sort_by(f64::total_cmp);
    // every eigenvalue appears twice in the embedding
    eig.into_iter().step_by(2).collect()
}

#[allow(clippy::needless_range_loop)]
fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn spectral_norm(a: &Mat) -> f64 {
    let g = mul(&adjoint(a), a);
    hermitian_eigenvalues(&g)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Vec<Vec<Complex64>> = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().copied().chain(e).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| aug[x][col].norm().total_cmp(&aug[y][col].norm()))?;
        if aug[pivot][col].norm() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        let p = aug[col][col];
        aug[col].iter_mut().for_each(|z| *z /= p);
        for row in 0..n {
            if row != col {
                let factor = aug[row][col];
                if factor != c(0.0) {
                    let pivot_row = aug[col].clone();
                    for (z, q) in aug[row].iter_mut().zip(pivot_row) {
                        *z -= factor * q;
                    }
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant by elimination with partial pivoting.
pub fn determinant(a: &Mat) -> Complex64 {
    let n = a.len();
    let mut m = a.clone();
    let mut det = c(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return c(0.0);
        }
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col].clone();
            for (z, q) in m[row].iter_mut().zip(pivot_row) {
                *z -= factor * q;
            }
        }
    }
    det
}

/// Independence of operators through the Hilbert-Schmidt Gram determinant,
/// normalised by the product of the diagonal (Hadamard ratio in `[0, 1]`).
pub fn gram_independent(ops: &[Mat], threshold: f64) -> bool {
    let m = ops.len();
    let hs = |a: &Mat, b: &Mat| -> Complex64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| x.conj() * y)
            .sum()
    };
    let gram: Mat = (0..m)
        .map(|i| (0..m).map(|j| hs(&ops[i], &ops[j])).collect())
        .collect();
    let diag: f64 = (0..m).map(|i| gram[i][i].re).product();
    if diag <= 0.0 {
        return false;
    }
    determinant(&gram).re / diag > threshold
}

/// Frame bounds `(min, max)` of `sum_xi M_xi M_xi^*` (block-row convention).
pub fn frame_bounds(ops: &[Mat]) -> (f64, f64) {
    let n = ops[0].len();
    let s = ops
        .iter()
        .fold(zeros(n, n), |acc, m| add(&acc, &mul(m, &adjoint(m))));
    let eig = hermitian_eigenvalues(&s);
    (eig[0], eig[eig.len() - 1])
}

/// Textbook column-vector frame theory for `d = 1`: `Lambda_xi = M_xi^T` acting on `C^n`.
pub mod column {
    use super::*;

    pub fn operators(ops: &[Mat]) -> Vec<Mat> {
        ops.iter().map(transpose).collect()
    }

    /// `S = sum Lambda^* Lambda`.
    pub fn frame_operator(lambdas: &[Mat]) -> Mat {
        let n = lambdas[0].len();
        lambdas
            .iter()
            .fold(zeros(n, n), |acc, l| add(&acc, &mul(&adjoint(l), l)))
    }

    /// `Lambda_xi S^{-1}`.
    pub fn canonical_dual(lambdas: &[Mat]) -> Vec<Mat> {
        let s_inv = inverse(&frame_operator(lambdas)).expect("frame operator invertible");
        lambdas.iter().map(|l| mul(l, &s_inv)).collect()
    }

    /// Minimal-norm `T` with `T Lambda_a = Lambda_b` over `pairs`, assuming
    /// the stacked `[Lambda_a ..]` has full row rank.
    pub fn representation(lambdas: &[Mat], pairs: &[(usize, usize)]) -> Mat {
        let n = lambdas[0].len();
        let x: Mat = (0..n)
            .map(|i| {
                pairs
                    .iter()
                    .flat_map(|&(a, _)| lambdas[a][i].clone())
                    .collect()
            })
            .collect();
        let y: Mat = (0..n)
            .map(|i| {
                pairs
                    .iter()
                    .flat_map(|&(_, b)| lambdas[b][i].clone())
                    .collect()
            })
            .collect();
        let xx = inverse(&mul(&x, &adjoint(&x))).expect("full row rank");
        mul(&mul(&y, &adjoint(&x)), &xx)
    }
}

#[cfg(test)]
mod self_check {
    use super::*;

    #[test]
    fn jacobi_on_known_spectrum() {
        let h = vec![
            vec![c(2.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), c(2.0)],
        ];
        let e = hermitian_eigenvalues(&h);
        assert!((e[0] - 1.0).abs() < 1e-13 && (e[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn inverse_and_determinant() {
        let a = vec![vec![c(4.0), c(7.0)], vec![c(2.0), c(6.0)]];
        assert!((determinant(&a) - c(10.0)).norm() < 1e-13);
        let inv = inverse(&a).unwrap();
        assert!(max_abs(&sub(&mul(&a, &inv), &identity(2))) < 1e-14);
    }
}
