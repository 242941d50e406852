//! Dense complex linear algebra helpers backed by nalgebra.
//!
//! Every rank decision in the crate goes through [`numerical_rank`] with the
//! relative cutoff [`crate::RANK_TOL`].

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::{CMatrix, RANK_TOL};

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(size: usize) -> CMatrix {
    CMatrix::identity(size, size)
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Hermitian part `(m + m^*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    full_svd(m).values
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rel * sigma_max`.
pub fn numerical_rank(sv: &[f64], rel: f64) -> usize {
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > rel * top).count(),
        _ => 0,
    }
}

pub fn rank(m: &CMatrix) -> usize {
    numerical_rank(&singular_values(m), RANK_TOL)
}

/// Eigen-decomposition of the Hermitian part of `m`; eigenvalues ascending,
/// eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let s = f(lambda);
        for r in 0..n {
            scaled[(r, k)] *= s;
        }
    }
    scaled * vectors.adjoint()
}

struct FullSvd {
    u: CMatrix,
    values: Vec<f64>,
    v: CMatrix,
}

/// SVD with singular values sorted descending. `v` is square with as many
/// columns as `m`, so trailing columns span the right null space; columns of
/// `u` belonging to exactly zero singular values are zero.
///
/// One-sided (Hestenes) Jacobi: nalgebra's bidiagonal SVD can stall on
/// rank-deficient input and return factors that do not reconstruct `m`.
fn full_svd(m: &CMatrix) -> FullSvd {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    // Columns below this are zero to working precision; rotating them only
    // feeds subnormal phases into `v`.
    let floor = (f64::EPSILON * f64::EPSILON * m.norm()).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if alpha.min(beta) <= floor || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 }
                    / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = zeros(rows, cols);
    let mut v_sorted = zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        if norms[src] > 0.0 {
            u.set_column(dst, &a.column(src).unscale(norms[src]));
        }
        v_sorted.set_column(dst, &v.column(src));
    }
    let k = rows.min(cols);
    let values = order.iter().take(k).map(|&j| norms[j]).collect();
    FullSvd {
        u: u.columns(0, k).into_owned(),
        values,
        v: v_sorted,
    }
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// `(x_p, x_q) <- (c x_p - s conj(w) x_q, s w x_p + c x_q)` with `|w| = 1`.
fn rotate_columns(x: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, w: Complex64) {
    for r in 0..x.nrows() {
        let (xp, xq) = (x[(r, p)], x[(r, q)]);
        x[(r, p)] = xp * c - w.conj() * xq * s;
        x[(r, q)] = w * xp * s + xq * c;
    }
}

/// Unit left singular vector of the largest singular value.
pub fn top_left_singular_vector(m: &CMatrix) -> Option<CMatrix> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return None;
    }
    let svd = full_svd(m);
    (svd.values[0] > 0.0).then(|| svd.u.columns(0, 1).into_owned())
}

/// Moore-Penrose pseudoinverse with relative singular-value cutoff `rel`.
pub fn pinv(m: &CMatrix, rel: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return zeros(cols, rows);
    }
    let svd = full_svd(m);
    let r = numerical_rank(&svd.values, rel);
    let mut out = zeros(cols, rows);
    for k in 0..r {
        let inv = 1.0 / svd.values[k];
        let vk = svd.v.column(k);
        let uk = svd.u.column(k);
        out += (vk * uk.adjoint()).scale(inv);
    }
    out
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 || m.ncols() == 0 {
        return zeros(m.nrows(), 0);
    }
    let svd = full_svd(m);
    let r = numerical_rank(&svd.values, RANK_TOL);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis (as columns) of the right null space of `m`.
pub fn null_space(m: &CMatrix, rel: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return identity(cols);
    }
    let svd = full_svd(m);
    let r = numerical_rank(&svd.values, rel);
    svd.v.columns(r, cols - r).into_owned()
}

/// Projector `P` with `x P` the orthogonal projection of the row vector `x`
/// onto the row space of `rows`.
pub fn row_space_projector(rows: &CMatrix) -> CMatrix {
    let basis = column_space(&rows.adjoint());
    &basis * basis.adjoint()
}

/// Orthonormal rows spanning the range of a row-acting projector.
pub fn projector_row_basis(projector: &CMatrix) -> CMatrix {
    column_space(projector).adjoint()
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn scalar(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
