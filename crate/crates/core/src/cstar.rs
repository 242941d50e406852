//! The C*-algebra `A = M_d(C)`: involution, C*-norm, positivity and the
//! PSD ordering.

use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::{linalg, CMatrix, Complex64, PSD_TOL};

/// A `d x d` complex matrix viewed as an element of `M_d(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    entries: CMatrix,
}

impl AlgebraElement {
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "algebra element must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("ragged algebra element".into()));
        }
        Self::from_matrix(CMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let m = CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { entries: m }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            entries: CMatrix::identity(d, d),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            entries: CMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    /// C*-norm: the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        linalg::spectral_norm(&self.entries)
    }

    /// `|eta| = (eta^* eta)^{1/2}`, the PSD square root via eigendecomposition
    /// with negative rounding noise clamped to zero.
    pub fn absolute_value(&self) -> Self {
        let gram = self.entries.adjoint() * &self.entries;
        Self {
            entries: linalg::hermitian_function(&gram, |l| l.max(0.0).sqrt()),
        }
    }

    /// `||u - u^*||` measured in the C*-norm.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::spectral_norm(&(&self.entries - self.entries.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + self.operator_norm())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.entries)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Hermitian within `tol` and `lambda_min >= -tol (1 + ||u||)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = 1.0 + self.operator_norm();
        self.hermitian_defect() <= tol * scale && self.min_eigenvalue() >= -tol * scale
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            entries: self.entries.scale(s),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            entries: &self.entries * s,
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "algebra dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// `is_positive` with the default tolerance.
pub fn is_positive(u: &AlgebraElement, tol: f64) -> bool {
    u.is_positive(tol)
}

/// `u <= v` in the PSD order, i.e. `v - u` is positive.
///
/// Non-Hermitian inputs are rejected rather than symmetrised.
pub fn psd_leq(u: &AlgebraElement, v: &AlgebraElement, tol: f64) -> Result<bool> {
    u.check_dim(v)?;
    for x in [u, v] {
        if !x.is_hermitian(tol) {
            return Err(Error::NonHermitian {
                defect: x.hermitian_defect(),
            });
        }
    }
    Ok((v - u).is_positive(tol))
}

/// [`psd_leq`] at the crate default tolerance.
pub fn psd_leq_default(u: &AlgebraElement, v: &AlgebraElement) -> Result<bool> {
    psd_leq(u, v, PSD_TOL)
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim(), rhs.dim(), "algebra dimension mismatch");
        AlgebraElement {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim(), rhs.dim(), "algebra dimension mismatch");
        AlgebraElement {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.dim(), rhs.dim(), "algebra dimension mismatch");
        AlgebraElement {
            entries: &self.entries * &rhs.entries,
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            entries: -&self.entries,
        }
    }
}

/// Encodes a square complex matrix as rows of `[re, im]` pairs.
pub(crate) fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub(crate) fn pairs_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(r, c, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl Serialize for AlgebraElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_pairs(&self.entries).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let m = pairs_to_matrix(&rows).map_err(D::Error::custom)?;
        AlgebraElement::from_matrix(m).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn adjoint_of_identity_and_nilpotent() {
        let i = AlgebraElement::identity(3);
        assert_eq!(i.adjoint(), i);
        let n = AlgebraElement::from_rows(&[vec![c(0.0), c(1.0)], vec![c(0.0), c(0.0)]]).unwrap();
        let expect =
            AlgebraElement::from_rows(&[vec![c(0.0), c(0.0)], vec![c(1.0), c(0.0)]]).unwrap();
        assert_eq!(n.adjoint(), expect);
    }

    #[test]
    fn adjoint_is_antimultiplicative() {
        let mut rng = random::rng(1);
        for d in 1..=3 {
            let u = random::algebra_element(&mut rng, d);
            let v = random::algebra_element(&mut rng, d);
            let lhs = (&u * &v).adjoint();
            let rhs = &v.adjoint() * &u.adjoint();
            assert!((&lhs - &rhs).operator_norm() <= 1e-12);
            assert_eq!(u.adjoint().adjoint(), u);
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(AlgebraElement::zero(2).operator_norm(), 0.0);
        assert_relative_eq!(
            AlgebraElement::from_real_diagonal(&[3.0, -4.0]).operator_norm(),
            4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn cstar_identity_on_random_elements() {
        let mut rng = random::rng(2);
        for _ in 0..20 {
            let u = random::algebra_element(&mut rng, 3);
            let n = u.operator_norm();
            let lhs = (&u.adjoint() * &u).operator_norm();
            assert!((lhs - n * n).abs() <= 1e-10 * (1.0 + n * n));
        }
    }

    #[test]
    fn absolute_value_examples() {
        let a = AlgebraElement::from_real_diagonal(&[-2.0, 3.0]).absolute_value();
        assert!((&a - &AlgebraElement::from_real_diagonal(&[2.0, 3.0])).operator_norm() < 1e-14);
        let mut rng = random::rng(5);
        let u = AlgebraElement::from_matrix(random::haar_unitary(&mut rng, 3)).unwrap();
        assert!((&u.absolute_value() - &AlgebraElement::identity(3)).operator_norm() < 1e-12);
        let eta = random::algebra_element(&mut rng, 3);
        let abs = eta.absolute_value();
        assert!(abs.is_positive(1e-10));
        assert!((&(&abs * &abs) - &(&eta.adjoint() * &eta)).operator_norm() <= 1e-10);
    }

    #[test]
    fn positivity_examples() {
        assert!(AlgebraElement::identity(2).is_positive(PSD_TOL));
        assert!(!AlgebraElement::from_real_diagonal(&[1.0, -1.0]).is_positive(PSD_TOL));
        let mut rng = random::rng(8);
        let v = random::algebra_element(&mut rng, 3);
        assert!((&v.adjoint() * &v).is_positive(1e-10));
    }

    #[test]
    fn psd_leq_examples() {
        let i = AlgebraElement::identity(2);
        assert!(psd_leq(&AlgebraElement::zero(2), &i, PSD_TOL).unwrap());
        assert!(!psd_leq(&i, &i.scale(0.5), PSD_TOL).unwrap());
        let mut rng = random::rng(9);
        let v = random::algebra_element(&mut rng, 3);
        let g = &v.adjoint() * &v;
        assert!(psd_leq(&g, &g.scale(2.0), PSD_TOL).unwrap());
    }

    #[test]
    fn psd_leq_rejects_non_hermitian() {
        let n = AlgebraElement::from_rows(&[vec![c(0.0), c(1.0)], vec![c(0.0), c(0.0)]]).unwrap();
        let err = psd_leq(&n, &AlgebraElement::identity(2), PSD_TOL).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn serde_uses_pairs() {
        let u = AlgebraElement::from_rows(&[vec![Complex64::new(1.0, -2.0)]]).unwrap();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, "[[[1.0,-2.0]]]");
        let back: AlgebraElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
    }
}
