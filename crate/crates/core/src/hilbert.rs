//! The Hilbert A-module `H = A^n`, its adjointable operators, orthogonally
//! complemented submodules and the sequence module `l^2({N_xi})`.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * a vector `f = (f_1, .., f_n)` is stored as the `d x (n*d)` block row
//!   `[f_1 | .. | f_n]`, so `<f, g> = sum_i f_i g_i^* = F G^*`;
//! * an operator with blocks `b[i][j]` maps `f` to `g_j = sum_i f_i b[i][j]`,
//!   i.e. `F -> F M` where `M` is the `(n*d) x (n*d)` block matrix;
//! * consequently `apply(compose(s, t), f) = apply(s, apply(t, f))` has matrix
//!   `M_t M_s`, and the module adjoint is the conjugate transpose `M^*`.
//!
//! A submodule is a set of block rows whose rows all lie in a fixed subspace
//! `V` of `C^{n*d}`; it is closed under the left action and its projection
//! acts as `F -> F P_V`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cstar::{matrix_to_pairs, pairs_to_matrix, AlgebraElement};
use crate::error::{Error, Result};
use crate::{linalg, CMatrix, Complex64};

/// Relative tolerance for submodule membership and projection checks.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// How a finite window realises the `Z`-indexed families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexConvention {
    /// Indices `0..m`; relations only between consecutive defined indices.
    Linear,
    /// Indices taken modulo `m`.
    Cyclic,
}

impl IndexConvention {
    /// Pairs `(xi, xi + 1)` on which shift relations are imposed.
    pub fn shift_pairs(self, m: usize) -> Vec<(usize, usize)> {
        match self {
            IndexConvention::Linear => (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            IndexConvention::Cyclic => (0..m).map(|i| (i, (i + 1) % m)).collect(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IndexConvention::Linear => "linear",
            IndexConvention::Cyclic => "cyclic",
        }
    }
}

impl std::str::FromStr for IndexConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(IndexConvention::Linear),
            "cyclic" => Ok(IndexConvention::Cyclic),
            other => Err(Error::InvalidParams(format!(
                "unknown index convention `{other}`"
            ))),
        }
    }
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidDimensions(format!(
            "n = {n}, d = {d} must be positive"
        )));
    }
    Ok(())
}

/// An element of `H = A^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    n: usize,
    d: usize,
    mat: CMatrix,
}

impl ModuleVector {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            mat: CMatrix::zeros(d, n * d),
        }
    }

    /// Wraps a `d x (n*d)` block row.
    pub fn from_matrix(n: usize, d: usize, mat: CMatrix) -> Result<Self> {
        check_shape(n, d)?;
        if mat.shape() != (d, n * d) {
            return Err(Error::DimensionMismatch(format!(
                "module vector for n={n}, d={d} needs shape {d}x{}, got {}x{}",
                n * d,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { n, d, mat })
    }

    pub fn from_components(components: &[AlgebraElement]) -> Result<Self> {
        let n = components.len();
        let d = components.first().map_or(0, AlgebraElement::dim);
        check_shape(n, d)?;
        let mut mat = CMatrix::zeros(d, n * d);
        for (i, c) in components.iter().enumerate() {
            if c.dim() != d {
                return Err(Error::DimensionMismatch(
                    "components of different sizes".into(),
                ));
            }
            mat.view_mut((0, i * d), (d, d)).copy_from(c.matrix());
        }
        Ok(Self { n, d, mat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The `d x (n*d)` block row.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn component(&self, i: usize) -> AlgebraElement {
        AlgebraElement::from_matrix(
            self.mat
                .view((0, i * self.d), (self.d, self.d))
                .into_owned(),
        )
        .expect("square block")
    }

    pub fn components(&self) -> Vec<AlgebraElement> {
        (0..self.n).map(|i| self.component(i)).collect()
    }

    /// `||f|| = ||<f, f>||^{1/2}`, which equals the largest singular value of the block row.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    /// Left module action `a . f`.
    pub fn left_mul(&self, a: &AlgebraElement) -> Result<Self> {
        if a.dim() != self.d {
            return Err(Error::DimensionMismatch("algebra element size".into()));
        }
        Ok(Self {
            n: self.n,
            d: self.d,
            mat: a.matrix() * &self.mat,
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mat: self.mat.scale(s),
        }
    }

    pub fn scaled_complex(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mat: &self.mat * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            d: self.d,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            d: self.d,
            mat: &self.mat - &other.mat,
        })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.n, self.d) != (other.n, other.d) {
            return Err(Error::DimensionMismatch(format!(
                "vectors of shape (n={}, d={}) and (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }
}

/// `<f, g> = sum_i f_i g_i^*`.
pub fn inner_product(f: &ModuleVector, g: &ModuleVector) -> Result<AlgebraElement> {
    f.check_same(g)?;
    AlgebraElement::from_matrix(&f.mat * g.mat.adjoint())
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.components().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModuleVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let comps = Vec::<AlgebraElement>::deserialize(deserializer)?;
        ModuleVector::from_components(&comps).map_err(D::Error::custom)
    }
}

/// An adjointable operator on `H`, stored as its `n x n` block matrix over `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    n: usize,
    d: usize,
    mat: CMatrix,
}

impl ModuleOperator {
    pub fn identity(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            mat: CMatrix::identity(n * d, n * d),
        }
    }

    pub fn zero(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            mat: CMatrix::zeros(n * d, n * d),
        }
    }

    /// Wraps the `(n*d) x (n*d)` matrix `M` with action `F -> F M`.
    pub fn from_matrix(n: usize, d: usize, mat: CMatrix) -> Result<Self> {
        check_shape(n, d)?;
        if mat.shape() != (n * d, n * d) {
            return Err(Error::DimensionMismatch(format!(
                "operator for n={n}, d={d} needs shape {0}x{0}, got {1}x{2}",
                n * d,
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { n, d, mat })
    }

    pub fn from_blocks(blocks: &[Vec<AlgebraElement>]) -> Result<Self> {
        let n = blocks.len();
        let d = blocks
            .first()
            .and_then(|r| r.first())
            .map_or(0, AlgebraElement::dim);
        check_shape(n, d)?;
        let mut mat = CMatrix::zeros(n * d, n * d);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(
                    "operator block matrix must be square".into(),
                ));
            }
            for (j, b) in row.iter().enumerate() {
                if b.dim() != d {
                    return Err(Error::DimensionMismatch(
                        "operator blocks of different sizes".into(),
                    ));
                }
                mat.view_mut((i * d, j * d), (d, d)).copy_from(b.matrix());
            }
        }
        Ok(Self { n, d, mat })
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, d: usize, c: Complex64) -> Self {
        Self {
            n,
            d,
            mat: CMatrix::identity(n * d, n * d) * c,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The action matrix `M` with `apply(op, f) = F M`.
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn block(&self, i: usize, j: usize) -> AlgebraElement {
        let d = self.d;
        AlgebraElement::from_matrix(self.mat.view((i * d, j * d), (d, d)).into_owned())
            .expect("square block")
    }

    pub fn blocks(&self) -> Vec<Vec<AlgebraElement>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.block(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mat: self.mat.adjoint(),
        }
    }

    /// Largest singular value of the block matrix; equals the module operator norm.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mat: self.mat.scale(s),
        }
    }

    pub fn scaled_complex(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            d: self.d,
            mat: &self.mat * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            d: self.d,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            d: self.d,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        linalg::spectral_norm(&(&self.mat - self.mat.adjoint())) <= tol * (1.0 + self.norm())
    }

    /// Distance to `other` in operator norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(linalg::spectral_norm(&(&self.mat - &other.mat)))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.n, self.d) != (other.n, other.d) {
            return Err(Error::DimensionMismatch(format!(
                "operators of shape (n={}, d={}) and (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    fn check_vector(&self, f: &ModuleVector) -> Result<()> {
        if (self.n, self.d) != (f.n, f.d) {
            return Err(Error::DimensionMismatch(format!(
                "operator (n={}, d={}) applied to vector (n={}, d={})",
                self.n, self.d, f.n, f.d
            )));
        }
        Ok(())
    }
}

/// `apply(op, f)_j = sum_i f_i op[i][j]`.
pub fn apply(op: &ModuleOperator, f: &ModuleVector) -> Result<ModuleVector> {
    op.check_vector(f)?;
    Ok(ModuleVector {
        n: f.n,
        d: f.d,
        mat: &f.mat * &op.mat,
    })
}

/// `s` after `t`.
pub fn compose(s: &ModuleOperator, t: &ModuleOperator) -> Result<ModuleOperator> {
    s.check_same(t)?;
    Ok(ModuleOperator {
        n: s.n,
        d: s.d,
        mat: &t.mat * &s.mat,
    })
}

pub fn operator_adjoint(op: &ModuleOperator) -> ModuleOperator {
    op.adjoint()
}

pub fn operator_norm_module(op: &ModuleOperator) -> f64 {
    op.norm()
}

impl Serialize for ModuleOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<Vec<Vec<Vec<[f64; 2]>>>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| matrix_to_pairs(self.block(i, j).matrix()))
                    .collect()
            })
            .collect();
        blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ModuleOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<Vec<Vec<[f64; 2]>>>>::deserialize(deserializer)?;
        let blocks = raw
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| pairs_to_matrix(b).and_then(AlgebraElement::from_matrix))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ModuleOperator::from_blocks(&blocks).map_err(D::Error::custom)
    }
}

/// A closed, orthogonally complemented submodule, represented by its projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Submodule {
    projection: ModuleOperator,
    rank: usize,
}

impl Submodule {
    /// Validates idempotence and self-adjointness.
    pub fn from_projection(projection: ModuleOperator) -> Result<Self> {
        let p = projection.matrix();
        let scale = 1.0 + projection.norm();
        let idem = linalg::spectral_norm(&(p * p - p));
        let herm = linalg::spectral_norm(&(p - p.adjoint()));
        if idem > MEMBERSHIP_TOL * scale || herm > MEMBERSHIP_TOL * scale {
            return Err(Error::HypothesisViolation(format!(
                "projection is not an orthogonal projection (idempotence defect {idem:.3e}, adjoint defect {herm:.3e})"
            )));
        }
        let rank = linalg::rank(p);
        Ok(Self { projection, rank })
    }

    /// The whole module `H`.
    pub fn full(n: usize, d: usize) -> Self {
        Self {
            projection: ModuleOperator::identity(n, d),
            rank: n * d,
        }
    }

    /// The zero submodule.
    pub fn zero(n: usize, d: usize) -> Self {
        Self {
            projection: ModuleOperator::zero(n, d),
            rank: 0,
        }
    }

    fn from_row_space(n: usize, d: usize, rows: &CMatrix) -> Self {
        let p = linalg::row_space_projector(rows);
        let rank = linalg::rank(&p);
        Self {
            projection: ModuleOperator { n, d, mat: p },
            rank,
        }
    }

    pub fn projection(&self) -> &ModuleOperator {
        &self.projection
    }

    /// Complex rank of the `(n*d) x (n*d)` projection matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.projection.n
    }

    pub fn d(&self) -> usize {
        self.projection.d
    }

    /// Orthonormal rows (`rank x (n*d)`) spanning the row space `V`.
    pub fn row_basis(&self) -> CMatrix {
        linalg::projector_row_basis(self.projection.matrix())
    }

    pub fn project(&self, f: &ModuleVector) -> Result<ModuleVector> {
        apply(&self.projection, f)
    }

    /// `||f - P f||`.
    pub fn membership_defect(&self, f: &ModuleVector) -> Result<f64> {
        Ok(f.sub(&self.project(f)?)?.norm())
    }

    pub fn contains(&self, f: &ModuleVector, tol: f64) -> Result<bool> {
        Ok(self.membership_defect(f)? <= tol * (1.0 + f.norm()))
    }
}

/// Projection onto the smallest A-submodule containing every generator.
///
/// The left orbit of a block row under `M_d(C)` spans all block rows whose
/// rows lie in the row span of the generator, so the submodule is the row
/// space of the stacked generators.
pub fn submodule_from_generators(gens: &[ModuleVector]) -> Result<Submodule> {
    let first = gens
        .first()
        .ok_or_else(|| Error::InvalidParams("empty generator list".into()))?;
    let (n, d) = (first.n, first.d);
    let mut stacked = CMatrix::zeros(d * gens.len(), n * d);
    for (k, g) in gens.iter().enumerate() {
        first.check_same(g)?;
        stacked.view_mut((k * d, 0), (d, n * d)).copy_from(&g.mat);
    }
    Ok(Submodule::from_row_space(n, d, &stacked))
}

/// Projection onto the closed submodule generated by the union of ranges.
pub fn span_of_submodules(subs: &[Submodule]) -> Result<Submodule> {
    let first = subs
        .first()
        .ok_or_else(|| Error::InvalidParams("empty submodule list".into()))?;
    let (n, d) = (first.n(), first.d());
    let nd = n * d;
    let mut stacked = CMatrix::zeros(nd * subs.len(), nd);
    for (k, s) in subs.iter().enumerate() {
        first.projection.check_same(&s.projection)?;
        stacked
            .view_mut((k * nd, 0), (nd, nd))
            .copy_from(s.projection.matrix());
    }
    Ok(Submodule::from_row_space(n, d, &stacked))
}

/// What to do when a shifted term falls outside its target submodule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// Report [`Error::MembershipViolation`].
    #[default]
    Strict,
    /// Project the term onto its target submodule.
    Repair,
}

/// A finite window of `l^2({N_xi})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleSequence {
    pub terms: Vec<ModuleVector>,
    pub convention: IndexConvention,
}

impl ModuleSequence {
    pub fn new(terms: Vec<ModuleVector>, convention: IndexConvention) -> Result<Self> {
        if let Some(first) = terms.first() {
            for t in &terms {
                first.check_same(t)?;
            }
        }
        Ok(Self { terms, convention })
    }

    pub fn zeros(len: usize, n: usize, d: usize, convention: IndexConvention) -> Self {
        Self {
            terms: vec![ModuleVector::zeros(n, d); len],
            convention,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `<f, g> = sum_xi <f_xi, g_xi>`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let mut terms = self.terms.iter().zip(&other.terms);
        let (f0, g0) = terms
            .next()
            .ok_or_else(|| Error::InvalidParams("empty sequence".into()))?;
        let mut acc = inner_product(f0, g0)?;
        for (f, g) in terms {
            acc = &acc + &inner_product(f, g)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner_product(self)?.operator_norm().sqrt())
    }

    /// Checks `P_{N_xi} f_xi = f_xi` for every term.
    pub fn check_membership(&self, submodules: &[Submodule]) -> Result<()> {
        if submodules.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: submodules.len(),
                actual: self.len(),
            });
        }
        for (index, (f, s)) in self.terms.iter().zip(submodules).enumerate() {
            let defect = s.membership_defect(f)?;
            if defect > MEMBERSHIP_TOL * (1.0 + f.norm()) {
                return Err(Error::MembershipViolation { index, defect });
            }
        }
        Ok(())
    }

    fn place(
        terms: Vec<ModuleVector>,
        convention: IndexConvention,
        submodules: &[Submodule],
        mode: ShiftMode,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (index, (t, s)) in terms.into_iter().zip(submodules).enumerate() {
            let projected = s.project(&t)?;
            let defect = t.sub(&projected)?.norm();
            if defect > MEMBERSHIP_TOL * (1.0 + t.norm()) {
                match mode {
                    ShiftMode::Strict => return Err(Error::MembershipViolation { index, defect }),
                    ShiftMode::Repair => out.push(projected),
                }
            } else {
                out.push(t);
            }
        }
        Ok(Self {
            terms: out,
            convention,
        })
    }
}

/// The right shift `{f_xi} -> {f_{xi+1}}`.
///
/// Cyclic sequences rotate; linear sequences drop the leading term and append
/// zero. Every shifted term is checked against its target submodule.
pub fn right_shift(
    seq: &ModuleSequence,
    submodules: &[Submodule],
    mode: ShiftMode,
) -> Result<ModuleSequence> {
    if submodules.len() != seq.len() {
        return Err(Error::LengthMismatch {
            expected: submodules.len(),
            actual: seq.len(),
        });
    }
    let Some(first) = seq.terms.first() else {
        return Ok(seq.clone());
    };
    let zero = ModuleVector::zeros(first.n, first.d);
    let mut terms: Vec<ModuleVector> = seq.terms[1..].to_vec();
    terms.push(match seq.convention {
        IndexConvention::Cyclic => first.clone(),
        IndexConvention::Linear => zero,
    });
    ModuleSequence::place(terms, seq.convention, submodules, mode)
}

/// The inverse shift `{f_xi} -> {f_{xi-1}}`: cyclic rotation the other way, or
/// for linear sequences a leading zero with the last term dropped.
pub fn inverse_shift(
    seq: &ModuleSequence,
    submodules: &[Submodule],
    mode: ShiftMode,
) -> Result<ModuleSequence> {
    if submodules.len() != seq.len() {
        return Err(Error::LengthMismatch {
            expected: submodules.len(),
            actual: seq.len(),
        });
    }
    let Some(last) = seq.terms.last() else {
        return Ok(seq.clone());
    };
    let m = seq.len();
    let head = match seq.convention {
        IndexConvention::Cyclic => last.clone(),
        IndexConvention::Linear => ModuleVector::zeros(last.n, last.d),
    };
    let mut terms = Vec::with_capacity(m);
    terms.push(head);
    terms.extend(seq.terms[..m - 1].iter().cloned());
    ModuleSequence::place(terms, seq.convention, submodules, mode)
}
