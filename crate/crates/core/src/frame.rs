//! g-fusion frames: frame operator, optimal bounds, synthesis and analysis,
//! the canonical dual and reconstruction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    self, IndexConvention, ModuleOperator, ModuleSequence, ModuleVector, Submodule, MEMBERSHIP_TOL,
};
use crate::{linalg, random, INVERSION_GUARD, RANK_TOL};

/// Seed used by [`verify_dual`] for its sampled check.
pub const VERIFY_DUAL_SEED: u64 = 0x0067_6675_7369_6f6e;

/// One pair `(N_xi, Upsilon_xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameElement {
    pub submodule: Submodule,
    pub operator: ModuleOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GFusionFrame {
    n: usize,
    d: usize,
    convention: IndexConvention,
    elements: Vec<FrameElement>,
}

impl GFusionFrame {
    /// Builds a family after checking shapes and `P_{N_xi} Upsilon_xi = Upsilon_xi`.
    pub fn new(elements: Vec<FrameElement>, convention: IndexConvention) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidParams("frame needs at least one element".into()))?;
        let (n, d) = (first.operator.n(), first.operator.d());
        for (xi, el) in elements.iter().enumerate() {
            if (el.operator.n(), el.operator.d()) != (n, d)
                || (el.submodule.n(), el.submodule.d()) != (n, d)
            {
                return Err(Error::DimensionMismatch(format!(
                    "element {xi} does not share (n={n}, d={d})"
                )));
            }
            let contained = hilbert::compose(el.submodule.projection(), &el.operator)?;
            let defect = contained.distance(&el.operator)?;
            if defect > MEMBERSHIP_TOL * (1.0 + el.operator.norm()) {
                return Err(Error::HypothesisViolation(format!(
                    "range of operator {xi} is not contained in its submodule (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self {
            n,
            d,
            convention,
            elements,
        })
    }

    /// Family of operators with `N_xi = H` for every element.
    pub fn from_operators(
        operators: Vec<ModuleOperator>,
        convention: IndexConvention,
    ) -> Result<Self> {
        let elements = operators
            .into_iter()
            .map(|operator| FrameElement {
                submodule: Submodule::full(operator.n(), operator.d()),
                operator,
            })
            .collect();
        Self::new(elements, convention)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    pub fn with_convention(&self, convention: IndexConvention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    pub fn elements(&self) -> &[FrameElement] {
        &self.elements
    }

    pub fn operator(&self, xi: usize) -> &ModuleOperator {
        &self.elements[xi].operator
    }

    pub fn operators(&self) -> impl Iterator<Item = &ModuleOperator> {
        self.elements.iter().map(|e| &e.operator)
    }

    pub fn submodules(&self) -> Vec<Submodule> {
        self.elements.iter().map(|e| e.submodule.clone()).collect()
    }

    /// Same submodules, operators replaced.
    pub fn with_operators(&self, operators: Vec<ModuleOperator>) -> Result<Self> {
        if operators.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: operators.len(),
            });
        }
        let elements = self
            .elements
            .iter()
            .zip(operators)
            .map(|(e, operator)| FrameElement {
                submodule: e.submodule.clone(),
                operator,
            })
            .collect();
        Self::new(elements, self.convention)
    }

    /// Every operator multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let elements = self
            .elements
            .iter()
            .map(|e| FrameElement {
                submodule: e.submodule.clone(),
                operator: e.operator.scaled(c),
            })
            .collect();
        Self {
            elements,
            ..self.clone()
        }
    }

    /// `max_xi ||Upsilon_xi||`.
    pub fn max_operator_norm(&self) -> f64 {
        self.operators()
            .map(ModuleOperator::norm)
            .fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        if (self.n, self.d) != (other.n, other.d) {
            return Err(Error::DimensionMismatch(
                "families of different shape".into(),
            ));
        }
        Ok(())
    }
}

/// Optimal frame bounds `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self, tol: f64) -> bool {
        (self.upper - self.lower) / self.upper <= tol
    }

    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

/// `S = sum_xi Upsilon_xi^* Upsilon_xi`.
pub fn frame_operator(frame: &GFusionFrame) -> Result<ModuleOperator> {
    let mut acc = ModuleOperator::zero(frame.n, frame.d);
    for op in frame.operators() {
        acc = acc.add(&hilbert::compose(&op.adjoint(), op)?)?;
    }
    Ok(acc)
}

/// Extreme eigenvalues of `S`. Positivity of `S - A Id` and `B Id - S` as
/// adjointable operators is exactly the module frame inequality.
pub fn frame_bounds(frame: &GFusionFrame) -> Result<FrameBounds> {
    let s = frame_operator(frame)?;
    let eig = linalg::hermitian_eigenvalues(s.matrix());
    let lower = eig.first().copied().unwrap_or(0.0);
    let upper = eig.last().copied().unwrap_or(0.0);
    if upper <= 0.0 || lower <= RANK_TOL * upper {
        return Err(Error::NotAFrame { lower, upper });
    }
    Ok(FrameBounds { lower, upper })
}

pub fn is_tight(frame: &GFusionFrame, tol: f64) -> Result<bool> {
    Ok(frame_bounds(frame)?.is_tight(tol))
}

/// `U({f_xi}) = sum_xi Upsilon_xi^* f_xi`.
pub fn synthesis(frame: &GFusionFrame, seq: &ModuleSequence) -> Result<ModuleVector> {
    if seq.len() != frame.len() {
        return Err(Error::LengthMismatch {
            expected: frame.len(),
            actual: seq.len(),
        });
    }
    seq.check_membership(&frame.submodules())?;
    synthesis_unchecked(frame, seq)
}

/// [`synthesis`] without the membership check.
pub(crate) fn synthesis_unchecked(
    frame: &GFusionFrame,
    seq: &ModuleSequence,
) -> Result<ModuleVector> {
    let mut acc = ModuleVector::zeros(frame.n, frame.d);
    for (el, f) in frame.elements.iter().zip(&seq.terms) {
        acc = acc.add(&hilbert::apply(&el.operator.adjoint(), f)?)?;
    }
    Ok(acc)
}

/// `f -> {Upsilon_xi f}`.
pub fn analysis(frame: &GFusionFrame, f: &ModuleVector) -> Result<ModuleSequence> {
    let terms = frame
        .operators()
        .map(|op| hilbert::apply(op, f))
        .collect::<Result<Vec<_>>>()?;
    ModuleSequence::new(terms, frame.convention)
}

/// `S^{-1}` by Hermitian eigendecomposition, refusing ill-conditioned `S`.
pub fn inverse_frame_operator(frame: &GFusionFrame) -> Result<ModuleOperator> {
    let s = frame_operator(frame)?;
    let eig = linalg::hermitian_eigenvalues(s.matrix());
    let lower = eig.first().copied().unwrap_or(0.0);
    let upper = eig.last().copied().unwrap_or(0.0);
    if upper <= 0.0 || lower < INVERSION_GUARD * upper {
        return Err(Error::NotAFrame { lower, upper });
    }
    let inv = linalg::hermitian_function(s.matrix(), |l| 1.0 / l);
    ModuleOperator::from_matrix(frame.n, frame.d, inv)
}

/// `{(N_xi, Upsilon_xi S^{-1})}`.
///
/// With `A = [M_0 .. M_{m-1}]` the operator matrices side by side, `S = A A^*`
/// and the stacked dual `S^{-1} A` equals `(A^+)^*`; going through `A` keeps
/// the error at `sqrt(B/A)` times roundoff instead of `B/A`.
pub fn canonical_dual(frame: &GFusionFrame) -> Result<GFusionFrame> {
    inverse_frame_operator(frame)?;
    let nd = frame.n * frame.d;
    let mut wide = linalg::zeros(nd, nd * frame.len());
    for (k, op) in frame.operators().enumerate() {
        wide.view_mut((0, k * nd), (nd, nd)).copy_from(op.matrix());
    }
    let stacked = linalg::pinv(&wide, 0.0).adjoint();
    let operators = (0..frame.len())
        .map(|k| {
            ModuleOperator::from_matrix(frame.n, frame.d, stacked.columns(k * nd, nd).into_owned())
        })
        .collect::<Result<Vec<_>>>()?;
    frame.with_operators(operators)
}

/// `sum_xi Upsilon_xi^* Gamma_xi` as an operator.
pub fn reconstruction_operator(
    frame: &GFusionFrame,
    dual: &GFusionFrame,
) -> Result<ModuleOperator> {
    frame.check_compatible(dual)?;
    let mut acc = ModuleOperator::zero(frame.n, frame.d);
    for (u, g) in frame.operators().zip(dual.operators()) {
        acc = acc.add(&hilbert::compose(&u.adjoint(), g)?)?;
    }
    Ok(acc)
}

/// `sum_xi Upsilon_xi^* Gamma_xi f`.
pub fn reconstruct(
    frame: &GFusionFrame,
    dual: &GFusionFrame,
    f: &ModuleVector,
) -> Result<ModuleVector> {
    frame.check_compatible(dual)?;
    let mut acc = ModuleVector::zeros(frame.n, frame.d);
    for (u, g) in frame.operators().zip(dual.operators()) {
        acc = acc.add(&hilbert::apply(&u.adjoint(), &hilbert::apply(g, f)?)?)?;
    }
    Ok(acc)
}

/// Checks `sum Upsilon_xi^* Gamma_xi = Id` both as an operator identity and on
/// `samples` seeded random vectors, each within relative `tol`.
pub fn verify_dual(
    frame: &GFusionFrame,
    dual: &GFusionFrame,
    samples: usize,
    tol: f64,
) -> Result<bool> {
    let recon = reconstruction_operator(frame, dual)?;
    let op_defect = recon.distance(&ModuleOperator::identity(frame.n, frame.d))?;
    if op_defect > tol {
        return Ok(false);
    }
    let mut rng = random::rng(VERIFY_DUAL_SEED);
    for _ in 0..samples {
        let f = random::module_vector(&mut rng, frame.n, frame.d);
        let r = reconstruct(frame, dual, &f)?;
        if f.sub(&r)?.norm() > tol * f.norm() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fusion frame `Upsilon_xi = v_xi P_{N_xi}`.
pub fn fusion_frame(
    submodules: &[Submodule],
    weights: &[f64],
    convention: IndexConvention,
) -> Result<GFusionFrame> {
    if submodules.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: submodules.len(),
            actual: weights.len(),
        });
    }
    let mut elements = Vec::with_capacity(submodules.len());
    for (index, (s, &w)) in submodules.iter().zip(weights).enumerate() {
        if w.is_nan() || w <= 0.0 {
            return Err(Error::NonpositiveWeight { index, value: w });
        }
        elements.push(FrameElement {
            submodule: s.clone(),
            operator: s.projection().scaled(w),
        });
    }
    GFusionFrame::new(elements, convention)
}
