//! Stability of g-fusion frames under operator perturbation.
//!
//! The inequality
//! `||sum a_xi (Upsilon_xi - Hat_xi) f|| <= eta ||sum a_xi Upsilon_xi f|| + beta ||sum a_xi Hat_xi f||`
//! quantifies over all finite sequences and all `f`, so it can only be
//! falsified, never proven, by sampling. [`check_inequality_33`] searches
//! standard-basis sequences, random unit sequences, a few structured vectors
//! per sequence, and finally hill-climbs from the worst candidate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cstar::{psd_leq, AlgebraElement};
use crate::error::{Error, Result};
use crate::frame::{FrameBounds, GFusionFrame};
use crate::hilbert::{inner_product, ModuleVector};
use crate::representability::independence_analysis;
use crate::{linalg, random, CMatrix, Complex64, PSD_TOL};

/// Relative slack before a sample counts as a violation.
pub const INEQUALITY_SLACK: f64 = 1e-10;
/// Slack for containment of empirical bounds in the derived ones.
pub const BOUNDS_SLACK: f64 = 1e-8;

pub const DEFAULT_SEQ_SAMPLES: usize = 256;
pub const DEFAULT_VEC_SAMPLES: usize = 64;
const LOCAL_SEARCH_STEPS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationParams {
    eta: f64,
    beta: f64,
}

impl PerturbationParams {
    pub fn new(eta: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("eta", eta), ("beta", beta)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParams(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        Ok(Self { eta, beta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Reading of the middle term `sum <Hat_xi f, ?>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// `sum <Hat_xi f, Hat_xi f>`, the frame operator of the perturbed family.
    #[default]
    HatHat,
    /// `sum <Hat_xi f, Upsilon_xi f>`, Hermitian part.
    HatOriginal,
}

impl Interpretation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Interpretation::HatHat => "hat_hat",
            Interpretation::HatOriginal => "hat_original",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interpretation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "hat_hat" => Ok(Interpretation::HatHat),
            "hat_original" => Ok(Interpretation::HatOriginal),
            other => Err(Error::Parse(format!("unknown interpretation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingOptions {
    pub seq_samples: usize,
    pub vec_samples: usize,
    pub seed: u64,
}

impl SamplingOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seq_samples: DEFAULT_SEQ_SAMPLES,
            vec_samples: DEFAULT_VEC_SAMPLES,
            seed,
        }
    }
}

/// The `(alpha, f)` pair with the largest `lhs - rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub alpha: Vec<Complex64>,
    pub f: ModuleVector,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub params: PerturbationParams,
    pub inequality_holds: bool,
    pub pairs_checked: usize,
    pub witness: Witness,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdChecks {
    pub samples: usize,
    pub lower_holds: usize,
    pub upper_holds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationVerdict {
    pub interpretation: Interpretation,
    pub params: PerturbationParams,
    pub samples: SamplingOptions,
    pub inequality_holds: bool,
    pub witness: Witness,
    pub derived_bounds: FrameBounds,
    pub empirical_bounds: FrameBounds,
    pub bounds_contained: bool,
    pub psd_checks: PsdChecks,
    pub caveats: Vec<String>,
}

fn check_shapes(frame: &GFusionFrame, perturbed: &GFusionFrame) -> Result<()> {
    if frame.len() != perturbed.len() {
        return Err(Error::LengthMismatch {
            expected: frame.len(),
            actual: perturbed.len(),
        });
    }
    if frame.n() != perturbed.n() || frame.d() != perturbed.d() {
        return Err(Error::DimensionMismatch(format!(
            "families over A^{} (d={}) and A^{} (d={})",
            frame.n(),
            frame.d(),
            perturbed.n(),
            perturbed.d()
        )));
    }
    Ok(())
}

/// `sum alpha_xi M_xi` over a family's operator matrices.
fn combination(mats: &[&CMatrix], alpha: &[Complex64]) -> CMatrix {
    let nd = mats[0].nrows();
    mats.iter()
        .zip(alpha)
        .fold(CMatrix::zeros(nd, nd), |acc, (m, &a)| acc + *m * a)
}

struct Combos {
    base: CMatrix,
    hat: CMatrix,
}

impl Combos {
    fn new(base: &[&CMatrix], hat: &[&CMatrix], alpha: &[Complex64]) -> Self {
        Self {
            base: combination(base, alpha),
            hat: combination(hat, alpha),
        }
    }

    fn sides(&self, f: &CMatrix, params: &PerturbationParams) -> (f64, f64) {
        let fb = f * &self.base;
        let fh = f * &self.hat;
        let lhs = linalg::spectral_norm(&(&fb - &fh));
        let rhs =
            params.eta * linalg::spectral_norm(&fb) + params.beta * linalg::spectral_norm(&fh);
        (lhs, rhs)
    }
}

/// `(lhs, rhs)` of the inequality at a single `(alpha, f)`.
pub fn inequality_sides(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    params: &PerturbationParams,
    alpha: &[Complex64],
    f: &ModuleVector,
) -> Result<(f64, f64)> {
    check_shapes(frame, perturbed)?;
    if alpha.len() != frame.len() {
        return Err(Error::LengthMismatch {
            expected: frame.len(),
            actual: alpha.len(),
        });
    }
    let base: Vec<&CMatrix> = frame.operators().map(|o| o.matrix()).collect();
    let hat: Vec<&CMatrix> = perturbed.operators().map(|o| o.matrix()).collect();
    Ok(Combos::new(&base, &hat, alpha).sides(f.matrix(), params))
}

fn violates(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + INEQUALITY_SLACK * (1.0 + rhs)
}

/// Vector whose first row is `x^*` for a column `x`, scaled to unit norm.
fn single_row(x: impl Iterator<Item = Complex64>, d: usize) -> CMatrix {
    let x: Vec<Complex64> = x.map(|z| z.conj()).collect();
    let mut f = CMatrix::zeros(d, x.len());
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (j, z) in x.into_iter().enumerate() {
            f[(0, j)] = z / norm;
        }
    }
    f
}

/// Vectors aimed at the extremes of the inequality for a fixed sequence:
/// the top left singular direction of the difference, and directions the
/// right side does not see.
fn structured_vectors(combos: &Combos, d: usize) -> Vec<CMatrix> {
    let diff = &combos.base - &combos.hat;
    let mut out = Vec::new();
    if let Some(u) = linalg::top_left_singular_vector(&diff) {
        out.push(single_row(u.iter().copied(), d));
    }
    for m in [&combos.base, &combos.hat] {
        let null = linalg::null_space(&m.adjoint(), 1e-12);
        if null.ncols() > 0 {
            out.push(single_row(null.column(0).iter().copied(), d));
        }
    }
    out
}

fn normalise(alpha: &mut [Complex64]) {
    let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        alpha.iter_mut().for_each(|z| *z /= norm);
    }
}

/// Samples the inequality and returns the worst `(alpha, f)` found.
pub fn check_inequality_33(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    params: &PerturbationParams,
    opts: &SamplingOptions,
) -> Result<InequalityReport> {
    check_shapes(frame, perturbed)?;
    let m = frame.len();
    let (n, d) = (frame.n(), frame.d());
    let base: Vec<&CMatrix> = frame.operators().map(|o| o.matrix()).collect();
    let hat: Vec<&CMatrix> = perturbed.operators().map(|o| o.matrix()).collect();
    let mut rng = random::rng(opts.seed);
    let vectors: Vec<CMatrix> = (0..opts.vec_samples.max(1))
        .map(|_| random::unit_module_vector(&mut rng, n, d).matrix().clone())
        .collect();

    let mut sequences: Vec<Vec<Complex64>> = (0..m)
        .map(|l| {
            (0..m)
                .map(|k| Complex64::new(if k == l { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    sequences.extend((0..opts.seq_samples).map(|_| random::unit_sequence(&mut rng, m)));

    let mut best: Option<(f64, Vec<Complex64>, CMatrix, f64, f64)> = None;
    let mut pairs_checked = 0;
    let mut consider = |alpha: &[Complex64], f: &CMatrix, lhs: f64, rhs: f64| {
        let gap = lhs - rhs;
        if best.as_ref().is_none_or(|b| gap > b.0) {
            best = Some((gap, alpha.to_vec(), f.clone(), lhs, rhs));
        }
    };
    for alpha in &sequences {
        let combos = Combos::new(&base, &hat, alpha);
        for f in vectors
            .iter()
            .cloned()
            .chain(structured_vectors(&combos, d))
        {
            let (lhs, rhs) = combos.sides(&f, params);
            pairs_checked += 1;
            consider(alpha, &f, lhs, rhs);
        }
    }

    // Hill-climb on lhs - rhs from the worst sample (both sides are 1-homogeneous in alpha and f).
    let (mut gap, mut alpha, mut f, mut lhs, mut rhs) = best.expect("at least one sample");
    let mut step = 0.5;
    for _ in 0..LOCAL_SEARCH_STEPS {
        let mut cand_alpha: Vec<Complex64> = alpha
            .iter()
            .map(|&a| a + random::complex_gaussian(&mut rng) * step)
            .collect();
        normalise(&mut cand_alpha);
        let mut cand_f =
            &f + random::gaussian_matrix(&mut rng, d, n * d) * Complex64::new(step, 0.0);
        let norm = linalg::spectral_norm(&cand_f);
        if norm <= 0.0 {
            continue;
        }
        cand_f /= Complex64::new(norm, 0.0);
        let (l, r) = Combos::new(&base, &hat, &cand_alpha).sides(&cand_f, params);
        pairs_checked += 1;
        if l - r > gap {
            (gap, alpha, f, lhs, rhs) = (l - r, cand_alpha, cand_f, l, r);
        } else {
            step *= 0.97;
        }
    }

    let inequality_holds = !violates(lhs, rhs);
    let mut caveats = Vec::new();
    if inequality_holds {
        caveats.push(format!("inequality not falsified at {pairs_checked} (sequence, vector) pairs; this is not a proof"));
    }
    Ok(InequalityReport {
        params: *params,
        inequality_holds,
        pairs_checked,
        witness: Witness {
            alpha,
            f: ModuleVector::from_matrix(n, d, f)?,
            lhs,
            rhs,
        },
        caveats,
    })
}

/// `(((1 - eta)/(1 + beta))^2 A, ((1 + eta)/(1 - beta))^2 B)`.
pub fn derived_bounds(bounds: &FrameBounds, params: &PerturbationParams) -> FrameBounds {
    let lo = (1.0 - params.eta) / (1.0 + params.beta);
    let hi = (1.0 + params.eta) / (1.0 - params.beta);
    FrameBounds {
        lower: lo * lo * bounds.lower,
        upper: hi * hi * bounds.upper,
    }
}

/// Matrix of the middle term under `interpretation`, Hermitian.
fn middle_operator(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    interpretation: Interpretation,
) -> CMatrix {
    let nd = frame.n() * frame.d();
    let mut acc = CMatrix::zeros(nd, nd);
    for (base, hat) in frame.operators().zip(perturbed.operators()) {
        let other = match interpretation {
            Interpretation::HatHat => hat.matrix(),
            Interpretation::HatOriginal => base.matrix(),
        };
        acc += hat.matrix() * other.adjoint();
    }
    linalg::hermitian_part(&acc)
}

/// Empirical optimal bounds of the middle term, checked against [`derived_bounds`].
pub fn verify_perturbed_frame(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    params: &PerturbationParams,
    interpretation: Interpretation,
    opts: &SamplingOptions,
) -> Result<PerturbationVerdict> {
    let report = check_inequality_33(frame, perturbed, params, opts)?;
    verdict_from_report(frame, perturbed, report, interpretation, opts)
}

/// [`verify_perturbed_frame`] reusing an existing inequality report.
pub fn verdict_from_report(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    report: InequalityReport,
    interpretation: Interpretation,
    opts: &SamplingOptions,
) -> Result<PerturbationVerdict> {
    check_shapes(frame, perturbed)?;
    if !report.inequality_holds {
        return Err(Error::InequalityNotVerified);
    }
    let params = &report.params;
    let bounds = crate::frame::frame_bounds(frame)?;
    let derived = derived_bounds(&bounds, params);
    let middle = middle_operator(frame, perturbed, interpretation);
    let eig = linalg::hermitian_eigenvalues(&middle);
    let empirical = FrameBounds {
        lower: eig[0],
        upper: eig[eig.len() - 1],
    };
    let slack = BOUNDS_SLACK * (1.0 + derived.upper);
    let bounds_contained =
        derived.lower <= empirical.lower + slack && empirical.upper <= derived.upper + slack;

    let (n, d) = (frame.n(), frame.d());
    let mut rng = random::rng(random::derive_seed(opts.seed, 1));
    let mut psd = PsdChecks {
        samples: opts.vec_samples,
        lower_holds: 0,
        upper_holds: 0,
    };
    for _ in 0..opts.vec_samples {
        let f = random::module_vector(&mut rng, n, d);
        let ff = inner_product(&f, &f)?;
        let mid = AlgebraElement::from_matrix(linalg::hermitian_part(
            &(f.matrix() * &middle * f.matrix().adjoint()),
        ))?;
        let scale = 1.0 + ff.operator_norm() * derived.upper;
        let tol = PSD_TOL.max(BOUNDS_SLACK) * scale;
        if psd_leq(&ff.scale(derived.lower), &mid, tol)? {
            psd.lower_holds += 1;
        }
        if psd_leq(&mid, &ff.scale(derived.upper), tol)? {
            psd.upper_holds += 1;
        }
    }

    let mut caveats = report.caveats;
    if interpretation == Interpretation::HatOriginal {
        caveats.push("hat_original: sum <Hat f, Upsilon f> is not Hermitian in general; its Hermitian part is analysed".into());
    }
    Ok(PerturbationVerdict {
        interpretation,
        params: *params,
        samples: *opts,
        inequality_holds: true,
        witness: report.witness,
        derived_bounds: derived,
        empirical_bounds: empirical,
        bounds_contained,
        psd_checks: psd,
        caveats,
    })
}

/// Linear independence of the perturbed family, given the inequality and an independent base.
///
/// A dependence `sum delta Hat = 0` together with the inequality forces
/// `sum delta Upsilon = 0`; if the base is independent that cannot happen,
/// so a dependent perturbed family means the sampled inequality missed a
/// violation. The result is then `false` either way.
pub fn independence_transfer(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    params: &PerturbationParams,
    tol: f64,
    opts: &SamplingOptions,
) -> Result<bool> {
    let report = check_inequality_33(frame, perturbed, params, opts)?;
    transfer_from_report(frame, perturbed, &report, tol)
}

/// [`independence_transfer`] reusing an existing inequality report.
pub fn transfer_from_report(
    frame: &GFusionFrame,
    perturbed: &GFusionFrame,
    report: &InequalityReport,
    tol: f64,
) -> Result<bool> {
    check_shapes(frame, perturbed)?;
    if !report.inequality_holds {
        return Err(Error::InequalityNotVerified);
    }
    if !independence_analysis(frame, tol, None).is_independent() {
        return Err(Error::BaseNotIndependent);
    }
    Ok(independence_analysis(perturbed, tol, None).is_independent())
}
