//! Seeded families for `gframemod gen`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use gframemod_core::frame::fusion_frame;
use gframemod_core::hilbert::compose;
use gframemod_core::random::{self, SeededRng};
use gframemod_core::{
    CMatrix, Complex64, Error, FrameDocument, FrameElement, GFusionFrame, IndexConvention,
    ModuleOperator, Result, Submodule,
};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Fusion,
    Dilation,
    UnitaryOrbit,
    Random,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Fusion => "fusion",
            Kind::Dilation => "dilation",
            Kind::UnitaryOrbit => "unitary-orbit",
            Kind::Random => "random",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fusion" => Ok(Kind::Fusion),
            "dilation" => Ok(Kind::Dilation),
            "unitary-orbit" => Ok(Kind::UnitaryOrbit),
            "random" => Ok(Kind::Random),
            other => Err(format!(
                "unknown kind {other:?} (fusion, dilation, unitary-orbit, random)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: Kind,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    /// Dilation ratio.
    pub c: f64,
}

pub fn generate(spec: &GenSpec) -> Result<GFusionFrame> {
    let GenSpec {
        kind,
        n,
        d,
        m,
        seed,
        c,
    } = *spec;
    if n == 0 || d == 0 || m == 0 {
        return Err(Error::InvalidDimensions(format!(
            "n, d, m must be positive (got {n}, {d}, {m})"
        )));
    }
    let mut rng = random::rng(seed);
    match kind {
        Kind::Fusion => fusion(&mut rng, n, d, m),
        Kind::Dilation => {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "dilation ratio must be positive, got {c}"
                )));
            }
            dilation(n, d, m, c)
        }
        Kind::UnitaryOrbit => Ok(unitary_orbit(&mut rng, n, d, m)),
        Kind::Random => random_family(&mut rng, n, d, m),
    }
}

/// Document with the generation flags recorded as metadata.
pub fn generate_document(spec: &GenSpec) -> Result<FrameDocument> {
    let frame = generate(spec)?;
    let mut meta = BTreeMap::new();
    meta.insert("kind".to_string(), spec.kind.to_string());
    meta.insert("seed".to_string(), spec.seed.to_string());
    if spec.kind == Kind::Dilation {
        meta.insert("c".to_string(), format!("{:.16e}", spec.c));
    }
    Ok(FrameDocument::from_frame(&frame, meta))
}

/// Orthogonal decomposition of `C^{nd}` into `m` pieces with unit weights (Parseval).
fn fusion(rng: &mut SeededRng, n: usize, d: usize, m: usize) -> Result<GFusionFrame> {
    let nd = n * d;
    if m > nd {
        return Err(Error::InvalidDimensions(format!(
            "fusion needs m <= n*d = {nd}, got m = {m}"
        )));
    }
    let w = random::haar_unitary(rng, nd);
    let mut subs = Vec::with_capacity(m);
    let mut start = 0;
    for k in 0..m {
        let size = nd / m + usize::from(k < nd % m);
        let rows = w.rows(start, size).into_owned();
        subs.push(Submodule::from_projection(ModuleOperator::from_matrix(
            n,
            d,
            rows.adjoint() * rows,
        )?)?);
        start += size;
    }
    fusion_frame(&subs, &vec![1.0; m], IndexConvention::Linear)
}

fn dilation(n: usize, d: usize, m: usize, c: f64) -> Result<GFusionFrame> {
    let ops = (0..m)
        .map(|k| ModuleOperator::identity(n, d).scaled(c.powi(k as i32)))
        .collect();
    GFusionFrame::from_operators(ops, IndexConvention::Linear)
}

/// `Upsilon_xi = U^xi` for a Hermitian unitary `U = W diag(+-1) W^*`.
///
/// `U^2 = I`, so every element is self-adjoint and the orbit closes
/// cyclically for even `m`; odd `m` is emitted with the linear convention.
fn unitary_orbit(rng: &mut SeededRng, n: usize, d: usize, m: usize) -> GFusionFrame {
    let nd = n * d;
    let w = random::haar_unitary(rng, nd);
    let signs = CMatrix::from_fn(nd, nd, |i, j| {
        let s = if i % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(if i == j { s } else { 0.0 }, 0.0)
    });
    let u = ModuleOperator::from_matrix(n, d, &w * signs * w.adjoint()).expect("square");
    let mut ops = vec![ModuleOperator::identity(n, d)];
    for k in 1..m {
        ops.push(compose(&u, &ops[k - 1]).expect("same shape"));
    }
    let convention = if m.is_multiple_of(2) {
        IndexConvention::Cyclic
    } else {
        IndexConvention::Linear
    };
    GFusionFrame::from_operators(ops, convention).expect("full submodules")
}

/// Dense Gaussian operators with range in random submodules.
fn random_family(rng: &mut SeededRng, n: usize, d: usize, m: usize) -> Result<GFusionFrame> {
    let nd = n * d;
    let mut elements = Vec::with_capacity(m);
    for _ in 0..m {
        let rank = rng.random_range(1..=nd);
        let rows = random::gaussian_matrix(rng, rank, nd);
        let q = rows.adjoint().qr().q();
        let p = ModuleOperator::from_matrix(n, d, &q * q.adjoint())?;
        let g = ModuleOperator::from_matrix(n, d, random::gaussian_matrix(rng, nd, nd))?;
        let submodule = Submodule::from_projection(p.clone())?;
        elements.push(FrameElement {
            operator: compose(&p, &g)?,
            submodule,
        });
    }
    GFusionFrame::new(elements, IndexConvention::Linear)
}
