//! Subcommand arguments and drivers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gframemod_core::frame::{canonical_dual, frame_bounds, reconstruction_operator, verify_dual};
use gframemod_core::perturbation::{
    check_inequality_33, derived_bounds, transfer_from_report, verdict_from_report,
    SamplingOptions, DEFAULT_SEQ_SAMPLES, DEFAULT_VEC_SAMPLES,
};
use gframemod_core::representability::{
    check_theorem21, independence_analysis, solve_representation_with,
    tightness_contradiction_certificate, SolveOptions, Structure, CYCLIC_NOTE, LINEAR_CAVEAT,
    THEOREM_SLACK,
};
use gframemod_core::{
    random, Error, FrameDocument, GFusionFrame, IndexConvention, Interpretation, ModuleOperator,
    ModuleVector, PerturbationParams, RANK_TOL, REPRESENTATION_TOL, TIGHT_TOL,
};
use serde_json::{json, Value};

use crate::generate::{generate_document, GenSpec, Kind};
use crate::report::{digest, emit, exit, read_input, CliError, Report};

/// Samples used when `analyze` cross-checks the canonical dual.
const DUAL_SAMPLES: usize = 16;
const DUAL_TOL: f64 = 1e-8;
const KERNEL_SAMPLES: usize = 100;

#[derive(Debug, Parser)]
#[command(
    name = "gframemod",
    version,
    about = "Finite g-fusion frames over M_d(C): bounds, duals, shift representability, perturbation"
)]
pub struct Cli {
    /// Override the command's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, env = "GFRAMEMOD_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds, tightness and canonical dual reconstruction.
    Analyze(AnalyzeArgs),
    /// Solve T Upsilon_xi = Upsilon_{xi+1} and run the boundedness checks.
    Represent(RepresentArgs),
    /// Check the perturbation inequality and the derived bounds.
    Perturb(PerturbArgs),
    /// Write a seeded frame document.
    Gen(GenArgs),
    /// Linear independence of the operator family.
    Independence(IndependenceArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub frame: PathBuf,
}

#[derive(Debug, Args)]
pub struct RepresentArgs {
    pub frame: PathBuf,
    /// linear or cyclic; defaults to the document's convention.
    #[arg(long)]
    pub convention: Option<IndexConvention>,
    #[arg(long)]
    pub check_theorem21: bool,
    #[arg(long)]
    pub tight_certificate: bool,
    /// Module vector (JSON list of d x d components) for the certificate.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    /// Restrict T to A-linear operators.
    #[arg(long)]
    pub a_linear: bool,
    /// Kernel elements sampled by --check-theorem21.
    #[arg(long, default_value_t = KERNEL_SAMPLES)]
    pub kernel_samples: usize,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    pub frame: PathBuf,
    pub perturbed: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// hat-hat or hat-original.
    #[arg(long, default_value = "hat-hat")]
    pub interpretation: Interpretation,
    /// Random coefficient sequences (standard-basis sequences are always added).
    #[arg(long, default_value_t = DEFAULT_SEQ_SAMPLES)]
    pub samples: usize,
    /// Random vectors per sequence.
    #[arg(long, default_value_t = DEFAULT_VEC_SAMPLES)]
    pub vec_samples: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub kind: Kind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Dilation ratio.
    #[arg(long, default_value_t = 0.5)]
    pub c: f64,
    /// Output path (same as --output).
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndependenceArgs {
    pub frame: PathBuf,
}

/// Exit code and the text that was emitted.
pub struct Outcome {
    pub code: u8,
    pub text: String,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (text, code) = match &cli.command {
        Command::Gen(args) => {
            let spec = GenSpec {
                kind: args.kind,
                n: args.n,
                d: args.d,
                m: args.m,
                seed: cli.seed,
                c: args.c,
            };
            let doc = generate_document(&spec)?;
            let text = doc.to_canonical_json();
            emit(&text, args.out.as_deref().or(cli.output.as_deref()))?;
            return Ok(Outcome {
                code: exit::OK,
                text,
            });
        }
        Command::Analyze(args) => finish(analyze(args, cli)?),
        Command::Represent(args) => finish(represent(args, cli)?),
        Command::Perturb(args) => finish(perturb(args, cli)?),
        Command::Independence(args) => finish(independence(args, cli)?),
    };
    emit(&text, cli.output.as_deref())?;
    Ok(Outcome { code, text })
}

fn finish((report, code): (Report, u8)) -> (String, u8) {
    (report.to_json(), code)
}

fn load(path: &Path) -> Result<(Vec<u8>, GFusionFrame), CliError> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let frame = FrameDocument::parse(text)?.to_frame()?;
    Ok((bytes, frame))
}

fn convention_caveat(c: IndexConvention) -> String {
    match c {
        IndexConvention::Linear => LINEAR_CAVEAT.to_string(),
        IndexConvention::Cyclic => CYCLIC_NOTE.to_string(),
    }
}

fn push_unique(caveats: &mut Vec<String>, items: impl IntoIterator<Item = String>) {
    for c in items {
        if !caveats.contains(&c) {
            caveats.push(c);
        }
    }
}

pub fn analyze(args: &AnalyzeArgs, cli: &Cli) -> Result<(Report, u8), CliError> {
    let (bytes, frame) = load(&args.frame)?;
    let bounds = frame_bounds(&frame)?;
    let tight = bounds.is_tight(cli.tol.unwrap_or(TIGHT_TOL));
    let dual = canonical_dual(&frame)?;
    let residual = reconstruction_operator(&frame, &dual)?
        .distance(&ModuleOperator::identity(frame.n(), frame.d()))?;
    let verified = verify_dual(&frame, &dual, DUAL_SAMPLES, DUAL_TOL)?;
    let results = json!({
        "n": frame.n(),
        "d": frame.d(),
        "m": frame.len(),
        "index_convention": frame.convention(),
        "bounds": bounds,
        "tight": tight,
        "condition": bounds.condition(),
        "dual": { "reconstruction_residual": residual, "verified": verified },
    });
    let report = Report {
        command: "analyze",
        inputs_digest: digest(&[&bytes]),
        results,
        caveats: vec![],
        seed: cli.seed,
    };
    Ok((
        report,
        if verified {
            exit::OK
        } else {
            exit::VERIFICATION
        },
    ))
}

pub fn represent(args: &RepresentArgs, cli: &Cli) -> Result<(Report, u8), CliError> {
    let (bytes, frame) = load(&args.frame)?;
    let mut inputs = vec![bytes];
    let convention = args.convention.unwrap_or(frame.convention());
    let structure = if args.a_linear {
        Structure::ALinear
    } else {
        Structure::ComplexLinear
    };
    let opts = SolveOptions {
        convention,
        tol: cli.tol.unwrap_or(REPRESENTATION_TOL),
        structure,
    };
    let rep = solve_representation_with(&frame, opts)?;
    let mut caveats = vec![convention_caveat(convention)];
    let mut code = exit::OK;

    let bounds = match frame_bounds(&frame) {
        Ok(b) => Some(b),
        Err(Error::NotAFrame { .. }) => {
            caveats.push("family is not a frame; norm bounds on T are not defined".into());
            None
        }
        Err(e) => return Err(e.into()),
    };
    let norm_bounds = bounds.filter(|_| rep.representable).map(|b| {
        let upper = (b.upper / b.lower).sqrt();
        let lower_holds = rep.norm_t >= 1.0 - THEOREM_SLACK;
        if !lower_holds {
            caveats.push(format!(
                "lower bound ||T|| >= 1 fails (||T|| = {:.6e}); the finite family does not satisfy the Z-indexed premise",
                rep.norm_t
            ));
        }
        json!({ "lower": 1.0, "upper": upper, "lower_holds": lower_holds, "upper_holds": rep.norm_t <= upper + THEOREM_SLACK })
    });

    let theorem21 = if args.check_theorem21 {
        let t21 = check_theorem21(
            &frame.with_convention(convention),
            &rep,
            args.kernel_samples,
            cli.seed,
        )?;
        if !t21.passed() {
            code = exit::VERIFICATION;
        }
        push_unique(&mut caveats, t21.caveats.clone());
        Some(json!(t21))
    } else {
        None
    };

    let certificate = if args.tight_certificate {
        let f = match &args.vector {
            Some(path) => {
                let bytes = read_input(path)?;
                let f: ModuleVector = serde_json::from_slice(&bytes)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                if (f.n(), f.d()) != (frame.n(), frame.d()) {
                    return Err(Error::DimensionMismatch(format!(
                        "vector over (n={}, d={}) for a frame over (n={}, d={})",
                        f.n(),
                        f.d(),
                        frame.n(),
                        frame.d()
                    ))
                    .into());
                }
                inputs.push(bytes);
                f
            }
            None => {
                caveats.push("certificate vector drawn at random (unit norm) from the seed".into());
                random::unit_module_vector(
                    &mut random::rng(random::derive_seed(cli.seed, 2)),
                    frame.n(),
                    frame.d(),
                )
            }
        };
        let cert =
            tightness_contradiction_certificate(&frame.with_convention(convention), &rep, &f)?;
        if !cert.degenerate
            && !(cert.isometry_verified && cert.constant_norms && cert.power_bounds_hold)
        {
            code = exit::VERIFICATION;
        }
        push_unique(&mut caveats, cert.caveats.clone());
        Some(json!({ "vector": f, "report": cert }))
    } else {
        None
    };

    let results = json!({
        "representation": rep,
        "representable": rep.representable,
        "bounds": bounds,
        "norm_bounds": norm_bounds,
        "theorem21": theorem21,
        "certificate": certificate,
    });
    let refs: Vec<&[u8]> = inputs.iter().map(Vec::as_slice).collect();
    Ok((
        Report {
            command: "represent",
            inputs_digest: digest(&refs),
            results,
            caveats,
            seed: cli.seed,
        },
        code,
    ))
}

pub fn perturb(args: &PerturbArgs, cli: &Cli) -> Result<(Report, u8), CliError> {
    let (a, frame) = load(&args.frame)?;
    let (b, perturbed) = load(&args.perturbed)?;
    let params = PerturbationParams::new(args.eta, args.beta)?;
    let opts = SamplingOptions {
        seq_samples: args.samples,
        vec_samples: args.vec_samples,
        seed: cli.seed,
    };
    let inputs_digest = digest(&[&a, &b]);
    let check = check_inequality_33(&frame, &perturbed, &params, &opts)?;
    let mut caveats = check.caveats.clone();

    if !check.inequality_holds {
        let derived = frame_bounds(&frame)
            .ok()
            .map(|bounds| derived_bounds(&bounds, &params));
        caveats.push(format!(
            "inequality violated: lhs {:.6e} > rhs {:.6e} at the reported witness",
            check.witness.lhs, check.witness.rhs
        ));
        let results = json!({
            "interpretation": args.interpretation,
            "params": params,
            "samples": opts,
            "inequality_holds": false,
            "pairs_checked": check.pairs_checked,
            "witness": check.witness,
            "derived_bounds": derived,
            "empirical_bounds": Value::Null,
            "independence_transfer": Value::Null,
        });
        return Ok((
            Report {
                command: "perturb",
                inputs_digest,
                results,
                caveats,
                seed: cli.seed,
            },
            exit::VERIFICATION,
        ));
    }

    let transfer = transfer_from_report(&frame, &perturbed, &check, cli.tol.unwrap_or(RANK_TOL));
    let pairs_checked = check.pairs_checked;
    let verdict = verdict_from_report(&frame, &perturbed, check, args.interpretation, &opts)?;
    push_unique(&mut caveats, verdict.caveats.clone());
    let transfer = match transfer {
        Ok(v) => {
            caveats.push("independence transfer: the infinite-dimensional span premise cannot be checked on a finite family".into());
            Value::Bool(v)
        }
        Err(Error::BaseNotIndependent) => {
            caveats.push(
                "base family is linearly dependent; independence transfer not applicable".into(),
            );
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    let code = if verdict.bounds_contained {
        exit::OK
    } else {
        exit::VERIFICATION
    };
    let mut results = json!(verdict);
    results["pairs_checked"] = json!(pairs_checked);
    results["independence_transfer"] = transfer;
    results.as_object_mut().expect("object").remove("caveats");
    Ok((
        Report {
            command: "perturb",
            inputs_digest,
            results,
            caveats,
            seed: cli.seed,
        },
        code,
    ))
}

pub fn independence(args: &IndependenceArgs, cli: &Cli) -> Result<(Report, u8), CliError> {
    let (bytes, frame) = load(&args.frame)?;
    let mut caveats = Vec::new();
    let rep = if frame.len() >= 2 {
        match solve_representation_with(&frame, SolveOptions::new(frame.convention())) {
            Ok(r) => Some(r),
            Err(Error::DegenerateSpan) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let report = independence_analysis(&frame, cli.tol.unwrap_or(RANK_TOL), rep.as_ref());
    let representable = rep.as_ref().is_some_and(|r| r.representable);
    if representable {
        caveats.push(convention_caveat(frame.convention()));
    }
    let failed = report.combination_verified == Some(false)
        || report
            .span_invariance
            .as_ref()
            .is_some_and(|s| !s.invariant);
    let results = json!({
        "report": report,
        "representable": representable,
        "m": frame.len(),
    });
    let code = if failed { exit::VERIFICATION } else { exit::OK };
    Ok((
        Report {
            command: "independence",
            inputs_digest: digest(&[&bytes]),
            results,
            caveats,
            seed: cli.seed,
        },
        code,
    ))
}
