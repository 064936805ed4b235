use maxcont_core::continuity::{prior_invariance_check, PriorInvariance};
use maxcont_core::eigencurves::{kippenhahn_curve, track_branches};
use maxcont_core::numrange::{PointClass, RangeGeometry};
use maxcont_core::qmatrix::{relative_entropy, von_neumann_entropy};
use maxcont_core::random::{random_prior, seeded};
use maxcont_core::{
    detect_discontinuities, maxent_infer_detailed, oracle_check, ContinuityReport, DensityMatrix, ExpectedValue,
    MatrixC, OracleClass, OracleResult,
};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::input::{read_matrix, read_prior, MatrixFile};
use crate::output::{fmt_f64, to_csv, to_json};
use crate::{AnalyzeArgs, Cli, Command, PointArgs, RunArgs};

/// Rendered report plus the process exit status it implies.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct MatrixSummary {
    dimension: usize,
    norm: f64,
}

impl MatrixSummary {
    fn of(a: &MatrixC) -> Self {
        Self {
            dimension: a.dim(),
            norm: a.spectral_norm(),
        }
    }
}

#[derive(Serialize)]
struct BoundaryRow {
    theta: f64,
    h: f64,
    bx: f64,
    by: f64,
    top_multiplicity: usize,
}

#[derive(Serialize)]
struct BoundaryReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    matrix: MatrixSummary,
    rows: Vec<BoundaryRow>,
}

#[derive(Serialize)]
struct CurveRow {
    theta: f64,
    branch: usize,
    lambda: f64,
    dlambda: f64,
    z_re: f64,
    z_im: f64,
}

#[derive(Serialize)]
struct CurvesReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    matrix: MatrixSummary,
    wrap_permutation: Vec<usize>,
    rows: Vec<CurveRow>,
}

#[derive(Serialize)]
struct FaceStepSummary {
    theta: f64,
    dimension: usize,
}

#[derive(Serialize)]
struct DualSummary {
    t: [f64; 2],
    iterations: usize,
    residual: f64,
}

#[derive(Serialize)]
struct InferReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    matrix: MatrixSummary,
    alpha: ExpectedValue,
    classification: PointClass,
    with_prior: bool,
    state: MatrixFile,
    entropy: f64,
    relative_entropy: Option<f64>,
    residual: f64,
    face_steps: Vec<FaceStepSummary>,
    dual: Option<DualSummary>,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    matrix: MatrixSummary,
    report: ContinuityReport,
    prior_invariance: Option<PriorInvariance>,
    exit_code: i32,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    matrix: MatrixSummary,
    with_prior: bool,
    result: OracleResult,
}

fn setup(args: &RunArgs) -> Result<(MatrixC, RunConfig), CliError> {
    let cfg = RunConfig::from_args(args)?;
    let a = read_matrix(&args.input)?;
    if cfg.n_grid < 64 * a.dim() {
        return Err(CliError::Usage(format!(
            "--grid must be at least 64·d = {} for a {}x{} matrix",
            64 * a.dim(),
            a.dim(),
            a.dim()
        )));
    }
    Ok((a, cfg))
}

fn prior(path: Option<&std::path::Path>, a: &MatrixC, cfg: &RunConfig) -> Result<Option<DensityMatrix>, CliError> {
    path.map(|p| read_prior(p, a.dim(), &cfg.tolerances)).transpose()
}

fn boundary(args: &RunArgs) -> Result<Outcome, CliError> {
    let (a, cfg) = setup(args)?;
    let scan = RangeGeometry::new(&a, &cfg.tolerances).scan(cfg.n_grid)?;
    let rows: Vec<BoundaryRow> = scan
        .into_iter()
        .map(|s| BoundaryRow {
            theta: s.theta,
            h: s.h,
            bx: s.boundary_point.re,
            by: s.boundary_point.im,
            top_multiplicity: s.top_multiplicity,
        })
        .collect();
    let text = match cfg.format {
        Format::Csv => to_csv(
            &["theta", "h", "bx", "by"],
            &rows
                .iter()
                .map(|r| vec![fmt_f64(r.theta), fmt_f64(r.h), fmt_f64(r.bx), fmt_f64(r.by)])
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json(&BoundaryReport {
            command: "boundary",
            config: &cfg,
            matrix: MatrixSummary::of(&a),
            rows,
        })?,
    };
    Ok(Outcome { text, exit_code: 0 })
}

fn curves(args: &RunArgs) -> Result<Outcome, CliError> {
    let (a, cfg) = setup(args)?;
    let branches = track_branches(&a, cfg.n_grid, &cfg.tolerances)?;
    let rows: Vec<CurveRow> = kippenhahn_curve(&branches)
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let j = i / branches.dim();
            CurveRow {
                theta: p.theta,
                branch: p.branch,
                lambda: branches.values[p.branch][j],
                dlambda: branches.derivs[p.branch][j],
                z_re: p.z.re,
                z_im: p.z.im,
            }
        })
        .collect();
    let text = match cfg.format {
        Format::Csv => to_csv(
            &["theta", "branch", "lambda", "dlambda", "z_re", "z_im"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_f64(r.theta),
                        r.branch.to_string(),
                        fmt_f64(r.lambda),
                        fmt_f64(r.dlambda),
                        fmt_f64(r.z_re),
                        fmt_f64(r.z_im),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        Format::Json => to_json(&CurvesReport {
            command: "curves",
            config: &cfg,
            matrix: MatrixSummary::of(&a),
            wrap_permutation: branches.wrap_permutation.clone(),
            rows,
        })?,
    };
    Ok(Outcome { text, exit_code: 0 })
}

fn infer(args: &PointArgs) -> Result<Outcome, CliError> {
    let (a, cfg) = setup(&args.run)?;
    let prior = prior(args.prior.as_deref(), &a, &cfg)?;
    let alpha = args.alpha.0;
    let tol = &cfg.tolerances;
    let inference = maxent_infer_detailed(&a, alpha, prior.as_ref(), tol)?;
    let geom = RangeGeometry::new(&a, tol);
    let classification = geom.classify(alpha, &geom.scan(cfg.n_grid)?)?;
    let state = inference.state.as_matrix();
    let text = match cfg.format {
        Format::Csv => {
            let d = a.dim();
            let rows: Vec<Vec<String>> = (0..d * d)
                .map(|i| {
                    let (r, c) = (i / d, i % d);
                    vec![r.to_string(), c.to_string(), fmt_f64(state[(r, c)].re), fmt_f64(state[(r, c)].im)]
                })
                .collect();
            to_csv(&["row", "col", "re", "im"], &rows)?
        }
        Format::Json => to_json(&InferReport {
            command: "infer",
            config: &cfg,
            matrix: MatrixSummary::of(&a),
            alpha,
            classification,
            with_prior: prior.is_some(),
            state: MatrixFile::from_matrix(state),
            entropy: von_neumann_entropy(&inference.state)?,
            relative_entropy: prior
                .as_ref()
                .map(|p| relative_entropy(&inference.state, p))
                .transpose()?,
            residual: inference.residual,
            face_steps: inference
                .chain
                .steps
                .iter()
                .map(|s| FaceStepSummary {
                    theta: s.theta,
                    dimension: s.eigenbasis.ncols(),
                })
                .collect(),
            dual: inference.dual.as_ref().map(|d| DualSummary {
                t: d.t,
                iterations: d.iterations,
                residual: d.residual,
            }),
        })?,
    };
    Ok(Outcome { text, exit_code: 0 })
}

fn class_name<T: std::fmt::Debug>(v: T) -> String {
    format!("{v:?}")
}

fn analyze(args: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let (a, cfg) = setup(&args.run)?;
    let mut priors: Vec<DensityMatrix> = prior(args.prior.as_deref(), &a, &cfg)?.into_iter().collect();
    let mut rng = seeded(cfg.seed);
    priors.extend((0..args.random_priors).map(|_| random_prior(&mut rng, a.dim())));

    let report = detect_discontinuities(&a, &cfg.analysis(true))?;
    let prior_invariance = if priors.is_empty() {
        None
    } else {
        Some(prior_invariance_check(&a, &priors, &cfg.analysis(false))?)
    };
    let mut exit_code = report.exit_code();
    if prior_invariance.as_ref().is_some_and(|p| !p.consistent) {
        exit_code = 3;
    }
    let text = match cfg.format {
        Format::Csv => {
            let kinds = report
                .verdicts
                .iter()
                .map(|v| ("degeneracy", v))
                .chain(report.corner_verdicts.iter().map(|v| ("corner", v)));
            let rows: Vec<Vec<String>> = kinds
                .enumerate()
                .map(|(i, (kind, v))| {
                    let oracle = report.oracle.get(i);
                    vec![
                        kind.to_string(),
                        fmt_f64(v.alpha.re),
                        fmt_f64(v.alpha.im),
                        fmt_f64(v.theta_star),
                        class_name(v.status),
                        fmt_f64(v.confidence),
                        oracle.map_or_else(String::new, |o| class_name(o.class)),
                        oracle.map_or_else(String::new, |o| fmt_f64(o.max_gap)),
                    ]
                })
                .collect();
            to_csv(
                &["kind", "alpha_re", "alpha_im", "theta_star", "status", "confidence", "oracle_class", "max_gap"],
                &rows,
            )?
        }
        Format::Json => to_json(&AnalyzeReport {
            command: "analyze",
            config: &cfg,
            matrix: MatrixSummary::of(&a),
            report,
            prior_invariance,
            exit_code,
        })?,
    };
    Ok(Outcome { text, exit_code })
}

fn oracle(args: &PointArgs) -> Result<Outcome, CliError> {
    let (a, cfg) = setup(&args.run)?;
    let prior = prior(args.prior.as_deref(), &a, &cfg)?;
    let result = oracle_check(
        &a,
        args.alpha.0,
        &cfg.radii,
        cfg.n_directions,
        prior.as_ref(),
        &cfg.tolerances,
    )?;
    let exit_code = if result.class == OracleClass::Inconclusive { 2 } else { 0 };
    let text = match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .radii
                .iter()
                .flat_map(|r| {
                    r.points.iter().map(move |p| {
                        vec![
                            fmt_f64(r.radius),
                            fmt_f64(p.direction),
                            fmt_f64(p.alpha.re),
                            fmt_f64(p.alpha.im),
                            p.on_boundary.to_string(),
                            fmt_f64(p.gap),
                        ]
                    })
                })
                .collect();
            to_csv(&["radius", "direction", "alpha_re", "alpha_im", "on_boundary", "gap"], &rows)?
        }
        Format::Json => to_json(&OracleReport {
            command: "oracle",
            config: &cfg,
            matrix: MatrixSummary::of(&a),
            with_prior: prior.is_some(),
            result,
        })?,
    };
    Ok(Outcome { text, exit_code })
}

/// Executes a parsed command line and renders its report.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Boundary(a) => boundary(a),
        Command::Curves(a) => curves(a),
        Command::Infer(a) => infer(a),
        Command::Analyze(a) => analyze(a),
        Command::Oracle(a) => oracle(a),
    }
}

/// Output path of a parsed command line.
pub fn output_path(cli: &Cli) -> Option<&std::path::Path> {
    match &cli.command {
        Command::Boundary(a) | Command::Curves(a) => a.output.as_deref(),
        Command::Infer(a) | Command::Oracle(a) => a.run.output.as_deref(),
        Command::Analyze(a) => a.run.output.as_deref(),
    }
}
