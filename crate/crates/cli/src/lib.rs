//! Command-line front end: builds a [`Query`] from flags, dispatches it to
//! one of the computation routes and renders a JSON (or CSV) result.
//!
//! Output is deterministic for identical inputs: keys appear in a fixed
//! order and exact values are always written as `"p/q"`. Wall-clock timing
//! is only included when asked for with `--timing`.

pub mod bench;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use vicious_core::bethe::{bethe_residuals, relative_error, BetheReport};
use vicious_core::exact::{format_rational, to_f64};
use vicious_core::gv::{gv_z, one_wall_threshold, one_wall_z};
use vicious_core::paths::{brute_force_z, enumerate_families};
use vicious_core::spectral::{OneWalkEigenSystem, OneWalkResiduals, DEFAULT_TOLERANCE};
use vicious_core::transfer::TransferSystem;
use vicious_core::{
    Error as CoreError, OccupationVector, Parity, StripGeometry, WeightConfig, WeightSystem,
};

use report::{ErrorBody, SpectralValue};

#[derive(Debug, Parser)]
#[command(
    name = "vicious",
    version,
    about = "Exact generating functions for vicious walkers in a strip"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every path family and sum their weights.
    Enumerate(QueryArgs),
    /// Exact value by the transfer-matrix recurrence.
    Transfer(QueryArgs),
    /// Exact value as a determinant of single-walk generating functions.
    Gv {
        #[command(flatten)]
        query: QueryArgs,
        /// Treat the weights as a half-plane configuration and drop the top wall.
        #[arg(long)]
        one_wall: bool,
    },
    /// Floating-point value from the Bethe eigenvectors.
    Spectral(QueryArgs),
    /// Cross-check all routes and report residuals of every eigen relation.
    Verify(VerifyArgs),
    /// Time every route over a grid of (L, N, t) and print CSV.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    /// Weight configuration file (JSON).
    #[arg(long, value_name = "FILE", conflicts_with_all = ["uniform", "seed"])]
    pub weights: Option<PathBuf>,
    /// All weights equal to one.
    #[arg(long)]
    pub uniform: bool,
    /// Pseudo-random positive rational weights from this seed.
    #[arg(long, conflicts_with = "uniform")]
    pub seed: Option<u64>,
    /// Strip width; overrides the width declared in the weights file.
    #[arg(long = "L", value_name = "L")]
    pub width: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    /// Start heights, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub yi: Vec<i64>,
    /// End heights, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub yf: Vec<i64>,
    /// Number of steps.
    #[arg(long)]
    pub t: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    /// Number of walkers.
    #[arg(long = "N", value_name = "N")]
    pub walkers: usize,
    #[arg(long)]
    pub t: u32,
    /// Restrict to one start occupation (default: every start of both parities).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub yi: Option<Vec<i64>>,
    /// Restrict to one end occupation (requires --yi).
    #[arg(
        long,
        value_delimiter = ',',
        requires = "yi",
        allow_hyphen_values = true
    )]
    pub yf: Option<Vec<i64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Residual tolerance for the spectral route.
    #[arg(long = "tol", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include elapsed wall-clock seconds in the result.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enumerate,
    Transfer,
    Gv,
    Spectral,
    Verify,
    Bench,
}

/// Where the weights come from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    File(PathBuf),
    Uniform,
    Random(u64),
}

impl WeightSource {
    pub fn describe(&self) -> String {
        match self {
            WeightSource::File(p) => format!("file:{}", p.display()),
            WeightSource::Uniform => "uniform".into(),
            WeightSource::Random(s) => format!("random:{s}"),
        }
    }

    /// The configuration file contents, when weights come from a file.
    pub fn config(&self) -> Result<Option<WeightConfig>, CliError> {
        match self {
            WeightSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Ok(Some(WeightConfig::from_json(&text)?))
            }
            _ => Ok(None),
        }
    }

    /// Weights on a strip of `width`, or of the file's declared width.
    pub fn system(&self, width: Option<i64>) -> Result<WeightSystem, CliError> {
        let need_width = || {
            width.ok_or_else(|| CliError::Usage("--L is required with --uniform or --seed".into()))
        };
        Ok(match self {
            WeightSource::Uniform => WeightSystem::uniform(StripGeometry::new(need_width()?)?),
            WeightSource::Random(seed) => WeightSystem::random(
                StripGeometry::new(need_width()?)?,
                &mut ChaCha8Rng::seed_from_u64(*seed),
            ),
            WeightSource::File(_) => {
                let cfg = self.config()?.expect("file source has a config");
                match (width, cfg.width) {
                    (Some(w), Some(declared)) if w == declared => cfg.system()?,
                    (Some(w), _) => cfg.restrict(StripGeometry::new(w)?),
                    (None, Some(_)) => cfg.system()?,
                    (None, None) => {
                        return Err(CliError::Usage(
                            "weights file declares no \"L\"; pass --L".into(),
                        ))
                    }
                }
            }
        })
    }

    /// Half-plane generator: a file is used as is, uniform is the empty config.
    pub fn half_plane(&self) -> Result<WeightConfig, CliError> {
        match self {
            WeightSource::Uniform => Ok(WeightConfig::default()),
            WeightSource::File(_) => Ok(self.config()?.expect("file source has a config")),
            WeightSource::Random(_) => Err(CliError::Usage(
                "--one-wall needs --uniform or a weights file".into(),
            )),
        }
    }
}

impl WeightArgs {
    pub fn source(&self) -> Result<WeightSource, CliError> {
        match (&self.weights, self.uniform, self.seed) {
            (Some(p), false, None) => Ok(WeightSource::File(p.clone())),
            (None, true, None) => Ok(WeightSource::Uniform),
            (None, false, Some(s)) => Ok(WeightSource::Random(s)),
            (None, false, None) => Err(CliError::Usage(
                "one of --weights, --uniform or --seed is required".into(),
            )),
            _ => Err(CliError::Usage(
                "--weights, --uniform and --seed are mutually exclusive".into(),
            )),
        }
    }
}

/// A fully validated request for one generating-function value.
#[derive(Debug, Clone)]
pub struct Query {
    pub method: Method,
    pub source: WeightSource,
    pub width: Option<i64>,
    pub yi: OccupationVector,
    pub yf: OccupationVector,
    pub t: u32,
    pub tolerance: f64,
    pub format: Format,
    pub timing: bool,
}

impl Query {
    pub fn from_args(method: Method, args: &QueryArgs) -> Result<Self, CliError> {
        let yi = OccupationVector::new(args.yi.clone())?;
        let yf = OccupationVector::new(args.yf.clone())?;
        vicious_core::lattice::check_endpoints(&yi, &yf, args.t)?;
        if args.output.tolerance.is_nan() || args.output.tolerance <= 0.0 {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(Query {
            method,
            source: args.weights.source()?,
            width: args.weights.width,
            yi,
            yf,
            t: args.t,
            tolerance: args.output.tolerance,
            format: args.output.format,
            timing: args.output.timing,
        })
    }

    pub fn walkers(&self) -> usize {
        self.yi.len()
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::VerificationFailed(_) => "verification_failed",
            CliError::Core(e) => match e {
                CoreError::InvalidWidth(_) => "invalid_width",
                CoreError::WalkerCount { .. } => "walker_count",
                CoreError::InvalidOccupation { .. } => "invalid_occupation",
                CoreError::ParityMismatch { .. } => "parity_mismatch",
                CoreError::EndpointLength { .. } => "endpoint_length",
                CoreError::Config(_) | CoreError::RationalLiteral(_) => "config",
                CoreError::Completeness(_) => "completeness_failure",
                CoreError::DegenerateSpectrum(_) => "degenerate_spectrum",
                CoreError::Verification { .. } => "verification_failed",
                CoreError::Stabilization { .. } => "stabilization_failure",
            },
        }
    }

    /// 1: usage, io or config; 2: domain; 3: verification; 4: numerical.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "usage" | "io" | "config" => 1,
            "invalid_width" | "walker_count" | "invalid_occupation" | "parity_mismatch"
            | "endpoint_length" => 2,
            "verification_failed" => 3,
            _ => 4,
        }
    }

    pub fn to_json(&self) -> String {
        report::render_json(&ErrorBody::new(self.kind(), self.to_string()))
    }
}

/// The rendered result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Enumerate(args) => run_query(Query::from_args(Method::Enumerate, &args)?, false),
        Command::Transfer(args) => run_query(Query::from_args(Method::Transfer, &args)?, false),
        Command::Gv { query, one_wall } => {
            run_query(Query::from_args(Method::Gv, &query)?, one_wall)
        }
        Command::Spectral(args) => run_query(Query::from_args(Method::Spectral, &args)?, false),
        Command::Verify(args) => run_verify(&args),
        Command::Bench(args) => bench::run_bench(&args),
    }
}

/// Runs a single-value query.
pub fn run_query(query: Query, one_wall: bool) -> Result<Output, CliError> {
    let started = Instant::now();
    let mut inputs = report::Inputs {
        weights: query.source.describe(),
        width: query.width,
        walkers: query.walkers(),
        t: query.t,
        yi: query.yi.heights().to_vec(),
        yf: query.yf.heights().to_vec(),
        tolerance: None,
    };
    let (yi, yf, t) = (&query.yi, &query.yf, query.t);

    let mut result = report::ValueResult {
        method: query.method,
        inputs: inputs.clone(),
        value: None,
        spectral: None,
        families: None,
        count: None,
        one_wall: None,
        elapsed_seconds: None,
    };

    if one_wall {
        let cfg = query.source.half_plane()?;
        let value = one_wall_z(&cfg, yi, yf, t)?;
        inputs.width = Some(one_wall_threshold(yi, yf, t));
        result.inputs = inputs;
        result.one_wall = Some(true);
        result.value = Some(format_rational(&value));
    } else {
        let ws = query.source.system(query.width)?;
        inputs.width = Some(ws.geometry().width());
        result.inputs = inputs;
        match query.method {
            Method::Enumerate => {
                let families = enumerate_families(&ws, yi, yf, t)?;
                result.count = Some(families.len());
                result.families =
                    Some(families.iter().map(|f| f.trajectories().to_vec()).collect());
                result.value = Some(format_rational(&brute_force_z(&ws, yi, yf, t)?));
            }
            Method::Transfer => {
                let value = TransferSystem::new(&ws, yi.len())?.z(yi, yf, t)?;
                result.value = Some(format_rational(&value));
            }
            Method::Gv => {
                result.value = Some(format_rational(&gv_z(&ws, yi, yf, t)?));
            }
            Method::Spectral => {
                let exact = TransferSystem::new(&ws, yi.len())?.z(yi, yf, t)?;
                let sys = OneWalkEigenSystem::solve(&ws, query.tolerance)?;
                let z = sys.spectral_z(&ws, yi, yf, t)?;
                let exact_f = Complex64::new(to_f64(&exact), 0.0);
                result.inputs.tolerance = Some(query.tolerance);
                result.value = Some(format_rational(&exact));
                result.spectral = Some(SpectralValue {
                    re: z.re,
                    im: z.im,
                    residual: relative_error(z, exact_f),
                });
            }
            Method::Verify | Method::Bench => unreachable!("not single-value methods"),
        }
    }
    if query.timing {
        result.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    }
    let text = match query.format {
        Format::Json => report::render_json(&result),
        Format::Csv => report::value_csv(&result),
    };
    Ok(Output { text, exit_code: 0 })
}

/// Per-pair discrepancy in the three exact routes.
#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub yi: Vec<i64>,
    pub yf: Vec<i64>,
    pub enumerate: String,
    pub transfer: String,
    pub gv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub max_relative_error: f64,
    pub max_imaginary: f64,
    pub one_walk: Option<OneWalkSummary>,
    pub bethe: Option<BetheReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneWalkSummary {
    pub lambdas: Vec<[f64; 2]>,
    pub cyclic_right: f64,
    pub cyclic_left: f64,
    pub biorthonormality: f64,
    pub completeness: f64,
}

impl From<(&OneWalkEigenSystem, OneWalkResiduals)> for OneWalkSummary {
    fn from((sys, r): (&OneWalkEigenSystem, OneWalkResiduals)) -> Self {
        OneWalkSummary {
            lambdas: sys.lambdas().iter().map(|l| [l.re, l.im]).collect(),
            cyclic_right: r.cyclic_right,
            cyclic_left: r.cyclic_left,
            biorthonormality: r.biorthonormality,
            completeness: r.completeness,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyResult {
    pub method: Method,
    pub inputs: report::VerifyInputs,
    pub pairs: usize,
    pub all_equal: bool,
    pub mismatches: Vec<Mismatch>,
    pub spectral: SpectralSummary,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

/// Endpoint pairs covered by a verify run.
fn verify_pairs(
    geom: StripGeometry,
    n: usize,
    t: u32,
    yi: Option<&[i64]>,
    yf: Option<&[i64]>,
) -> Result<Vec<(OccupationVector, OccupationVector)>, CliError> {
    geom.check_walkers(n)?;
    let starts = match yi {
        Some(h) => vec![OccupationVector::new(h.to_vec())?],
        None => [Parity::Even, Parity::Odd]
            .into_iter()
            .map(|p| geom.occupations(p, n))
            .collect::<Result<Vec<_>, _>>()?
            .concat(),
    };
    let mut pairs = Vec::new();
    for s in starts {
        if s.len() != n {
            return Err(CoreError::EndpointLength {
                start: s.len(),
                end: n,
            }
            .into());
        }
        geom.check_occupation(&s)?;
        let ends = match yf {
            Some(h) => {
                let e = OccupationVector::new(h.to_vec())?;
                vicious_core::lattice::check_endpoints(&s, &e, t)?;
                geom.check_occupation(&e)?;
                vec![e]
            }
            None => geom.occupations(s.parity().after(t), n)?,
        };
        pairs.extend(ends.into_iter().map(|e| (s.clone(), e)));
    }
    Ok(pairs)
}

pub fn run_verify(args: &VerifyArgs) -> Result<Output, CliError> {
    let started = Instant::now();
    let source = args.weights.source()?;
    let ws = source.system(args.weights.width)?;
    let geom = ws.geometry();
    let n = args.walkers;
    let t = args.t;
    let eps = args.output.tolerance;
    if eps.is_nan() || eps <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let pairs = verify_pairs(geom, n, t, args.yi.as_deref(), args.yf.as_deref())?;

    let transfer = TransferSystem::new(&ws, n)?;
    let mut mismatches = Vec::new();
    let mut exact_values = Vec::with_capacity(pairs.len());
    for (yi, yf) in &pairs {
        let brute = brute_force_z(&ws, yi, yf, t)?;
        let tm = transfer.z(yi, yf, t)?;
        let det = gv_z(&ws, yi, yf, t)?;
        if brute != tm || tm != det {
            mismatches.push(Mismatch {
                yi: yi.heights().to_vec(),
                yf: yf.heights().to_vec(),
                enumerate: format_rational(&brute),
                transfer: format_rational(&tm),
                gv: format_rational(&det),
            });
        }
        exact_values.push(tm);
    }

    let spectral = match OneWalkEigenSystem::solve(&ws, eps) {
        Ok(sys) => {
            let mut max_rel: f64 = 0.0;
            let mut max_im: f64 = 0.0;
            for ((yi, yf), exact) in pairs.iter().zip(&exact_values) {
                let z = sys.spectral_z(&ws, yi, yf, t)?;
                max_rel = max_rel.max(relative_error(z, Complex64::new(to_f64(exact), 0.0)));
                max_im = max_im.max(z.im.abs());
            }
            let bethe = bethe_residuals(&sys, &ws, n)?;
            let ok = max_rel <= eps && max_im <= eps && bethe.check(eps).is_ok();
            SpectralSummary {
                status: if ok { "ok" } else { "failed" },
                reason: None,
                max_relative_error: max_rel,
                max_imaginary: max_im,
                one_walk: Some((&sys, sys.residuals()).into()),
                bethe: Some(bethe),
            }
        }
        Err(e @ CoreError::Verification { .. }) => SpectralSummary {
            status: "failed",
            reason: Some(e.to_string()),
            max_relative_error: 0.0,
            max_imaginary: 0.0,
            one_walk: None,
            bethe: None,
        },
        Err(e @ (CoreError::Completeness(_) | CoreError::DegenerateSpectrum(_))) => {
            SpectralSummary {
                status: "excluded",
                reason: Some(e.to_string()),
                max_relative_error: 0.0,
                max_imaginary: 0.0,
                one_walk: None,
                bethe: None,
            }
        }
        Err(e) => return Err(e.into()),
    };

    let all_equal = mismatches.is_empty();
    let passed = all_equal && spectral.status != "failed";
    let result = VerifyResult {
        method: Method::Verify,
        inputs: report::VerifyInputs {
            weights: source.describe(),
            width: geom.width(),
            walkers: n,
            t,
            tolerance: eps,
            yi: args.yi.clone(),
            yf: args.yf.clone(),
        },
        pairs: pairs.len(),
        all_equal,
        mismatches,
        spectral,
        passed,
        elapsed_seconds: args.output.timing.then(|| started.elapsed().as_secs_f64()),
    };
    let text = match args.output.format {
        Format::Json => report::render_json(&result),
        Format::Csv => report::verify_csv(&result),
    };
    Ok(Output {
        text,
        exit_code: if passed { 0 } else { 3 },
    })
}
