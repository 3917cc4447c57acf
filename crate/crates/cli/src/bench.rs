//! Timing grid over (L, N, t).
//!
//! Each cell sums the generating function over every endpoint pair of both
//! start parities, once per method. The transfer value is the reference the
//! other methods are compared against.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use num_complex::Complex64;
use num_traits::Zero;

use vicious_core::bethe::relative_error;
use vicious_core::exact::{format_rational, to_f64};
use vicious_core::gv::gv_z;
use vicious_core::paths::brute_force_z;
use vicious_core::spectral::{OneWalkEigenSystem, DEFAULT_TOLERANCE};
use vicious_core::transfer::TransferSystem;
use vicious_core::{
    Error as CoreError, OccupationVector, Parity, Rational, StripGeometry, WeightSystem,
};

use crate::{CliError, Output, WeightSource};

pub const HEADER: &str = "L,N,t,method,value,seconds,status";

/// Brute force runs only when `N * t` is at most this.
pub const DEFAULT_BUDGET: u64 = 30;

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Widths to run, comma separated.
    #[arg(long = "L", value_name = "L", value_delimiter = ',')]
    pub widths: Vec<i64>,
    /// Walker counts, comma separated.
    #[arg(long = "N", value_name = "N", value_delimiter = ',')]
    pub walkers: Vec<usize>,
    /// Step counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<u32>,
    /// Weight configuration used as a generator for every width.
    #[arg(long, value_name = "FILE", conflicts_with = "seed")]
    pub weights: Option<PathBuf>,
    /// Random weights from this seed (one system per width).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest `N * t` for which brute force is attempted.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long = "tol", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub width: i64,
    pub walkers: usize,
    pub t: u32,
    pub method: &'static str,
    pub value: String,
    pub seconds: Option<f64>,
    pub status: &'static str,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let seconds = self.seconds.map(|s| format!("{s:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.width, self.walkers, self.t, self.method, self.value, seconds, self.status
        )
    }
}

fn all_starts(geom: StripGeometry, n: usize) -> Result<Vec<OccupationVector>, CoreError> {
    Ok([Parity::Even, Parity::Odd]
        .into_iter()
        .map(|p| geom.occupations(p, n))
        .collect::<Result<Vec<_>, _>>()?
        .concat())
}

fn pairs(
    geom: StripGeometry,
    n: usize,
    t: u32,
) -> Result<Vec<(OccupationVector, OccupationVector)>, CoreError> {
    let mut out = Vec::new();
    for s in all_starts(geom, n)? {
        for e in geom.occupations(s.parity().after(t), n)? {
            out.push((s.clone(), e));
        }
    }
    Ok(out)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}

/// Rows for one cell, in the order enumerate, transfer, gv, spectral.
pub fn bench_cell(
    ws: &WeightSystem,
    n: usize,
    t: u32,
    budget: u64,
    eps: f64,
) -> Result<Vec<BenchRow>, CliError> {
    let geom = ws.geometry();
    let row = |method, value: String, seconds, status| BenchRow {
        width: geom.width(),
        walkers: n,
        t,
        method,
        value,
        seconds,
        status,
    };
    if geom.check_walkers(n).is_err() {
        return Ok(["enumerate", "transfer", "gv", "spectral"]
            .into_iter()
            .map(|m| row(m, String::new(), None, "invalid"))
            .collect());
    }
    let pairs = pairs(geom, n, t)?;

    let (reference, transfer_secs) = timed(|| -> Result<Rational, CoreError> {
        let sys = TransferSystem::new(ws, n)?;
        let mut total = Rational::zero();
        for s in all_starts(geom, n)? {
            for v in sys.row(&s, t)? {
                total += v;
            }
        }
        Ok(total)
    });
    let reference = reference?;
    let agree = |v: &Rational| if *v == reference { "ok" } else { "mismatch" };

    let enumerate = if (n as u64) * (t as u64) > budget {
        row("enumerate", String::new(), None, "skipped")
    } else {
        let (v, secs) = timed(|| -> Result<Rational, CoreError> {
            pairs.iter().try_fold(Rational::zero(), |acc, (a, b)| {
                Ok(acc + brute_force_z(ws, a, b, t)?)
            })
        });
        let v = v?;
        row("enumerate", format_rational(&v), Some(secs), agree(&v))
    };

    let (gv, gv_secs) = timed(|| -> Result<Rational, CoreError> {
        pairs
            .iter()
            .try_fold(Rational::zero(), |acc, (a, b)| Ok(acc + gv_z(ws, a, b, t)?))
    });
    let gv = gv?;

    let (spectral, spectral_secs) = timed(|| -> Result<Complex64, CoreError> {
        let sys = OneWalkEigenSystem::solve(ws, eps)?;
        pairs.iter().try_fold(Complex64::zero(), |acc, (a, b)| {
            Ok(acc + sys.spectral_z(ws, a, b, t)?)
        })
    });
    let spectral = match spectral {
        Ok(z) => {
            let exact = Complex64::new(to_f64(&reference), 0.0);
            let ok = relative_error(z, exact) <= eps && z.im.abs() <= eps * exact.re.abs().max(1.0);
            row(
                "spectral",
                format!("{:.12e}", z.re),
                Some(spectral_secs),
                if ok { "ok" } else { "mismatch" },
            )
        }
        Err(CoreError::Completeness(_) | CoreError::DegenerateSpectrum(_)) => {
            row("spectral", String::new(), Some(spectral_secs), "excluded")
        }
        Err(CoreError::Verification { .. }) => {
            row("spectral", String::new(), Some(spectral_secs), "mismatch")
        }
        Err(e) => return Err(e.into()),
    };

    Ok(vec![
        enumerate,
        row(
            "transfer",
            format_rational(&reference),
            Some(transfer_secs),
            "ok",
        ),
        row("gv", format_rational(&gv), Some(gv_secs), agree(&gv)),
        spectral,
    ])
}

pub fn bench_rows(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let source = match (&args.weights, args.seed) {
        (Some(p), _) => WeightSource::File(p.clone()),
        (None, Some(s)) => WeightSource::Random(s),
        (None, None) => WeightSource::Uniform,
    };
    let mut rows = Vec::new();
    for &width in &args.widths {
        let ws = source.system(Some(width))?;
        for &n in &args.walkers {
            for &t in &args.t {
                rows.extend(bench_cell(&ws, n, t, args.budget, args.tolerance)?);
            }
        }
    }
    Ok(rows)
}

/// Exit code 3 when any method disagrees with the reference.
pub fn run_bench(args: &BenchArgs) -> Result<Output, CliError> {
    let rows = bench_rows(args)?;
    let mut text = String::from(HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.to_csv());
        text.push('\n');
    }
    let mismatch = rows.iter().any(|r| r.status == "mismatch");
    Ok(Output {
        text,
        exit_code: if mismatch { 3 } else { 0 },
    })
}
