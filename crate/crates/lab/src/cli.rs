//! Command-line interface. Exit codes: 0 success, 1 estimation failure or
//! bound violation, 2 invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use minami_core::herglotz::{sample_random_herglotz, HerglotzMatrix};
use minami_core::lemma::{lemma1_value, Lemma1Report};
use minami_core::montecarlo::{sample_rng, Sampler, Verdict};
use minami_core::quadrature::{integrate_minami_nd, minami_bound, IntegralResult, QuadratureConfig};
use rand::RngCore;
use serde::Serialize;

use crate::formats::{self, csv_row, MatrixJson, RunManifest, SweepPointOutput, CSV_HEADER};
use crate::parallel::{estimate_parallel, map_indexed, thread_pool};
use crate::suite::{render_table, run_suite};

#[derive(Debug, Parser)]
#[command(name = "minami-lab", version, about = "Numerical checks of the Minami determinant bound")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Herglotz matrix identities on random matrices of size 1 to 8.
    Identities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Matrices per dimension.
        #[arg(long, default_value_t = 125)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the 2x2 integral with its closed form.
    Lemma1 {
        /// Matrix file `{"n": 2, "re": [[..]], "im": [[..]]}`; a random matrix is used otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate random n x n instances and compare with pi^n.
    Lemma2 {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Entry scale; cycles through 0.5, 1 and 5 when omitted.
        #[arg(long)]
        spread: Option<f64>,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of E[det Im G_S(z)] for the Anderson model.
    Minami {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = SamplerArg::Crude)]
        sampler: SamplerArg,
        /// Number of disorder samples per sweep point.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        quad: QuadArgs,
        /// JSON output; a CSV table is written next to it with extension `.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct QuadArgs {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-7)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 2048)]
    pub max_panels: usize,
}

impl QuadArgs {
    fn config(self) -> Result<QuadratureConfig, Failure> {
        QuadratureConfig::new(self.rel_tol, self.max_panels).map_err(|e| Failure::Input(e.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Crude,
    #[value(name = "rao_blackwell")]
    RaoBlackwell,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Crude => Sampler::Crude,
            SamplerArg::RaoBlackwell => Sampler::RaoBlackwell,
        }
    }
}

/// Error carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Input(anyhow::Error),
    /// Exit 1.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Runtime(e) => e,
        }
    }
}

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn herglotz_input(m: minami_core::ComplexSquareMatrix) -> Result<HerglotzMatrix, Failure> {
    HerglotzMatrix::new(m).map_err(|e| match e {
        minami_core::Error::NotHerglotz { min_eig, .. } => {
            input(anyhow::anyhow!("Im A not positive definite (smallest eigenvalue {min_eig:e})"))
        }
        other => input(other),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| runtime(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}

fn relative_diff(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// Status `0` or `1`; `Err` carries status `2` or a runtime failure.
pub type Outcome = Result<i32, Failure>;

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Identities { seed, count, out } => identities(seed, count, out.as_deref(), stdout),
        Command::Lemma1 { config, seed, spread, quad, out } => {
            lemma1(config.as_deref(), seed, spread, quad, out.as_deref(), stdout)
        }
        Command::Lemma2 { n, seed, count, spread, quad, out } => {
            lemma2(n, seed, count, spread, quad, out.as_deref(), stdout)
        }
        Command::Minami { config, sampler, count, seed, quad, out } => {
            minami(&config, sampler.into(), count, seed, quad, out.as_deref(), stdout)
        }
    }
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(runtime)?
    };
}

#[derive(Serialize)]
struct IdentitiesOutput<'a> {
    manifest: RunManifest,
    report: &'a crate::suite::SuiteReport,
}

fn identities(seed: u64, count: usize, out: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    if count == 0 {
        return Err(input(anyhow::anyhow!("--count must be at least 1")));
    }
    let pool = thread_pool().map_err(Failure::Input)?;
    let report = run_suite(&pool, seed, count);
    write!(stdout, "{}", render_table(&report)).map_err(runtime)?;
    let status = if report.passed() { "PASS" } else { "FAIL" };
    say!(stdout, "{status}: {} instances, tolerance {:e}", report.instances(), report.tolerance);
    if let Some(path) = out {
        let manifest = RunManifest::new("identities", None, seed, Some(path));
        write_json(path, &IdentitiesOutput { manifest, report: &report })?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

#[derive(Serialize)]
struct Lemma1Output {
    manifest: RunManifest,
    matrix: MatrixJson,
    closed_form: Lemma1Report,
    quadrature: IntegralResult,
    relative_diff: f64,
    pass: bool,
}

fn lemma1(
    config: Option<&Path>,
    seed: u64,
    spread: f64,
    quad: QuadArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Outcome {
    let cfg = quad.config()?;
    let m = match config {
        Some(path) => formats::read_matrix(path).map_err(input)?,
        None => sample_random_herglotz(2, seed, spread).map_err(input)?.into_matrix(),
    };
    if m.dim() != 2 {
        return Err(input(anyhow::anyhow!("lemma1 needs a 2x2 matrix, got {0}x{0}", m.dim())));
    }
    let a = herglotz_input(m)?;
    let closed = lemma1_value(&a).map_err(runtime)?;
    let q = integrate_minami_nd(&a, &cfg).map_err(runtime)?;
    let diff = relative_diff(q.value, closed.value);
    let pass = q.converged
        && diff <= 5.0 * cfg.rel_tol
        && closed.value <= minami_bound(2)
        && q.value <= minami_bound(2) * (1.0 + 5.0 * cfg.rel_tol);
    say!(stdout, "det Im A      {:.12e}", closed.det_im_a);
    say!(stdout, "discriminant  {:.12e}", closed.delta);
    say!(stdout, "closed form   {:.12e}", closed.value);
    say!(stdout, "quadrature    {:.12e} (error estimate {:.2e}, converged {})", q.value, q.est_error, q.converged);
    say!(stdout, "relative diff {:.3e}", diff);
    say!(stdout, "ratio to pi^2 {:.9}", closed.ratio);
    say!(stdout, "{}", if pass { "PASS" } else { "FAIL" });
    if let Some(path) = out {
        let manifest = RunManifest::new("lemma1", config, seed, Some(path));
        let output = Lemma1Output {
            manifest,
            matrix: MatrixJson::from_matrix(a.matrix()),
            closed_form: closed,
            quadrature: q,
            relative_diff: diff,
            pass,
        };
        write_json(path, &output)?;
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct Lemma2Instance {
    seed: u64,
    spread: f64,
    value: f64,
    est_error: f64,
    converged: bool,
    ratio: f64,
}

#[derive(Serialize)]
struct Lemma2Output {
    manifest: RunManifest,
    n: usize,
    bound: f64,
    max_ratio: f64,
    instances: Vec<Lemma2Instance>,
    pass: bool,
}

fn lemma2(
    n: usize,
    seed: u64,
    count: usize,
    spread: Option<f64>,
    quad: QuadArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Outcome {
    let cfg = quad.config()?;
    if !(1..=minami_core::quadrature::MAX_QUADRATURE_DIM).contains(&n) {
        return Err(input(anyhow::anyhow!("--n must be between 1 and 4, got {n}")));
    }
    if count == 0 {
        return Err(input(anyhow::anyhow!("--count must be at least 1")));
    }
    if let Some(s) = spread {
        if !(s > 0.0 && s.is_finite()) {
            return Err(input(anyhow::anyhow!("--spread must be positive, got {s}")));
        }
    }
    let pool = thread_pool().map_err(Failure::Input)?;
    let bound = minami_bound(n);
    let results = map_indexed(&pool, count, |k| -> minami_core::Result<Lemma2Instance> {
        let s = sample_rng(seed, k as u64).next_u64();
        let sp = spread.unwrap_or([0.5, 1.0, 5.0][k % 3]);
        let a = sample_random_herglotz(n, s, sp)?;
        let r = integrate_minami_nd(&a, &cfg)?;
        Ok(Lemma2Instance {
            seed: s,
            spread: sp,
            value: r.value,
            est_error: r.est_error,
            converged: r.converged,
            ratio: r.value / bound,
        })
    });
    let instances = results.into_iter().collect::<minami_core::Result<Vec<_>>>().map_err(runtime)?;
    let limit = 1.0 + 10.0 * cfg.rel_tol;
    say!(stdout, "{:>4} {:>20} {:>6} {:>16} {:>10} {:>9}", "k", "seed", "spread", "integral", "error", "ratio");
    let mut max_ratio = f64::NEG_INFINITY;
    let mut pass = true;
    for (k, inst) in instances.iter().enumerate() {
        say!(
            stdout,
            "{:>4} {:>20} {:>6} {:>16.9e} {:>10.2e} {:>9.6}{}",
            k,
            inst.seed,
            inst.spread,
            inst.value,
            inst.est_error,
            inst.ratio,
            if inst.converged { "" } else { "  (not converged)" }
        );
        max_ratio = max_ratio.max(inst.ratio);
        pass &= inst.converged && inst.ratio <= limit;
    }
    say!(stdout, "max ratio to pi^{n}: {max_ratio:.9} (limit {limit})");
    say!(stdout, "{}", if pass { "PASS" } else { "FAIL" });
    if let Some(path) = out {
        let manifest = RunManifest::new("lemma2", None, seed, Some(path));
        write_json(path, &Lemma2Output { manifest, n, bound, max_ratio, instances, pass })?;
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct MinamiOutput<'a> {
    manifest: &'a RunManifest,
    points: Vec<SweepPointOutput<'a>>,
}

/// Path of the CSV table written beside the JSON output.
pub fn csv_path(json: &Path) -> PathBuf {
    json.with_extension("csv")
}

fn minami(
    config: &Path,
    sampler: Sampler,
    count: usize,
    seed: u64,
    quad: QuadArgs,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Outcome {
    let cfg = quad.config()?;
    if count < 2 {
        return Err(input(anyhow::anyhow!("--count must be at least 2")));
    }
    let points = formats::read_experiments(config).map_err(input)?;
    if sampler == Sampler::RaoBlackwell {
        if let Some((p, _)) = points.iter().find(|(p, _)| p.sites.len() > minami_core::quadrature::MAX_QUADRATURE_DIM) {
            return Err(input(anyhow::anyhow!("rao_blackwell supports at most 4 sites, got {}", p.sites.len())));
        }
    }
    let pool = thread_pool().map_err(Failure::Input)?;
    let mut outputs = Vec::with_capacity(points.len());
    let mut rows = Vec::with_capacity(points.len());
    say!(stdout, "{CSV_HEADER}");
    for (point, experiment) in &points {
        let result = estimate_parallel(&pool, experiment, sampler, count, seed, &cfg).map_err(runtime)?;
        let row = csv_row(point, &result);
        say!(stdout, "{row}");
        rows.push(row);
        outputs.push(SweepPointOutput { config: point, result });
    }
    let violations = outputs.iter().filter(|o| o.result.verdict == Verdict::ViolatesAt3Sigma).count();
    if let Some(path) = out {
        let manifest = RunManifest::new("minami", Some(config), seed, Some(path));
        write_json(path, &MinamiOutput { manifest: &manifest, points: outputs })?;
        let mut csv = format!("# {}\n{CSV_HEADER}\n", serde_json::to_string(&manifest).map_err(runtime)?);
        for row in &rows {
            csv.push_str(row);
            csv.push('\n');
        }
        let cp = csv_path(path);
        std::fs::write(&cp, csv).map_err(|e| runtime(anyhow::anyhow!("cannot write {}: {e}", cp.display())))?;
    }
    if violations > 0 {
        say!(stdout, "FAIL: {violations} sweep point(s) exceed the bound at 3 sigma");
        return Ok(1);
    }
    Ok(0)
}
