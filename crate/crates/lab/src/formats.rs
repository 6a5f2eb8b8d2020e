//! JSON and CSV formats shared by the CLI and the test fixtures.

use std::path::Path;

use minami_core::anderson::{Boundary, HoppingSpec, LatticeBox, PotentialDistribution, SpectralParameter};
use minami_core::montecarlo::{EstimatorResult, ExperimentConfig, Verdict};
use minami_core::{Complex64, ComplexSquareMatrix};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid matrix: {0}")]
    Matrix(String),
    #[error(transparent)]
    Config(#[from] minami_core::Error),
}

/// `{"n": int, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexSquareMatrix) -> Self {
        let n = m.dim();
        let rows = |f: fn(Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(m.get(i, j))).collect()).collect();
        Self { n, re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<ComplexSquareMatrix, FormatError> {
        let n = self.n;
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n {
                return Err(FormatError::Matrix(format!("\"{name}\" has {} rows, expected {n}", part.len())));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(FormatError::Matrix(format!("\"{name}\" row {i} has {} entries, expected {n}", row.len())));
            }
        }
        let re: Vec<f64> = self.re.concat();
        let im: Vec<f64> = self.im.concat();
        ComplexSquareMatrix::from_parts(n, &re, &im).map_err(|e| FormatError::Matrix(e.to_string()))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexSquareMatrix, FormatError> {
    serde_json::from_str::<MatrixJson>(text)?.to_matrix()
}

pub fn read_matrix(path: &Path) -> Result<ComplexSquareMatrix, FormatError> {
    parse_matrix(&read(path)?)
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Uniform,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialJson {
    pub kind: PotentialKind,
    /// Width `W` for uniform, `σ` for Gaussian.
    pub param: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

fn default_true() -> bool {
    true
}

/// Experiment configuration as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentJson {
    pub dim: usize,
    pub sides: Vec<usize>,
    pub boundary: Boundary,
    pub t: f64,
    pub flux: f64,
    pub potential: PotentialJson,
    pub z: ComplexJson,
    pub sites: Vec<usize>,
    #[serde(default = "default_true")]
    pub laplacian_shift: bool,
}

impl ExperimentJson {
    pub fn to_config(&self) -> Result<ExperimentConfig, FormatError> {
        if self.dim != self.sides.len() {
            return Err(minami_core::Error::InvalidConfig(format!(
                "dim is {} but {} sides were given",
                self.dim,
                self.sides.len()
            ))
            .into());
        }
        let lattice = LatticeBox::new(self.sides.clone(), self.boundary)?;
        let mut hopping = HoppingSpec::new(self.t, self.flux);
        hopping.laplacian_shift = self.laplacian_shift;
        let potential = match self.potential.kind {
            PotentialKind::Uniform => PotentialDistribution::Uniform { width: self.potential.param },
            PotentialKind::Gaussian => PotentialDistribution::Gaussian { sigma: self.potential.param },
        };
        let z = SpectralParameter::new(Complex64::new(self.z.re, self.z.im))?;
        let config = ExperimentConfig { lattice, hopping, potential, z, sites: self.sites.clone() };
        config.validate()?;
        Ok(config)
    }

    /// Width or σ of the single-site law, as printed in sweep tables.
    pub fn disorder_param(&self) -> f64 {
        self.potential.param
    }
}

/// A config file holds one experiment or a list of sweep points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExperimentFile {
    Single(ExperimentJson),
    Sweep(Vec<ExperimentJson>),
}

impl ExperimentFile {
    pub fn points(self) -> Vec<ExperimentJson> {
        match self {
            ExperimentFile::Single(p) => vec![p],
            ExperimentFile::Sweep(ps) => ps,
        }
    }
}

pub fn parse_experiments(text: &str) -> Result<Vec<(ExperimentJson, ExperimentConfig)>, FormatError> {
    let points = serde_json::from_str::<ExperimentFile>(text)?.points();
    if points.is_empty() {
        return Err(minami_core::Error::InvalidConfig("the sweep is empty".into()).into());
    }
    points
        .into_iter()
        .map(|p| {
            let c = p.to_config()?;
            Ok((p, c))
        })
        .collect()
}

pub fn read_experiments(path: &Path) -> Result<Vec<(ExperimentJson, ExperimentConfig)>, FormatError> {
    parse_experiments(&read(path)?)
}

/// Provenance block written into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub seed: u64,
    pub output_path: Option<String>,
    pub version: String,
    /// Seconds since the Unix epoch; the only field that differs between reruns.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config_path: Option<&Path>, seed: u64, output_path: Option<&Path>) -> Self {
        let timestamp =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            seed,
            output_path: output_path.map(|p| p.display().to_string()),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }
}

pub const CSV_HEADER: &str = "flux,n,W,im_z,sampler,N,mean,std_error,bound,verdict";

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::WithinBound => "within_bound",
        Verdict::ViolatesAt3Sigma => "violates_at_3sigma",
    }
}

/// One sweep row in the `CSV_HEADER` column order.
pub fn csv_row(point: &ExperimentJson, result: &EstimatorResult) -> String {
    format!(
        "{},{},{},{},{},{},{:e},{:e},{:e},{}",
        point.flux,
        point.sites.len(),
        point.disorder_param(),
        point.z.im,
        result.sampler.name(),
        result.samples,
        result.mean,
        result.std_error,
        result.bound,
        verdict_name(result.verdict)
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPointOutput<'a> {
    pub config: &'a ExperimentJson,
    pub result: EstimatorResult,
}
