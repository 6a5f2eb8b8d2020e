//! Monte Carlo estimates of `E[det Im G_S(z)]` over the disorder.
//!
//! Two samplers are provided. The crude sampler draws a full potential and
//! evaluates the determinant directly. The conditional sampler draws only the
//! potential outside `S`, forms the Krein matrix `A` and integrates the
//! potential on `S` out numerically, which returns the exact conditional
//! expectation given the exterior. Both draw the full potential from the same
//! per-sample stream, so matched indices share their exterior realization.
//!
//! Sample `i` of a run with base seed `s` uses ChaCha8 seeded with `s` on
//! stream `i`; the sample set does not depend on how samples are distributed
//! over threads.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anderson::{
    build_hamiltonian, green_block, krein_matrix, HoppingSpec, LatticeBox, PotentialDistribution, SpectralParameter,
};
use crate::error::{Error, Result};
use crate::herglotz::imag_part;
use crate::quadrature::{integrate_minami_weighted, QuadratureConfig, SiteMeasure, MAX_QUADRATURE_DIM};
use crate::summation::pairwise_sum;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// Runs fail when more than this fraction of samples is flagged.
pub const MAX_FLAGGED_FRACTION: f64 = 1e-3;

/// One disorder experiment: box, hopping, single-site law, energy and probe sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub lattice: LatticeBox,
    pub hopping: HoppingSpec,
    pub potential: PotentialDistribution,
    pub z: SpectralParameter,
    pub sites: Vec<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        build_hamiltonian(&self.lattice, &self.hopping, &alloc::vec![0.0; self.lattice.site_count()])?;
        if self.sites.is_empty() {
            return Err(Error::InvalidConfig("site subset must be nonempty".into()));
        }
        let n = self.lattice.site_count();
        for (k, &s) in self.sites.iter().enumerate() {
            if s >= n {
                return Err(Error::InvalidConfig(format!("site {s} outside the box of {n} sites")));
            }
            if self.sites[..k].contains(&s) {
                return Err(Error::InvalidConfig(format!("site {s} listed twice")));
            }
        }
        Ok(())
    }

    /// Order `n = |S|` of the determinant.
    pub fn order(&self) -> usize {
        self.sites.len()
    }

    /// `πⁿ ‖ρ‖∞ⁿ`.
    pub fn bound(&self) -> f64 {
        (PI * self.potential.density_sup()).powi(self.order() as i32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Sampler {
    Crude,
    RaoBlackwell,
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Crude => "crude",
            Sampler::RaoBlackwell => "rao_blackwell",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    WithinBound,
    #[cfg_attr(feature = "serde", serde(rename = "violates_at_3sigma"))]
    ViolatesAt3Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Samples excluded because their inner quadrature did not converge.
    pub flagged: usize,
    pub bound: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub sampler: Sampler,
}

/// Random stream for sample `index` of a run seeded with `base_seed`.
pub fn sample_rng(base_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index);
    rng
}

/// Potential on every site, drawn in site order.
pub fn draw_potential(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..config.lattice.site_count()).map(|_| config.potential.sample(rng)).collect()
}

/// `det Im G_S(z)` for one full disorder realization.
pub fn sample_det_im_block(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let v = draw_potential(config, rng);
    det_im_block(config, &v)
}

/// `det Im G_S(z)` for a given potential.
pub fn det_im_block(config: &ExperimentConfig, potential: &[f64]) -> Result<f64> {
    let h = build_hamiltonian(&config.lattice, &config.hopping, potential)?;
    let g = green_block(&h, config.z, &config.sites)?;
    Ok(imag_part(&g).det().re)
}

/// Outcome of one conditional sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalSample {
    pub value: f64,
    pub converged: bool,
}

fn site_measure(p: &PotentialDistribution) -> SiteMeasure {
    match *p {
        PotentialDistribution::Uniform { width } => SiteMeasure::Uniform { width },
        PotentialDistribution::Gaussian { sigma } => SiteMeasure::Gaussian { sigma },
    }
}

/// `E[det Im G_S | V outside S]`, integrating the potential on `S` against its
/// density by quadrature (`|S| <= 4`).
pub fn rao_blackwell_sample(
    config: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
    quad: &QuadratureConfig,
) -> Result<ConditionalSample> {
    let v = draw_potential(config, rng);
    conditional_expectation(config, &v, quad)
}

/// Conditional expectation given the exterior part of `potential`; the values
/// on `S` are ignored.
pub fn conditional_expectation(
    config: &ExperimentConfig,
    potential: &[f64],
    quad: &QuadratureConfig,
) -> Result<ConditionalSample> {
    let n = config.order();
    if n > MAX_QUADRATURE_DIM {
        return Err(Error::UnsupportedDimension { n, max: MAX_QUADRATURE_DIM });
    }
    let a = krein_matrix(&config.lattice, &config.hopping, potential, config.z, &config.sites)?;
    let r = integrate_minami_weighted(&a, site_measure(&config.potential), quad)?;
    Ok(ConditionalSample { value: r.value, converged: r.converged })
}

/// One sample of the chosen estimator; `None` marks a flagged sample.
pub fn evaluate_sample(
    config: &ExperimentConfig,
    sampler: Sampler,
    base_seed: u64,
    index: u64,
    quad: &QuadratureConfig,
) -> Result<Option<f64>> {
    let mut rng = sample_rng(base_seed, index);
    match sampler {
        Sampler::Crude => sample_det_im_block(config, &mut rng).map(Some),
        Sampler::RaoBlackwell => {
            let s = rao_blackwell_sample(config, &mut rng, quad)?;
            Ok(s.converged.then_some(s.value))
        }
    }
}

/// Mean and standard error from per-sample outcomes in index order.
pub fn summarize(outcomes: &[Option<f64>], bound: f64, sampler: Sampler, seed: u64) -> Result<EstimatorResult> {
    let values: Vec<f64> = outcomes.iter().filter_map(|x| *x).collect();
    let flagged = outcomes.len() - values.len();
    if values.is_empty() {
        return Err(Error::EstimationFailed(format!("all {} samples were flagged", outcomes.len())));
    }
    if flagged as f64 > MAX_FLAGGED_FRACTION * outcomes.len() as f64 {
        return Err(Error::EstimationFailed(format!(
            "{flagged} of {} samples flagged (limit {MAX_FLAGGED_FRACTION})",
            outcomes.len()
        )));
    }
    let count = values.len();
    let mean = pairwise_sum(&values) / count as f64;
    let std_error = if count > 1 {
        let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&sq) / (count - 1) as f64 / count as f64).sqrt()
    } else {
        0.0
    };
    let verdict = if mean - 3.0 * std_error > bound { Verdict::ViolatesAt3Sigma } else { Verdict::WithinBound };
    Ok(EstimatorResult { mean, std_error, samples: count, flagged, bound, verdict, seed, sampler })
}

/// Serial estimator over samples `0..samples`.
pub fn estimate_expectation(
    config: &ExperimentConfig,
    sampler: Sampler,
    samples: usize,
    base_seed: u64,
    quad: &QuadratureConfig,
) -> Result<EstimatorResult> {
    if samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {samples}")));
    }
    config.validate()?;
    let outcomes = (0..samples as u64)
        .map(|i| evaluate_sample(config, sampler, base_seed, i, quad))
        .collect::<Result<Vec<_>>>()?;
    summarize(&outcomes, config.bound(), sampler, base_seed)
}
