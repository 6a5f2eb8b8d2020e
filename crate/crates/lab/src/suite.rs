//! Randomized checks of the matrix identities behind the bound.

use minami_core::herglotz::{
    cofactor_ratio_identity, imag_part, is_herglotz, last_pivot_bound, restrict, sample_random_herglotz,
    schur_complement_last, HerglotzMatrix,
};
use minami_core::montecarlo::sample_rng;
use minami_core::ComplexSquareMatrix;
use rand::{Rng, RngCore};
use serde::Serialize;

use crate::parallel::map_indexed;

pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const SUITE_DIMS: std::ops::RangeInclusive<usize> = 1..=8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `-C^{-1}` is Herglotz and `Im(-C^{-1}) = (C^{-1})* Im C C^{-1}`.
    NegInverse,
    /// `-(-C^{-1})^{-1} = C`.
    Involution,
    /// Principal submatrices stay Herglotz and `Im` commutes with restriction.
    Restriction,
    /// `B^{-1}` equals the leading `(n-1)` block of `C^{-1}`.
    Feshbach,
    /// `(C^{-1})_nn det C = det Ĉ`.
    Cofactor,
    /// `det P <= p_nn det P̂` for `P = Im C`.
    LastPivot,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::NegInverse,
        Identity::Involution,
        Identity::Restriction,
        Identity::Feshbach,
        Identity::Cofactor,
        Identity::LastPivot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::NegInverse => "neg_inverse",
            Identity::Involution => "involution",
            Identity::Restriction => "restriction",
            Identity::Feshbach => "feshbach",
            Identity::Cofactor => "cofactor",
            Identity::LastPivot => "last_pivot",
        }
    }

    fn applies_to(self, n: usize) -> bool {
        !matches!(self, Identity::Feshbach | Identity::Cofactor | Identity::LastPivot) || n >= 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub identity: Identity,
    pub checked: usize,
    pub failed: usize,
    pub max_error: f64,
    /// Seed of the first failing instance.
    pub first_failure: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count_per_dim: usize,
    pub tolerance: f64,
    pub rows: Vec<IdentityRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.failed == 0)
    }

    pub fn instances(&self) -> usize {
        self.count_per_dim * SUITE_DIMS.count()
    }
}

/// Seed of instance `k` of dimension `n`.
pub fn instance_seed(base: u64, n: usize, k: usize) -> u64 {
    sample_rng(base, ((n as u64) << 32) | k as u64).next_u64()
}

fn spread_for(k: usize) -> f64 {
    [0.5, 1.0, 5.0][k % 3]
}

fn rel_frobenius(x: &ComplexSquareMatrix, y: &ComplexSquareMatrix) -> f64 {
    let diff = x.sub(y).map(|d| d.frobenius_norm()).unwrap_or(f64::INFINITY);
    diff / y.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn random_subset(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = sample_rng(seed, 1);
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Error of one identity on one matrix; infinite if a step fails.
pub fn identity_error(identity: Identity, a: &HerglotzMatrix, seed: u64) -> f64 {
    let c = a.matrix();
    let n = c.dim();
    let result: minami_core::Result<f64> = (|| match identity {
        Identity::NegInverse => {
            let inv = c.inverse()?;
            let d = a.neg_inverse()?;
            if !is_herglotz(d.matrix(), 0.0) {
                return Ok(f64::INFINITY);
            }
            let sandwich = inv.adjoint().matmul(&imag_part(c))?.matmul(&inv)?;
            Ok(rel_frobenius(&imag_part(d.matrix()), &sandwich))
        }
        Identity::Involution => Ok(rel_frobenius(a.neg_inverse()?.neg_inverse()?.matrix(), c)),
        Identity::Restriction => {
            let s = random_subset(n, seed);
            let r = restrict(c, &s)?;
            if !is_herglotz(&r, 0.0) {
                return Ok(f64::INFINITY);
            }
            Ok(rel_frobenius(&imag_part(&r), &restrict(&imag_part(c), &s)?))
        }
        Identity::Feshbach => {
            let b_inv = schur_complement_last(c)?.inverse()?;
            let leading: Vec<usize> = (0..n - 1).collect();
            Ok(rel_frobenius(&b_inv, &restrict(&c.inverse()?, &leading)?))
        }
        Identity::Cofactor => {
            let (lhs, rhs) = cofactor_ratio_identity(c)?;
            Ok((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE))
        }
        Identity::LastPivot => {
            let (det, bound) = last_pivot_bound(&imag_part(c))?;
            Ok(((det - bound) / bound.abs().max(f64::MIN_POSITIVE)).max(0.0))
        }
    })();
    result.unwrap_or(f64::INFINITY)
}

/// All identities on `count` random matrices of every dimension in `SUITE_DIMS`.
pub fn run_suite(pool: &rayon::ThreadPool, seed: u64, count: usize) -> SuiteReport {
    let dims: Vec<usize> = SUITE_DIMS.collect();
    let jobs = dims.len() * count;
    let errors: Vec<(u64, usize, Vec<f64>)> = map_indexed(pool, jobs, |job| {
        let n = dims[job / count];
        let k = job % count;
        let s = instance_seed(seed, n, k);
        let errs = match sample_random_herglotz(n, s, spread_for(k)) {
            Ok(a) => Identity::ALL.iter().map(|&id| identity_error(id, &a, s)).collect(),
            Err(_) => vec![f64::INFINITY; Identity::ALL.len()],
        };
        (s, n, errs)
    });
    let rows = Identity::ALL
        .iter()
        .enumerate()
        .map(|(col, &identity)| {
            let mut row = IdentityRow { identity, checked: 0, failed: 0, max_error: 0.0, first_failure: None };
            for (s, n, errs) in &errors {
                if !identity.applies_to(*n) {
                    continue;
                }
                row.checked += 1;
                let e = errs[col];
                row.max_error = row.max_error.max(e);
                if e.is_nan() || e > IDENTITY_TOLERANCE {
                    row.failed += 1;
                    row.first_failure.get_or_insert(*s);
                }
            }
            row
        })
        .collect();
    SuiteReport { seed, count_per_dim: count, tolerance: IDENTITY_TOLERANCE, rows }
}

pub fn render_table(report: &SuiteReport) -> String {
    let mut out = format!("{:<12} {:>8} {:>7} {:>12}  first_failure\n", "identity", "checked", "failed", "max_error");
    for r in &report.rows {
        let ff = r.first_failure.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<12} {:>8} {:>7} {:>12.3e}  {}\n",
            r.identity.name(),
            r.checked,
            r.failed,
            r.max_error,
            ff
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let report = run_suite(&pool, 3, 12);
        assert!(report.passed(), "{}", render_table(&report));
        assert_eq!(report.rows[0].checked, 96);
        assert_eq!(report.rows[3].checked, 84);
    }
}
