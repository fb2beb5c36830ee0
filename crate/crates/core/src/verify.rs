//! Cross-checks of the coefficient pipeline against the integration oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::shared_average;
use crate::combinatorics::{check_rank, Axis, IndexTuple};
use crate::error::{Error, Result};
use crate::oracle::{exact_component, mc_component, quad_component, EulerQuadrature};

/// Absolute tolerance for float comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-12;
/// Monte Carlo agreement band, in standard errors.
pub const MC_SIGMAS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Exact,
    Quad,
    Mc,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OracleKind::Exact),
            "quad" => Ok(OracleKind::Quad),
            "mc" => Ok(OracleKind::Mc),
            _ => Err(Error::DimensionMismatch(format!("unknown oracle {s:?}"))),
        }
    }
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Exact => "exact",
            OracleKind::Quad => "quad",
            OracleKind::Mc => "mc",
        }
    }
}

/// True when every axis multiplicity has the parity of the rank, the
/// necessary condition for a nonzero component.
pub fn parity_admissible(t: &IndexTuple) -> bool {
    let parity = t.len() % 2;
    t.counts().iter().all(|c| c % 2 == parity)
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize) -> IndexTuple {
    IndexTuple((0..n).map(|_| Axis::from_index(rng.random_range(0..3))).collect())
}

/// Seeded uniform `(lab, mol)` pairs; with `admissible` set, uniform over the
/// pairs where both tuples pass [`parity_admissible`].
pub fn sample_pairs(n: usize, count: usize, seed: u64, admissible: bool) -> Vec<(IndexTuple, IndexTuple)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lab = random_tuple(&mut rng, n);
        let mol = random_tuple(&mut rng, n);
        if !admissible || (parity_admissible(&lab) && parity_admissible(&mol)) {
            out.push((lab, mol));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRecord {
    pub rank: usize,
    pub lab: String,
    pub mol: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub pipeline: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_stderr: Option<f64>,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub rank: usize,
    pub oracle: &'static str,
    pub samples: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub records: Vec<VerifyRecord>,
    pub summary: VerifySummary,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub rank: usize,
    pub samples: usize,
    pub oracle: OracleKind,
    pub seed: u64,
    pub mc_samples: usize,
    pub admissible: bool,
}

pub fn check_pair(
    n: usize,
    lab: &IndexTuple,
    mol: &IndexTuple,
    oracle: OracleKind,
    quad: &EulerQuadrature,
    mc_samples: usize,
    mc_seed: u64,
) -> Result<VerifyRecord> {
    let pipeline = shared_average(n)?.component(lab, mol)?;
    // The exact oracle is cheap, so every record carries it; float oracles are checked in addition.
    let exact = exact_component(n, lab, mol)?;
    let mut rec = VerifyRecord {
        rank: n,
        lab: lab.to_string(),
        mol: mol.to_string(),
        exact: Some(exact.to_string()),
        pipeline: pipeline.to_string(),
        quad: None,
        mc: None,
        mc_stderr: None,
        matches: exact == pipeline,
    };
    let target = pipeline.to_f64();
    match oracle {
        OracleKind::Exact => {}
        OracleKind::Quad => {
            let v = quad_component(n, lab, mol, quad)?;
            rec.matches &= (v - target).abs() <= FLOAT_TOLERANCE;
            rec.quad = Some(v);
        }
        OracleKind::Mc => {
            let est = mc_component(n, lab, mol, mc_samples, mc_seed)?;
            rec.matches &= (est.estimate - target).abs() <= MC_SIGMAS * est.stderr + FLOAT_TOLERANCE;
            rec.mc = Some(est.estimate);
            rec.mc_stderr = Some(est.stderr);
        }
    }
    Ok(rec)
}

pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let n = opts.rank;
    check_rank(n)?;
    shared_average(n)?;
    let quad = EulerQuadrature::default();
    let pairs = sample_pairs(n, opts.samples, opts.seed, opts.admissible);
    let records: Vec<VerifyRecord> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (lab, mol))| {
            check_pair(n, lab, mol, opts.oracle, &quad, opts.mc_samples, opts.seed.wrapping_add(i as u64 + 1))
        })
        .collect::<Result<_>>()?;
    let passed = records.iter().filter(|r| r.matches).count();
    let summary = VerifySummary {
        rank: n,
        oracle: opts.oracle.name(),
        samples: records.len(),
        seed: opts.seed,
        passed,
        failed: records.len() - passed,
    };
    Ok(VerifyReport { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(sample_pairs(7, 20, 5, false), sample_pairs(7, 20, 5, false));
        assert_ne!(sample_pairs(7, 20, 5, false), sample_pairs(7, 20, 6, false));
        for (lab, mol) in sample_pairs(9, 50, 1, true) {
            assert!(parity_admissible(&lab) && parity_admissible(&mol));
        }
    }

    #[test]
    fn record_json_shape() {
        let t: IndexTuple = "xyzzz".parse().unwrap();
        let rec = check_pair(5, &t, &t, OracleKind::Exact, &EulerQuadrature::default(), 0, 0).unwrap();
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"rank":5,"lab":"xyzzz","mol":"xyzzz","exact":"1/10","pipeline":"1/10","match":true}"#
        );
    }

    #[test]
    fn small_exact_run_passes() {
        let report = run_verify(&VerifyOptions {
            rank: 5,
            samples: 100,
            oracle: OracleKind::Exact,
            seed: 0,
            mc_samples: 0,
            admissible: false,
        })
        .unwrap();
        assert_eq!(report.summary.passed, 100);
        assert_eq!(report.summary.failed, 0);
    }
}
