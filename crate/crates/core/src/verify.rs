//! Randomized cross-check of the analytic engine against the Fock oracle.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{oracle_check_auto, OracleOp, MAX_AMPLITUDE, MAX_MODES};
use crate::state::{CoherentTerm, SuperposedState};

pub const DEVIATION_THRESHOLD: f64 = 1e-8;

const OPS: [&str; 6] = ["overlap", "displacement", "phase", "beamsplitter", "parity", "cat_measure"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Largest coherent amplitude drawn for any state, shift or cat.
    pub max_alpha: f64,
    /// Cases per operation.
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_alpha: MAX_AMPLITUDE,
            trials: 40,
            seed: 0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_alpha.is_finite() && self.max_alpha > 0.0) {
            return Err(Error::InvalidAlpha(self.max_alpha));
        }
        if self.max_alpha > MAX_AMPLITUDE {
            return Err(Error::Intractable {
                max_modes: MAX_MODES,
                max_amplitude: MAX_AMPLITUDE,
                what: format!("max alpha {}", self.max_alpha),
            });
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpDeviation {
    pub op: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub rows: Vec<OpDeviation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn total_cases(&self) -> usize {
        self.rows.iter().map(|r| r.cases).sum()
    }

    pub fn failures(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.passed).map(|r| r.op.as_str()).collect()
    }

    /// Fixed-width table, one row per operation.
    pub fn table(&self) -> String {
        let mut out = format!("{:<14}{:>7}{:>16}{:>12}  status\n", "operation", "cases", "max_deviation", "threshold");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<14}{:>7}{:>16.3e}{:>12.1e}  {}\n",
                r.op,
                r.cases,
                r.max_deviation,
                r.threshold,
                if r.passed { "ok" } else { "FAIL" }
            ));
        }
        out
    }
}

fn amplitude(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
}

/// Normalized superposition of 1 to 3 coherent terms.
fn random_state(rng: &mut ChaCha8Rng, n_modes: usize, radius: f64) -> SuperposedState {
    let n_terms = rng.random_range(1..=3);
    let terms = (0..n_terms)
        .map(|_| {
            let coeff = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            CoherentTerm::new(coeff, (0..n_modes).map(|_| amplitude(rng, radius)).collect())
        })
        .collect();
    SuperposedState::new(n_modes, terms)
        .and_then(|s| s.normalize())
        .unwrap_or_else(|_| SuperposedState::vacuum(n_modes).expect("vacuum"))
}

fn random_case(rng: &mut ChaCha8Rng, op: &str, max_alpha: f64) -> (SuperposedState, OracleOp) {
    let n_modes = if op == "beamsplitter" { 2 } else { rng.random_range(1..=MAX_MODES) };
    let mode = rng.random_range(0..n_modes);
    match op {
        "overlap" => {
            let s = random_state(rng, n_modes, max_alpha);
            let other = random_state(rng, n_modes, max_alpha);
            (s, OracleOp::Overlap { other })
        }
        "displacement" => {
            let beta = amplitude(rng, max_alpha / 2.0);
            (random_state(rng, n_modes, max_alpha / 2.0), OracleOp::Displacement { mode, beta })
        }
        "phase" => {
            let epsilon = rng.random_range(-PI..PI);
            (random_state(rng, n_modes, max_alpha), OracleOp::Phase { mode, epsilon })
        }
        "beamsplitter" => {
            let theta = rng.random_range(-PI..PI);
            (random_state(rng, 2, max_alpha), OracleOp::Beamsplitter { theta })
        }
        "parity" => (random_state(rng, n_modes, max_alpha), OracleOp::Parity { mode }),
        _ => {
            let alpha = rng.random_range(0.1..=max_alpha);
            (random_state(rng, n_modes, max_alpha - alpha / 2.0), OracleOp::CatMeasure { mode, alpha })
        }
    }
}

/// Runs `trials` random cases of every oracle operation.
///
/// Cases are drawn sequentially from one seeded stream, so the report does
/// not depend on how the checks are scheduled.
pub fn oracle_suite(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cases: Vec<(usize, SuperposedState, OracleOp)> = OPS
        .iter()
        .enumerate()
        .flat_map(|(i, op)| (0..cfg.trials).map(move |_| (i, op)))
        .map(|(i, op)| {
            let (s, o) = random_case(&mut rng, op, cfg.max_alpha);
            (i, s, o)
        })
        .collect();
    let deviations: Vec<(usize, f64)> = cases
        .par_iter()
        .map(|(i, s, op)| oracle_check_auto(s, op).map(|d| (*i, d)))
        .collect::<Result<_>>()?;
    let rows = OPS
        .iter()
        .enumerate()
        .map(|(i, op)| {
            let devs = deviations.iter().filter(|(j, _)| *j == i).map(|&(_, d)| d);
            let max_deviation = devs.clone().fold(0.0, f64::max);
            let finite = devs.clone().all(f64::is_finite);
            OpDeviation {
                op: op.to_string(),
                cases: cfg.trials,
                max_deviation,
                threshold: DEVIATION_THRESHOLD,
                passed: finite && max_deviation <= DEVIATION_THRESHOLD,
            }
        })
        .collect();
    Ok(VerifyReport { config: *cfg, rows })
}
