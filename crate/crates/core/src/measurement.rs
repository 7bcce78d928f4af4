//! Cat-basis measurement through displacement and photon-number parity,
//! plus homodyne quadrature densities and computational readout.
//!
//! Quadrature convention: `x = (a + a^dag)/sqrt(2)`, so `|alpha>` has mean
//! `sqrt(2) Re(alpha e^{-i angle})` and variance 1/2.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::LogicalParams;
use crate::state::{check_mode, coherent_overlap, displacement_phase, overlap_exponent, SuperposedState, DEFAULT_COMPACT_TOL};

/// Branches below this probability are treated as impossible.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-15;

const NORMALIZED_TOL: f64 = 1e-9;

/// `<tau| (-1)^n |alpha>`.
pub fn parity_overlap(tau: Complex64, alpha: Complex64) -> Complex64 {
    coherent_overlap(tau, -alpha)
}

/// `<tau| D(shift) (-1)^n D(-shift) |alpha>`, evaluated as `<tau| D(2 shift) (-1)^n |alpha>`.
pub fn displaced_parity_overlap(tau: Complex64, alpha: Complex64, shift: Complex64) -> Complex64 {
    let d = 2.0 * shift;
    displacement_phase(d, -alpha) * coherent_overlap(tau, d - alpha)
}

/// Parity outcome of a photon-number measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// One measurement branch: outcome, its probability and the normalized post-measurement state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub label: Parity,
    pub probability: f64,
    pub mode: usize,
    pub post_state: SuperposedState,
}

/// `sum_jk conj(c_j) c_k K(a_j[mode], a_k[mode]) prod_{m != mode} <a_j[m]|a_k[m]>`.
fn single_mode_expectation<K>(s: &SuperposedState, mode: usize, kernel: K) -> Result<Complex64>
where
    K: Fn(Complex64, Complex64) -> Complex64,
{
    check_mode(mode, s.n_modes())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in s.terms() {
        for b in s.terms() {
            let rest: Complex64 = a
                .amps
                .iter()
                .zip(&b.amps)
                .enumerate()
                .filter(|&(m, _)| m != mode)
                .map(|(_, (&x, &y))| overlap_exponent(x, y))
                .sum();
            acc += a.coeff.conj() * b.coeff * rest.exp() * kernel(a.amps[mode], b.amps[mode]);
        }
    }
    Ok(acc)
}

fn require_normalized(s: &SuperposedState) -> Result<()> {
    let n2 = s.norm_sqr();
    if (n2 - 1.0).abs() > NORMALIZED_TOL {
        Err(Error::Unnormalized(n2))
    } else {
        Ok(())
    }
}

/// `<s| (-1)^n_mode |s>`.
pub fn parity_expectation(s: &SuperposedState, mode: usize) -> Result<f64> {
    Ok(single_mode_expectation(s, mode, parity_overlap)?.re)
}

/// Even/odd photon-number probabilities on one mode of a normalized state.
pub fn parity_probabilities(s: &SuperposedState, mode: usize) -> Result<(f64, f64)> {
    require_normalized(s)?;
    let p = parity_expectation(s, mode)?;
    let even = (0.5 * (1.0 + p)).clamp(0.0, 1.0);
    Ok((even, 1.0 - even))
}

/// Even/odd probabilities of `D(shift) (-1)^n D(-shift)` evaluated without
/// displacing the state.
pub fn displaced_parity_probabilities(s: &SuperposedState, mode: usize, shift: Complex64) -> Result<(f64, f64)> {
    require_normalized(s)?;
    let p = single_mode_expectation(s, mode, |t, a| displaced_parity_overlap(t, a, shift))?.re;
    let even = (0.5 * (1.0 + p)).clamp(0.0, 1.0);
    Ok((even, 1.0 - even))
}

/// Applies `(1 +- (-1)^n)/2` on one mode: `|b> -> (|b> +- |-b>)/2` per term.
pub fn project_parity(s: &SuperposedState, mode: usize, parity: Parity) -> Result<SuperposedState> {
    let flipped = s.parity(mode)?.scale(Complex64::new(parity.sign(), 0.0));
    Ok(s.superpose(&flipped)?.scale(Complex64::new(0.5, 0.0)).compact(DEFAULT_COMPACT_TOL))
}

/// Both outcomes of the cat-basis measurement `(|0> +- |alpha>)` on one mode.
///
/// The mode is displaced by `-alpha/2`, projected onto even or odd photon
/// number and displaced back. Even marks the `|0> + |alpha>` cat, odd the
/// `|0> - |alpha>` cat. The measured mode stays in the state, collapsed.
/// Branches with probability below [`MIN_BRANCH_PROBABILITY`] are omitted.
pub fn cat_basis_branches(s: &SuperposedState, mode: usize, p: &LogicalParams) -> Result<Vec<MeasurementRecord>> {
    check_mode(mode, s.n_modes())?;
    require_normalized(s)?;
    let shift = Complex64::new(p.alpha() / 2.0, 0.0);
    let displaced = s.displace(mode, -shift)?;
    let (p_even, p_odd) = parity_probabilities(&displaced, mode)?;
    let mut out = Vec::with_capacity(2);
    for (label, prob) in [(Parity::Even, p_even), (Parity::Odd, p_odd)] {
        if prob < MIN_BRANCH_PROBABILITY {
            continue;
        }
        let projected = project_parity(&displaced, mode, label)?;
        let post_state = projected
            .displace(mode, shift)?
            .compact(DEFAULT_COMPACT_TOL)
            .normalize()?;
        out.push(MeasurementRecord {
            label,
            probability: prob,
            mode,
            post_state,
        });
    }
    Ok(out)
}

/// How a measurement branch is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchPolicy {
    Even,
    Odd,
    /// Draw outcomes from a ChaCha8 stream seeded with this value.
    Sample(u64),
    /// Keep every branch with nonzero probability.
    Enumerate,
}

/// Applies a [`BranchPolicy`] across a sequence of measurements, owning the
/// random stream when sampling.
#[derive(Clone, Debug)]
pub struct Brancher {
    policy: BranchPolicy,
    rng: Option<ChaCha8Rng>,
}

impl Brancher {
    pub fn new(policy: BranchPolicy) -> Self {
        let rng = match policy {
            BranchPolicy::Sample(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Self { policy, rng }
    }

    pub fn policy(&self) -> BranchPolicy {
        self.policy
    }

    /// Picks the records to follow out of the available branches.
    pub fn select(&mut self, records: Vec<MeasurementRecord>) -> Result<Vec<MeasurementRecord>> {
        let fixed = |label: Parity, records: Vec<MeasurementRecord>| {
            records.into_iter().find(|r| r.label == label).map(|r| vec![r]).ok_or_else(|| {
                Error::ZeroProbabilityBranch {
                    label: label.label().to_string(),
                    probability: 0.0,
                }
            })
        };
        match self.policy {
            BranchPolicy::Enumerate => Ok(records),
            BranchPolicy::Even => fixed(Parity::Even, records),
            BranchPolicy::Odd => fixed(Parity::Odd, records),
            BranchPolicy::Sample(_) => {
                let rng = self.rng.as_mut().expect("sampling brancher owns an rng");
                let u: f64 = rng.random();
                let p_even = records
                    .iter()
                    .find(|r| r.label == Parity::Even)
                    .map_or(0.0, |r| r.probability);
                let label = if u < p_even { Parity::Even } else { Parity::Odd };
                fixed(label, records)
            }
        }
    }
}

/// Cat-basis measurement with branch selection.
pub fn cat_basis_measure(
    s: &SuperposedState,
    mode: usize,
    p: &LogicalParams,
    brancher: &mut Brancher,
) -> Result<Vec<MeasurementRecord>> {
    brancher.select(cat_basis_branches(s, mode, p)?)
}

/// `<x_angle|a>` for `x_angle = (a e^{-i angle} + a^dag e^{i angle})/sqrt(2)`.
pub fn quadrature_wavefunction(a: Complex64, angle: f64, x: f64) -> Complex64 {
    quadrature_exponent(a * Complex64::from_polar(1.0, -angle), x).exp() * PI.powf(-0.25)
}

fn quadrature_exponent(b: Complex64, x: f64) -> Complex64 {
    -0.5 * x * x + SQRT_2 * b * x - 0.5 * (b * b + b.norm_sqr())
}

/// Homodyne density of one mode with the other modes traced out.
#[derive(Clone, Debug)]
pub struct HomodyneDensity {
    rotated: Vec<Complex64>,
    /// `conj(c_j) c_k prod_{m != mode} <a_j|a_k>`, row-major.
    weights: Vec<Complex64>,
}

impl HomodyneDensity {
    pub fn new(s: &SuperposedState, mode: usize, angle: f64) -> Result<Self> {
        check_mode(mode, s.n_modes())?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("quadrature angle"));
        }
        let n2 = s.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let rot = Complex64::from_polar(1.0, -angle);
        let rotated = s.terms().iter().map(|t| t.amps[mode] * rot).collect();
        let mut weights = Vec::with_capacity(s.n_terms() * s.n_terms());
        for a in s.terms() {
            for b in s.terms() {
                let rest: Complex64 = a
                    .amps
                    .iter()
                    .zip(&b.amps)
                    .enumerate()
                    .filter(|&(m, _)| m != mode)
                    .map(|(_, (&x, &y))| overlap_exponent(x, y))
                    .sum();
                weights.push(a.coeff.conj() * b.coeff * rest.exp() / n2);
            }
        }
        Ok(Self { rotated, weights })
    }

    pub fn at(&self, x: f64) -> f64 {
        let n = self.rotated.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &bj) in self.rotated.iter().enumerate() {
            let ej = quadrature_exponent(bj, x).conj();
            for (k, &bk) in self.rotated.iter().enumerate() {
                acc += self.weights[j * n + k] * (ej + quadrature_exponent(bk, x)).exp();
            }
        }
        acc.re / PI.sqrt()
    }

    /// Interval outside of which the density is negligible (below ~e^-100).
    pub fn support(&self) -> (f64, f64) {
        let means = self.rotated.iter().map(|b| SQRT_2 * b.re);
        let lo = means.clone().fold(f64::INFINITY, f64::min);
        let hi = means.fold(f64::NEG_INFINITY, f64::max);
        (lo - 15.0, hi + 15.0)
    }

    /// Highest fringe frequency among cross terms (rad per unit x).
    fn max_frequency(&self) -> f64 {
        let ims = self.rotated.iter().map(|b| b.im);
        let lo = ims.clone().fold(f64::INFINITY, f64::min);
        let hi = ims.fold(f64::NEG_INFINITY, f64::max);
        SQRT_2 * (hi - lo)
    }

    /// Probability of `x` in `[lo, hi]` by composite Simpson quadrature.
    pub fn probability_between(&self, lo: f64, hi: f64) -> f64 {
        let (slo, shi) = self.support();
        let (lo, hi) = (lo.max(slo), hi.min(shi));
        if hi <= lo {
            return 0.0;
        }
        let h_target = 0.01 / (1.0 + self.max_frequency());
        simpson(|x| self.at(x), lo, hi, ((hi - lo) / h_target).ceil() as usize)
    }
}

/// Composite Simpson rule with `n` (rounded up to even, at least 2) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// Probability density of the quadrature outcome `x` at the given angle.
pub fn homodyne_pdf(s: &SuperposedState, mode: usize, quadrature_angle: f64, x: f64) -> Result<f64> {
    Ok(HomodyneDensity::new(s, mode, quadrature_angle)?.at(x))
}

/// Decision rule for reading a logical qubit from the real quadrature.
///
/// Outcomes below `threshold_scale * alpha / sqrt(2)` read as 0, above as 1;
/// a window of width `inconclusive_width` centred on the threshold yields no decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutPolicy {
    pub threshold_scale: f64,
    pub inconclusive_width: f64,
}

impl Default for ReadoutPolicy {
    fn default() -> Self {
        Self {
            threshold_scale: 1.0,
            inconclusive_width: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutProbabilities {
    pub zero: f64,
    pub one: f64,
    pub inconclusive: f64,
}

/// Homodyne readout in the computational basis.
pub fn computational_readout(
    s: &SuperposedState,
    mode: usize,
    p: &LogicalParams,
    policy: &ReadoutPolicy,
) -> Result<ReadoutProbabilities> {
    if !(policy.inconclusive_width >= 0.0) || !policy.threshold_scale.is_finite() {
        return Err(Error::InvalidConfig("readout window must be finite and non-negative".into()));
    }
    let density = HomodyneDensity::new(s, mode, 0.0)?;
    let threshold = policy.threshold_scale * p.alpha() / SQRT_2;
    let half = 0.5 * policy.inconclusive_width;
    let (lo, hi) = density.support();
    let zero = density.probability_between(lo, threshold - half);
    let one = density.probability_between(threshold + half, hi);
    let inconclusive = if half > 0.0 {
        density.probability_between(threshold - half, threshold + half)
    } else {
        0.0
    };
    Ok(ReadoutProbabilities { zero, one, inconclusive })
}
