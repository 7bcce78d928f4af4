//! Multimode states as finite superpositions of coherent states.
//!
//! A [`SuperposedState`] is a list of [`CoherentTerm`]s, each carrying a
//! complex weight and one coherent amplitude per mode. Displacements, phase
//! shifts and beamsplitters all map coherent states to coherent states, so
//! every physical operation here is exact and never grows the term count.
//!
//! Displacement phase convention: `D(b)|a> = exp((b a* - b* a)/2) |a + b>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default merge/drop tolerance for [`SuperposedState::compact`].
pub const DEFAULT_COMPACT_TOL: f64 = 1e-14;

/// Exponent of `<tau|alpha>`, i.e. `-(|tau|^2 + |alpha|^2)/2 + tau* alpha`.
#[inline]
pub fn overlap_exponent(tau: Complex64, alpha: Complex64) -> Complex64 {
    -0.5 * (tau.norm_sqr() + alpha.norm_sqr()) + tau.conj() * alpha
}

/// Overlap `<tau|alpha>` of two single-mode coherent states.
#[inline]
pub fn coherent_overlap(tau: Complex64, alpha: Complex64) -> Complex64 {
    overlap_exponent(tau, alpha).exp()
}

/// Phase picked up by `D(beta)` acting on `|alpha>`.
#[inline]
pub fn displacement_phase(beta: Complex64, alpha: Complex64) -> Complex64 {
    (0.5 * (beta * alpha.conj() - beta.conj() * alpha)).exp()
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One branch of a superposition: `coeff * |amps[0]> |amps[1]> ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentTerm {
    pub coeff: Complex64,
    pub amps: Vec<Complex64>,
}

impl CoherentTerm {
    pub fn new(coeff: Complex64, amps: Vec<Complex64>) -> Self {
        Self { coeff, amps }
    }

    fn amps_close(&self, other: &Self, tol: f64) -> bool {
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

#[derive(Deserialize)]
struct RawState {
    n_modes: usize,
    terms: Vec<CoherentTerm>,
}

impl TryFrom<RawState> for SuperposedState {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        SuperposedState::new(raw.n_modes, raw.terms)
    }
}

/// A pure multimode state written as a finite sum of coherent product states.
///
/// States are immutable values: every operation returns a new state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState")]
pub struct SuperposedState {
    n_modes: usize,
    terms: Vec<CoherentTerm>,
}

/// Beamsplitter `exp[i theta (a b^dag + a^dag b)]` between two modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterParams {
    pub theta: f64,
    pub mode_a: usize,
    pub mode_b: usize,
}

impl BeamsplitterParams {
    pub fn new(theta: f64, mode_a: usize, mode_b: usize) -> Self {
        Self {
            theta,
            mode_a,
            mode_b,
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        check_mode(self.mode_a, n_modes)?;
        check_mode(self.mode_b, n_modes)?;
        if self.mode_a == self.mode_b {
            return Err(Error::RepeatedMode(self.mode_a));
        }
        if !self.theta.is_finite() {
            return Err(Error::NonFinite("beamsplitter angle"));
        }
        Ok(())
    }
}

pub(crate) fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode >= n_modes {
        Err(Error::ModeOutOfRange { mode, n_modes })
    } else {
        Ok(())
    }
}

impl SuperposedState {
    /// Builds a state, checking term lengths and finiteness.
    pub fn new(n_modes: usize, terms: Vec<CoherentTerm>) -> Result<Self> {
        if n_modes == 0 || terms.is_empty() {
            return Err(Error::EmptyState);
        }
        for (i, t) in terms.iter().enumerate() {
            if t.amps.len() != n_modes {
                return Err(Error::TermLength {
                    term: i,
                    expected: n_modes,
                    found: t.amps.len(),
                });
            }
            if !is_finite(t.coeff) {
                return Err(Error::NonFinite("term coefficient"));
            }
            if !t.amps.iter().copied().all(is_finite) {
                return Err(Error::NonFinite("coherent amplitude"));
            }
        }
        Ok(Self { n_modes, terms })
    }

    /// Single product coherent state `|amps[0]> |amps[1]> ...`.
    pub fn coherent(amps: &[Complex64]) -> Result<Self> {
        Self::new(amps.len(), vec![CoherentTerm::new(Complex64::new(1.0, 0.0), amps.to_vec())])
    }

    /// Product coherent state with real amplitudes.
    pub fn coherent_real(amps: &[f64]) -> Result<Self> {
        let amps: Vec<_> = amps.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Self::coherent(&amps)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        Self::coherent(&vec![Complex64::new(0.0, 0.0); n_modes])
    }

    /// Single-mode superposition `sum_k c_k |a_k>`.
    pub fn single_mode(branches: &[(Complex64, Complex64)]) -> Result<Self> {
        let terms = branches
            .iter()
            .map(|&(c, a)| CoherentTerm::new(c, vec![a]))
            .collect();
        Self::new(1, terms)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[CoherentTerm] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<CoherentTerm> {
        self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn with_terms(&self, terms: Vec<CoherentTerm>) -> Self {
        Self {
            n_modes: self.n_modes,
            terms,
        }
    }

    /// `<self|other>` summed over all term pairs.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                let expo: Complex64 = a
                    .amps
                    .iter()
                    .zip(&b.amps)
                    .map(|(&x, &y)| overlap_exponent(x, y))
                    .sum();
                acc += a.coeff.conj() * b.coeff * expo.exp();
            }
        }
        Ok(acc)
    }

    /// `<self|self>`; real and non-negative up to rounding.
    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self)
            .map(|z| z.re)
            .expect("mode counts agree with themselves")
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.with_terms(
            self.terms
                .iter()
                .map(|t| CoherentTerm::new(t.coeff * factor, t.amps.clone()))
                .collect(),
        )
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !n2.is_finite() {
            return Err(Error::NonFinite("state norm"));
        }
        // Cancellation leaves a rounding-level residue relative to the raw weights.
        let scale: f64 = self.terms.iter().map(|t| t.coeff.norm_sqr()).sum();
        if n2 <= 1e-28 * scale.max(f64::MIN_POSITIVE) || n2 <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// Sum of two states over the same modes (terms concatenated).
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(self.with_terms(terms))
    }

    /// Tensor product; `other`'s modes are appended after `self`'s.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut amps = a.amps.clone();
                amps.extend_from_slice(&b.amps);
                terms.push(CoherentTerm::new(a.coeff * b.coeff, amps));
            }
        }
        Self {
            n_modes: self.n_modes + other.n_modes,
            terms,
        }
    }

    /// Relabels modes `i` and `j`.
    pub fn swap_modes(&self, i: usize, j: usize) -> Result<Self> {
        check_mode(i, self.n_modes)?;
        check_mode(j, self.n_modes)?;
        Ok(self.with_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mut amps = t.amps.clone();
                    amps.swap(i, j);
                    CoherentTerm::new(t.coeff, amps)
                })
                .collect(),
        ))
    }

    /// Applies `f(amplitude) -> (new amplitude, coefficient factor)` to one mode of every term.
    pub fn map_mode<F>(&self, mode: usize, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> (Complex64, Complex64),
    {
        check_mode(mode, self.n_modes)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (a, factor) = f(t.amps[mode]);
                let mut amps = t.amps.clone();
                amps[mode] = a;
                CoherentTerm::new(t.coeff * factor, amps)
            })
            .collect();
        Ok(self.with_terms(terms))
    }

    /// Displacement `D(beta)` on one mode.
    pub fn displace(&self, mode: usize, beta: Complex64) -> Result<Self> {
        if !is_finite(beta) {
            return Err(Error::NonFinite("displacement"));
        }
        self.map_mode(mode, |a| (a + beta, displacement_phase(beta, a)))
    }

    /// Phase shift `exp(i epsilon a^dag a)`, which rotates the coherent amplitude.
    pub fn phase_shift(&self, mode: usize, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::NonFinite("phase shift"));
        }
        let rot = Complex64::from_polar(1.0, epsilon);
        self.map_mode(mode, |a| (a * rot, Complex64::new(1.0, 0.0)))
    }

    /// Photon-number parity `(-1)^n` on one mode: `|a> -> |-a>`.
    pub fn parity(&self, mode: usize) -> Result<Self> {
        self.map_mode(mode, |a| (-a, Complex64::new(1.0, 0.0)))
    }

    /// Beamsplitter acting per term as
    /// `(g, b) -> (cos t g + i sin t b, cos t b + i sin t g)`.
    pub fn beamsplitter(&self, p: &BeamsplitterParams) -> Result<Self> {
        p.validate(self.n_modes)?;
        let (s, c) = p.theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let g = t.amps[p.mode_a];
                let b = t.amps[p.mode_b];
                let mut amps = t.amps.clone();
                amps[p.mode_a] = c * g + is * b;
                amps[p.mode_b] = c * b + is * g;
                CoherentTerm::new(t.coeff, amps)
            })
            .collect();
        Ok(self.with_terms(terms))
    }

    /// Merges terms whose amplitudes agree within `tol` on every mode, then
    /// drops terms with `|coeff| <= tol * max |coeff|`.
    ///
    /// At least one term is always kept.
    pub fn compact(&self, tol: f64) -> Self {
        let tol = tol.max(0.0);
        let mut merged: Vec<CoherentTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match merged.iter_mut().find(|m| m.amps_close(t, tol)) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t.clone()),
            }
        }
        let max = merged.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max);
        let cut = tol * max;
        let mut kept: Vec<CoherentTerm> = merged
            .iter()
            .filter(|t| t.coeff.norm() > cut)
            .cloned()
            .collect();
        if kept.is_empty() {
            // everything cancelled; keep one (zero-weight) term so the state stays well formed
            kept.push(merged.swap_remove(0));
        }
        self.with_terms(kept)
    }

    /// Splits off `mode` when the state is a product `|phi>_mode (x) |rest>`.
    ///
    /// Terms are grouped by their amplitudes on the other modes; the state
    /// factorizes when every group's coefficient vector over the distinct
    /// `mode` amplitudes is proportional to a common one. Returns `(rest, phi)`
    /// unnormalized, or `None` if no such factorization is found.
    pub fn factor_out_mode(&self, mode: usize, tol: f64) -> Result<Option<(Self, Self)>> {
        check_mode(mode, self.n_modes)?;
        if self.n_modes == 1 {
            return Ok(None);
        }
        let compacted = self.compact(tol);
        let mut mode_amps: Vec<Complex64> = Vec::new();
        let mut groups: Vec<(Vec<Complex64>, Vec<(usize, Complex64)>)> = Vec::new();
        for t in compacted.terms() {
            let a = t.amps[mode];
            let col = match mode_amps.iter().position(|&m| (m - a).norm() <= tol) {
                Some(k) => k,
                None => {
                    mode_amps.push(a);
                    mode_amps.len() - 1
                }
            };
            let mut rest = t.amps.clone();
            rest.remove(mode);
            let close = |r: &Vec<Complex64>| r.iter().zip(&rest).all(|(x, y)| (x - y).norm() <= tol);
            match groups.iter_mut().find(|(r, _)| close(r)) {
                Some((_, entries)) => entries.push((col, t.coeff)),
                None => groups.push((rest, vec![(col, t.coeff)])),
            }
        }
        let dense = |entries: &[(usize, Complex64)]| {
            let mut v = vec![Complex64::new(0.0, 0.0); mode_amps.len()];
            for &(k, c) in entries {
                v[k] += c;
            }
            v
        };
        let vectors: Vec<Vec<Complex64>> = groups.iter().map(|(_, e)| dense(e)).collect();
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let (ref_idx, ref_norm) = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if ref_norm == 0.0 {
            return Ok(None);
        }
        let reference = &vectors[ref_idx];
        let threshold = 1e-10 * ref_norm.max(1.0) + tol * vectors.len() as f64;
        let mut rest_terms = Vec::with_capacity(groups.len());
        for ((rest, _), v) in groups.iter().zip(&vectors) {
            let dot: Complex64 = reference.iter().zip(v).map(|(r, x)| r.conj() * x).sum();
            let lambda = dot / (ref_norm * ref_norm);
            let resid = reference
                .iter()
                .zip(v)
                .map(|(r, x)| (x - lambda * r).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if resid > threshold {
                return Ok(None);
            }
            rest_terms.push(CoherentTerm::new(lambda, rest.clone()));
        }
        let phi_terms = mode_amps
            .iter()
            .zip(reference)
            .map(|(&a, &c)| CoherentTerm::new(c, vec![a]))
            .collect();
        Ok(Some((
            Self::new(self.n_modes - 1, rest_terms)?,
            Self::new(1, phi_terms)?,
        )))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn overlap_identity_and_code_states() {
        assert_abs_diff_eq!(coherent_overlap(c(0.0, 0.0), c(0.0, 0.0)).re, 1.0);
        let z = coherent_overlap(c(3.0, 0.0), c(0.0, 0.0));
        assert_abs_diff_eq!(z.re, (-4.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0);
        assert_abs_diff_eq!(z.re, 1.1109e-2, epsilon = 1e-6);
    }

    #[test]
    fn cat_pair_is_orthogonal_for_real_alpha() {
        let a = c(2.0, 0.0);
        let one = c(1.0, 0.0);
        let plus = SuperposedState::single_mode(&[(one, c(0.0, 0.0)), (one, a)]).unwrap();
        let minus = SuperposedState::single_mode(&[(one, c(0.0, 0.0)), (-one, a)]).unwrap();
        let z = plus.inner_product(&minus).unwrap();
        assert_abs_diff_eq!(z.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_product_rejects_mode_mismatch() {
        let a = SuperposedState::vacuum(1).unwrap();
        let b = SuperposedState::vacuum(2).unwrap();
        assert!(matches!(
            a.inner_product(&b),
            Err(Error::ModeCountMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn normalize_cases() {
        let s = SuperposedState::single_mode(&[(c(2.0, 0.0), c(1.5, 0.0))]).unwrap();
        let n = s.normalize().unwrap();
        assert_abs_diff_eq!(n.terms()[0].coeff.re, 1.0, epsilon = 1e-15);

        let alpha = 1.3f64;
        let cat = SuperposedState::single_mode(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(alpha, 0.0))])
            .unwrap()
            .normalize()
            .unwrap();
        let expect = 1.0 / (2.0 * (1.0 + (-alpha * alpha / 2.0).exp())).sqrt();
        for t in cat.terms() {
            assert_abs_diff_eq!(t.coeff.re, expect, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(cat.norm_sqr(), 1.0, epsilon = 1e-12);

        let zero = SuperposedState::single_mode(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(-1.0, 0.0), c(0.0, 0.0))])
            .unwrap();
        assert!(matches!(zero.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn displacement_examples() {
        let beta = c(0.4, -1.1);
        let d = SuperposedState::vacuum(1).unwrap().displace(0, beta).unwrap();
        assert_eq!(d.terms()[0].amps[0], beta);
        assert_abs_diff_eq!((d.terms()[0].coeff - c(1.0, 0.0)).norm(), 0.0);

        let s = SuperposedState::coherent(&[c(0.7, 0.2)]).unwrap();
        let back = s.displace(0, beta).unwrap().displace(0, -beta).unwrap();
        assert_abs_diff_eq!((back.terms()[0].amps[0] - c(0.7, 0.2)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((back.terms()[0].coeff - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);

        // real alpha: D(-alpha/2) on |0> + |alpha> gives phase-free |-alpha/2> + |alpha/2>
        let alpha = 3.0;
        let cat = SuperposedState::single_mode(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(alpha, 0.0))]).unwrap();
        let shifted = cat.displace(0, c(-alpha / 2.0, 0.0)).unwrap();
        assert_eq!(shifted.terms()[0].amps[0], c(-1.5, 0.0));
        assert_eq!(shifted.terms()[1].amps[0], c(1.5, 0.0));
        for t in shifted.terms() {
            assert_abs_diff_eq!((t.coeff - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn phase_shift_examples() {
        let s = SuperposedState::coherent(&[c(2.0, 0.5)]).unwrap();
        assert_eq!(s.phase_shift(0, 0.0).unwrap(), s);
        let flipped = SuperposedState::coherent_real(&[3.0]).unwrap().phase_shift(0, PI).unwrap();
        assert_abs_diff_eq!((flipped.terms()[0].amps[0] - c(-3.0, 0.0)).norm(), 0.0, epsilon = 1e-14);

        let alpha = 5.0f64;
        let eps = PI / (2.0 * alpha * alpha);
        let a = c(alpha, 0.0);
        let z = coherent_overlap(a, Complex64::from_polar(alpha, eps)) * Complex64::from_polar(1.0, -eps * alpha * alpha);
        // |<a|a e^{i eps}>| = exp(-a^2 (1 - cos eps)), about 0.952 here
        assert_abs_diff_eq!(z.norm(), (-alpha * alpha * (1.0 - eps.cos())).exp(), epsilon = 1e-14);
        assert!(z.norm() > 0.95);
        assert_abs_diff_eq!(z.arg(), alpha * alpha * (eps.sin() - eps), epsilon = 1e-14);
    }

    #[test]
    fn beamsplitter_examples() {
        let s = SuperposedState::coherent(&[c(1.2, 0.3), c(-0.4, 0.9)]).unwrap();
        assert_eq!(s.beamsplitter(&BeamsplitterParams::new(0.0, 0, 1)).unwrap(), s);

        let g = c(2.0, 0.0);
        let out = SuperposedState::coherent(&[g, c(0.0, 0.0)])
            .unwrap()
            .beamsplitter(&BeamsplitterParams::new(PI / 2.0, 0, 1))
            .unwrap();
        assert_abs_diff_eq!(out.terms()[0].amps[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((out.terms()[0].amps[1] - c(0.0, 2.0)).norm(), 0.0, epsilon = 1e-15);

        let alpha = 4.0f64;
        let theta = PI / (2.0 * alpha * alpha);
        let input = SuperposedState::coherent_real(&[alpha, alpha]).unwrap();
        let z = input
            .inner_product(&input.beamsplitter(&BeamsplitterParams::new(theta, 0, 1)).unwrap())
            .unwrap();
        let closed = (c(-2.0 * alpha * alpha * (1.0 - theta.cos()), 2.0 * theta.sin() * alpha * alpha)).exp();
        assert_abs_diff_eq!((z - closed).norm(), 0.0, epsilon = 1e-13);
        assert!((z.arg().abs() - PI).abs() < 0.01);
    }

    #[test]
    fn beamsplitter_rejects_bad_modes() {
        let s = SuperposedState::vacuum(2).unwrap();
        assert!(matches!(
            s.beamsplitter(&BeamsplitterParams::new(0.1, 0, 0)),
            Err(Error::RepeatedMode(0))
        ));
        assert!(matches!(
            s.beamsplitter(&BeamsplitterParams::new(0.1, 0, 2)),
            Err(Error::ModeOutOfRange { mode: 2, n_modes: 2 })
        ));
        assert!(s.displace(3, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn compact_merges_and_drops() {
        let a = c(1.0, 0.0);
        let s = SuperposedState::single_mode(&[(c(0.5, 0.0), a), (c(0.5, 0.0), a)]).unwrap();
        let k = s.compact(DEFAULT_COMPACT_TOL);
        assert_eq!(k.n_terms(), 1);
        assert_abs_diff_eq!(k.terms()[0].coeff.re, 1.0);

        let s = SuperposedState::single_mode(&[(c(0.0, 0.0), a), (c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        let k = s.compact(DEFAULT_COMPACT_TOL);
        assert_eq!(k.n_terms(), 1);
        assert_eq!(k.terms()[0].amps[0], c(0.0, 0.0));
    }

    #[test]
    fn factor_out_product_and_entangled() {
        let a = SuperposedState::single_mode(&[(c(0.6, 0.0), c(0.0, 0.0)), (c(0.8, 0.0), c(2.0, 0.0))]).unwrap();
        let b = SuperposedState::single_mode(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(-1.0, 0.0), c(2.0, 0.0))]).unwrap();
        let prod = a.tensor(&b);
        let (rest, phi) = prod.factor_out_mode(1, DEFAULT_COMPACT_TOL).unwrap().unwrap();
        let f = rest.normalize().unwrap().inner_product(&a.normalize().unwrap()).unwrap().norm_sqr();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
        let fb = phi.normalize().unwrap().inner_product(&b.normalize().unwrap()).unwrap().norm_sqr();
        assert_abs_diff_eq!(fb, 1.0, epsilon = 1e-12);

        let bell = SuperposedState::new(
            2,
            vec![
                CoherentTerm::new(c(1.0, 0.0), vec![c(0.0, 0.0), c(0.0, 0.0)]),
                CoherentTerm::new(c(1.0, 0.0), vec![c(2.0, 0.0), c(2.0, 0.0)]),
            ],
        )
        .unwrap();
        assert!(bell.factor_out_mode(0, DEFAULT_COMPACT_TOL).unwrap().is_none());
    }

    #[test]
    fn json_schema_and_round_trip() {
        let s = SuperposedState::new(
            2,
            vec![CoherentTerm::new(c(0.1, -0.2), vec![c(1.0 / 3.0, 0.0), c(-2.5, 1e-300)])],
        )
        .unwrap();
        let json = s.to_json().unwrap();
        assert!(json.starts_with(r#"{"n_modes":2,"terms":[{"coeff":[0.1,-0.2],"amps":[["#));
        let back = SuperposedState::from_json(&json).unwrap();
        assert_eq!(back, s);

        let bad = r#"{"n_modes":2,"terms":[{"coeff":[1.0,0.0],"amps":[[0.0,0.0]]}]}"#;
        assert!(SuperposedState::from_json(bad).is_err());
    }
}
