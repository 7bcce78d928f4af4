//! Truncated photon-number representation used as a brute-force oracle for
//! the coherent-state engine.
//!
//! Levels `0..=cutoff` are kept per mode and at most two modes are
//! supported. Operators are built from truncated ladder matrices and
//! exponentiated through symmetric eigendecompositions; the beamsplitter is
//! assembled block by block in total photon number, where truncation is exact.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::LogicalParams;
use crate::measurement::{cat_basis_branches, parity_probabilities, Parity};
use crate::state::{BeamsplitterParams, SuperposedState};

pub const MAX_MODES: usize = 2;
pub const MAX_AMPLITUDE: f64 = 4.0;

/// Extra levels carried while exponentiating single-mode generators.
const EXP_PADDING: usize = 60;

/// Smallest cutoff that keeps the tail of `|alpha>` negligible:
/// `ceil(|alpha|^2 + 10|alpha| + 10)`.
pub fn required_cutoff(abs_alpha: f64) -> usize {
    (abs_alpha * abs_alpha + 10.0 * abs_alpha + 10.0).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    n_modes: usize,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(cutoff: usize, n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::Intractable {
                max_modes: MAX_MODES,
                max_amplitude: MAX_AMPLITUDE,
                what: format!("{n_modes} modes requested"),
            });
        }
        Ok(Self {
            cutoff,
            n_modes,
            amplitudes: vec![Complex64::new(0.0, 0.0); (cutoff + 1).pow(n_modes as u32)],
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    fn levels(&self) -> usize {
        self.cutoff + 1
    }

    /// Amplitude of `|n_0, n_1, ...>`, mode 0 most significant.
    pub fn get(&self, photons: &[usize]) -> Complex64 {
        self.amplitudes[self.index(photons)]
    }

    fn index(&self, photons: &[usize]) -> usize {
        photons.iter().fold(0, |acc, &n| acc * self.levels() + n)
    }

    pub fn dot(&self, other: &Self) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: other.n_modes,
            });
        }
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff.min(other.cutoff),
                required: self.cutoff.max(other.cutoff),
            });
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        crate::state::check_mode(mode, self.n_modes)
    }

    /// Applies a single-mode matrix (`levels x levels`) to one mode.
    fn apply_single(&self, mode: usize, m: &DMatrix<Complex64>) -> Result<Self> {
        self.check_mode(mode)?;
        let d = self.levels();
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        match (self.n_modes, mode) {
            (1, _) => {
                for i in 0..d {
                    out.amplitudes[i] = (0..d).map(|k| m[(i, k)] * self.amplitudes[k]).sum();
                }
            }
            (_, 0) => {
                for i in 0..d {
                    for j in 0..d {
                        out.amplitudes[i * d + j] = (0..d).map(|k| m[(i, k)] * self.amplitudes[k * d + j]).sum();
                    }
                }
            }
            _ => {
                for i in 0..d {
                    for j in 0..d {
                        out.amplitudes[i * d + j] = (0..d).map(|k| m[(j, k)] * self.amplitudes[i * d + k]).sum();
                    }
                }
            }
        }
        Ok(out)
    }

    fn apply_diagonal<F: Fn(usize) -> Complex64>(&self, mode: usize, f: F) -> Result<Self> {
        self.check_mode(mode)?;
        let d = self.levels();
        let mut out = self.clone();
        for (idx, a) in out.amplitudes.iter_mut().enumerate() {
            let n = if self.n_modes == 1 || mode == 1 { idx % d } else { idx / d };
            *a *= f(n);
        }
        Ok(out)
    }

    /// `exp(i epsilon n)` on one mode.
    pub fn phase_shift(&self, mode: usize, epsilon: f64) -> Result<Self> {
        self.apply_diagonal(mode, |n| Complex64::from_polar(1.0, epsilon * n as f64))
    }

    /// `(-1)^n` on one mode.
    pub fn parity(&self, mode: usize) -> Result<Self> {
        self.apply_diagonal(mode, |n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
    }

    /// `D(beta)` on one mode, from the exponential of the truncated generator.
    pub fn displace(&self, mode: usize, beta: Complex64) -> Result<Self> {
        let m = displacement_matrix(beta, self.cutoff);
        self.apply_single(mode, &m)
    }

    pub fn beamsplitter(&self, theta: f64) -> Result<Self> {
        if self.n_modes != 2 {
            return Err(Error::ModeCountMismatch {
                left: self.n_modes,
                right: 2,
            });
        }
        Ok(bs_matrix(theta, self.cutoff).apply(self))
    }

    /// `sum_{n even} |<n|psi>|^2` over one mode, and the odd remainder.
    pub fn parity_weights(&self, mode: usize) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let d = self.levels();
        let (mut even, mut odd) = (0.0, 0.0);
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let n = if self.n_modes == 1 || mode == 1 { idx % d } else { idx / d };
            if n % 2 == 0 {
                even += a.norm_sqr();
            } else {
                odd += a.norm_sqr();
            }
        }
        Ok((even, odd))
    }
}

/// Fock amplitudes `exp(-|a|^2/2) a^n / sqrt(n!)` by recurrence.
pub fn coherent_to_fock(alpha: Complex64, cutoff: usize) -> Result<FockVector> {
    let required = required_cutoff(alpha.norm());
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    Ok(coherent_to_fock_unchecked(alpha, cutoff))
}

fn coherent_to_fock_unchecked(alpha: Complex64, cutoff: usize) -> FockVector {
    let mut v = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v.push(c);
    for n in 1..=cutoff {
        c = c * alpha / (n as f64).sqrt();
        v.push(c);
    }
    FockVector {
        cutoff,
        n_modes: 1,
        amplitudes: v,
    }
}

/// Dense Fock vector of a superposed coherent state.
pub fn state_to_fock(s: &SuperposedState, cutoff: usize) -> Result<FockVector> {
    let mut out = FockVector::zeros(cutoff, s.n_modes())?;
    let max_amp = s
        .terms()
        .iter()
        .flat_map(|t| t.amps.iter().map(|a| a.norm()))
        .fold(0.0, f64::max);
    let required = required_cutoff(max_amp);
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    let d = cutoff + 1;
    for t in s.terms() {
        let per_mode: Vec<FockVector> = t.amps.iter().map(|&a| coherent_to_fock_unchecked(a, cutoff)).collect();
        match per_mode.as_slice() {
            [m] => {
                for (o, a) in out.amplitudes.iter_mut().zip(&m.amplitudes) {
                    *o += t.coeff * a;
                }
            }
            [m0, m1] => {
                for i in 0..d {
                    let ci = t.coeff * m0.amplitudes[i];
                    for j in 0..d {
                        out.amplitudes[i * d + j] += ci * m1.amplitudes[j];
                    }
                }
            }
            _ => unreachable!("mode count checked by FockVector::zeros"),
        }
    }
    Ok(out)
}

/// `exp(i theta H)` for a real symmetric `H`, via its eigendecomposition.
fn expi_symmetric(h: DMatrix<f64>, theta: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, theta * l)),
    );
    let vd = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * phases[j]);
    vd * v.transpose()
}

/// Truncated `D(beta)` restricted to levels `0..=cutoff`.
///
/// `D(r e^{i phi}) = U(phi) D(r) U(-phi)`, and with `S = diag(i^n)`,
/// `r (a^dag - a) = S (-i r T) S^-1` where `T` is the real symmetric
/// tridiagonal matrix with off-diagonals `sqrt(n+1)`.
pub fn displacement_matrix(beta: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    let work = cutoff + 1 + EXP_PADDING;
    let (r, phi) = beta.to_polar();
    let mut t = DMatrix::<f64>::zeros(work, work);
    for n in 0..work - 1 {
        let v = ((n + 1) as f64).sqrt();
        t[(n + 1, n)] = v;
        t[(n, n + 1)] = v;
    }
    let e = expi_symmetric(t, -r);
    let ipow = |n: usize| match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let d = cutoff + 1;
    DMatrix::from_fn(d, d, |j, k| {
        // S e S^-1, then conjugate by the phase rotation
        let sk = ipow(k).conj();
        ipow(j) * e[(j, k)] * sk * Complex64::from_polar(1.0, phi * (j as f64 - k as f64))
    })
}

/// Two-mode beamsplitter `exp[i theta (a b^dag + a^dag b)]`, stored as one
/// block per total photon number `N = 0..=cutoff`.
#[derive(Clone, Debug)]
pub struct BeamsplitterMatrix {
    cutoff: usize,
    /// Block `N` acts on `|n, N - n>`, `n = 0..=N` photons in the first mode.
    blocks: Vec<DMatrix<Complex64>>,
}

impl BeamsplitterMatrix {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn block(&self, total: usize) -> &DMatrix<Complex64> {
        &self.blocks[total]
    }

    /// Matrix element `<out_a, out_b| U |in_a, in_b>`.
    pub fn element(&self, out: (usize, usize), inp: (usize, usize)) -> Complex64 {
        let total = out.0 + out.1;
        if total != inp.0 + inp.1 || total > self.cutoff {
            return Complex64::new(0.0, 0.0);
        }
        self.blocks[total][(out.0, inp.0)]
    }

    /// Full matrix on the two-mode space with levels `0..=cutoff` per mode;
    /// rows and columns with total photon number above the cutoff are zero.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.cutoff + 1;
        DMatrix::from_fn(d * d, d * d, |r, c| self.element((r / d, r % d), (c / d, c % d)))
    }

    /// Applies the matrix; components with total photon number above the cutoff are dropped.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let d = v.cutoff + 1;
        let mut out = FockVector {
            cutoff: v.cutoff,
            n_modes: 2,
            amplitudes: vec![Complex64::new(0.0, 0.0); d * d],
        };
        for total in 0..=self.cutoff.min(v.cutoff) {
            let block = &self.blocks[total];
            for na in 0..=total {
                let acc: Complex64 = (0..=total)
                    .map(|ma| block[(na, ma)] * v.amplitudes[ma * d + (total - ma)])
                    .sum();
                out.amplitudes[na * d + (total - na)] = acc;
            }
        }
        out
    }
}

/// Beamsplitter blocks from the eigendecomposition of the hopping matrix
/// `<n+1, N-n-1| a^dag b |n, N-n> = sqrt((n+1)(N-n))`.
pub fn bs_matrix(theta: f64, cutoff: usize) -> BeamsplitterMatrix {
    let blocks = (0..=cutoff)
        .map(|total| {
            let dim = total + 1;
            let mut h = DMatrix::<f64>::zeros(dim, dim);
            for n in 0..total {
                let v = (((n + 1) * (total - n)) as f64).sqrt();
                h[(n + 1, n)] = v;
                h[(n, n + 1)] = v;
            }
            expi_symmetric(h, theta)
        })
        .collect();
    BeamsplitterMatrix { cutoff, blocks }
}

/// Operation compared between the analytic engine and the Fock oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OracleOp {
    /// `<s|other>` against the Fock dot product.
    Overlap { other: SuperposedState },
    Displacement { mode: usize, beta: Complex64 },
    Phase { mode: usize, epsilon: f64 },
    Beamsplitter { theta: f64 },
    /// Parity probabilities of a normalized state.
    Parity { mode: usize },
    /// Cat-basis branch probabilities of a normalized state.
    CatMeasure { mode: usize, alpha: f64 },
}

impl OracleOp {
    pub fn name(&self) -> &'static str {
        match self {
            OracleOp::Overlap { .. } => "overlap",
            OracleOp::Displacement { .. } => "displacement",
            OracleOp::Phase { .. } => "phase",
            OracleOp::Beamsplitter { .. } => "beamsplitter",
            OracleOp::Parity { .. } => "parity",
            OracleOp::CatMeasure { .. } => "cat_measure",
        }
    }
}

fn max_amplitude(s: &SuperposedState) -> f64 {
    s.terms()
        .iter()
        .flat_map(|t| t.amps.iter().map(|a| a.norm()))
        .fold(0.0, f64::max)
}

fn total_amplitude(s: &SuperposedState) -> f64 {
    s.terms()
        .iter()
        .map(|t| t.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn check_tractable(s: &SuperposedState, op: &OracleOp) -> Result<()> {
    let intractable = |what: String| Error::Intractable {
        max_modes: MAX_MODES,
        max_amplitude: MAX_AMPLITUDE,
        what,
    };
    if s.n_modes() > MAX_MODES {
        return Err(intractable(format!("state has {} modes", s.n_modes())));
    }
    let mut amp = max_amplitude(s);
    match op {
        OracleOp::Overlap { other } => amp = amp.max(max_amplitude(other)),
        OracleOp::Displacement { beta, .. } => amp = amp.max(beta.norm()),
        OracleOp::CatMeasure { alpha, .. } => amp = amp.max(*alpha),
        _ => {}
    }
    if amp > MAX_AMPLITUDE + 1e-12 {
        return Err(intractable(format!("amplitude {amp} requested")));
    }
    Ok(())
}

/// Cutoff that [`oracle_check`] needs for this state and operation.
pub fn cutoff_for(s: &SuperposedState, op: &OracleOp) -> usize {
    let amp = match op {
        OracleOp::Overlap { other } => max_amplitude(s).max(max_amplitude(other)),
        OracleOp::Displacement { beta, .. } => max_amplitude(s) + beta.norm(),
        OracleOp::Beamsplitter { .. } => total_amplitude(s),
        OracleOp::CatMeasure { alpha, .. } => max_amplitude(s) + alpha / 2.0,
        _ => max_amplitude(s),
    };
    required_cutoff(amp)
}

/// Runs `op` through both the analytic engine and the Fock oracle and
/// returns the largest absolute deviation.
pub fn oracle_check(s: &SuperposedState, op: &OracleOp, cutoff: usize) -> Result<f64> {
    check_tractable(s, op)?;
    let required = cutoff_for(s, op);
    if cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    let fock = state_to_fock(s, cutoff)?;
    match op {
        OracleOp::Overlap { other } => {
            let analytic = s.inner_product(other)?;
            let oracle = fock.dot(&state_to_fock(other, cutoff)?)?;
            Ok((analytic - oracle).norm())
        }
        OracleOp::Displacement { mode, beta } => {
            let analytic = state_to_fock(&s.displace(*mode, *beta)?, cutoff)?;
            analytic.max_abs_diff(&fock.displace(*mode, *beta)?)
        }
        OracleOp::Phase { mode, epsilon } => {
            let analytic = state_to_fock(&s.phase_shift(*mode, *epsilon)?, cutoff)?;
            analytic.max_abs_diff(&fock.phase_shift(*mode, *epsilon)?)
        }
        OracleOp::Beamsplitter { theta } => {
            let analytic = state_to_fock(&s.beamsplitter(&BeamsplitterParams::new(*theta, 0, 1))?, cutoff)?;
            analytic.max_abs_diff(&fock.beamsplitter(*theta)?)
        }
        OracleOp::Parity { mode } => {
            let (even, odd) = parity_probabilities(s, *mode)?;
            let (fe, fo) = fock.parity_weights(*mode)?;
            let n = fe + fo;
            Ok((even - fe / n).abs().max((odd - fo / n).abs()))
        }
        OracleOp::CatMeasure { mode, alpha } => {
            let p = LogicalParams::new(*alpha)?;
            let records = cat_basis_branches(s, *mode, &p)?;
            let prob = |label| records.iter().find(|r| r.label == label).map_or(0.0, |r| r.probability);
            let shifted = fock.displace(*mode, Complex64::new(-alpha / 2.0, 0.0))?;
            let (fe, fo) = shifted.parity_weights(*mode)?;
            let n = fe + fo;
            Ok((prob(Parity::Even) - fe / n).abs().max((prob(Parity::Odd) - fo / n).abs()))
        }
    }
}

/// [`oracle_check`] at the smallest adequate cutoff.
pub fn oracle_check_auto(s: &SuperposedState, op: &OracleOp) -> Result<f64> {
    oracle_check(s, op, cutoff_for(s, op))
}

/// Fock-side overlap of two single-mode coherent states, for cross-checks.
pub fn fock_overlap(tau: Complex64, alpha: Complex64) -> Result<Complex64> {
    let cutoff = required_cutoff(tau.norm().max(alpha.norm()));
    coherent_to_fock(tau, cutoff)?.dot(&coherent_to_fock(alpha, cutoff)?)
}
