//! Logical gates on coherent-state qubits: `|0>_L = |0>`, `|1>_L = |alpha>`.
//!
//! The two-qubit gate is a weakly transmitting beamsplitter with
//! `theta alpha^2 = pi/2`, the Hadamard is teleported through a cat resource
//! and a cat-basis measurement, and the CNOT is `H_t CZ H_t`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{cat_basis_measure, Brancher, MeasurementRecord, Parity};
use crate::state::{check_mode, BeamsplitterParams, SuperposedState, DEFAULT_COMPACT_TOL};

/// Amplitudes within this distance of 0 or alpha count as code states.
pub const CODE_SPACE_TOL: f64 = 1e-9;

/// Logical-one amplitude of the encoding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalParams {
    alpha: f64,
}

impl LogicalParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self { alpha })
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.alpha, 0.0)
    }

    /// Beamsplitter angle giving a controlled sign: `pi / (2 alpha^2)`.
    pub fn cz_theta(&self) -> f64 {
        PI / (2.0 * self.alpha * self.alpha)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Bit::Zero),
            '1' => Some(Bit::One),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

/// Single-mode code state `|0>` or `|alpha>`.
pub fn encode_qubit(bit: Bit, p: &LogicalParams) -> SuperposedState {
    let a = match bit {
        Bit::Zero => 0.0,
        Bit::One => p.alpha,
    };
    SuperposedState::coherent_real(&[a]).expect("one finite amplitude")
}

/// Normalized `mu|0> + nu|alpha>`.
pub fn encode_superposition(mu: Complex64, nu: Complex64, p: &LogicalParams) -> Result<SuperposedState> {
    SuperposedState::single_mode(&[(mu, Complex64::new(0.0, 0.0)), (nu, p.amplitude())])?.normalize()
}

fn code_bit(a: Complex64, mode: usize, p: &LogicalParams) -> Result<Bit> {
    if a.norm() <= CODE_SPACE_TOL {
        Ok(Bit::Zero)
    } else if (a - p.amplitude()).norm() <= CODE_SPACE_TOL {
        Ok(Bit::One)
    } else {
        Err(Error::NotInCodeSpace {
            mode,
            amplitude: a,
            alpha: p.alpha,
        })
    }
}

/// `X = U(pi) D(-alpha)`.
///
/// `U(pi)` is photon-number parity, applied as an exact amplitude negation.
pub fn bit_flip(s: &SuperposedState, mode: usize, p: &LogicalParams) -> Result<SuperposedState> {
    s.displace(mode, -p.amplitude())?.parity(mode)
}

/// Phase shift by `epsilon = phi / alpha^2`; exact optics, approximate logic.
pub fn phase_rotation_exact(s: &SuperposedState, mode: usize, phi: f64, p: &LogicalParams) -> Result<SuperposedState> {
    s.phase_shift(mode, phi / (p.alpha * p.alpha))
}

/// Logical `R_phi`: multiplies logical-one terms by `e^{i phi}`.
pub fn phase_rotation_ideal(s: &SuperposedState, mode: usize, phi: f64, p: &LogicalParams) -> Result<SuperposedState> {
    let phase = Complex64::from_polar(1.0, phi);
    let one = Complex64::new(1.0, 0.0);
    check_mode(mode, s.n_modes())?;
    for t in s.terms() {
        code_bit(t.amps[mode], mode, p)?;
    }
    s.map_mode(mode, |a| {
        let factor = if a.norm() <= CODE_SPACE_TOL { one } else { phase };
        (a, factor)
    })
}

/// Physical controlled sign: beamsplitter at `theta = pi/(2 alpha^2)`.
pub fn controlled_sign(s: &SuperposedState, mode_a: usize, mode_b: usize, p: &LogicalParams) -> Result<SuperposedState> {
    s.beamsplitter(&BeamsplitterParams::new(p.cz_theta(), mode_a, mode_b))
}

/// Logical CZ: negates terms with both modes at alpha.
///
/// The code states are not orthogonal, so this coefficient map changes the
/// norm by `O(e^{-alpha^2/2})`; the result is left unnormalized.
pub fn controlled_sign_ideal(s: &SuperposedState, mode_a: usize, mode_b: usize, p: &LogicalParams) -> Result<SuperposedState> {
    check_mode(mode_a, s.n_modes())?;
    check_mode(mode_b, s.n_modes())?;
    if mode_a == mode_b {
        return Err(Error::RepeatedMode(mode_a));
    }
    let mut terms = Vec::with_capacity(s.n_terms());
    for t in s.terms() {
        let both = code_bit(t.amps[mode_a], mode_a, p)? == Bit::One
            && code_bit(t.amps[mode_b], mode_b, p)? == Bit::One;
        let mut t = t.clone();
        if both {
            t.coeff = -t.coeff;
        }
        terms.push(t);
    }
    SuperposedState::new(s.n_modes(), terms)
}

/// Exactly normalized `(|0> + |alpha>)` for `Zero`, `(|0> - |alpha>)` for `One`.
pub fn ideal_hadamard_output(bit: Bit, p: &LogicalParams) -> SuperposedState {
    let sign = match bit {
        Bit::Zero => 1.0,
        Bit::One => -1.0,
    };
    encode_superposition(Complex64::new(1.0, 0.0), Complex64::new(sign, 0.0), p)
        .expect("cat states have nonzero norm")
}

/// Which CZ a composite gate uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CzBackend {
    /// The beamsplitter itself.
    Exact,
    /// The logical sign flip; requires code-space amplitudes on both modes.
    Ideal,
}

impl CzBackend {
    pub fn name(self) -> &'static str {
        match self {
            CzBackend::Exact => "exact",
            CzBackend::Ideal => "ideal",
        }
    }
}

pub fn apply_cz(
    s: &SuperposedState,
    mode_a: usize,
    mode_b: usize,
    p: &LogicalParams,
    backend: CzBackend,
) -> Result<SuperposedState> {
    match backend {
        CzBackend::Exact => controlled_sign(s, mode_a, mode_b, p),
        CzBackend::Ideal => controlled_sign_ideal(s, mode_a, mode_b, p),
    }
}

/// CZ choice for each of the three two-mode interactions in the CNOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnotBackend {
    pub first_hadamard: CzBackend,
    pub central: CzBackend,
    pub second_hadamard: CzBackend,
}

impl CnotBackend {
    pub fn uniform(cz: CzBackend) -> Self {
        Self {
            first_hadamard: cz,
            central: cz,
            second_hadamard: cz,
        }
    }

    /// Beamsplitter wherever one appears.
    pub fn exact() -> Self {
        Self::uniform(CzBackend::Exact)
    }

    pub fn ideal() -> Self {
        Self::uniform(CzBackend::Ideal)
    }
}

/// One line of a gate trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub op: String,
    pub modes: Vec<usize>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub outcome: Option<String>,
    pub probability: Option<f64>,
}

impl TraceEvent {
    fn new(op: &str, modes: Vec<usize>) -> Self {
        Self {
            op: op.to_string(),
            modes,
            params: BTreeMap::new(),
            outcome: None,
            probability: None,
        }
    }

    fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Result of one branch of a gate that involves measurements.
///
/// Modes `0..data_modes` are the logical qubits, with indices stable across
/// gate calls. Measured resource modes that stay entangled with the data
/// (possible with the exact beamsplitter) are kept after them as discarded
/// environment modes; nothing acts on those again, so tracing them out
/// happens only when computing fidelities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub state: SuperposedState,
    pub data_modes: usize,
    /// Probability of this branch sequence.
    pub probability: f64,
    pub flips_applied: usize,
    pub measurement_records: Vec<MeasurementRecord>,
    pub trace: Vec<TraceEvent>,
}

impl GateOutcome {
    /// Wraps a normalized pure state with no history.
    pub fn start(state: SuperposedState) -> Result<Self> {
        let state = state.normalize()?;
        Ok(Self {
            data_modes: state.n_modes(),
            state,
            probability: 1.0,
            flips_applied: 0,
            measurement_records: Vec::new(),
            trace: Vec::new(),
        })
    }

    pub fn env_modes(&self) -> usize {
        self.state.n_modes() - self.data_modes
    }

    fn check_data_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.data_modes {
            Err(Error::ModeOutOfRange {
                mode,
                n_modes: self.data_modes,
            })
        } else {
            Ok(())
        }
    }

    /// Applies a CZ between two data modes.
    pub fn cz(&self, mode_a: usize, mode_b: usize, p: &LogicalParams, backend: CzBackend) -> Result<Self> {
        self.check_data_mode(mode_a)?;
        self.check_data_mode(mode_b)?;
        let mut next = self.clone();
        next.state = apply_cz(&self.state, mode_a, mode_b, p, backend)?.normalize()?;
        next.trace.push(
            TraceEvent::new("cz", vec![mode_a, mode_b])
                .param("backend", backend.name())
                .param("theta", p.cz_theta()),
        );
        Ok(next)
    }
}

/// Measurement-based Hadamard on `mode` of a pure state.
pub fn hadamard_via_cat(
    s: &SuperposedState,
    mode: usize,
    p: &LogicalParams,
    backend: CzBackend,
    brancher: &mut Brancher,
) -> Result<Vec<GateOutcome>> {
    hadamard_step(&GateOutcome::start(s.clone())?, mode, p, backend, brancher)
}

/// Measurement-based Hadamard continuing from an earlier outcome.
///
/// A cat `(|0> + |alpha>)/N` is appended as the highest mode, the CZ acts on
/// (data, resource), and the data mode is measured in the cat basis. The
/// result lives on the resource mode, which then takes over the data index;
/// an odd outcome is corrected by a bit flip. The measured mode is dropped
/// when it factors out exactly, otherwise it joins the environment.
pub fn hadamard_step(
    start: &GateOutcome,
    mode: usize,
    p: &LogicalParams,
    backend: CzBackend,
    brancher: &mut Brancher,
) -> Result<Vec<GateOutcome>> {
    start.check_data_mode(mode)?;
    let resource = start.state.n_modes();
    let cat = ideal_hadamard_output(Bit::Zero, p);
    let joint = apply_cz(&start.state.tensor(&cat), mode, resource, p, backend)?.normalize()?;
    let mut trace = start.trace.clone();
    trace.push(TraceEvent::new("inject_cat", vec![resource]).param("alpha", p.alpha));
    trace.push(
        TraceEvent::new("cz", vec![mode, resource])
            .param("backend", backend.name())
            .param("theta", p.cz_theta()),
    );

    let records = cat_basis_measure(&joint, mode, p, brancher)?;
    let mut out = Vec::with_capacity(records.len());
    for record in records {
        let mut trace = trace.clone();
        let mut measured = TraceEvent::new("cat_measure", vec![mode]);
        measured.outcome = Some(record.label.label().to_string());
        measured.probability = Some(record.probability);
        trace.push(measured);

        let mut state = record.post_state.swap_modes(mode, resource)?;
        let mut flips = start.flips_applied;
        if record.label == Parity::Odd {
            state = bit_flip(&state, mode, p)?;
            flips += 1;
            trace.push(TraceEvent::new("bit_flip", vec![mode]));
        }
        let factored = state.factor_out_mode(resource, DEFAULT_COMPACT_TOL)?;
        let dropped = factored.is_some();
        state = match factored {
            Some((rest, _)) => rest,
            None => state,
        };
        state = state.compact(DEFAULT_COMPACT_TOL).normalize()?;
        trace.push(TraceEvent::new("discard", vec![resource]).param("factored", dropped));

        let mut records = start.measurement_records.clone();
        let probability = start.probability * record.probability;
        records.push(record);
        out.push(GateOutcome {
            state,
            data_modes: start.data_modes,
            probability,
            flips_applied: flips,
            measurement_records: records,
            trace,
        });
    }
    Ok(out)
}

/// CNOT as `H_t CZ(c, t) H_t` with cat-resource Hadamards.
///
/// Returns one outcome per followed branch combination.
pub fn cnot(
    s: &SuperposedState,
    control: usize,
    target: usize,
    p: &LogicalParams,
    backend: CnotBackend,
    brancher: &mut Brancher,
) -> Result<Vec<GateOutcome>> {
    check_mode(control, s.n_modes())?;
    check_mode(target, s.n_modes())?;
    if control == target {
        return Err(Error::RepeatedMode(control));
    }
    let first = hadamard_step(&GateOutcome::start(s.clone())?, target, p, backend.first_hadamard, brancher)?;
    let mut out = Vec::new();
    for o in first {
        let mid = o.cz(control, target, p, backend.central)?;
        out.extend(hadamard_step(&mid, target, p, backend.second_hadamard, brancher)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::BranchPolicy;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fid(a: &SuperposedState, b: &SuperposedState) -> f64 {
        a.normalize().unwrap().inner_product(&b.normalize().unwrap()).unwrap().norm_sqr()
    }

    #[test]
    fn encoding_and_overlap() {
        let p = LogicalParams::new(3.0).unwrap();
        let zero = encode_qubit(Bit::Zero, &p);
        let one = encode_qubit(Bit::One, &p);
        assert_eq!(zero.terms()[0].amps[0], c(0.0, 0.0));
        assert_eq!(one.terms()[0].amps[0], c(3.0, 0.0));
        assert_abs_diff_eq!(zero.inner_product(&one).unwrap().re, (-4.5f64).exp(), epsilon = 1e-16);
        assert!(LogicalParams::new(0.0).is_err());
        assert!(LogicalParams::new(f64::NAN).is_err());
    }

    #[test]
    fn bit_flip_swaps_code_states() {
        let p = LogicalParams::new(2.5).unwrap();
        let zero = encode_qubit(Bit::Zero, &p);
        let one = encode_qubit(Bit::One, &p);
        let flipped = bit_flip(&zero, 0, &p).unwrap();
        assert_abs_diff_eq!((flipped.terms()[0].amps[0] - p.amplitude()).norm(), 0.0);
        assert_abs_diff_eq!((flipped.terms()[0].coeff - c(1.0, 0.0)).norm(), 0.0);
        let back = bit_flip(&one, 0, &p).unwrap();
        assert_abs_diff_eq!(back.terms()[0].amps[0].norm(), 0.0);

        let s = encode_superposition(c(0.6, 0.0), c(0.8, 0.0), &p).unwrap();
        let want = encode_superposition(c(0.8, 0.0), c(0.6, 0.0), &p).unwrap();
        assert_abs_diff_eq!(fid(&bit_flip(&s, 0, &p).unwrap(), &want), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_rotations() {
        let p = LogicalParams::new(10.0).unwrap();
        let one = encode_qubit(Bit::One, &p);
        let phi = PI / 2.0;
        let exact = phase_rotation_exact(&one, 0, phi, &p).unwrap();
        let ideal = phase_rotation_ideal(&one, 0, phi, &p).unwrap();
        let z = ideal.inner_product(&exact).unwrap();
        let eps = phi / 100.0;
        assert_abs_diff_eq!(z.norm(), (-100.0 * (1.0 - eps.cos())).exp(), epsilon = 1e-14);
        assert!(z.norm() > 0.987);
        assert!(z.arg().abs() < 1e-3);

        let zero = encode_qubit(Bit::Zero, &p);
        assert_eq!(phase_rotation_exact(&zero, 0, phi, &p).unwrap(), zero);

        let cat = ideal_hadamard_output(Bit::Zero, &p);
        let turned = phase_rotation_ideal(&cat, 0, PI, &p).unwrap();
        assert_abs_diff_eq!(fid(&turned, &ideal_hadamard_output(Bit::One, &p)), 1.0, epsilon = 1e-12);
        let full = phase_rotation_ideal(&cat, 0, 2.0 * PI, &p).unwrap();
        assert_abs_diff_eq!(full.inner_product(&cat).unwrap().re, 1.0, epsilon = 1e-12);

        let p3 = LogicalParams::new(3.0).unwrap();
        let plus = ideal_hadamard_output(Bit::Zero, &p3);
        let r = phase_rotation_ideal(&plus, 0, PI / 3.0, &p3).unwrap();
        // <0|r> / <0|plus> in the non-orthogonal basis: solve via the two coefficients directly
        let ratio = r.terms()[1].coeff / r.terms()[0].coeff;
        assert_abs_diff_eq!((ratio - Complex64::from_polar(1.0, PI / 3.0)).norm(), 0.0, epsilon = 1e-14);

        let off = SuperposedState::coherent_real(&[1.0]).unwrap();
        assert!(matches!(phase_rotation_ideal(&off, 0, 0.1, &p3), Err(Error::NotInCodeSpace { .. })));
    }

    #[test]
    fn controlled_sign_examples() {
        let p = LogicalParams::new(20.0).unwrap();
        let vac = SuperposedState::vacuum(2).unwrap();
        assert_eq!(controlled_sign(&vac, 0, 1, &p).unwrap(), vac);

        let aa = SuperposedState::coherent_real(&[20.0, 20.0]).unwrap();
        let z = aa.scale(c(-1.0, 0.0)).inner_product(&controlled_sign(&aa, 0, 1, &p).unwrap()).unwrap();
        assert!(z.norm() >= 0.99);
        assert!(z.arg().abs() < 0.05);

        let a0 = SuperposedState::coherent_real(&[20.0, 0.0]).unwrap();
        let z = a0.inner_product(&controlled_sign(&a0, 0, 1, &p).unwrap()).unwrap();
        assert!(z.norm() >= 0.99);
        assert!(z.arg().abs() < 0.05);
    }

    #[test]
    fn ideal_controlled_sign_truth_table() {
        let p = LogicalParams::new(3.0).unwrap();
        let aa = SuperposedState::coherent_real(&[3.0, 3.0]).unwrap();
        assert_eq!(controlled_sign_ideal(&aa, 0, 1, &p).unwrap().terms()[0].coeff, c(-1.0, 0.0));
        let zb = SuperposedState::coherent_real(&[0.0, 3.0]).unwrap();
        assert_eq!(controlled_sign_ideal(&zb, 0, 1, &p).unwrap(), zb);

        let plus = SuperposedState::single_mode(&[(c(1.0, 0.0), c(0.0, 0.0)), (c(1.0, 0.0), c(3.0, 0.0))]).unwrap();
        let out = controlled_sign_ideal(&plus.tensor(&plus), 0, 1, &p).unwrap();
        let signs: Vec<f64> = out.terms().iter().map(|t| t.coeff.re).collect();
        assert_eq!(signs, vec![1.0, 1.0, 1.0, -1.0]);

        let off = SuperposedState::coherent_real(&[1.0, 3.0]).unwrap();
        assert!(controlled_sign_ideal(&off, 0, 1, &p).is_err());
    }

    #[test]
    fn cat_outputs_are_orthogonal() {
        let p = LogicalParams::new(4.0).unwrap();
        let plus = ideal_hadamard_output(Bit::Zero, &p);
        let minus = ideal_hadamard_output(Bit::One, &p);
        assert_abs_diff_eq!(plus.inner_product(&minus).unwrap().norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.norm_sqr(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hadamard_examples() {
        let p = LogicalParams::new(6.0).unwrap();
        let zero = encode_qubit(Bit::Zero, &p);
        let mut even = Brancher::new(BranchPolicy::Even);
        let out = hadamard_via_cat(&zero, 0, &p, CzBackend::Ideal, &mut even).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].state.n_modes(), 1);
        assert_eq!(out[0].flips_applied, 0);
        assert_abs_diff_eq!(fid(&out[0].state, &ideal_hadamard_output(Bit::Zero, &p)), 1.0, epsilon = 1e-12);

        let plus = ideal_hadamard_output(Bit::Zero, &p);
        let out = hadamard_via_cat(&plus, 0, &p, CzBackend::Ideal, &mut even).unwrap();
        assert!(fid(&out[0].state, &zero) >= 1.0 - 1e-6);

        let one = encode_qubit(Bit::One, &p);
        let mut odd = Brancher::new(BranchPolicy::Odd);
        let out = hadamard_via_cat(&one, 0, &p, CzBackend::Ideal, &mut odd).unwrap();
        assert_eq!(out[0].flips_applied, 1);
        assert_abs_diff_eq!(fid(&out[0].state, &ideal_hadamard_output(Bit::One, &p)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hadamard_branch_probabilities_on_code_states() {
        for &alpha in &[4.0, 6.0] {
            let p = LogicalParams::new(alpha).unwrap();
            let exact_even = 0.5 * (1.0 + (-alpha * alpha / 2.0f64).exp());
            for bit in [Bit::Zero, Bit::One] {
                let mut b = Brancher::new(BranchPolicy::Enumerate);
                let out = hadamard_via_cat(&encode_qubit(bit, &p), 0, &p, CzBackend::Ideal, &mut b).unwrap();
                assert_eq!(out.len(), 2);
                assert_abs_diff_eq!(out[0].probability, exact_even, epsilon = 1e-13);
                assert_abs_diff_eq!(out[0].probability + out[1].probability, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn exact_hadamard_keeps_entangled_resource_as_environment() {
        let p = LogicalParams::new(3.0).unwrap();
        let mut b = Brancher::new(BranchPolicy::Enumerate);
        let out = hadamard_via_cat(&encode_qubit(Bit::One, &p), 0, &p, CzBackend::Exact, &mut b).unwrap();
        assert_eq!(out.len(), 2);
        for o in &out {
            assert_eq!(o.data_modes, 1);
            assert_eq!(o.env_modes(), 1);
            assert_abs_diff_eq!(o.state.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cnot_mode_checks() {
        let p = LogicalParams::new(6.0).unwrap();
        let s = SuperposedState::vacuum(2).unwrap();
        let mut b = Brancher::new(BranchPolicy::Even);
        assert!(matches!(
            cnot(&s, 1, 1, &p, CnotBackend::ideal(), &mut b),
            Err(Error::RepeatedMode(1))
        ));
        assert!(cnot(&s, 0, 2, &p, CnotBackend::ideal(), &mut b).is_err());
    }

    #[test]
    fn ideal_cnot_flips_target_for_logical_one_control() {
        let p = LogicalParams::new(6.0).unwrap();
        let s = SuperposedState::coherent_real(&[6.0, 0.0]).unwrap();
        let want = SuperposedState::coherent_real(&[6.0, 6.0]).unwrap();
        let mut b = Brancher::new(BranchPolicy::Enumerate);
        let out = cnot(&s, 0, 1, &p, CnotBackend::ideal(), &mut b).unwrap();
        assert_eq!(out.len(), 4);
        let total: f64 = out.iter().map(|o| o.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        for o in &out {
            assert_eq!(o.state.n_modes(), 2);
            assert!(fid(&o.state, &want) >= 1.0 - 1e-6);
        }
    }
}
