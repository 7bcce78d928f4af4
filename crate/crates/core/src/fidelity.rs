//! Fidelities of exact gate outputs against their logical ideals, and the
//! CNOT fidelity-versus-amplitude sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{cnot, Bit, CnotBackend, GateOutcome, LogicalParams};
use crate::measurement::{BranchPolicy, Brancher};
use crate::state::{overlap_exponent, SuperposedState};

/// `|<a|b>|^2` for normalized states (inputs are normalized on the fly).
pub fn fidelity(a: &SuperposedState, b: &SuperposedState) -> Result<f64> {
    let ab = a.inner_product(b)?;
    let f = ab.norm_sqr() / (a.norm_sqr() * b.norm_sqr());
    Ok(f.clamp(0.0, 1.0))
}

/// `<ideal| rho |ideal>` where `rho` is `state` with every mode from
/// `data_modes` on traced out.
pub fn reduced_fidelity(state: &SuperposedState, data_modes: usize, ideal: &SuperposedState) -> Result<f64> {
    if ideal.n_modes() != data_modes || data_modes > state.n_modes() {
        return Err(Error::ModeCountMismatch {
            left: data_modes,
            right: ideal.n_modes(),
        });
    }
    // <ideal|a_j^data> for each term of the state
    let proj: Vec<Complex64> = state
        .terms()
        .iter()
        .map(|t| {
            ideal
                .terms()
                .iter()
                .map(|d| {
                    let e: Complex64 = d
                        .amps
                        .iter()
                        .zip(&t.amps[..data_modes])
                        .map(|(&x, &y)| overlap_exponent(x, y))
                        .sum();
                    d.coeff.conj() * e.exp()
                })
                .sum()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, tj) in state.terms().iter().enumerate() {
        for (k, tk) in state.terms().iter().enumerate() {
            let env: Complex64 = tk.amps[data_modes..]
                .iter()
                .zip(&tj.amps[data_modes..])
                .map(|(&x, &y)| overlap_exponent(x, y))
                .sum();
            acc += tj.coeff * tk.coeff.conj() * proj[j] * proj[k].conj() * env.exp();
        }
    }
    let f = acc.re / (state.norm_sqr() * ideal.norm_sqr());
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity of a gate outcome's data modes against an ideal pure state.
pub fn outcome_fidelity(outcome: &GateOutcome, ideal: &SuperposedState) -> Result<f64> {
    reduced_fidelity(&outcome.state, outcome.data_modes, ideal)
}

fn basis_amp(bit: Bit, p: &LogicalParams) -> f64 {
    match bit {
        Bit::Zero => 0.0,
        Bit::One => p.alpha(),
    }
}

/// Two-mode code state `|c>|t>`.
pub fn basis_state(c: Bit, t: Bit, p: &LogicalParams) -> SuperposedState {
    SuperposedState::coherent_real(&[basis_amp(c, p), basis_amp(t, p)]).expect("finite amplitudes")
}

/// Ideal CNOT output on computational inputs: `|c>|t XOR c>`.
pub fn ideal_cnot_output(c: Bit, t: Bit, p: &LogicalParams) -> SuperposedState {
    let t_out = if c == Bit::One { t.flip() } else { t };
    basis_state(c, t_out, p)
}

/// Logical single-qubit input `mu|0> + nu|alpha>` (normalized when encoded).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalInput {
    pub label: String,
    pub mu: Complex64,
    pub nu: Complex64,
}

impl LogicalInput {
    pub fn basis(bit: Bit) -> Self {
        let (mu, nu, label) = match bit {
            Bit::Zero => (1.0, 0.0, "0"),
            Bit::One => (0.0, 1.0, "1"),
        };
        Self {
            label: label.into(),
            mu: Complex64::new(mu, 0.0),
            nu: Complex64::new(nu, 0.0),
        }
    }

    /// Parses `0`, `1`, `+` or `-`.
    pub fn from_symbol(c: char) -> Option<Self> {
        let (mu, nu) = match c {
            '0' => return Some(Self::basis(Bit::Zero)),
            '1' => return Some(Self::basis(Bit::One)),
            '+' => (1.0, 1.0),
            '-' => (1.0, -1.0),
            _ => return None,
        };
        Some(Self {
            label: c.to_string(),
            mu: Complex64::new(mu, 0.0),
            nu: Complex64::new(nu, 0.0),
        })
    }

    fn kets(&self, p: &LogicalParams) -> [(Complex64, f64); 2] {
        [(self.mu, 0.0), (self.nu, p.alpha())]
    }
}

/// Normalized product state `(mu|0>+nu|alpha>)(g|0>+t|alpha>)`.
pub fn product_input(control: &LogicalInput, target: &LogicalInput, p: &LogicalParams) -> Result<SuperposedState> {
    let mut terms = Vec::with_capacity(4);
    for (cc, ca) in control.kets(p) {
        for (tc, ta) in target.kets(p) {
            terms.push(crate::state::CoherentTerm::new(
                cc * tc,
                vec![Complex64::new(ca, 0.0), Complex64::new(ta, 0.0)],
            ));
        }
    }
    SuperposedState::new(2, terms)?.compact(0.0).normalize()
}

/// Ideal CNOT on `(mu|0>+nu|alpha>)(g|0>+t|alpha>)`:
/// `mu g|00> + mu t|0a> + nu t|a0> + nu g|aa>`, normalized.
pub fn ideal_cnot_superposition(control: &LogicalInput, target: &LogicalInput, p: &LogicalParams) -> Result<SuperposedState> {
    let a = p.amplitude();
    let z = Complex64::new(0.0, 0.0);
    let terms = vec![
        crate::state::CoherentTerm::new(control.mu * target.mu, vec![z, z]),
        crate::state::CoherentTerm::new(control.mu * target.nu, vec![z, a]),
        crate::state::CoherentTerm::new(control.nu * target.nu, vec![a, z]),
        crate::state::CoherentTerm::new(control.nu * target.mu, vec![a, a]),
    ];
    SuperposedState::new(2, terms)?.compact(0.0).normalize()
}

/// Input ensemble for the averaged fidelity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// `|00>, |01>, |10>, |11>`, uniformly weighted.
    Basis4,
    Custom(Vec<(LogicalInput, LogicalInput)>),
}

impl Ensemble {
    pub fn inputs(&self) -> Vec<(LogicalInput, LogicalInput)> {
        match self {
            Ensemble::Basis4 => [Bit::Zero, Bit::One]
                .iter()
                .flat_map(|&c| [Bit::Zero, Bit::One].map(|t| (LogicalInput::basis(c), LogicalInput::basis(t))))
                .collect(),
            Ensemble::Custom(v) => v.clone(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.inputs()
            .iter()
            .map(|(c, t)| format!("{}{}", c.label, t.label))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub alpha_values: Vec<f64>,
    pub backend: CnotBackend,
    /// `Enumerate` weights every branch by its probability; a fixed branch post-selects.
    pub branches: BranchPolicy,
    pub ensemble: Ensemble,
}

impl SweepConfig {
    /// Exact beamsplitters everywhere, branch enumeration, basis inputs.
    pub fn exact_default(alpha_values: Vec<f64>) -> Self {
        Self {
            alpha_values,
            backend: CnotBackend::exact(),
            branches: BranchPolicy::Enumerate,
            ensemble: Ensemble::Basis4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&a) = self.alpha_values.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidAlpha(a));
        }
        if let Ensemble::Custom(v) = &self.ensemble {
            if v.is_empty() {
                return Err(Error::InvalidConfig("custom ensemble is empty".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFidelity {
    pub label: String,
    pub fidelity: f64,
    pub renorm_fidelity: f64,
    /// Branch-averaged fidelity against each of `|00>, |01>, |10>, |11>`.
    pub basis_fidelities: [f64; 4],
    /// Total probability of the followed branches.
    pub branch_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub alpha: f64,
    pub avg_fidelity: f64,
    pub renorm_fidelity: f64,
    pub per_input_fidelities: Vec<InputFidelity>,
    pub leakage: f64,
}

const BASIS_ORDER: [(Bit, Bit); 4] = [
    (Bit::Zero, Bit::Zero),
    (Bit::Zero, Bit::One),
    (Bit::One, Bit::Zero),
    (Bit::One, Bit::One),
];

/// CNOT fidelities at one amplitude, averaged over the configured ensemble.
pub fn cnot_fidelity_point(alpha: f64, cfg: &SweepConfig) -> Result<FidelityPoint> {
    let p = LogicalParams::new(alpha)?;
    let basis: Vec<SuperposedState> = BASIS_ORDER.iter().map(|&(c, t)| basis_state(c, t, &p)).collect();
    let mut per_input = Vec::new();
    for (control, target) in cfg.ensemble.inputs() {
        let label = format!("{}{}", control.label, target.label);
        let input = product_input(&control, &target, &p)?;
        let ideal = ideal_cnot_superposition(&control, &target, &p)?;
        let mut brancher = Brancher::new(cfg.branches);
        let outcomes = cnot(&input, 0, 1, &p, cfg.backend, &mut brancher).map_err(|e| {
            Error::InvalidConfig(format!("cnot failed at alpha = {alpha}, input {label}: {e}"))
        })?;
        let weight: f64 = outcomes.iter().map(|o| o.probability).sum();
        let mut f_correct = 0.0;
        let mut f_basis = [0.0; 4];
        for o in &outcomes {
            let w = o.probability / weight;
            f_correct += w * outcome_fidelity(o, &ideal)?;
            for (acc, b) in f_basis.iter_mut().zip(&basis) {
                *acc += w * outcome_fidelity(o, b)?;
            }
        }
        let total: f64 = f_basis.iter().sum();
        let renorm = if total > 0.0 { (f_correct / total).min(1.0) } else { 0.0 };
        if !f_correct.is_finite() || !renorm.is_finite() {
            return Err(Error::NonFinite("fidelity"));
        }
        per_input.push(InputFidelity {
            label,
            fidelity: f_correct,
            renorm_fidelity: renorm,
            basis_fidelities: f_basis,
            branch_weight: weight,
        });
    }
    let n = per_input.len() as f64;
    let mean = |f: &dyn Fn(&InputFidelity) -> f64| per_input.iter().map(f).sum::<f64>() / n;
    let avg_fidelity = mean(&|i| i.fidelity);
    let renorm_fidelity = mean(&|i| i.renorm_fidelity);
    let leakage = mean(&|i| (1.0 - i.basis_fidelities.iter().sum::<f64>()).clamp(0.0, 1.0));
    Ok(FidelityPoint {
        alpha,
        avg_fidelity,
        renorm_fidelity,
        per_input_fidelities: per_input,
        leakage,
    })
}

/// One [`FidelityPoint`] per configured amplitude, in input order.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<FidelityPoint>> {
    cfg.validate()?;
    cfg.alpha_values
        .par_iter()
        .map(|&a| cnot_fidelity_point(a, cfg))
        .collect()
}

/// Beamsplitter overlap `<g, b| U |g, b>` against its small-angle phase form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseApproximation {
    pub exact: Complex64,
    pub approx: Complex64,
    pub abs_error: f64,
}

/// `exp[-(g^2+b^2)(1-cos t) + 2i sin t g b]` versus `exp[2i t g b]`.
pub fn bs_phase_approximation_error(gamma: f64, beta: f64, theta: f64) -> PhaseApproximation {
    let exact = Complex64::new(
        -(gamma * gamma + beta * beta) * (1.0 - theta.cos()),
        2.0 * theta.sin() * gamma * beta,
    )
    .exp();
    let approx = Complex64::from_polar(1.0, 2.0 * theta * gamma * beta);
    PhaseApproximation {
        exact,
        approx,
        abs_error: (exact - approx).norm(),
    }
}

/// `%.12g`-style formatting.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

/// CSV with header `alpha,avg_fidelity,renorm_fidelity,leakage,f_<input>...`.
pub fn points_to_csv(points: &[FidelityPoint], ensemble: &Ensemble) -> String {
    let mut out = String::from("alpha,avg_fidelity,renorm_fidelity,leakage");
    for l in ensemble.labels() {
        out.push_str(",f_");
        out.push_str(&l);
    }
    out.push('\n');
    for pt in points {
        let mut row = vec![
            fmt_sig12(pt.alpha),
            fmt_sig12(pt.avg_fidelity),
            fmt_sig12(pt.renorm_fidelity),
            fmt_sig12(pt.leakage),
        ];
        row.extend(pt.per_input_fidelities.iter().map(|i| fmt_sig12(i.fidelity)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
