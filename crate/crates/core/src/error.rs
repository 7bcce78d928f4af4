use thiserror::Error;

/// Errors produced by the state engine, gate constructions and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },

    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("two-mode operation needs distinct modes, got {0} twice")]
    RepeatedMode(usize),

    #[error("a state needs at least one mode and one term")]
    EmptyState,

    #[error("term {term} has {found} amplitudes, expected {expected}")]
    TermLength {
        term: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("state has zero norm (all terms cancel)")]
    ZeroNorm,

    #[error("state is not normalized (norm squared {0})")]
    Unnormalized(f64),

    #[error("amplitude {amplitude} on mode {mode} is neither 0 nor alpha = {alpha}")]
    NotInCodeSpace {
        mode: usize,
        amplitude: num_complex::Complex64,
        alpha: f64,
    },

    #[error("logical amplitude must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("measurement branch {label} has probability {probability:e}")]
    ZeroProbabilityBranch { label: String, probability: f64 },

    #[error("Fock cutoff {cutoff} too small, need at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("Fock oracle is limited to {max_modes} modes and |amplitude| <= {max_amplitude}; {what}")]
    Intractable {
        max_modes: usize,
        max_amplitude: f64,
        what: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
