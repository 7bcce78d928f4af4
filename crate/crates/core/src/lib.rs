//! Quantum logic on coherent-state qubits.
//!
//! Qubits are encoded as `|0>_L = |0>` and `|1>_L = |alpha>`. States are
//! finite superpositions of multimode coherent states ([`state`]), on which a
//! weak beamsplitter acts as a controlled sign, a cat-state resource plus a
//! parity measurement ([`measurement`]) teleports a Hadamard, and the two
//! combine into a CNOT ([`gates`]). [`fidelity`] sweeps the CNOT fidelity
//! against the amplitude, and [`fock`] is a truncated photon-number oracle
//! used to cross-check the analytic engine.

pub mod cli;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod gates;
pub mod measurement;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use gates::{Bit, CnotBackend, CzBackend, GateOutcome, LogicalParams};
pub use measurement::{BranchPolicy, Brancher, MeasurementRecord, Parity};
pub use state::{coherent_overlap, BeamsplitterParams, CoherentTerm, SuperposedState};
