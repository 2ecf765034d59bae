//! Dense statevector simulation of variational circuits: angle encoding,
//! trainable rotation layers, Pauli-Z and basis-projector readout, and
//! parameter-shift gradients.

mod gates;
mod layout;
mod manifest;
mod measure;
mod shift;
mod state;

pub use gates::{Gate, Pauli};
pub use layout::{Angle, CircuitLayout, EncoderAxes, Op, ParameterVector};
pub use manifest::{from_manifest, to_manifest};
pub use measure::{basis_probabilities, pauli_z_expectation, Objective, Observable};
pub use shift::{parameter_shift_gradient, projector_shift_gradient, ShiftRule};
pub use state::{StateVector, MAX_QUBITS};
