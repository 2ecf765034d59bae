use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }
}

/// A concrete gate with its angle resolved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Pauli(Pauli, usize),
    /// exp(−iθΓ/2)
    Rotation { axis: Pauli, qubit: usize, angle: f64 },
    /// Applies Γ to `target` when `control` is set.
    Controlled { pauli: Pauli, control: usize, target: usize },
    ControlledRotation { axis: Pauli, control: usize, target: usize, angle: f64 },
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rotation { axis, qubit, angle } => Gate::Rotation { axis, qubit, angle: -angle },
            Gate::ControlledRotation { axis, control, target, angle } => {
                Gate::ControlledRotation { axis, control, target, angle: -angle }
            }
            // Paulis are self-inverse.
            other => other,
        }
    }
}
