use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{Gate, Pauli};
use super::state::{StateVector, MAX_QUBITS};
use crate::error::{Error, Result};

/// Where a rotation gate takes its angle from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    /// Scaled classical feature (encoder only).
    Feature(usize),
    /// Trainable parameter slot.
    Param(usize),
    Fixed(f64),
}

/// One instruction of a circuit program.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Pauli { pauli: Pauli, qubit: usize },
    Rotation { axis: Pauli, qubit: usize, angle: Angle },
    Controlled { pauli: Pauli, control: usize, target: usize },
    ControlledRotation { axis: Pauli, control: usize, target: usize, angle: Angle },
}

impl Op {
    pub fn angle(&self) -> Option<Angle> {
        match *self {
            Op::Rotation { angle, .. } | Op::ControlledRotation { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn param_slot(&self) -> Option<usize> {
        match self.angle() {
            Some(Angle::Param(k)) => Some(k),
            _ => None,
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Pauli { qubit, .. } | Op::Rotation { qubit, .. } => vec![qubit],
            Op::Controlled { control, target, .. } | Op::ControlledRotation { control, target, .. } => {
                vec![control, target]
            }
        }
    }

    /// Resolves the angle source against the given feature angles and parameters.
    pub fn resolve(&self, feature_angles: &[f64], params: &[f64]) -> Gate {
        let value = |a: Angle| match a {
            Angle::Feature(f) => feature_angles[f],
            Angle::Param(k) => params[k],
            Angle::Fixed(v) => v,
        };
        match *self {
            Op::Pauli { pauli, qubit } => Gate::Pauli(pauli, qubit),
            Op::Rotation { axis, qubit, angle } => Gate::Rotation { axis, qubit, angle: value(angle) },
            Op::Controlled { pauli, control, target } => Gate::Controlled { pauli, control, target },
            Op::ControlledRotation { axis, control, target, angle } => Gate::ControlledRotation {
                axis,
                control,
                target,
                angle: value(angle),
            },
        }
    }
}

/// Rotation axes used by successive encoder passes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderAxes {
    /// Every pass uses RY.
    Ry,
    /// Passes alternate RY, RZ, RY, … so consecutive passes on a qubit do not
    /// collapse into a single summed angle.
    #[default]
    AlternatingYz,
}

/// Encoder program plus trainable layers of a variational circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitLayout {
    pub qubits: usize,
    /// Per-feature (min, max) mapped affinely onto [−π, π].
    pub feature_bounds: Vec<(f64, f64)>,
    pub encoder: Vec<Op>,
    pub layers: Vec<Vec<Op>>,
    pub param_count: usize,
}

impl CircuitLayout {
    /// Re-uploading encoder (feature f drives qubit f mod q on pass f / q)
    /// followed by `layers` blocks of per-qubit RY·RZ rotations and a ring of
    /// controlled-Z entanglers.
    pub fn reuploading(
        qubits: usize,
        feature_bounds: Vec<(f64, f64)>,
        layers: usize,
        axes: EncoderAxes,
    ) -> Result<Self> {
        let encoder = feature_bounds
            .iter()
            .enumerate()
            .map(|(f, _)| {
                let pass = f / qubits.max(1);
                let axis = match axes {
                    EncoderAxes::AlternatingYz if pass % 2 == 1 => Pauli::Z,
                    _ => Pauli::Y,
                };
                Op::Rotation {
                    axis,
                    qubit: f % qubits.max(1),
                    angle: Angle::Feature(f),
                }
            })
            .collect();
        let mut slot = 0;
        let mut blocks = Vec::with_capacity(layers);
        for _ in 0..layers {
            let mut ops = Vec::with_capacity(3 * qubits);
            for q in 0..qubits {
                for axis in [Pauli::Y, Pauli::Z] {
                    ops.push(Op::Rotation { axis, qubit: q, angle: Angle::Param(slot) });
                    slot += 1;
                }
            }
            ops.extend(ring_pairs(qubits).into_iter().map(|(control, target)| Op::Controlled {
                pauli: Pauli::Z,
                control,
                target,
            }));
            blocks.push(ops);
        }
        let layout = Self {
            qubits,
            feature_bounds,
            encoder,
            layers: blocks,
            param_count: slot,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn feature_count(&self) -> usize {
        self.feature_bounds.len()
    }

    /// Checks qubit indices, angle sources and slot density.
    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(Error::Domain(format!("qubit count {} outside 1..={MAX_QUBITS}", self.qubits)));
        }
        for &(lo, hi) in &self.feature_bounds {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::Config(format!("feature bounds ({lo}, {hi}) are not an interval")));
            }
        }
        let mut seen = vec![false; self.param_count];
        for op in &self.encoder {
            if matches!(op.angle(), Some(Angle::Param(_))) {
                return Err(Error::Config("encoder gates cannot be trainable".into()));
            }
        }
        for op in self.ops() {
            let qs = op.qubits();
            if let Some(&bad) = qs.iter().find(|&&q| q >= self.qubits) {
                return Err(Error::Index { index: bad, len: self.qubits });
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Domain(format!("gate acts twice on qubit {}", qs[0])));
            }
            match op.angle() {
                Some(Angle::Feature(f)) if f >= self.feature_count() => {
                    return Err(Error::Index { index: f, len: self.feature_count() });
                }
                _ => {}
            }
        }
        for op in self.layers.iter().flatten() {
            match op.angle() {
                Some(Angle::Feature(_)) => {
                    return Err(Error::Config("trainable layers cannot read features".into()));
                }
                Some(Angle::Param(k)) => {
                    if k >= self.param_count {
                        return Err(Error::Index { index: k, len: self.param_count });
                    }
                    if std::mem::replace(&mut seen[k], true) {
                        return Err(Error::Config(format!("parameter slot {k} used twice")));
                    }
                }
                _ => {}
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("parameter slot {k} is never used")));
        }
        Ok(())
    }

    /// Encoder followed by every layer, in execution order.
    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.encoder.iter().chain(self.layers.iter().flatten())
    }

    /// Maps raw features to rotation angles in [−π, π].
    pub fn feature_angles(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.feature_count() {
            return Err(Error::Shape {
                expected: self.feature_count(),
                actual: features.len(),
            });
        }
        features
            .iter()
            .zip(&self.feature_bounds)
            .map(|(&x, &(lo, hi))| {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("non-finite feature {x}")));
                }
                Ok((-PI + TAU * (x - lo) / (hi - lo)).clamp(-PI, PI))
            })
            .collect()
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count {
            return Err(Error::Shape {
                expected: self.param_count,
                actual: params.len(),
            });
        }
        Ok(())
    }

    /// U_ENC(ζ)|0…0⟩
    pub fn encode(&self, features: &[f64]) -> Result<StateVector> {
        let angles = self.feature_angles(features)?;
        let mut state = StateVector::zero(self.qubits)?;
        for op in &self.encoder {
            state.apply(&op.resolve(&angles, &[]))?;
        }
        Ok(state)
    }

    /// Encoder then every trainable layer.
    pub fn forward(&self, params: &ParameterVector, features: &[f64]) -> Result<StateVector> {
        self.check_params(params.as_slice())?;
        let mut state = self.encode(features)?;
        self.apply_layers(&mut state, params.as_slice())?;
        Ok(state)
    }

    pub(crate) fn apply_layers(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        for op in self.layers.iter().flatten() {
            state.apply(&op.resolve(&[], params))?;
        }
        Ok(())
    }
}

fn ring_pairs(qubits: usize) -> Vec<(usize, usize)> {
    match qubits {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        q => (0..q).map(|k| (k, (k + 1) % q)).collect(),
    }
}

/// Trainable angles θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite parameter {v}")));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    /// Uniform on [0, 2π).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random_range(0.0..TAU)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcircuit::basis_probabilities;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn symmetric(n: usize) -> Vec<(f64, f64)> {
        vec![(-PI, PI); n]
    }

    #[test]
    fn zero_features_leave_ground_state() {
        let layout = CircuitLayout::reuploading(3, symmetric(10), 2, EncoderAxes::AlternatingYz).unwrap();
        let s = layout.encode(&[0.0; 10]).unwrap();
        assert_eq!(s, StateVector::zero(3).unwrap());
    }

    #[test]
    fn feature_at_pi_flips_single_qubit() {
        let layout = CircuitLayout::reuploading(1, vec![(0.0, 1.0)], 0, EncoderAxes::Ry).unwrap();
        let s = layout.encode(&[1.0]).unwrap();
        // RY(π)|0⟩ = |1⟩
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let layout = CircuitLayout::reuploading(2, symmetric(4), 1, EncoderAxes::Ry).unwrap();
        assert!(matches!(layout.encode(&[0.0; 3]), Err(Error::Shape { expected: 4, actual: 3 })));
        let p = ParameterVector::zeros(3);
        assert!(matches!(layout.forward(&p, &[0.0; 4]), Err(Error::Shape { expected: 4, actual: 3 })));
    }

    #[test]
    fn zero_layers_is_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layout = CircuitLayout::reuploading(3, symmetric(7), 0, EncoderAxes::AlternatingYz).unwrap();
        let x: Vec<f64> = (0..7).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = ParameterVector::zeros(0);
        assert_eq!(layout.forward(&p, &x).unwrap(), layout.encode(&x).unwrap());
    }

    #[test]
    fn zero_params_keep_encoded_ground_state() {
        let layout = CircuitLayout::reuploading(4, symmetric(8), 3, EncoderAxes::AlternatingYz).unwrap();
        let p = ParameterVector::zeros(layout.param_count);
        let s = layout.forward(&p, &[0.0; 8]).unwrap();
        assert_eq!(basis_probabilities(&s)[0], 1.0);
    }

    #[test]
    fn slots_are_dense_and_unique() {
        let layout = CircuitLayout::reuploading(5, symmetric(12), 3, EncoderAxes::AlternatingYz).unwrap();
        assert_eq!(layout.param_count, 30);
        let mut slots: Vec<usize> = layout.ops().filter_map(Op::param_slot).collect();
        slots.sort_unstable();
        assert_eq!(slots, (0..30).collect::<Vec<_>>());
        // Ring of five controlled-Z per layer.
        assert_eq!(layout.layers[0].iter().filter(|o| matches!(o, Op::Controlled { .. })).count(), 5);
    }

    #[test]
    fn validation_catches_bad_programs() {
        let mut layout = CircuitLayout::reuploading(2, symmetric(2), 1, EncoderAxes::Ry).unwrap();
        layout.layers[0].push(Op::Pauli { pauli: Pauli::X, qubit: 2 });
        assert!(matches!(layout.validate(), Err(Error::Index { index: 2, len: 2 })));

        let mut dup = CircuitLayout::reuploading(2, symmetric(2), 1, EncoderAxes::Ry).unwrap();
        dup.layers[0].push(Op::Rotation { axis: Pauli::X, qubit: 0, angle: Angle::Param(0) });
        assert!(dup.validate().is_err());
    }

    #[test]
    fn random_params_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = ParameterVector::random(1000, &mut rng);
        assert!(p.as_slice().iter().all(|&v| (0.0..TAU).contains(&v)));
    }
}
