use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::{CircuitLayout, Op, ParameterVector};
use super::measure::Objective;
use super::state::StateVector;
use crate::error::{Error, Result};

/// Prefactor applied to the two shifted evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftRule {
    /// ½·(⟨O⟩₊ − ⟨O⟩₋): the exact derivative for exp(−iθΓ/2) gates.
    #[default]
    Half,
    /// ⟨O⟩₊ − ⟨O⟩₋ with no prefactor, twice the true derivative.
    Verbatim,
}

impl ShiftRule {
    fn factor(self) -> f64 {
        match self {
            ShiftRule::Half => 0.5,
            ShiftRule::Verbatim => 1.0,
        }
    }
}

fn check_supported(layout: &CircuitLayout) -> Result<()> {
    for op in layout.layers.iter().flatten() {
        if let (Op::ControlledRotation { .. }, Some(k)) = (op, op.param_slot()) {
            return Err(Error::UnsupportedGate(k));
        }
    }
    Ok(())
}

fn shifted(op: &Op, params: &[f64], slot: usize, delta: f64) -> super::Gate {
    let mut p = params.to_vec();
    p[slot] += delta;
    op.resolve(&[], &p)
}

/// Gradient of `objective` with respect to every parameter slot, from the
/// objective evaluated at θ_k ± π/2. Slots are evaluated in parallel; the
/// state before each parameterized gate is computed once and reused.
pub fn parameter_shift_gradient(
    layout: &CircuitLayout,
    params: &ParameterVector,
    features: &[f64],
    objective: &Objective,
    rule: ShiftRule,
) -> Result<Vec<f64>> {
    check_supported(layout)?;
    layout.check_params(params.as_slice())?;
    let encoded = layout.encode(features)?;
    let theta = params.as_slice();
    let ops: Vec<&Op> = layout.layers.iter().flatten().collect();

    // (slot, op index, state just before the op)
    let mut checkpoints = Vec::with_capacity(layout.param_count);
    let mut state = encoded;
    for (j, op) in ops.iter().enumerate() {
        if let Some(k) = op.param_slot() {
            checkpoints.push((k, j, state.clone()));
        }
        state.apply(&op.resolve(&[], theta))?;
    }

    let factor = rule.factor();
    let mut grad = vec![0.0; layout.param_count];
    let parts: Vec<(usize, f64)> = checkpoints
        .into_par_iter()
        .map(|(k, j, before)| -> Result<(usize, f64)> {
            let eval = |delta: f64| -> Result<f64> {
                let mut s = before.clone();
                s.apply(&shifted(ops[j], theta, k, delta))?;
                for op in &ops[j + 1..] {
                    s.apply(&op.resolve(&[], theta))?;
                }
                objective.evaluate(&s)
            };
            let plus = eval(FRAC_PI_2)?;
            let minus = eval(-FRAC_PI_2)?;
            Ok((k, factor * (plus - minus)))
        })
        .collect::<Result<_>>()?;
    for (k, g) in parts {
        grad[k] = g;
    }
    Ok(grad)
}

/// Probability of basis state `basis` and its parameter-shift gradient.
///
/// Produces the same shifted expectations as [`parameter_shift_gradient`]
/// with a projector objective, but evaluates each one as
/// |⟨e_k|U_after · G(θ ± π/2) · ψ_before⟩|², with the bra ⟨e_k|U_after and
/// ψ_before obtained by walking the circuit backwards once. Cost is linear in
/// the number of parameters instead of quadratic.
pub fn projector_shift_gradient(
    layout: &CircuitLayout,
    params: &ParameterVector,
    features: &[f64],
    basis: usize,
    rule: ShiftRule,
) -> Result<(f64, Vec<f64>)> {
    check_supported(layout)?;
    let mut psi = layout.forward(params, features)?;
    let dim = psi.amplitudes().len();
    if basis >= dim {
        return Err(Error::Index { index: basis, len: dim });
    }
    let prob = psi.amplitudes()[basis].norm_sqr();

    let mut bra_amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
    bra_amps[basis] = num_complex::Complex64::new(1.0, 0.0);
    let mut bra = StateVector::from_amplitudes(bra_amps)?;

    let theta = params.as_slice();
    let factor = rule.factor();
    let mut grad = vec![0.0; layout.param_count];
    for op in layout.layers.iter().flatten().rev() {
        let gate = op.resolve(&[], theta);
        psi.apply_inverse(&gate)?;
        if let Some(k) = op.param_slot() {
            let eval = |delta: f64| -> Result<f64> {
                let mut s = psi.clone();
                s.apply(&shifted(op, theta, k, delta))?;
                Ok(bra.inner(&s).norm_sqr())
            };
            let plus = eval(FRAC_PI_2)?;
            let minus = eval(-FRAC_PI_2)?;
            grad[k] = factor * (plus - minus);
        }
        bra.apply_inverse(&gate)?;
    }
    Ok((prob, grad))
}
