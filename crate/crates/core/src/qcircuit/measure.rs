use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::Result;

/// Measurement whose expectation the circuit reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Z on one qubit, identity elsewhere. Expectation in [−1, 1].
    PauliZ(usize),
    /// |e_k⟩⟨e_k|. Expectation in [0, 1].
    Projector(usize),
}

/// ⟨ψ|P_Z^k|ψ⟩ = Σ (−1)^{bit k} |α|².
pub fn pauli_z_expectation(state: &StateVector, qubit: usize) -> Result<f64> {
    state.check_qubit(qubit)?;
    let mask = 1usize << qubit;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum())
}

/// |α_k|² for every basis index k.
pub fn basis_probabilities(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

impl Observable {
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        match *self {
            Observable::PauliZ(q) => pauli_z_expectation(state, q),
            Observable::Projector(k) => state
                .amplitudes()
                .get(k)
                .map(|a| a.norm_sqr())
                .ok_or(crate::Error::Index { index: k, len: state.amplitudes().len() }),
        }
    }
}

/// Fixed linear functional Σ w·⟨O⟩ of observables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub terms: Vec<(Observable, f64)>,
}

impl Objective {
    pub fn single(obs: Observable) -> Self {
        Self { terms: vec![(obs, 1.0)] }
    }

    pub fn evaluate(&self, state: &StateVector) -> Result<f64> {
        self.terms
            .iter()
            .map(|(o, w)| Ok(w * o.expectation(state)?))
            .sum()
    }
}

impl From<Observable> for Objective {
    fn from(obs: Observable) -> Self {
        Objective::single(obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcircuit::{Gate, Pauli};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn z_on_basis_states() {
        let mut s = StateVector::zero(1).unwrap();
        assert_eq!(pauli_z_expectation(&s, 0).unwrap(), 1.0);
        s.apply(&Gate::Pauli(Pauli::X, 0)).unwrap();
        assert_eq!(pauli_z_expectation(&s, 0).unwrap(), -1.0);
        assert!(pauli_z_expectation(&s, 1).is_err());
    }

    #[test]
    fn z_after_ry_is_cosine() {
        for theta in [0.3, 1.1, 2.5] {
            let mut s = StateVector::zero(1).unwrap();
            s.apply(&Gate::Rotation { axis: Pauli::Y, qubit: 0, angle: theta }).unwrap();
            assert!((pauli_z_expectation(&s, 0).unwrap() - f64::cos(theta)).abs() < 1e-14);
        }
    }

    #[test]
    fn probability_examples() {
        assert_eq!(basis_probabilities(&StateVector::zero(3).unwrap())[0], 1.0);
        let mut s = StateVector::zero(2).unwrap();
        for q in 0..2 {
            s.apply(&Gate::Rotation { axis: Pauli::Y, qubit: q, angle: FRAC_PI_2 }).unwrap();
        }
        for p in basis_probabilities(&s) {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn z_is_one_minus_twice_set_mass(seed in any::<u64>(), q in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = StateVector::random(4, &mut rng).unwrap();
            let probs = basis_probabilities(&s);
            prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let set: f64 = probs.iter().enumerate().filter(|(i, _)| i >> q & 1 == 1).map(|(_, p)| p).sum();
            let z = pauli_z_expectation(&s, q).unwrap();
            prop_assert!((-1.0..=1.0).contains(&z));
            prop_assert!((z - (1.0 - 2.0 * set)).abs() < 1e-12);
        }
    }
}
