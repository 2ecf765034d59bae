use rand::Rng;
use rayon::prelude::*;

use super::adam::Adam;
use super::mlp::{scale_features, Mlp};
use crate::error::{Error, Result};
use crate::qcircuit::{
    parameter_shift_gradient, pauli_z_expectation, CircuitLayout, Objective, Observable, ParameterVector,
    ShiftRule,
};

/// Centralized value estimate V_φ(S).
#[derive(Clone, Debug)]
pub enum Critic {
    /// V = Σ_k w_k⟨Z_k⟩ + b over a re-uploading circuit.
    Quantum(QuantumCritic),
    /// ReLU network with a scalar output.
    Classical(ClassicalCritic),
}

#[derive(Clone, Debug)]
pub struct QuantumCritic {
    layout: CircuitLayout,
    /// θ followed by the readout weights w and the offset b.
    params: Vec<f64>,
    rule: ShiftRule,
}

#[derive(Clone, Debug)]
pub struct ClassicalCritic {
    net: Mlp,
    bounds: Vec<(f64, f64)>,
}

/// A value-learning sample: states, team reward and termination.
#[derive(Clone, Debug)]
pub struct CriticSample<'a> {
    pub state: &'a [f64],
    pub reward: f64,
    pub next_state: &'a [f64],
    pub done: bool,
}

impl QuantumCritic {
    /// Circuit angles uniform on [0, 2π); readout starts at zero so V ≡ 0.
    pub fn new<R: Rng + ?Sized>(layout: CircuitLayout, rule: ShiftRule, rng: &mut R) -> Result<Self> {
        layout.validate()?;
        let mut params = ParameterVector::random(layout.param_count, rng).as_slice().to_vec();
        params.extend(std::iter::repeat_n(0.0, layout.qubits + 1));
        Ok(Self { layout, params, rule })
    }

    pub fn layout(&self) -> &CircuitLayout {
        &self.layout
    }

    fn theta(&self) -> Result<ParameterVector> {
        ParameterVector::new(self.params[..self.layout.param_count].to_vec())
    }

    fn readout(&self) -> &[f64] {
        &self.params[self.layout.param_count..]
    }

    fn expectations(&self, features: &[f64]) -> Result<Vec<f64>> {
        let state = self.layout.forward(&self.theta()?, features)?;
        (0..self.layout.qubits).map(|k| pauli_z_expectation(&state, k)).collect()
    }

    fn value(&self, features: &[f64]) -> Result<f64> {
        let z = self.expectations(features)?;
        let r = self.readout();
        Ok(z.iter().zip(r).map(|(a, b)| a * b).sum::<f64>() + r[self.layout.qubits])
    }

    fn gradient(&self, features: &[f64]) -> Result<Vec<f64>> {
        let q = self.layout.qubits;
        let w = &self.readout()[..q];
        let mut grad = if w.iter().all(|&x| x == 0.0) {
            vec![0.0; self.layout.param_count]
        } else {
            let objective = Objective {
                terms: (0..q).map(|k| (Observable::PauliZ(k), w[k])).collect(),
            };
            parameter_shift_gradient(&self.layout, &self.theta()?, features, &objective, self.rule)?
        };
        grad.extend(self.expectations(features)?);
        grad.push(1.0);
        Ok(grad)
    }
}

impl ClassicalCritic {
    pub fn new<R: Rng + ?Sized>(bounds: Vec<(f64, f64)>, hidden: &[usize], rng: &mut R) -> Result<Self> {
        let mut sizes = vec![bounds.len().max(1)];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        Ok(Self { net: Mlp::new(&sizes, rng)?, bounds })
    }

    fn input(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.bounds.len() {
            return Err(Error::Shape { expected: self.bounds.len(), actual: features.len() });
        }
        if features.is_empty() {
            return Ok(vec![0.0]);
        }
        Ok(scale_features(features, &self.bounds))
    }
}

impl Critic {
    pub fn value(&self, state: &[f64]) -> Result<f64> {
        match self {
            Critic::Quantum(c) => c.value(state),
            Critic::Classical(c) => Ok(c.net.forward(&c.input(state)?)?.output()[0]),
        }
    }

    /// ∂V/∂φ at `state`.
    pub fn gradient(&self, state: &[f64]) -> Result<Vec<f64>> {
        match self {
            Critic::Quantum(c) => c.gradient(state),
            Critic::Classical(c) => {
                let trace = c.net.forward(&c.input(state)?)?;
                let mut g = vec![0.0; c.net.params().len()];
                c.net.backward(&trace, &[1.0], &mut g)?;
                Ok(g)
            }
        }
    }

    pub fn params(&self) -> &[f64] {
        match self {
            Critic::Quantum(c) => &c.params,
            Critic::Classical(c) => c.net.params(),
        }
    }

    pub(crate) fn params_mut(&mut self) -> &mut [f64] {
        match self {
            Critic::Quantum(c) => &mut c.params,
            Critic::Classical(c) => c.net.params_mut(),
        }
    }

    /// δ = r + γ·V(S')·(1 − done) − V(S).
    pub fn td_error(&self, sample: &CriticSample<'_>, gamma: f64) -> Result<f64> {
        let next = if sample.done { 0.0 } else { self.value(sample.next_state)? };
        Ok(sample.reward + gamma * next - self.value(sample.state)?)
    }

    /// Mean squared TD error over the batch.
    pub fn loss(&self, batch: &[CriticSample<'_>], gamma: f64) -> Result<f64> {
        let d = self.td_errors(batch, gamma)?;
        Ok(d.iter().map(|x| x * x).sum::<f64>() / d.len().max(1) as f64)
    }

    pub fn td_errors(&self, batch: &[CriticSample<'_>], gamma: f64) -> Result<Vec<f64>> {
        batch.par_iter().map(|s| self.td_error(s, gamma)).collect()
    }

    /// One optimizer step on the mean squared TD error, holding V(S') fixed.
    /// Returns the TD errors before the step.
    pub fn update(&mut self, batch: &[CriticSample<'_>], gamma: f64, adam: &mut Adam) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Shape { expected: 1, actual: 0 });
        }
        let deltas = self.td_errors(batch, gamma)?;
        let grads: Vec<Option<Vec<f64>>> = batch
            .par_iter()
            .zip(&deltas)
            .map(|(s, &d)| if d == 0.0 { Ok(None) } else { self.gradient(s.state).map(Some) })
            .collect::<Result<_>>()?;
        let n = batch.len() as f64;
        let mut total = vec![0.0; self.params().len()];
        for (g, &d) in grads.iter().zip(&deltas) {
            if let Some(g) = g {
                for (t, gi) in total.iter_mut().zip(g) {
                    *t += -2.0 * d * gi / n;
                }
            }
        }
        adam.step(self.params_mut(), &total)?;
        Ok(deltas)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcircuit::EncoderAxes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quantum(seed: u64) -> Critic {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = CircuitLayout::reuploading(4, vec![(-1.0, 1.0); 6], 3, EncoderAxes::default()).unwrap();
        Critic::Quantum(QuantumCritic::new(layout, ShiftRule::Half, &mut rng).unwrap())
    }

    #[test]
    fn td_error_cases() {
        let critic = quantum(0);
        let s = [0.1; 6];
        let done = CriticSample { state: &s, reward: 0.7, next_state: &s, done: true };
        assert_eq!(critic.td_error(&done, 0.98).unwrap(), 0.7);
        let same = CriticSample { state: &s, reward: 0.0, next_state: &s, done: false };
        assert_eq!(critic.td_error(&same, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn td_error_hand_arithmetic() {
        // Classical critic whose value is its output bias only.
        let net = Mlp::from_parts(vec![1, 1], vec![0.0, 2.5]).unwrap();
        let c = Critic::Classical(ClassicalCritic { net, bounds: vec![(0.0, 1.0)] });
        let next_net = Mlp::from_parts(vec![1, 1], vec![0.0, 2.0]).unwrap();
        let next = Critic::Classical(ClassicalCritic { net: next_net, bounds: vec![(0.0, 1.0)] });
        let s = [0.5];
        let v_next = next.value(&s).unwrap();
        let delta = 1.0 + 0.98 * v_next - c.value(&s).unwrap();
        assert!((delta - 0.46).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_leaves_params() {
        let mut critic = quantum(1);
        let s = [0.3; 6];
        let before = critic.params().to_vec();
        let mut adam = Adam::new(before.len(), 0.1);
        // V ≡ 0 initially, so reward 0 gives δ = 0 everywhere.
        let batch = vec![CriticSample { state: &s, reward: 0.0, next_state: &s, done: false }; 4];
        critic.update(&batch, 0.98, &mut adam).unwrap();
        assert_eq!(critic.params(), &before[..]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut critic = quantum(5);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = critic.params().len();
        for p in critic.params_mut()[n - 5..].iter_mut() {
            *p = rng.random_range(-2.0..2.0);
        }
        let s: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = critic.gradient(&s).unwrap();
        let h = 1e-5;
        for k in 0..n {
            let mut plus = critic.clone();
            plus.params_mut()[k] += h;
            let mut minus = critic.clone();
            minus.params_mut()[k] -= h;
            let fd = (plus.value(&s).unwrap() - minus.value(&s).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7, "param {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn fixed_reward_chain_converges_to_geometric_value() {
        // One state looping on itself with reward 1: V* = 1/(1 − γ).
        let gamma = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut critic = Critic::Classical(ClassicalCritic::new(vec![(0.0, 1.0)], &[8], &mut rng).unwrap());
        let mut adam = Adam::new(critic.params().len(), 0.05);
        let s = [0.5];
        let batch = [CriticSample { state: &s, reward: 1.0, next_state: &s, done: false }];
        for _ in 0..6000 {
            critic.update(&batch, gamma, &mut adam).unwrap();
        }
        let v = critic.value(&s).unwrap();
        assert!((v - 10.0).abs() < 0.1, "{v}");
    }

    #[test]
    fn quantum_loss_non_increasing_on_frozen_batch() {
        let mut critic = quantum(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let states: Vec<Vec<f64>> = (0..8).map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let batch: Vec<CriticSample> = states
            .iter()
            .enumerate()
            .map(|(i, s)| CriticSample { state: s, reward: 0.5 + 0.1 * i as f64, next_state: s, done: true })
            .collect();
        let mut adam = Adam::new(critic.params().len(), 1e-3);
        let mut last = critic.loss(&batch, 0.98).unwrap();
        for _ in 0..10 {
            critic.update(&batch, 0.98, &mut adam).unwrap();
            let now = critic.loss(&batch, 0.98).unwrap();
            assert!(now <= last + 1e-12, "{now} > {last}");
            last = now;
        }
    }
}
