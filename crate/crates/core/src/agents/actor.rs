use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rayon::prelude::*;

use super::adam::Adam;
use super::mlp::{scale_features, softmax, Mlp};
use crate::error::{Error, Result};
use crate::qcircuit::{basis_probabilities, projector_shift_gradient, CircuitLayout, ParameterVector, ShiftRule};

/// Probabilities below this are clamped before taking the log.
pub const LOG_PROB_FLOOR: f64 = 1e-12;

/// One (observation, action, TD error) triple for a policy-gradient step.
#[derive(Clone, Debug)]
pub struct ActorSample<'a> {
    pub features: &'a [f64],
    pub action: usize,
    pub delta: f64,
}

/// Samples an index from `probs`, or takes the argmax when `greedy`.
/// Ties in greedy mode go to the lowest index.
pub fn select_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R, greedy: bool) -> Result<usize> {
    if probs.is_empty() {
        return Err(Error::Shape { expected: 1, actual: 0 });
    }
    if greedy {
        let mut best = 0;
        for (k, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = k;
            }
        }
        return Ok(best);
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::Domain(format!("policy distribution: {e}")))?;
    Ok(dist.sample(rng))
}

/// PVM policy: each basis state of the q-qubit register is one joint
/// scheduling action, with probability |⟨e_k|ψ⟩|².
#[derive(Clone, Debug)]
pub struct QuantumActor {
    layout: CircuitLayout,
    params: ParameterVector,
    adam: Adam,
    rule: ShiftRule,
}

impl QuantumActor {
    /// Parameters drawn uniformly from [0, 2π).
    pub fn new<R: Rng + ?Sized>(layout: CircuitLayout, lr: f64, rule: ShiftRule, rng: &mut R) -> Result<Self> {
        let params = ParameterVector::random(layout.param_count, rng);
        Self::with_params(layout, params, lr, rule)
    }

    pub fn with_params(layout: CircuitLayout, params: ParameterVector, lr: f64, rule: ShiftRule) -> Result<Self> {
        layout.validate()?;
        if params.len() != layout.param_count {
            return Err(Error::Shape { expected: layout.param_count, actual: params.len() });
        }
        let adam = Adam::new(params.len(), lr);
        Ok(Self { layout, params, adam, rule })
    }

    pub fn layout(&self) -> &CircuitLayout {
        &self.layout
    }

    pub fn params(&self) -> &ParameterVector {
        &self.params
    }

    pub fn qubits(&self) -> usize {
        self.layout.qubits
    }

    pub fn action_count(&self) -> usize {
        1 << self.layout.qubits
    }

    pub(crate) fn optimizer(&self) -> &Adam {
        &self.adam
    }

    pub(crate) fn set_optimizer(&mut self, adam: Adam) -> Result<()> {
        if adam.m.len() != self.params.len() {
            return Err(Error::Shape { expected: self.params.len(), actual: adam.m.len() });
        }
        self.adam = adam;
        Ok(())
    }

    /// π(·|S_i; θ_i) over all 2^q actions.
    pub fn probabilities(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(basis_probabilities(&self.layout.forward(&self.params, features)?))
    }

    /// ∇_θ log π(k|S_i; θ_i) from the parameter-shift gradient of the
    /// selected basis probability.
    pub fn log_prob_gradient(&self, features: &[f64], action: usize) -> Result<Vec<f64>> {
        let (p, grad) = projector_shift_gradient(&self.layout, &self.params, features, action, self.rule)?;
        let inv = 1.0 / p.max(LOG_PROB_FLOOR);
        Ok(grad.into_iter().map(|g| g * inv).collect())
    }

    /// Mean of δ·∇log π over the batch; the direction `update` ascends.
    pub fn policy_gradient(&self, batch: &[ActorSample<'_>]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Shape { expected: 1, actual: 0 });
        }
        let per: Vec<Option<Vec<f64>>> = batch
            .par_iter()
            .map(|s| {
                if s.delta == 0.0 {
                    Ok(None)
                } else {
                    self.log_prob_gradient(s.features, s.action).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let mut total = vec![0.0; self.params.len()];
        for (s, g) in batch.iter().zip(per) {
            if let Some(g) = g {
                for (t, gi) in total.iter_mut().zip(g) {
                    *t += s.delta * gi;
                }
            }
        }
        let n = batch.len() as f64;
        Ok(total.into_iter().map(|t| t / n).collect())
    }

    /// One optimizer step ascending the δ-weighted log-likelihood.
    pub fn update(&mut self, batch: &[ActorSample<'_>]) -> Result<()> {
        let g = self.policy_gradient(batch)?;
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        self.adam.step(self.params.as_mut_slice(), &neg)
    }
}

/// Classical baseline actor: ReLU network with a normalized-exponential
/// output over all 2^q actions.
#[derive(Clone, Debug)]
pub struct SoftmaxActor {
    net: Mlp,
    bounds: Vec<(f64, f64)>,
    adam: Adam,
}

impl SoftmaxActor {
    pub fn new<R: Rng + ?Sized>(
        bounds: Vec<(f64, f64)>,
        hidden: &[usize],
        actions: usize,
        lr: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let mut sizes = vec![bounds.len().max(1)];
        sizes.extend_from_slice(hidden);
        sizes.push(actions);
        let net = Mlp::new(&sizes, rng)?;
        let adam = Adam::new(net.params().len(), lr);
        Ok(Self { net, bounds, adam })
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    pub(crate) fn restore(&mut self, net: Mlp, adam: Adam) -> Result<()> {
        if net.sizes() != self.net.sizes() || adam.m.len() != net.params().len() {
            return Err(Error::Format { what: "checkpoint", reason: "actor network shape differs".into() });
        }
        self.net = net;
        self.adam = adam;
        Ok(())
    }

    pub(crate) fn optimizer(&self) -> &Adam {
        &self.adam
    }

    pub fn action_count(&self) -> usize {
        self.net.outputs()
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

    pub fn probabilities(&self, features: &[f64]) -> Result<Vec<f64>> {
        let trace = self.net.forward(&self.input(features)?)?;
        Ok(softmax(trace.output()))
    }

    pub fn policy_gradient(&self, batch: &[ActorSample<'_>]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::Shape { expected: 1, actual: 0 });
        }
        let mut grad = vec![0.0; self.net.params().len()];
        let n = batch.len() as f64;
        for s in batch {
            if s.delta == 0.0 {
                continue;
            }
            let trace = self.net.forward(&self.input(s.features)?)?;
            let probs = softmax(trace.output());
            if s.action >= probs.len() {
                return Err(Error::Index { index: s.action, len: probs.len() });
            }
            // ∂ log softmax_k / ∂ logits = e_k − π
            let mut d: Vec<f64> = probs.iter().map(|p| -p * s.delta / n).collect();
            d[s.action] += s.delta / n;
            self.net.backward(&trace, &d, &mut grad)?;
        }
        Ok(grad)
    }

    pub fn update(&mut self, batch: &[ActorSample<'_>]) -> Result<()> {
        let g = self.policy_gradient(batch)?;
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        self.adam.step(self.net.params_mut(), &neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcircuit::{Angle, EncoderAxes, Op, Pauli};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ry_chain(n: usize) -> CircuitLayout {
        CircuitLayout {
            qubits: 1,
            feature_bounds: vec![],
            encoder: vec![],
            layers: (0..n)
                .map(|k| vec![Op::Rotation { axis: Pauli::Y, qubit: 0, angle: Angle::Param(k) }])
                .collect(),
            param_count: n,
        }
    }

    #[test]
    fn empty_circuit_always_picks_zero() {
        let layout = CircuitLayout::reuploading(2, vec![], 0, EncoderAxes::default()).unwrap();
        let actor = QuantumActor::with_params(layout, ParameterVector::zeros(0), 1e-3, ShiftRule::Half).unwrap();
        let p = actor.probabilities(&[]).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(select_action(&p, &mut rng, false).unwrap(), 0);
        }
    }

    #[test]
    fn single_qubit_is_bernoulli() {
        let params = ParameterVector::new(vec![0.4, 1.1, -0.2]).unwrap();
        let actor = QuantumActor::with_params(ry_chain(3), params, 1e-3, ShiftRule::Half).unwrap();
        let p = actor.probabilities(&[]).unwrap();
        let oracle = ((0.4f64 + 1.1 - 0.2) / 2.0).sin().powi(2);
        assert!((p[1] - oracle).abs() < 1e-12);
    }

    #[test]
    fn probabilities_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for q in 1..=5 {
            let bounds = vec![(-1.0, 1.0); 2 * q + 1];
            let layout = CircuitLayout::reuploading(q, bounds, 3, EncoderAxes::default()).unwrap();
            let actor = QuantumActor::new(layout, 1e-3, ShiftRule::Half, &mut rng).unwrap();
            let f: Vec<f64> = (0..2 * q + 1).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = actor.probabilities(&f).unwrap();
            assert_eq!(p.len(), 1 << q);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn greedy_is_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&[0.1, 0.7, 0.2, 0.0], &mut rng, true).unwrap(), 1);
        assert!(select_action(&[], &mut rng, true).is_err());
    }

    #[test]
    fn uniform_sampling_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[select_action(&[0.25; 4], &mut rng, false).unwrap()] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * 0.25).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn zero_rate_or_zero_delta_leaves_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layout = CircuitLayout::reuploading(2, vec![(-1.0, 1.0); 3], 2, EncoderAxes::default()).unwrap();
        let mut actor = QuantumActor::new(layout.clone(), 0.0, ShiftRule::Half, &mut rng).unwrap();
        let before = actor.params().clone();
        let f = [0.2, -0.4, 0.9];
        actor.update(&[ActorSample { features: &f, action: 2, delta: 1.5 }]).unwrap();
        assert_eq!(actor.params(), &before);
        let mut actor = QuantumActor::with_params(layout, before.clone(), 0.1, ShiftRule::Half).unwrap();
        actor.update(&[ActorSample { features: &f, action: 2, delta: 0.0 }]).unwrap();
        assert_eq!(actor.params(), &before);
    }

    #[test]
    fn policy_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let layout = CircuitLayout::reuploading(3, vec![(-1.0, 1.0); 4], 2, EncoderAxes::default()).unwrap();
        let actor = QuantumActor::new(layout.clone(), 1e-3, ShiftRule::Half, &mut rng).unwrap();
        let feats: Vec<Vec<f64>> = (0..6).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let batch: Vec<ActorSample> = feats
            .iter()
            .map(|f| ActorSample { features: f, action: rng.random_range(0..8), delta: rng.random_range(-1.0..1.0) })
            .collect();
        let objective = |p: &ParameterVector| -> f64 {
            let a = QuantumActor::with_params(layout.clone(), p.clone(), 0.0, ShiftRule::Half).unwrap();
            batch
                .iter()
                .map(|s| s.delta * a.probabilities(s.features).unwrap()[s.action].ln())
                .sum::<f64>()
                / batch.len() as f64
        };
        let g = actor.policy_gradient(&batch).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..g.len())
            .map(|k| {
                let mut p = actor.params().as_slice().to_vec();
                p[k] += h;
                let plus = objective(&ParameterVector::new(p.clone()).unwrap());
                p[k] -= 2.0 * h;
                let minus = objective(&ParameterVector::new(p).unwrap());
                (plus - minus) / (2.0 * h)
            })
            .collect();
        let dot: f64 = g.iter().zip(&fd).map(|(a, b)| a * b).sum();
        let na = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nb = fd.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(1.0 - dot / (na * nb) < 1e-4, "cosine distance {}", 1.0 - dot / (na * nb));
    }

    #[test]
    fn bandit_learns_rewarded_action() {
        // One qubit, two trainable rotations; reward 1 only for action 1.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let layout = CircuitLayout::reuploading(1, vec![], 1, EncoderAxes::default()).unwrap();
        let mut actor = QuantumActor::with_params(
            layout,
            ParameterVector::new(vec![0.3, 0.2]).unwrap(),
            0.05,
            ShiftRule::Half,
        )
        .unwrap();
        for _ in 0..500 {
            let p = actor.probabilities(&[]).unwrap();
            let batch: Vec<ActorSample> = (0..16)
                .map(|_| {
                    let a = select_action(&p, &mut rng, false).unwrap();
                    ActorSample { features: &[], action: a, delta: if a == 1 { 1.0 } else { 0.0 } }
                })
                .collect();
            actor.update(&batch).unwrap();
        }
        let p = actor.probabilities(&[]).unwrap();
        assert!(p[1] > 0.9, "{p:?}");
    }

    #[test]
    fn softmax_actor_normalized_and_learns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut actor = SoftmaxActor::new(vec![(0.0, 1.0); 2], &[16, 16], 4, 0.01, &mut rng).unwrap();
        let f = [0.3, 0.8];
        let p = actor.probabilities(&f).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for _ in 0..300 {
            let p = actor.probabilities(&f).unwrap();
            let batch: Vec<ActorSample> = (0..16)
                .map(|_| {
                    let a = select_action(&p, &mut rng, false).unwrap();
                    ActorSample { features: &f, action: a, delta: if a == 2 { 1.0 } else { 0.0 } }
                })
                .collect();
            actor.update(&batch).unwrap();
        }
        assert!(actor.probabilities(&f).unwrap()[2] > 0.9);
    }
}
