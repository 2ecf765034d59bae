use std::collections::VecDeque;

use rand::Rng;

use super::adam::Adam;
use super::mlp::{scale_features, Mlp};
use crate::error::{Error, Result};

/// One stored experience of a single agent.
#[derive(Clone, Debug, PartialEq)]
pub struct Experience {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO replay memory.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Experience>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { capacity: capacity.max(1), items: VecDeque::with_capacity(capacity.min(1 << 16)) }
    }

    pub fn push(&mut self, e: Experience) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(e);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Experience> {
        self.items.iter()
    }

    /// `n` uniform draws with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<&Experience> {
        (0..n).map(|_| &self.items[rng.random_range(0..self.items.len())]).collect()
    }
}

/// Action-value network for one agent, used by both IQL and DQN.
#[derive(Clone, Debug)]
pub struct QAgent {
    pub(crate) net: Mlp,
    /// Frozen copy for bootstrapped targets (DQN only).
    pub(crate) target: Option<Mlp>,
    pub(crate) bounds: Vec<(f64, f64)>,
    pub(crate) adam: Adam,
    pub(crate) replay: Option<ReplayBuffer>,
    pub(crate) updates: u64,
}

impl QAgent {
    pub fn new<R: Rng + ?Sized>(
        bounds: Vec<(f64, f64)>,
        hidden: &[usize],
        actions: usize,
        lr: f64,
        replay_capacity: Option<usize>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut sizes = vec![bounds.len().max(1)];
        sizes.extend_from_slice(hidden);
        sizes.push(actions);
        let net = Mlp::new(&sizes, rng)?;
        let adam = Adam::new(net.params().len(), lr);
        let target = replay_capacity.map(|_| net.clone());
        Ok(Self {
            net,
            target,
            bounds,
            adam,
            replay: replay_capacity.map(ReplayBuffer::new),
            updates: 0,
        })
    }

    pub fn action_count(&self) -> usize {
        self.net.outputs()
    }

    pub fn replay(&self) -> Option<&ReplayBuffer> {
        self.replay.as_ref()
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

    pub fn q_values(&self, features: &[f64]) -> Result<Vec<f64>> {
        Ok(self.net.forward(&self.input(features)?)?.output().to_vec())
    }

    /// Uniform action with probability ε, else the greedy one (lowest index on ties).
    pub fn act<R: Rng + ?Sized>(&self, features: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
        if rng.random::<f64>() < epsilon {
            return Ok(rng.random_range(0..self.action_count()));
        }
        let q = self.q_values(features)?;
        let mut best = 0;
        for (k, &v) in q.iter().enumerate() {
            if v > q[best] {
                best = k;
            }
        }
        Ok(best)
    }

    fn bootstrap(&self, e: &Experience, gamma: f64) -> Result<f64> {
        if e.done {
            return Ok(e.reward);
        }
        let net = self.target.as_ref().unwrap_or(&self.net);
        let next = net.forward(&self.input(&e.next_state)?)?;
        let max = next.output().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(e.reward + gamma * max)
    }

    /// One step on ½·mean (Q(s,a) − y)² over the given experiences.
    pub fn learn(&mut self, batch: &[&Experience], gamma: f64) -> Result<()> {
        if batch.is_empty() {
            return Ok(());
        }
        let n = batch.len() as f64;
        let mut grad = vec![0.0; self.net.params().len()];
        for e in batch {
            let y = self.bootstrap(e, gamma)?;
            let trace = self.net.forward(&self.input(&e.state)?)?;
            let q = trace.output();
            if e.action >= q.len() {
                return Err(Error::Index { index: e.action, len: q.len() });
            }
            let mut d = vec![0.0; q.len()];
            d[e.action] = (q[e.action] - y) / n;
            self.net.backward(&trace, &d, &mut grad)?;
        }
        self.adam.step(self.net.params_mut(), &grad)?;
        self.updates += 1;
        Ok(())
    }

    /// IQL: learn from the latest experience only.
    pub fn observe_online(&mut self, e: Experience, gamma: f64) -> Result<()> {
        self.learn(&[&e], gamma)
    }

    /// DQN: store, learn from a replayed minibatch once enough is stored,
    /// and refresh the target every `target_sync` updates.
    pub fn observe_replay<R: Rng + ?Sized>(
        &mut self,
        e: Experience,
        gamma: f64,
        batch: usize,
        target_sync: u64,
        rng: &mut R,
    ) -> Result<()> {
        let replay = self
            .replay
            .as_mut()
            .ok_or_else(|| Error::State("agent has no replay memory".into()))?;
        replay.push(e);
        if replay.len() < batch {
            return Ok(());
        }
        let sample: Vec<Experience> = replay.sample(batch, rng).into_iter().cloned().collect();
        let refs: Vec<&Experience> = sample.iter().collect();
        self.learn(&refs, gamma)?;
        if target_sync > 0 && self.updates % target_sync == 0 {
            self.target = Some(self.net.clone());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exp(action: usize, reward: f64) -> Experience {
        Experience { state: vec![0.5], action, reward, next_state: vec![0.5], done: true }
    }

    #[test]
    fn replay_is_fifo() {
        let mut r = ReplayBuffer::new(2);
        r.push(exp(0, 0.0));
        r.push(exp(1, 0.0));
        r.push(exp(2, 0.0));
        let actions: Vec<usize> = r.iter().map(|e| e.action).collect();
        assert_eq!(actions, vec![1, 2]);
    }

    #[test]
    fn epsilon_one_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let agent = QAgent::new(vec![(0.0, 1.0)], &[8], 4, 1e-3, Some(100), &mut rng).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[agent.act(&[0.5], 1.0, &mut rng).unwrap()] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn online_learning_finds_best_arm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut agent = QAgent::new(vec![(0.0, 1.0)], &[16], 3, 0.01, None, &mut rng).unwrap();
        for _ in 0..3000 {
            let a = agent.act(&[0.5], 0.3, &mut rng).unwrap();
            let r = [0.1, 0.9, 0.4][a];
            agent.observe_online(exp(a, r), 0.9).unwrap();
        }
        assert_eq!(agent.act(&[0.5], 0.0, &mut rng).unwrap(), 1);
        let q = agent.q_values(&[0.5]).unwrap();
        assert!((q[1] - 0.9).abs() < 0.05, "{q:?}");
    }

    #[test]
    fn replay_learning_finds_best_arm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut agent = QAgent::new(vec![(0.0, 1.0)], &[16], 3, 0.01, Some(500), &mut rng).unwrap();
        for _ in 0..1500 {
            let a = agent.act(&[0.5], 0.3, &mut rng).unwrap();
            let r = [0.2, 0.1, 0.8][a];
            agent.observe_replay(exp(a, r), 0.9, 16, 50, &mut rng).unwrap();
        }
        assert_eq!(agent.act(&[0.5], 0.0, &mut rng).unwrap(), 2);
    }
}
