use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::team::Team;
use crate::env::{Environment, ScheduleAction, StepOutcome};
use crate::error::Result;

/// One joint step as seen by the learners.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub observations: Vec<Vec<f64>>,
    pub state: Vec<f64>,
    pub actions: Vec<usize>,
    /// Per-GS reward over the best feasible utility of that step.
    pub rewards: Vec<f64>,
    pub next_observations: Vec<Vec<f64>>,
    pub next_state: Vec<f64>,
    pub done: bool,
}

impl Transition {
    pub fn team_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// Episode means over every step and GS.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Normalized reward in [0, 1].
    pub reward: f64,
    pub qos: f64,
    pub capacity: f64,
    pub residual_cubesat: f64,
    pub residual_uav: f64,
    /// Unnormalized R = U − C.
    pub raw_reward: f64,
}

/// Random stream of one epoch: the run seed selects the key, the epoch the
/// stream, so any epoch can be replayed or resumed in isolation.
pub fn epoch_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch as u64);
    rng
}

/// Random stream used once to initialize the learners of a run.
pub fn init_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}

/// Drives a [`Team`] through successive episodes of one environment.
#[derive(Clone, Debug)]
pub struct Trainer {
    pub(crate) env: Environment,
    pub(crate) team: Team,
    pub(crate) seed: u64,
    pub(crate) next_epoch: usize,
}

impl Trainer {
    pub fn new(env: Environment, team: Team, seed: u64) -> Self {
        Self { env, team, seed, next_epoch: 0 }
    }

    pub fn team(&self) -> &Team {
        &self.team
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_epoch(&self) -> usize {
        self.next_epoch
    }

    /// Plays one episode with learning, calling `on_step` after every step.
    pub fn run_epoch_with(&mut self, mut on_step: impl FnMut(usize, &StepOutcome) -> Result<()>) -> Result<EpochMetrics> {
        let epoch = self.next_epoch;
        let mut rng = epoch_rng(self.seed, epoch);
        let mut obs = self.env.reset(rng.random())?;
        let mut state = self.env.global_features();
        let mut episode = Vec::with_capacity(self.env.config().episode_steps);
        let mut sums = [0.0; 6];
        let mut count = 0usize;
        loop {
            let actions = self.team.act(&obs, &mut rng, false)?;
            let schedule = actions
                .iter()
                .zip(&obs)
                .map(|(&k, o)| ScheduleAction::from_index(k, o.coverage.len()))
                .collect::<Result<Vec<_>>>()?;
            let out = self.env.step(&schedule)?;
            on_step(episode.len(), &out)?;
            for m in &out.metrics {
                sums[0] += m.normalized_reward;
                sums[1] += m.qos;
                sums[2] += m.capacity;
                sums[3] += m.mean_residual_cubesat;
                sums[4] += m.mean_residual_uav;
                sums[5] += m.reward;
                count += 1;
            }
            let next_state = self.env.global_features();
            let tr = Transition {
                observations: obs.iter().map(|o| o.features.clone()).collect(),
                state,
                actions,
                rewards: out
                    .metrics
                    .iter()
                    .map(|m| if m.best_utility > 0.0 { m.reward / m.best_utility } else { 0.0 })
                    .collect(),
                next_observations: out.observations.iter().map(|o| o.features.clone()).collect(),
                next_state: next_state.clone(),
                done: out.done,
            };
            self.team.observe(&tr, &mut rng)?;
            episode.push(tr);
            obs = out.observations;
            state = next_state;
            if out.done {
                break;
            }
        }
        self.team.end_episode(&episode)?;
        self.next_epoch += 1;
        let n = count.max(1) as f64;
        Ok(EpochMetrics {
            epoch,
            reward: sums[0] / n,
            qos: sums[1] / n,
            capacity: sums[2] / n,
            residual_cubesat: sums[3] / n,
            residual_uav: sums[4] / n,
            raw_reward: sums[5] / n,
        })
    }

    pub fn run_epoch(&mut self) -> Result<EpochMetrics> {
        self.run_epoch_with(|_, _| Ok(()))
    }

    pub fn train(&mut self, epochs: usize) -> Result<Vec<EpochMetrics>> {
        (0..epochs).map(|_| self.run_epoch()).collect()
    }
}

/// Trains `team` for `epochs` episodes and returns the per-epoch history.
pub fn train(env: Environment, team: Team, seed: u64, epochs: usize) -> Result<(Vec<EpochMetrics>, Trainer)> {
    let mut trainer = Trainer::new(env, team, seed);
    let history = trainer.train(epochs)?;
    Ok((history, trainer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{Algorithm, TrainingConfig};
    use crate::env::preset;

    fn setup(name: &str, algorithm: Algorithm) -> Trainer {
        let env = Environment::new(preset(name).unwrap()).unwrap();
        let cfg = TrainingConfig { batch_size: 16, hidden: vec![8], ..Default::default() };
        let team = Team::new(algorithm, &env, cfg, &mut epoch_rng(1, 0)).unwrap();
        Trainer::new(env, team, 9)
    }

    #[test]
    fn epoch_metrics_are_bounded() {
        for algorithm in Algorithm::ALL {
            let mut t = setup("tiny", algorithm);
            for m in t.train(2).unwrap() {
                assert!((0.0..=1.0).contains(&m.reward), "{algorithm}: {m:?}");
                assert!((0.0..=1.0).contains(&m.residual_cubesat));
                assert!(m.qos.is_finite() && m.capacity >= 0.0);
            }
            assert_eq!(t.next_epoch(), 2);
        }
    }

    #[test]
    fn same_seed_same_history() {
        let a = setup("small", Algorithm::Qmarl).train(2).unwrap();
        let b = setup("small", Algorithm::Qmarl).train(2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn epoch_streams_differ() {
        let mut a = epoch_rng(5, 0);
        let mut b = epoch_rng(5, 1);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
        assert_eq!(epoch_rng(5, 3).random::<u64>(), epoch_rng(5, 3).random::<u64>());
    }

    #[test]
    fn team_reward_sums_agents() {
        let t = Transition {
            observations: vec![],
            state: vec![],
            actions: vec![],
            rewards: vec![0.25, 0.5],
            next_observations: vec![],
            next_state: vec![],
            done: true,
        };
        assert_eq!(t.team_reward(), 0.75);
    }

    #[test]
    fn step_hook_sees_every_step() {
        let mut t = setup("tiny", Algorithm::Random);
        let mut seen = 0;
        t.run_epoch_with(|k, out| {
            assert_eq!(k, seen);
            assert_eq!(out.actions.len(), 1);
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 64);
    }
}
