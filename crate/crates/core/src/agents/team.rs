use rand::Rng;

use super::actor::{select_action, ActorSample, QuantumActor, SoftmaxActor};
use super::adam::Adam;
use super::critic::{ClassicalCritic, Critic, CriticSample, QuantumCritic};
use super::qlearn::{Experience, QAgent};
use super::train::Transition;
use super::{epsilon, Algorithm, CriticKind, TrainingConfig};
use crate::env::{Environment, GsObservation};
use crate::error::{Error, Result};
use crate::qcircuit::CircuitLayout;

#[derive(Clone, Debug)]
pub enum Actor {
    Quantum(QuantumActor),
    Softmax(SoftmaxActor),
}

impl Actor {
    pub fn probabilities(&self, features: &[f64]) -> Result<Vec<f64>> {
        match self {
            Actor::Quantum(a) => a.probabilities(features),
            Actor::Softmax(a) => a.probabilities(features),
        }
    }

    pub fn update(&mut self, batch: &[ActorSample<'_>]) -> Result<()> {
        match self {
            Actor::Quantum(a) => a.update(batch),
            Actor::Softmax(a) => a.update(batch),
        }
    }

    pub fn action_count(&self) -> usize {
        match self {
            Actor::Quantum(a) => a.action_count(),
            Actor::Softmax(a) => a.action_count(),
        }
    }
}

/// All learners of one run: per-GS actors or action-value agents, and the
/// shared critic where the algorithm has one.
#[derive(Clone, Debug)]
pub struct Team {
    pub(crate) algorithm: Algorithm,
    pub(crate) config: TrainingConfig,
    pub(crate) actors: Vec<Actor>,
    pub(crate) critic: Option<(Critic, Adam)>,
    pub(crate) q_agents: Vec<QAgent>,
    pub(crate) action_counts: Vec<usize>,
    /// Environment steps taken so far; drives the ε schedule.
    pub(crate) steps: u64,
}

impl Team {
    pub fn new<R: Rng + ?Sized>(
        algorithm: Algorithm,
        env: &Environment,
        config: TrainingConfig,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        let n = env.n_gs();
        let action_counts: Vec<usize> = (0..n).map(|i| 1usize << env.slots(i).len()).collect();
        let mut team = Self {
            algorithm,
            config,
            actors: Vec::new(),
            critic: None,
            q_agents: Vec::new(),
            action_counts,
            steps: 0,
        };
        let cfg = team.config.clone();
        match algorithm {
            Algorithm::Qmarl | Algorithm::Marl => {
                for i in 0..n {
                    let bounds = env.observation_bounds(i);
                    let actor = if algorithm == Algorithm::Qmarl {
                        let layout = CircuitLayout::reuploading(env.slots(i).len(), bounds, cfg.actor_layers, cfg.encoder)?;
                        Actor::Quantum(QuantumActor::new(layout, cfg.actor_lr, cfg.shift_rule, rng)?)
                    } else {
                        Actor::Softmax(SoftmaxActor::new(bounds, &cfg.hidden, team.action_counts[i], cfg.actor_lr, rng)?)
                    };
                    team.actors.push(actor);
                }
                let critic = match cfg.critic {
                    CriticKind::Quantum => {
                        let layout =
                            CircuitLayout::reuploading(cfg.critic_qubits, env.global_bounds(), cfg.critic_layers, cfg.encoder)?;
                        Critic::Quantum(QuantumCritic::new(layout, cfg.shift_rule, rng)?)
                    }
                    CriticKind::Classical => Critic::Classical(ClassicalCritic::new(env.global_bounds(), &cfg.hidden, rng)?),
                };
                let adam = Adam::new(critic.params().len(), cfg.critic_lr);
                team.critic = Some((critic, adam));
            }
            Algorithm::Iql | Algorithm::Dqn => {
                let replay = (algorithm == Algorithm::Dqn).then_some(cfg.replay_capacity);
                for i in 0..n {
                    team.q_agents.push(QAgent::new(
                        env.observation_bounds(i),
                        &cfg.hidden,
                        team.action_counts[i],
                        cfg.q_lr,
                        replay,
                        rng,
                    )?);
                }
            }
            Algorithm::Random => {}
        }
        Ok(team)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn actors(&self) -> &[Actor] {
        &self.actors
    }

    pub fn critic(&self) -> Option<&Critic> {
        self.critic.as_ref().map(|(c, _)| c)
    }

    pub fn q_agents(&self) -> &[QAgent] {
        &self.q_agents
    }

    /// Joint action-space size 2^q of each GS.
    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One action index per GS. `greedy` switches off exploration.
    pub fn act<R: Rng + ?Sized>(&self, obs: &[GsObservation], rng: &mut R, greedy: bool) -> Result<Vec<usize>> {
        if obs.len() != self.action_counts.len() {
            return Err(Error::Shape { expected: self.action_counts.len(), actual: obs.len() });
        }
        match self.algorithm {
            Algorithm::Qmarl | Algorithm::Marl => self
                .actors
                .iter()
                .zip(obs)
                .map(|(a, o)| select_action(&a.probabilities(&o.features)?, rng, greedy))
                .collect(),
            Algorithm::Iql | Algorithm::Dqn => {
                let eps = if greedy { 0.0 } else { epsilon(self.steps, &self.config) };
                self.q_agents.iter().zip(obs).map(|(a, o)| a.act(&o.features, eps, rng)).collect()
            }
            Algorithm::Random => Ok(self.action_counts.iter().map(|&n| rng.random_range(0..n)).collect()),
        }
    }

    /// Per-step hook: value-based agents learn here.
    pub fn observe<R: Rng + ?Sized>(&mut self, tr: &Transition, rng: &mut R) -> Result<()> {
        self.steps += 1;
        let gamma = self.config.gamma;
        let (batch, sync) = (self.config.batch_size, self.config.target_sync);
        let algorithm = self.algorithm;
        for (i, agent) in self.q_agents.iter_mut().enumerate() {
            let e = Experience {
                state: tr.observations[i].clone(),
                action: tr.actions[i],
                reward: tr.rewards[i],
                next_state: tr.next_observations[i].clone(),
                done: tr.done,
            };
            match algorithm {
                Algorithm::Iql => agent.observe_online(e, gamma)?,
                Algorithm::Dqn => agent.observe_replay(e, gamma, batch, sync, rng)?,
                _ => {}
            }
        }
        Ok(())
    }

    /// End-of-episode hook: critic step, then every actor steps along the
    /// refreshed shared TD error, once per batch of transitions.
    pub fn end_episode(&mut self, episode: &[Transition]) -> Result<()> {
        let Some((critic, adam)) = self.critic.as_mut() else {
            return Ok(());
        };
        let gamma = self.config.gamma;
        for chunk in episode.chunks(self.config.batch_size) {
            let samples: Vec<CriticSample> = chunk
                .iter()
                .map(|t| CriticSample {
                    state: &t.state,
                    reward: t.team_reward(),
                    next_state: &t.next_state,
                    done: t.done,
                })
                .collect();
            critic.update(&samples, gamma, adam)?;
            let deltas = critic.td_errors(&samples, gamma)?;
            for (i, actor) in self.actors.iter_mut().enumerate() {
                let batch: Vec<ActorSample> = chunk
                    .iter()
                    .zip(&deltas)
                    .map(|(t, &delta)| ActorSample { features: &t.observations[i], action: t.actions[i], delta })
                    .collect();
                actor.update(&batch)?;
            }
        }
        Ok(())
    }
}
