//! Multi-agent training: one PVM quantum actor per GS with a shared
//! centralized critic, plus classical MARL, IQL, DQN and random baselines.
//!
//! Per-GS rewards are summed into a team reward; every actor steps along
//! the same TD error. Updates happen once per batch of transitions at the
//! end of each episode.

mod actor;
mod adam;
mod checkpoint;
mod critic;
mod mlp;
mod qlearn;
mod team;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcircuit::{EncoderAxes, ShiftRule};

pub use actor::{select_action, ActorSample, QuantumActor, SoftmaxActor, LOG_PROB_FLOOR};
pub use adam::Adam;
pub use critic::{ClassicalCritic, Critic, CriticSample, QuantumCritic};
pub use mlp::{scale_features, softmax, Mlp, Trace};
pub use qlearn::{Experience, QAgent, ReplayBuffer};
pub use team::{Actor, Team};
pub use train::{epoch_rng, init_rng, train, EpochMetrics, Trainer, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Qmarl,
    Marl,
    Iql,
    Dqn,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [Self::Qmarl, Self::Marl, Self::Iql, Self::Dqn, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Qmarl => "qmarl",
            Self::Marl => "marl",
            Self::Iql => "iql",
            Self::Dqn => "dqn",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown algorithm {s:?}; expected qmarl, marl, iql, dqn or random")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticKind {
    #[default]
    Quantum,
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub gamma: f64,
    /// Transitions per actor-critic update and per DQN minibatch.
    pub batch_size: usize,
    pub epsilon_init: f64,
    pub epsilon_min: f64,
    /// ε decrease per environment step.
    pub epsilon_anneal: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    /// Rate of the IQL and DQN action-value networks.
    pub q_lr: f64,
    pub epochs: usize,
    /// Trainable layers in each actor circuit.
    pub actor_layers: usize,
    pub critic: CriticKind,
    pub critic_qubits: usize,
    pub critic_layers: usize,
    /// Hidden widths of every classical network.
    pub hidden: Vec<usize>,
    pub shift_rule: ShiftRule,
    pub encoder: EncoderAxes,
    pub replay_capacity: usize,
    /// DQN target refresh period, in minibatch updates.
    pub target_sync: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            gamma: 0.98,
            batch_size: 64,
            epsilon_init: 0.275,
            epsilon_min: 0.01,
            epsilon_anneal: 5e-5,
            actor_lr: 1e-3,
            critic_lr: 2.5e-4,
            q_lr: 1e-3,
            epochs: 10_000,
            actor_layers: 3,
            critic: CriticKind::Quantum,
            critic_qubits: 4,
            critic_layers: 3,
            hidden: vec![64, 64],
            shift_rule: ShiftRule::Half,
            encoder: EncoderAxes::AlternatingYz,
            replay_capacity: 10_000,
            target_sync: 250,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma {} outside (0, 1]", self.gamma));
        }
        for (name, v) in [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr), ("q_lr", self.q_lr)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.epsilon_min) || !(0.0..=1.0).contains(&self.epsilon_init) {
            return bad("epsilon values must lie in [0, 1]".into());
        }
        if self.epsilon_min > self.epsilon_init {
            return bad("epsilon_min exceeds epsilon_init".into());
        }
        if !(self.epsilon_anneal >= 0.0) {
            return bad("epsilon_anneal must be non-negative".into());
        }
        if self.batch_size == 0 || self.critic_qubits == 0 || self.replay_capacity == 0 {
            return bad("batch_size, critic_qubits and replay_capacity must be positive".into());
        }
        if self.hidden.contains(&0) {
            return bad("hidden widths must be positive".into());
        }
        Ok(())
    }
}

/// ε(step) = max(ε_min, ε_init − anneal·step).
pub fn epsilon(step: u64, cfg: &TrainingConfig) -> f64 {
    (cfg.epsilon_init - cfg.epsilon_anneal * step as f64).max(cfg.epsilon_min)
}
