//! Line-oriented training checkpoint. Floats are written with `{:?}` so they
//! read back bit-exact; resuming then replays identically to an
//! uninterrupted run.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::actor::QuantumActor;
use super::adam::Adam;
use super::critic::Critic;
use super::mlp::Mlp;
use super::qlearn::{Experience, ReplayBuffer};
use super::team::{Actor, Team};
use super::train::Trainer;
use super::{Algorithm, TrainingConfig};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::qcircuit::{from_manifest, to_manifest};

const HEADER: &str = "qsagin-checkpoint v1";

fn bad(reason: impl Into<String>) -> Error {
    Error::Format { what: "checkpoint", reason: reason.into() }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn write_adam(out: &mut String, adam: &Adam) {
    for line in adam.to_lines() {
        writeln!(out, "{line}").unwrap();
    }
}

fn write_mlp(out: &mut String, key: &str, net: &Mlp) {
    let sizes: Vec<String> = net.sizes().iter().map(usize::to_string).collect();
    writeln!(out, "{key} {} | {}", sizes.join(","), join(net.params())).unwrap();
}

fn write_experience(out: &mut String, e: &Experience) {
    writeln!(out, "exp {} {:?} {}", e.action, e.reward, e.done).unwrap();
    writeln!(out, "s {}", join(&e.state)).unwrap();
    writeln!(out, "n {}", join(&e.next_state)).unwrap();
}

impl Trainer {
    /// Serializes learner state and the epoch counter.
    pub fn checkpoint(&self) -> String {
        let team = &self.team;
        let mut out = String::new();
        writeln!(out, "{HEADER}").unwrap();
        writeln!(out, "algorithm {}", team.algorithm.name()).unwrap();
        writeln!(out, "seed {}", self.seed).unwrap();
        writeln!(out, "next_epoch {}", self.next_epoch).unwrap();
        writeln!(out, "steps {}", team.steps).unwrap();
        writeln!(out, "begin config").unwrap();
        out.push_str(&toml::to_string(&team.config).expect("training config serializes"));
        writeln!(out, "end").unwrap();
        for (i, actor) in team.actors.iter().enumerate() {
            match actor {
                Actor::Quantum(a) => {
                    writeln!(out, "actor {i} quantum").unwrap();
                    writeln!(out, "begin circuit").unwrap();
                    out.push_str(&to_manifest(a.layout(), Some(a.params())));
                    writeln!(out, "end").unwrap();
                    write_adam(&mut out, a.optimizer());
                }
                Actor::Softmax(a) => {
                    writeln!(out, "actor {i} softmax").unwrap();
                    write_mlp(&mut out, "net", a.network());
                    write_adam(&mut out, a.optimizer());
                }
            }
        }
        if let Some((critic, adam)) = &team.critic {
            let kind = match critic {
                Critic::Quantum(_) => "quantum",
                Critic::Classical(_) => "classical",
            };
            writeln!(out, "critic {kind}").unwrap();
            writeln!(out, "params {}", join(critic.params())).unwrap();
            write_adam(&mut out, adam);
        }
        for (i, agent) in team.q_agents.iter().enumerate() {
            writeln!(out, "qagent {i}").unwrap();
            write_mlp(&mut out, "net", &agent.net);
            match &agent.target {
                Some(t) => write_mlp(&mut out, "target", t),
                None => writeln!(out, "target none").unwrap(),
            }
            writeln!(out, "updates {}", agent.updates).unwrap();
            write_adam(&mut out, &agent.adam);
            match &agent.replay {
                Some(r) => {
                    writeln!(out, "replay {} {}", r.capacity(), r.len()).unwrap();
                    for e in r.iter() {
                        write_experience(&mut out, e);
                    }
                }
                None => writeln!(out, "replay none").unwrap(),
            }
        }
        writeln!(out, "end checkpoint").unwrap();
        out
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.checkpoint()).map_err(|e| Error::io(path, e))
    }

    /// Rebuilds a trainer from [`Trainer::checkpoint`] output. `env` must be
    /// the scenario the checkpoint was trained on; shapes are checked.
    pub fn resume(env: Environment, text: &str) -> Result<Self> {
        let mut r = Reader { lines: text.lines().collect(), pos: 0 };
        if r.next()? != HEADER {
            return Err(bad(format!("missing {HEADER:?} header")));
        }
        let algorithm: Algorithm = r.value("algorithm")?;
        let seed: u64 = r.value("seed")?;
        let next_epoch: usize = r.value("next_epoch")?;
        let steps: u64 = r.value("steps")?;
        r.expect("begin config")?;
        let config: TrainingConfig =
            toml::from_str(&r.block()?).map_err(|e| bad(format!("training config: {e}")))?;

        // Fresh team of the right shapes; every learned value is overwritten below.
        let mut team = Team::new(algorithm, &env, config, &mut ChaCha8Rng::seed_from_u64(0))?;
        team.steps = steps;
        let rule = team.config.shift_rule;
        for i in 0..team.actors.len() {
            let head = r.next()?;
            match (&mut team.actors[i], head) {
                (Actor::Quantum(a), h) if h == format!("actor {i} quantum") => {
                    r.expect("begin circuit")?;
                    let (layout, params) = from_manifest(&r.block()?)?;
                    let params = params.ok_or_else(|| bad("actor circuit has no params"))?;
                    if &layout != a.layout() {
                        return Err(bad(format!("actor {i} circuit differs from the scenario")));
                    }
                    let mut restored = QuantumActor::with_params(layout, params, team.config.actor_lr, rule)?;
                    restored.set_optimizer(r.adam()?)?;
                    *a = restored;
                }
                (Actor::Softmax(a), h) if h == format!("actor {i} softmax") => {
                    let net = r.mlp("net")?;
                    a.restore(net, r.adam()?)?;
                }
                (_, h) => return Err(bad(format!("unexpected {h:?} for actor {i}"))),
            }
        }
        if let Some((critic, adam)) = team.critic.as_mut() {
            let kind = match critic {
                Critic::Quantum(_) => "quantum",
                Critic::Classical(_) => "classical",
            };
            r.expect(&format!("critic {kind}"))?;
            let params = r.floats("params")?;
            if params.len() != critic.params().len() {
                return Err(Error::Shape { expected: critic.params().len(), actual: params.len() });
            }
            critic.params_mut().copy_from_slice(&params);
            let restored = r.adam()?;
            if restored.m.len() != params.len() {
                return Err(bad("critic optimizer shape differs"));
            }
            *adam = restored;
        }
        for i in 0..team.q_agents.len() {
            r.expect(&format!("qagent {i}"))?;
            let agent = &mut team.q_agents[i];
            let net = r.mlp("net")?;
            if net.sizes() != agent.net.sizes() {
                return Err(bad(format!("q-network {i} shape differs")));
            }
            agent.net = net;
            agent.target = if r.peek()? == "target none" {
                r.pos += 1;
                None
            } else {
                Some(r.mlp("target")?)
            };
            agent.updates = r.value("updates")?;
            agent.adam = r.adam()?;
            let head = r.next()?;
            agent.replay = if head == "replay none" {
                None
            } else {
                let f: Vec<&str> = head.split_whitespace().collect();
                let ["replay", cap, len] = f.as_slice() else {
                    return Err(bad(format!("bad replay line {head:?}")));
                };
                let cap: usize = cap.parse().map_err(|_| bad("bad replay capacity"))?;
                let len: usize = len.parse().map_err(|_| bad("bad replay length"))?;
                let mut buf = ReplayBuffer::new(cap);
                for _ in 0..len {
                    buf.push(r.experience()?);
                }
                Some(buf)
            };
        }
        r.expect("end checkpoint")?;
        Ok(Self { env, team, seed, next_epoch })
    }

    pub fn load_checkpoint(env: Environment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::resume(env, &text)
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn peek(&self) -> Result<&'a str> {
        self.lines.get(self.pos).copied().ok_or_else(|| bad("unexpected end of input"))
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self.peek()?;
        self.pos += 1;
        Ok(line)
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        let line = self.next()?;
        if line != want {
            return Err(bad(format!("line {}: expected {want:?}, found {line:?}", self.pos)));
        }
        Ok(())
    }

    fn rest(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        match line.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim_start()),
            _ => Err(bad(format!("line {}: expected {key:?}, found {line:?}", self.pos))),
        }
    }

    fn value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let rest = self.rest(key)?;
        rest.parse().map_err(|_| bad(format!("bad {key} value {rest:?}")))
    }

    fn floats(&mut self, key: &str) -> Result<Vec<f64>> {
        parse_floats(self.rest(key)?)
    }

    /// Lines up to the next bare `end`.
    fn block(&mut self) -> Result<String> {
        let mut text = String::new();
        loop {
            let line = self.next()?;
            if line == "end" {
                return Ok(text);
            }
            text.push_str(line);
            text.push('\n');
        }
    }

    fn adam(&mut self) -> Result<Adam> {
        let lines = [self.next()?, self.next()?, self.next()?];
        Adam::from_lines(&lines)
    }

    fn mlp(&mut self, key: &str) -> Result<Mlp> {
        let rest = self.rest(key)?;
        let (sizes, params) = rest.split_once('|').ok_or_else(|| bad("network line lacks '|'"))?;
        let sizes = sizes
            .trim()
            .split(',')
            .map(|s| s.parse().map_err(|_| bad(format!("bad layer size {s:?}"))))
            .collect::<Result<Vec<usize>>>()?;
        Mlp::from_parts(sizes, parse_floats(params)?)
    }

    fn experience(&mut self) -> Result<Experience> {
        let head: Vec<&str> = self.rest("exp")?.split_whitespace().collect();
        let [action, reward, done] = head.as_slice() else {
            return Err(bad("bad experience line"));
        };
        Ok(Experience {
            action: action.parse().map_err(|_| bad("bad action"))?,
            reward: reward.parse().map_err(|_| bad("bad reward"))?,
            done: done.parse().map_err(|_| bad("bad done flag"))?,
            state: self.floats("s")?,
            next_state: self.floats("n")?,
        })
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|x| x.parse().map_err(|_| bad(format!("bad number {x:?}"))))
        .collect()
}
