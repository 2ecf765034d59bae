use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::agents::TrainingConfig;
use crate::env::{preset, ScenarioConfig};
use crate::error::{Error, Result};

/// Per-GS action-space size |A| = 2^q, stored as q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionDim(pub u32);

impl ActionDim {
    pub fn qubits(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ActionDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.0)
    }
}

/// Accepts `16`, `2^4` or `65536`-style powers of two.
impl FromStr for ActionDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Usage(format!("action dimension {s:?} is not a power of two such as 2^4 or 16"));
        let s = s.trim();
        if let Some(exp) = s.strip_prefix("2^") {
            let q: u32 = exp.parse().map_err(|_| err())?;
            return if (1..=24).contains(&q) { Ok(Self(q)) } else { Err(err()) };
        }
        let n: u64 = s.parse().map_err(|_| err())?;
        if n < 2 || !n.is_power_of_two() || n.trailing_zeros() > 24 {
            return Err(err());
        }
        Ok(Self(n.trailing_zeros()))
    }
}

/// Built-in scenario whose every GS has action space `dim`.
pub fn preset_for_dim(dim: ActionDim) -> Option<&'static str> {
    match dim.0 {
        1 => Some("single"),
        2 => Some("tiny"),
        4 => Some("small"),
        8 => Some("extended"),
        16 => Some("paper"),
        _ => None,
    }
}

/// Training settings shipped with each built-in scenario. Rates are ten
/// times the defaults (same actor/critic ratio) so the short epoch budgets
/// converge; everything else keeps the defaults.
pub fn preset_training(name: &str) -> Result<TrainingConfig> {
    let epochs = match name {
        "single" | "tiny" => 200,
        "small" | "extended" => 2000,
        "paper" => 10_000,
        other => return Err(Error::Usage(format!("unknown preset {other:?}"))),
    };
    Ok(TrainingConfig { actor_lr: 1e-2, critic_lr: 2.5e-3, epochs, ..TrainingConfig::default() })
}

/// A scenario plus the training settings to run it with.
///
/// On disk this is the scenario TOML with an optional `[training]` table;
/// missing training keys take their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub scenario: ScenarioConfig,
    pub training: TrainingConfig,
}

impl Experiment {
    pub fn builtin(name: &str) -> Result<Self> {
        Ok(Self { scenario: preset(name)?, training: preset_training(name)? })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let training = match table.remove("training") {
            Some(t) => t.try_into::<TrainingConfig>().map_err(|e| Error::Config(format!("[training]: {e}")))?,
            None => TrainingConfig::default(),
        };
        training.validate()?;
        let rest = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { scenario: ScenarioConfig::from_toml(&rest)?, training })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        let training = toml::to_string_pretty(&self.training).expect("training settings serialize");
        format!("{}\n[training]\n{training}", self.scenario.to_toml())
    }

    /// Largest per-GS slot count.
    pub fn qubits(&self) -> usize {
        self.scenario.ground_stations.iter().map(|g| g.slot_count()).max().unwrap_or(0)
    }

    pub fn check_action_dim(&self, dim: ActionDim) -> Result<()> {
        for (i, g) in self.scenario.ground_stations.iter().enumerate() {
            if g.slot_count() != dim.qubits() {
                return Err(Error::Config(format!(
                    "ground station {i} has |A| = 2^{} but {dim} was requested",
                    g.slot_count()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::PRESET_NAMES;

    #[test]
    fn parses_dimensions() {
        assert_eq!("2^4".parse::<ActionDim>().unwrap(), ActionDim(4));
        assert_eq!("16".parse::<ActionDim>().unwrap(), ActionDim(4));
        assert_eq!("65536".parse::<ActionDim>().unwrap(), ActionDim(16));
        assert_eq!("2".parse::<ActionDim>().unwrap(), ActionDim(1));
        for bad in ["0", "1", "12", "2^0", "x", "2^99"] {
            assert!(bad.parse::<ActionDim>().is_err(), "{bad}");
        }
        assert_eq!(ActionDim(8).to_string(), "2^8");
    }

    #[test]
    fn presets_match_their_dimension() {
        for q in [1, 2, 4, 8, 16] {
            let exp = Experiment::builtin(preset_for_dim(ActionDim(q)).unwrap()).unwrap();
            exp.check_action_dim(ActionDim(q)).unwrap();
            assert_eq!(exp.qubits(), q as usize);
            assert!(exp.check_action_dim(ActionDim(q + 1)).is_err());
        }
        assert_eq!(preset_for_dim(ActionDim(3)), None);
    }

    #[test]
    fn toml_round_trip() {
        for name in PRESET_NAMES {
            let exp = Experiment::builtin(name).unwrap();
            assert_eq!(Experiment::from_toml(&exp.to_toml()).unwrap(), exp);
        }
        let bare = preset("tiny").unwrap().to_toml();
        assert_eq!(Experiment::from_toml(&bare).unwrap().training, TrainingConfig::default());
        let bad = format!("{bare}\n[training]\nlearning_rate = 3\n");
        assert!(matches!(Experiment::from_toml(&bad), Err(Error::Config(_))));
    }
}
