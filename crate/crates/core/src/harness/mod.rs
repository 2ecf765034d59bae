//! Seeded experiment runs, metric aggregation, normalized comparison tables and
//! batch orbit export.

mod compare;
mod experiment;
mod orbits;
mod plot;
mod summary;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{init_rng, Algorithm, Team, Trainer, TrainingConfig};
use crate::env::{Environment, StepMetricsWriter};
use crate::error::{Error, Result};

pub use compare::{compare, compare_dirs, ComparisonTable};
pub use experiment::{preset_for_dim, preset_training, ActionDim, Experiment};
pub use orbits::{export_orbits, GroundSite, OrbitRow, OrbitSpan};
pub use summary::{read_epoch_rows, summarize, EpochRow, FinalStats, MetricSummary};

/// Environment variable holding the worker-thread count for seed runs.
pub const THREADS_VAR: &str = "QSAGIN_THREADS";

/// Everything needed to reproduce one run directory.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentManifest {
    /// Scenario TOML, optionally with a `[training]` table. Without it the
    /// built-in scenario for `action_dim` is used.
    pub scenario: Option<PathBuf>,
    pub algorithm: Algorithm,
    /// Per-GS action-space size. With a scenario file it is checked
    /// against the file instead of selecting a preset.
    pub action_dim: Option<ActionDim>,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    /// Overrides the epoch count of the training settings.
    pub epochs: Option<usize>,
}

impl ExperimentManifest {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Usage("at least one seed is required".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(Error::Usage("seeds must be distinct".into()));
        }
        if self.epochs == Some(0) {
            return Err(Error::Usage("epochs must be positive".into()));
        }
        if self.scenario.is_none() && self.action_dim.is_none() {
            return Err(Error::Usage("either a scenario file or an action-dimension preset is required".into()));
        }
        Ok(())
    }

    /// Loads the scenario and training settings this manifest refers to.
    pub fn resolve(&self) -> Result<Experiment> {
        self.validate()?;
        let exp = match (&self.scenario, self.action_dim) {
            (Some(path), dim) => {
                let exp = Experiment::load(path)?;
                if let Some(dim) = dim {
                    exp.check_action_dim(dim)?;
                }
                exp
            }
            (None, Some(dim)) => {
                let name = preset_for_dim(dim).ok_or_else(|| {
                    Error::Usage(format!("no built-in scenario for |A| = {dim}; pass a scenario file"))
                })?;
                Experiment::builtin(name)?
            }
            (None, None) => unreachable!("validated above"),
        };
        Ok(exp)
    }
}

/// Contents of `run.toml`, used by [`compare_dirs`] to line runs up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    /// Largest per-GS action-space exponent q (|A| = 2^q).
    pub qubits: usize,
    pub seeds: Vec<u64>,
    pub epochs: usize,
    pub training: TrainingConfig,
}

/// Thread pool sized by [`THREADS_VAR`], or rayon's default when unset.
fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Usage(format!("{THREADS_VAR}={v:?} is not a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Trains one seed, writing its epoch rows and the per-step metrics of its
/// final episode under `seeds/`.
fn run_seed(exp: &Experiment, algorithm: Algorithm, seed: u64, epochs: usize, dir: &Path) -> Result<Vec<EpochRow>> {
    let env = Environment::new(exp.scenario.clone())?;
    let team = Team::new(algorithm, &env, exp.training.clone(), &mut init_rng(seed))?;
    let mut trainer = Trainer::new(env, team, seed);
    let mut rows = Vec::with_capacity(epochs);
    for e in 0..epochs {
        let m = if e + 1 == epochs {
            let path = dir.join(format!("seed-{seed}-final-steps.csv"));
            let mut w = StepMetricsWriter::create(&path)?;
            let m = trainer.run_epoch_with(|step, out| {
                for sm in &out.metrics {
                    w.write(e, step, sm)?;
                }
                Ok(())
            })?;
            w.into_inner()?;
            m
        } else {
            trainer.run_epoch()?
        };
        rows.push(EpochRow::new(algorithm, seed, &m));
    }
    write_csv(&dir.join(format!("seed-{seed}.csv")), &rows)?;
    Ok(rows)
}

/// Runs every seed of `manifest` and writes into its output directory:
/// `run.toml`, `seeds/seed-<s>.csv`, the merged `epochs.csv`, `curve.csv`,
/// `summary.csv` and one SVG per metric.
pub fn run(manifest: &ExperimentManifest) -> Result<MetricSummary> {
    let exp = manifest.resolve()?;
    let epochs = manifest.epochs.unwrap_or(exp.training.epochs);
    let seed_dir = manifest.out.join("seeds");
    fs::create_dir_all(&seed_dir).map_err(|e| Error::io(&seed_dir, e))?;

    let per_seed: Vec<Vec<EpochRow>> = pool()?.install(|| {
        manifest
            .seeds
            .par_iter()
            .map(|&s| run_seed(&exp, manifest.algorithm, s, epochs, &seed_dir))
            .collect::<Result<_>>()
    })?;
    let rows: Vec<EpochRow> = per_seed.into_iter().flatten().collect();
    write_csv(&manifest.out.join("epochs.csv"), &rows)?;

    let summary = summarize(&exp.scenario.name, exp.qubits(), &rows)?;
    summary.write(&manifest.out)?;
    plot::write_plots(&manifest.out, &summary)?;

    let record = RunRecord {
        scenario: exp.scenario.name.clone(),
        algorithm: manifest.algorithm,
        qubits: exp.qubits(),
        seeds: manifest.seeds.clone(),
        epochs,
        training: exp.training.clone(),
    };
    let path = manifest.out.join("run.toml");
    let text = toml::to_string(&record).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

pub fn read_record(dir: &Path) -> Result<RunRecord> {
    let path = dir.join("run.toml");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text).map_err(|e| Error::Format { what: "run record", reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Actor;

    fn manifest(out: &Path, algorithm: Algorithm, epochs: usize) -> ExperimentManifest {
        ExperimentManifest {
            scenario: None,
            algorithm,
            action_dim: Some(ActionDim(2)),
            seeds: vec![4, 1],
            out: out.to_path_buf(),
            epochs: Some(epochs),
        }
    }

    #[test]
    fn run_writes_consistent_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest(dir.path(), Algorithm::Qmarl, 6);
        let summary = run(&m).unwrap();
        let rows = read_epoch_rows(&dir.path().join("epochs.csv")).unwrap();
        assert_eq!(rows.len(), 6 * 2);
        assert_eq!(rows[0].seed, 4);
        assert_eq!(summarize("tiny", 2, &rows).unwrap(), summary);
        for r in &rows {
            for v in [r.reward, r.qos, r.capacity, r.residual_cubesat, r.residual_uav] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        for f in ["run.toml", "curve.csv", "summary.csv", "reward.svg", "qos.svg", "capacity.svg", "energy.svg"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        let steps = fs::read_to_string(dir.path().join("seeds/seed-1-final-steps.csv")).unwrap();
        assert_eq!(steps.lines().count(), 1 + 64);
        let record = read_record(dir.path()).unwrap();
        assert_eq!((record.qubits, record.epochs, record.algorithm), (2, 6, Algorithm::Qmarl));
    }

    #[test]
    fn same_manifest_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run(&manifest(a.path(), Algorithm::Marl, 3)).unwrap();
        run(&manifest(b.path(), Algorithm::Marl, 3)).unwrap();
        for f in ["epochs.csv", "curve.csv", "summary.csv", "seeds/seed-4-final-steps.csv"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
        }
    }

    #[test]
    fn preset_sixteen_gives_four_qubit_actors() {
        let m = ExperimentManifest { action_dim: Some("16".parse().unwrap()), ..manifest(Path::new("."), Algorithm::Qmarl, 1) };
        let exp = m.resolve().unwrap();
        let env = Environment::new(exp.scenario).unwrap();
        let team = Team::new(Algorithm::Qmarl, &env, exp.training, &mut init_rng(0)).unwrap();
        for a in team.actors() {
            let Actor::Quantum(q) = a else { panic!("classical actor") };
            assert_eq!(q.qubits(), 4);
            assert_eq!(q.action_count(), 16);
        }
    }

    #[test]
    fn manifest_errors() {
        let base = manifest(Path::new("."), Algorithm::Random, 1);
        assert!(matches!(ExperimentManifest { seeds: vec![], ..base.clone() }.validate(), Err(Error::Usage(_))));
        assert!(matches!(ExperimentManifest { seeds: vec![2, 2], ..base.clone() }.validate(), Err(Error::Usage(_))));
        assert!(matches!(ExperimentManifest { action_dim: None, ..base.clone() }.resolve(), Err(Error::Usage(_))));
        assert!(matches!(ExperimentManifest { action_dim: Some(ActionDim(3)), ..base.clone() }.resolve(), Err(Error::Usage(_))));
        let missing = ExperimentManifest { scenario: Some("/nonexistent/s.toml".into()), ..base };
        assert!(matches!(missing.resolve(), Err(Error::Io { .. })));
    }
}
