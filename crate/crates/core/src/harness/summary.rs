use std::path::Path;

use serde::{Deserialize, Serialize};

use super::write_csv;
use crate::agents::{Algorithm, EpochMetrics};
use crate::error::{Error, Result};

/// One line of `epochs.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub epoch: usize,
    pub reward: f64,
    pub qos: f64,
    pub capacity: f64,
    pub residual_cubesat: f64,
    pub residual_uav: f64,
    pub raw_reward: f64,
}

impl EpochRow {
    pub fn new(algorithm: Algorithm, seed: u64, m: &EpochMetrics) -> Self {
        Self {
            algorithm,
            seed,
            epoch: m.epoch,
            reward: m.reward,
            qos: m.qos,
            capacity: m.capacity,
            residual_cubesat: m.residual_cubesat,
            residual_uav: m.residual_uav,
            raw_reward: m.raw_reward,
        }
    }

    fn metrics(&self) -> [f64; 5] {
        [self.reward, self.qos, self.capacity, self.residual_cubesat, self.residual_uav]
    }
}

/// Seed-averaged metrics of one epoch (a line of `curve.csv`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub epoch: usize,
    pub reward: f64,
    pub qos: f64,
    pub capacity: f64,
    pub residual_cubesat: f64,
    pub residual_uav: f64,
}

/// Final-decile statistics of one seed, or of all seeds pooled
/// (`seed = "all"`). A line of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStats {
    pub scenario: String,
    pub algorithm: Algorithm,
    /// Per-GS action-space exponent q.
    pub qubits: usize,
    pub seed: String,
    pub epochs: usize,
    pub final_reward: f64,
    pub final_reward_std: f64,
    pub final_qos: f64,
    pub final_capacity: f64,
    pub final_residual_cubesat: f64,
    pub final_residual_uav: f64,
    /// Mean normalized reward over the whole run.
    pub mean_reward: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSummary {
    pub curve: Vec<CurvePoint>,
    pub per_seed: Vec<FinalStats>,
    pub overall: FinalStats,
}

impl MetricSummary {
    /// Writes `curve.csv` and `summary.csv` (one line per seed, then "all").
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("curve.csv"), &self.curve)?;
        let mut rows = self.per_seed.clone();
        rows.push(self.overall.clone());
        write_csv(&dir.join("summary.csv"), &rows)
    }
}

pub fn read_epoch_rows(path: &Path) -> Result<Vec<EpochRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    mean(&values.iter().map(|v| (v - m) * (v - m)).collect::<Vec<_>>()).sqrt()
}

/// Number of trailing epochs in the final decile.
pub(crate) fn decile(epochs: usize) -> usize {
    epochs.div_ceil(10).max(1)
}

fn final_stats(scenario: &str, qubits: usize, seed: String, epochs: usize, rows: &[&EpochRow]) -> FinalStats {
    let tail: Vec<&EpochRow> = rows.iter().copied().filter(|r| r.epoch + decile(epochs) >= epochs).collect();
    let col = |k: usize| mean(&tail.iter().map(|r| r.metrics()[k]).collect::<Vec<_>>());
    let rewards: Vec<f64> = tail.iter().map(|r| r.reward).collect();
    FinalStats {
        scenario: scenario.to_string(),
        algorithm: rows[0].algorithm,
        qubits,
        seed,
        epochs,
        final_reward: col(0),
        final_reward_std: std_dev(&rewards),
        final_qos: col(1),
        final_capacity: col(2),
        final_residual_cubesat: col(3),
        final_residual_uav: col(4),
        mean_reward: mean(&rows.iter().map(|r| r.reward).collect::<Vec<_>>()),
    }
}

/// Aggregates `epochs.csv` rows. Every seed must cover epochs 0..n for the
/// same n and one algorithm; seeds keep their order of first appearance.
pub fn summarize(scenario: &str, qubits: usize, rows: &[EpochRow]) -> Result<MetricSummary> {
    let bad = |reason: String| Error::Format { what: "epoch rows", reason };
    let first = rows.first().ok_or_else(|| bad("no rows".into()))?;
    let mut seeds: Vec<u64> = Vec::new();
    for r in rows {
        if r.algorithm != first.algorithm {
            return Err(bad(format!("mixed algorithms {} and {}", first.algorithm, r.algorithm)));
        }
        if !seeds.contains(&r.seed) {
            seeds.push(r.seed);
        }
    }
    let by_seed: Vec<Vec<&EpochRow>> = seeds.iter().map(|&s| rows.iter().filter(|r| r.seed == s).collect()).collect();
    let epochs = by_seed[0].len();
    for (s, group) in seeds.iter().zip(&by_seed) {
        if group.len() != epochs || group.iter().enumerate().any(|(k, r)| r.epoch != k) {
            return Err(bad(format!("seed {s} does not cover epochs 0..{epochs} in order")));
        }
    }

    let curve = (0..epochs)
        .map(|e| {
            let col = |k: usize| mean(&by_seed.iter().map(|g| g[e].metrics()[k]).collect::<Vec<_>>());
            CurvePoint {
                epoch: e,
                reward: col(0),
                qos: col(1),
                capacity: col(2),
                residual_cubesat: col(3),
                residual_uav: col(4),
            }
        })
        .collect();
    let per_seed = seeds
        .iter()
        .zip(&by_seed)
        .map(|(s, g)| final_stats(scenario, qubits, s.to_string(), epochs, g))
        .collect();
    let all: Vec<&EpochRow> = by_seed.iter().flatten().copied().collect();
    let overall = final_stats(scenario, qubits, "all".into(), epochs, &all);
    Ok(MetricSummary { curve, per_seed, overall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, epoch: usize, reward: f64) -> EpochRow {
        EpochRow {
            algorithm: Algorithm::Random,
            seed,
            epoch,
            reward,
            qos: 0.5,
            capacity: 0.25,
            residual_cubesat: 1.0,
            residual_uav: 0.75,
            raw_reward: reward * 10.0,
        }
    }

    #[test]
    fn final_decile_and_curve() {
        // 20 epochs: decile is the last 2.
        let mut rows = Vec::new();
        for s in [7, 3] {
            for e in 0..20 {
                rows.push(row(s, e, if e >= 18 { 0.1 * s as f64 } else { 0.0 }));
            }
        }
        let sum = summarize("x", 2, &rows).unwrap();
        assert_eq!(sum.per_seed[0].seed, "7");
        assert!((sum.per_seed[0].final_reward - 0.7).abs() < 1e-12);
        assert!((sum.per_seed[1].final_reward - 0.3).abs() < 1e-12);
        assert!((sum.overall.final_reward - 0.5).abs() < 1e-12);
        assert!((sum.overall.final_reward_std - 0.2).abs() < 1e-12);
        assert!((sum.overall.mean_reward - 0.05).abs() < 1e-12);
        assert_eq!(sum.curve.len(), 20);
        assert!((sum.curve[19].reward - 0.5).abs() < 1e-12);
        assert_eq!(sum.curve[0].qos, 0.5);
    }

    #[test]
    fn decile_sizes() {
        assert_eq!(decile(1), 1);
        assert_eq!(decile(9), 1);
        assert_eq!(decile(200), 20);
        assert_eq!(decile(2001), 201);
    }

    #[test]
    fn rejects_ragged_rows() {
        let rows = vec![row(1, 0, 0.0), row(1, 1, 0.0), row(2, 0, 0.0)];
        assert!(summarize("x", 1, &rows).is_err());
        assert!(summarize("x", 1, &[]).is_err());
        let mut mixed = vec![row(1, 0, 0.0)];
        mixed.push(EpochRow { algorithm: Algorithm::Qmarl, ..row(2, 0, 0.0) });
        assert!(summarize("x", 1, &mixed).is_err());
    }
}
