use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use super::summary::FinalStats;
use crate::agents::Algorithm;
use crate::error::{Error, Result};

/// Final-decile normalized rewards, one row per action
/// dimension, one column per algorithm. Each row is divided by its maximum,
/// so the leader of every dimension reads 1.0.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTable {
    /// Action-space exponents q, ascending.
    pub dims: Vec<usize>,
    /// Algorithms present, in [`Algorithm::ALL`] order.
    pub algorithms: Vec<Algorithm>,
    /// Scenario name of each row.
    pub scenarios: Vec<String>,
    /// `raw[row][col]` final-decile reward, `None` when that run is missing.
    pub raw: Vec<Vec<Option<f64>>>,
    pub normalized: Vec<Vec<Option<f64>>>,
    /// Algorithms of each row, best first; ties go to the earlier name.
    pub ranking: Vec<Vec<Algorithm>>,
}

pub fn compare(summaries: &[FinalStats]) -> Result<ComparisonTable> {
    if summaries.len() < 2 {
        return Err(Error::Comparison(format!("need at least two summaries, got {}", summaries.len())));
    }
    let mut cells: BTreeMap<usize, (String, BTreeMap<Algorithm, f64>)> = BTreeMap::new();
    for s in summaries {
        let (scenario, row) = cells.entry(s.qubits).or_insert_with(|| (s.scenario.clone(), BTreeMap::new()));
        if *scenario != s.scenario {
            return Err(Error::Comparison(format!(
                "|A| = 2^{} mixes scenarios {scenario:?} and {:?}",
                s.qubits, s.scenario
            )));
        }
        if row.insert(s.algorithm, s.final_reward).is_some() {
            return Err(Error::Comparison(format!("{} appears twice at |A| = 2^{}", s.algorithm, s.qubits)));
        }
    }
    let algorithms: Vec<Algorithm> =
        Algorithm::ALL.into_iter().filter(|a| cells.values().any(|(_, r)| r.contains_key(a))).collect();

    let mut table = ComparisonTable {
        dims: Vec::new(),
        algorithms: algorithms.clone(),
        scenarios: Vec::new(),
        raw: Vec::new(),
        normalized: Vec::new(),
        ranking: Vec::new(),
    };
    for (q, (scenario, row)) in cells {
        let raw: Vec<Option<f64>> = algorithms.iter().map(|a| row.get(a).copied()).collect();
        let max = raw.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        let normalized: Vec<Option<f64>> =
            raw.iter().map(|v| v.map(|v| if max > 0.0 { v / max } else { 0.0 })).collect();
        let mut ranked: Vec<(Algorithm, f64)> =
            algorithms.iter().zip(&normalized).filter_map(|(a, v)| v.map(|v| (*a, v))).collect();
        ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.name().cmp(y.0.name())));
        table.dims.push(q);
        table.scenarios.push(scenario);
        table.raw.push(raw);
        table.normalized.push(normalized);
        table.ranking.push(ranked.into_iter().map(|(a, _)| a).collect());
    }
    Ok(table)
}

/// Reads the pooled ("all") line of each run directory's `summary.csv`.
pub fn compare_dirs(dirs: &[PathBuf]) -> Result<ComparisonTable> {
    let summaries = dirs.iter().map(|d| read_overall(d)).collect::<Result<Vec<_>>>()?;
    compare(&summaries)
}

fn read_overall(dir: &Path) -> Result<FinalStats> {
    let path = dir.join("summary.csv");
    let mut r = csv::Reader::from_path(&path)?;
    for row in r.deserialize() {
        let row: FinalStats = row?;
        if row.seed == "all" {
            return Ok(row);
        }
    }
    Err(Error::Format { what: "summary", reason: format!("{} has no pooled row", path.display()) })
}

impl ComparisonTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["action_dim".to_string(), "scenario".to_string()];
        header.extend(self.algorithms.iter().map(|a| a.name().to_string()));
        header.push("ranking".into());
        w.write_record(&header)?;
        for (i, q) in self.dims.iter().enumerate() {
            let mut rec = vec![format!("2^{q}"), self.scenarios[i].clone()];
            rec.extend(self.normalized[i].iter().map(|v| v.map(|v| v.to_string()).unwrap_or_default()));
            rec.push(self.ranking[i].iter().map(|a| a.name()).collect::<Vec<_>>().join(" > "));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Comparison(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8}", "|A|")?;
        for a in &self.algorithms {
            write!(f, " {:>8}", a.name())?;
        }
        writeln!(f)?;
        for (i, q) in self.dims.iter().enumerate() {
            write!(f, "{:<8}", format!("2^{q}"))?;
            for v in &self.normalized[i] {
                match v {
                    Some(v) => write!(f, " {v:>8.4}")?,
                    None => write!(f, " {:>8}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
