use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::state::StepMetrics;
use crate::error::{Error, Result};

#[derive(Serialize)]
struct Row {
    episode: usize,
    step: usize,
    gs: usize,
    reward: f64,
    utility: f64,
    cost: f64,
    qos: f64,
    capacity: f64,
    mean_residual_cubesat: f64,
    mean_residual_uav: f64,
}

/// Per-step metrics CSV with one row per GS per step.
pub struct StepMetricsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl StepMetricsWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(file))
    }
}

impl<W: Write> StepMetricsWriter<W> {
    pub fn new(writer: W) -> Self {
        Self { inner: csv::Writer::from_writer(writer) }
    }

    pub fn write(&mut self, episode: usize, step: usize, m: &StepMetrics) -> Result<()> {
        self.inner.serialize(Row {
            episode,
            step,
            gs: m.gs,
            reward: m.reward,
            utility: m.utility,
            cost: m.cost,
            qos: m.qos,
            capacity: m.capacity,
            mean_residual_cubesat: m.mean_residual_cubesat,
            mean_residual_uav: m.mean_residual_uav,
        })?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Format { what: "metrics CSV", reason: e.to_string() })
    }
}
