use std::path::Path;

use plotters::prelude::*;

use super::summary::{CurvePoint, MetricSummary};
use crate::error::{Error, Result};

const COLORS: [RGBColor; 2] = [RGBColor(31, 119, 180), RGBColor(214, 39, 40)];

fn plot_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format { what: "plot", reason: format!("{}: {e}", path.display()) }
}

/// Line chart of seed-averaged metrics against epoch, y fixed to [0, 1].
fn line_chart(path: &Path, title: &str, curve: &[CurvePoint], series: &[(&str, fn(&CurvePoint) -> f64)]) -> Result<()> {
    let root = SVGBackend::new(path, (720, 432)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(path, e))?;
    let x_max = curve.len().max(2) as f64 - 1.0;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d(0.0..x_max, 0.0..1.05)
        .map_err(|e| plot_err(path, e))?;
    chart
        .configure_mesh()
        .x_desc("epoch")
        .y_desc(title)
        .draw()
        .map_err(|e| plot_err(path, e))?;
    for (i, (label, get)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(curve.iter().map(|p| (p.epoch as f64, get(p))), color.stroke_width(2)))
            .map_err(|e| plot_err(path, e))?
            .label(*label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    if series.len() > 1 {
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| plot_err(path, e))?;
    }
    root.present().map_err(|e| plot_err(path, e))
}

/// `reward.svg`, `qos.svg`, `capacity.svg` and `energy.svg`.
pub(crate) fn write_plots(dir: &Path, summary: &MetricSummary) -> Result<()> {
    let c = &summary.curve;
    line_chart(&dir.join("reward.svg"), "normalized reward", c, &[("reward", |p| p.reward)])?;
    line_chart(&dir.join("qos.svg"), "QoS", c, &[("qos", |p| p.qos)])?;
    line_chart(&dir.join("capacity.svg"), "capacity", c, &[("capacity", |p| p.capacity)])?;
    line_chart(
        &dir.join("energy.svg"),
        "residual energy",
        c,
        &[("CubeSat", |p| p.residual_cubesat), ("HALE-UAV", |p| p.residual_uav)],
    )
}
