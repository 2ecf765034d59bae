use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use qsagin::agents::Algorithm;
use qsagin::harness::{self, ActionDim, ExperimentManifest, GroundSite, OrbitSpan};
use qsagin::orbital::{parse_tle_file, EarthConstants};

/// Quantum multi-agent scheduling of CubeSat and HALE-UAV access.
#[derive(Parser)]
#[command(name = "qsagin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one algorithm over a list of seeds and write metrics and plots.
    Run {
        /// Scenario TOML, optionally with a [training] table.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// qmarl, marl, iql, dqn or random.
        #[arg(long = "algo")]
        algorithm: Algorithm,
        /// Per-GS action dimension (2, 4, 16, 256, 65536 or 2^q). Selects the
        /// built-in scenario, or is checked against --scenario.
        #[arg(long)]
        preset: Option<ActionDim>,
        /// Comma-separated seeds; `a-b` expands to an inclusive range.
        #[arg(long, default_value = "0")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured epoch count.
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Normalized final-reward table across run directories.
    Compare {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export sub-satellite tracks and ground-site geometry as CSV.
    Orbits {
        #[arg(long)]
        tle: PathBuf,
        /// CSV with name, latitude_deg, longitude_deg and optional altitude.
        #[arg(long)]
        gs: PathBuf,
        /// Seconds to cover.
        #[arg(long)]
        span: f64,
        /// Seconds between samples.
        #[arg(long)]
        step: f64,
        /// Elevation mask in degrees for the `visible` column.
        #[arg(long, default_value_t = 10.0)]
        mask: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty seed range {part}");
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(part.parse().with_context(|| format!("bad seed {part:?}"))?),
        }
    }
    Ok(seeds)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, algorithm, preset, seeds, out, epochs } => {
            let manifest = ExperimentManifest {
                scenario,
                algorithm,
                action_dim: preset,
                seeds: parse_seeds(&seeds)?,
                out,
                epochs,
            };
            let summary = harness::run(&manifest)?;
            let o = &summary.overall;
            println!(
                "{} on {} (|A| = 2^{}): final reward {:.4} ± {:.4}, qos {:.4}, capacity {:.4}, residual {:.4}/{:.4}",
                o.algorithm,
                o.scenario,
                o.qubits,
                o.final_reward,
                o.final_reward_std,
                o.final_qos,
                o.final_capacity,
                o.final_residual_cubesat,
                o.final_residual_uav
            );
            println!("wrote {}", manifest.out.display());
        }
        Command::Compare { inputs, out } => {
            let table = harness::compare_dirs(&inputs)?;
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(&path, table.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Orbits { tle, gs, span, step, mask, out } => {
            let text = std::fs::read_to_string(&tle).with_context(|| format!("reading {}", tle.display()))?;
            let tles = parse_tle_file(&text)?;
            let sites: Vec<GroundSite> = csv::Reader::from_path(&gs)
                .with_context(|| format!("reading {}", gs.display()))?
                .deserialize()
                .collect::<Result<_, _>>()
                .with_context(|| format!("parsing {}", gs.display()))?;
            let window = OrbitSpan { span, step, mask_deg: mask };
            let rows = harness::export_orbits(&tles, &sites, window, &EarthConstants::default())?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
                None => Box::new(std::io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(sink);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(e.downcast_ref::<qsagin::Error>(), Some(qsagin::Error::Usage(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3").unwrap(), vec![3]);
        assert_eq!(parse_seeds("0-2,7").unwrap(), vec![0, 1, 2, 7]);
        assert!(parse_seeds("4-1").is_err());
        assert!(parse_seeds("x").is_err());
    }
}
