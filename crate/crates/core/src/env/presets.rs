//! Built-in scenarios. Every GS sits under the lead CubeSat's ground track
//! at some step of the episode and is circled by its own HALE-UAVs.

use super::config::{CubeSatConfig, GroundStationConfig, LinkConfig, ScenarioConfig, UavConfig};
use crate::aero::UavSpec;
use crate::error::{Error, Result};
use crate::orbital::{elements_from_tle, subpoint, EarthConstants, KeplerSolver, TleRecord};

pub const PRESET_NAMES: [&str; 5] = ["single", "tiny", "small", "extended", "paper"];

const EPOCH: f64 = 1_636_675_200.0; // 2021-11-12T00:00:00Z
const DT: f64 = 4.0;
const START: f64 = 1200.0;

fn tle(catalog: u32, mean_anomaly_deg: f64) -> TleRecord {
    TleRecord {
        name: format!("QSAGIN-{catalog}"),
        catalog_number: catalog,
        epoch: EPOCH,
        inclination_deg: 51.6,
        raan_deg: 40.0,
        eccentricity: 0.0005,
        arg_perigee_deg: 0.0,
        mean_anomaly_deg,
        mean_motion_rev_per_day: 15.5,
        revolution_number: 1,
        line1_checksum: 0,
        line2_checksum: 0,
    }
}

/// Sub-point (lat°, lon°) of the lead CubeSat `step` steps into the episode.
fn track_point(step: f64) -> Result<(f64, f64)> {
    let constants = EarthConstants::default();
    let el = elements_from_tle(&tle(90_000, 0.0), &constants)?;
    let sp = subpoint(&el, START + step * DT, &constants, KeplerSolver::Newton)?;
    Ok((sp.position.latitude.to_degrees(), sp.position.longitude.to_degrees()))
}

fn uav(center: (f64, f64), phase: usize) -> UavConfig {
    let r = 0.05;
    let mut waypoints = vec![
        [center.0 + r, center.1],
        [center.0, center.1 + r],
        [center.0 - r, center.1],
        [center.0, center.1 - r],
    ];
    waypoints.rotate_left(phase % 4);
    UavConfig {
        spec: UavSpec::default(),
        altitude: 2.0e4,
        speed: 100.0,
        waypoints,
        capacity: 10.0,
        energy_cap: 1.0e9,
        initial_energy: 1.0 - 0.05 * phase as f64,
        gust_sigma: 0.05,
    }
}

fn cubesat(catalog: u32, mean_anomaly_deg: f64, capacity: f64, initial_energy: f64) -> CubeSatConfig {
    CubeSatConfig {
        tle: tle(catalog, mean_anomaly_deg).to_text(),
        capacity,
        energy_cap: 2.0e4,
        initial_energy,
        idle_power: 1.0,
    }
}

struct Layout {
    name: &'static str,
    episode_steps: usize,
    /// Step at which each GS is overflown by the lead CubeSat.
    gs_steps: Vec<f64>,
    /// Mean-anomaly offsets of the CubeSats, degrees.
    cubesat_offsets: Vec<f64>,
    cubesat_capacity: f64,
    uavs_per_gs: usize,
    max_served: usize,
    rho: f64,
    zeta: f64,
    tau: f64,
    /// Give every GS a slot for every device instead of only its own UAVs.
    all_uav_slots: bool,
    cubesat_slots: bool,
}

fn build(l: Layout) -> Result<ScenarioConfig> {
    let centers = l
        .gs_steps
        .iter()
        .map(|&s| track_point(s))
        .collect::<Result<Vec<_>>>()?;
    let cubesats: Vec<CubeSatConfig> = l
        .cubesat_offsets
        .iter()
        .enumerate()
        .map(|(j, &dm)| cubesat(90_000 + j as u32, dm, l.cubesat_capacity, 0.9 - 0.1 * (j % 3) as f64))
        .collect();
    let mut uavs = Vec::new();
    let mut own_uavs = Vec::new();
    for &c in &centers {
        let mut own = Vec::new();
        for k in 0..l.uavs_per_gs {
            own.push(uavs.len());
            uavs.push(uav(c, uavs.len() + k));
        }
        own_uavs.push(own);
    }
    let ground_stations = centers
        .iter()
        .zip(own_uavs)
        .map(|(&(lat, lon), own)| GroundStationConfig {
            latitude_deg: lat,
            longitude_deg: lon,
            altitude: 0.0,
            load: 0.0,
            rho: l.rho,
            zeta: l.zeta,
            tau: l.tau,
            max_served: l.max_served,
            cubesats: if l.cubesat_slots { (0..cubesats.len()).collect() } else { vec![] },
            uavs: if l.all_uav_slots { (0..uavs.len()).collect() } else { own },
        })
        .collect();
    let cfg = ScenarioConfig {
        name: l.name.to_string(),
        dt: DT,
        episode_steps: l.episode_steps,
        coverage_mask_deg: 10.0,
        charging_power: 5.0,
        sun_direction: [1.0, 0.0, 0.0],
        start_offset: START,
        propulsion: true,
        link: LinkConfig { gamma0: 2.0e4, ..LinkConfig::default() },
        ground_stations,
        cubesats,
        uavs,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Built-in scenario by name; see [`PRESET_NAMES`].
///
/// | preset   | GS | CubeSats | UAVs | slots per GS | H̄ |
/// |----------|----|----------|------|--------------|----|
/// | single   | 1  | 1        | 1    | 1            | 1  |
/// | tiny     | 1  | 1        | 1    | 2            | 1  |
/// | small    | 2  | 2        | 2    | 4            | 2  |
/// | extended | 2  | 4        | 4    | 8            | 3  |
/// | paper    | 4  | 8        | 8    | 16           | 4  |
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let tiny = |name, cubesat_slots| Layout {
        name,
        episode_steps: 64,
        gs_steps: vec![32.0],
        cubesat_offsets: vec![0.0],
        cubesat_capacity: 10.0,
        uavs_per_gs: 1,
        max_served: 1,
        rho: 40.0,
        zeta: 0.0,
        tau: 0.0,
        all_uav_slots: true,
        cubesat_slots,
    };
    match name {
        // The tiny geometry with only the UAV exposed to the GS.
        "single" => build(tiny("single", false)),
        "tiny" => build(tiny("tiny", true)),
        "small" => build(Layout {
            name: "small",
            episode_steps: 64,
            gs_steps: vec![32.0, 8.0],
            cubesat_offsets: vec![0.0, -6.0],
            cubesat_capacity: 30.0,
            uavs_per_gs: 1,
            max_served: 2,
            rho: 80.0,
            zeta: 0.1,
            tau: 16.0,
            all_uav_slots: true,
            cubesat_slots: true,
        }),
        "extended" => build(Layout {
            name: "extended",
            episode_steps: 64,
            gs_steps: vec![32.0, 8.0],
            cubesat_offsets: vec![0.0, -6.0, 6.0, -12.0],
            cubesat_capacity: 30.0,
            uavs_per_gs: 2,
            max_served: 3,
            rho: 120.0,
            zeta: 0.1,
            tau: 16.0,
            all_uav_slots: true,
            cubesat_slots: true,
        }),
        "paper" => build(Layout {
            name: "paper",
            episode_steps: 64,
            gs_steps: vec![56.0, 32.0, 8.0, -16.0],
            cubesat_offsets: vec![0.0, -6.0, 6.0, -12.0, 12.0, -18.0, 18.0, -24.0],
            cubesat_capacity: 30.0,
            uavs_per_gs: 2,
            max_served: 4,
            rho: 160.0,
            zeta: 0.1,
            tau: 16.0,
            all_uav_slots: true,
            cubesat_slots: true,
        }),
        other => Err(Error::Usage(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}
