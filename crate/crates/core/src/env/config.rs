use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aero::UavSpec;
use crate::error::{Error, Result};
use crate::orbital::{parse_tle, GeodeticPosition, TleRecord};

/// Link-budget and quality-function parameters shared by every GS.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    /// W, in the same rate units as `xi2` per unit of log₂(1+Γ).
    pub bandwidth: f64,
    /// SNR at `reference_distance`.
    pub gamma0: f64,
    /// m
    pub reference_distance: f64,
    pub path_exponent: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Transmit power e₀ at the reference distance, W.
    pub link_power: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            bandwidth: 200.0,
            gamma0: 1000.0,
            reference_distance: 2.0e4,
            path_exponent: 2.0,
            xi1: 0.01,
            xi2: 1024.0,
            link_power: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStationConfig {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude: f64,
    /// Own traffic ξ^GS counted against the capacity limit.
    #[serde(default)]
    pub load: f64,
    /// Capacity curve ϱ/(1 + e^(−ζ(t−τ))) with t in steps.
    pub rho: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub tau: f64,
    /// H̄: devices served at once.
    pub max_served: usize,
    /// CubeSat indices occupying this GS's first slots.
    #[serde(default)]
    pub cubesats: Vec<usize>,
    /// UAV indices occupying the slots after the CubeSats.
    #[serde(default)]
    pub uavs: Vec<usize>,
}

impl GroundStationConfig {
    pub fn position(&self) -> Result<GeodeticPosition> {
        GeodeticPosition::from_degrees(self.latitude_deg, self.longitude_deg, self.altitude)
    }

    pub fn slot_count(&self) -> usize {
        self.cubesats.len() + self.uavs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSatConfig {
    /// Two or three TLE lines.
    pub tle: String,
    /// ξ^S_j
    pub capacity: f64,
    /// ē_j, J
    pub energy_cap: f64,
    /// Residual energy at reset as a fraction of the cap.
    #[serde(default = "one")]
    pub initial_energy: f64,
    /// W drawn every step regardless of scheduling.
    #[serde(default)]
    pub idle_power: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavConfig {
    #[serde(default)]
    pub spec: UavSpec,
    /// m
    pub altitude: f64,
    /// Commanded ground speed, m/s.
    pub speed: f64,
    /// Closed loop of (lat°, lon°) points; the UAV starts at the first.
    pub waypoints: Vec<[f64; 2]>,
    /// ξ^A_l
    pub capacity: f64,
    /// ē_l, J
    pub energy_cap: f64,
    #[serde(default = "one")]
    pub initial_energy: f64,
    /// Standard deviation of the attitude gust noise, rad.
    #[serde(default)]
    pub gust_sigma: f64,
}

fn one() -> f64 {
    1.0
}

/// Everything needed to build an episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Δt, s
    pub dt: f64,
    /// T, steps
    pub episode_steps: usize,
    #[serde(default = "default_mask")]
    pub coverage_mask_deg: f64,
    /// Solar charging power on the sun side, W.
    #[serde(default)]
    pub charging_power: f64,
    /// Earth-fixed direction towards the sun.
    #[serde(default = "default_sun")]
    pub sun_direction: [f64; 3],
    /// Seconds past each TLE epoch at step 0.
    #[serde(default)]
    pub start_offset: f64,
    /// Include UAV propulsion energy in the bookkeeping.
    #[serde(default = "yes")]
    pub propulsion: bool,
    #[serde(default)]
    pub link: LinkConfig,
    pub ground_stations: Vec<GroundStationConfig>,
    pub cubesats: Vec<CubeSatConfig>,
    pub uavs: Vec<UavConfig>,
}

fn default_mask() -> f64 {
    10.0
}

fn default_sun() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn yes() -> bool {
    true
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be non-negative, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn n_gs(&self) -> usize {
        self.ground_stations.len()
    }

    pub fn n_cubesat(&self) -> usize {
        self.cubesats.len()
    }

    pub fn n_uav(&self) -> usize {
        self.uavs.len()
    }

    pub fn coverage_mask(&self) -> f64 {
        self.coverage_mask_deg.to_radians()
    }

    pub fn tle_records(&self) -> Result<Vec<TleRecord>> {
        self.cubesats.iter().map(|c| parse_tle(&c.tle)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground_stations.is_empty() || self.cubesats.is_empty() || self.uavs.is_empty() {
            return Err(Error::Config(
                "need at least one ground station, CubeSat and UAV".into(),
            ));
        }
        positive("dt", self.dt)?;
        if self.episode_steps == 0 {
            return Err(Error::Config("episode_steps must be at least 1".into()));
        }
        if !(0.0..90.0).contains(&self.coverage_mask_deg) {
            return Err(Error::Config(format!(
                "coverage_mask_deg {} outside [0, 90)",
                self.coverage_mask_deg
            )));
        }
        non_negative("charging_power", self.charging_power)?;
        non_negative("start_offset", self.start_offset)?;
        let sun = self.sun_direction;
        if !(sun.iter().all(|v| v.is_finite()) && sun.iter().any(|v| *v != 0.0)) {
            return Err(Error::Config("sun_direction must be a non-zero finite vector".into()));
        }
        let l = &self.link;
        positive("link.bandwidth", l.bandwidth)?;
        positive("link.gamma0", l.gamma0)?;
        positive("link.reference_distance", l.reference_distance)?;
        non_negative("link.path_exponent", l.path_exponent)?;
        positive("link.xi1", l.xi1)?;
        if !l.xi2.is_finite() {
            return Err(Error::Config("link.xi2 must be finite".into()));
        }
        non_negative("link.link_power", l.link_power)?;

        for (i, gs) in self.ground_stations.iter().enumerate() {
            gs.position()?;
            non_negative(&format!("ground_stations[{i}].load"), gs.load)?;
            positive(&format!("ground_stations[{i}].rho"), gs.rho)?;
            non_negative(&format!("ground_stations[{i}].zeta"), gs.zeta)?;
            if !gs.tau.is_finite() {
                return Err(Error::Config(format!("ground_stations[{i}].tau must be finite")));
            }
            if gs.max_served == 0 {
                return Err(Error::Config(format!("ground_stations[{i}].max_served must be ≥ 1")));
            }
            if gs.slot_count() == 0 {
                return Err(Error::Config(format!("ground_stations[{i}] has no device slots")));
            }
            if gs.slot_count() > crate::qcircuit::MAX_QUBITS {
                return Err(Error::Config(format!(
                    "ground_stations[{i}] has {} slots, more than {}",
                    gs.slot_count(),
                    crate::qcircuit::MAX_QUBITS
                )));
            }
            for &j in &gs.cubesats {
                if j >= self.cubesats.len() {
                    return Err(Error::Config(format!("ground_stations[{i}] names CubeSat {j}")));
                }
            }
            for &j in &gs.uavs {
                if j >= self.uavs.len() {
                    return Err(Error::Config(format!("ground_stations[{i}] names UAV {j}")));
                }
            }
            let mut seen = gs.cubesats.clone();
            seen.sort_unstable();
            seen.dedup();
            let mut seen_u = gs.uavs.clone();
            seen_u.sort_unstable();
            seen_u.dedup();
            if seen.len() != gs.cubesats.len() || seen_u.len() != gs.uavs.len() {
                return Err(Error::Config(format!("ground_stations[{i}] repeats a device")));
            }
        }
        for (j, c) in self.cubesats.iter().enumerate() {
            parse_tle(&c.tle)?;
            positive(&format!("cubesats[{j}].capacity"), c.capacity)?;
            positive(&format!("cubesats[{j}].energy_cap"), c.energy_cap)?;
            non_negative(&format!("cubesats[{j}].idle_power"), c.idle_power)?;
            if !(0.0..=1.0).contains(&c.initial_energy) {
                return Err(Error::Config(format!("cubesats[{j}].initial_energy outside [0, 1]")));
            }
        }
        for (j, u) in self.uavs.iter().enumerate() {
            u.spec.validate()?;
            non_negative(&format!("uavs[{j}].altitude"), u.altitude)?;
            positive(&format!("uavs[{j}].speed"), u.speed)?;
            positive(&format!("uavs[{j}].capacity"), u.capacity)?;
            positive(&format!("uavs[{j}].energy_cap"), u.energy_cap)?;
            non_negative(&format!("uavs[{j}].gust_sigma"), u.gust_sigma)?;
            if !(0.0..=1.0).contains(&u.initial_energy) {
                return Err(Error::Config(format!("uavs[{j}].initial_energy outside [0, 1]")));
            }
            if u.waypoints.is_empty() {
                return Err(Error::Config(format!("uavs[{j}] needs at least one waypoint")));
            }
            for w in &u.waypoints {
                GeodeticPosition::from_degrees(w[0], w[1], u.altitude)?;
            }
        }
        Ok(())
    }
}
