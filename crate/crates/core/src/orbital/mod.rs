//! Two-body orbit model for CubeSats: TLE decoding, Keplerian elements,
//! sub-satellite point propagation and ground-station distances.

mod geo;
mod kepler;
mod tle;

pub use geo::{elevation_angle, great_circle_distance, slant_distance};
pub use kepler::{
    conic_radius, eccentric_anomaly, elements_from_tle, orbital_speed, subpoint, true_anomaly,
    KeplerSolver, OrbitalElements, SubPoint,
};
pub use tle::{checksum, parse_tle, parse_tle_file, TleRecord};

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the two-body Earth model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarthConstants {
    /// Gravitational constant in the units printed alongside the other
    /// constants (km³ kg⁻¹ s⁻²). Kept as metadata; `mu` is what the
    /// propagator consumes.
    pub gravitational_constant: f64,
    /// kg
    pub mass: f64,
    /// m
    pub radius: f64,
    /// m³/s²
    pub mu: f64,
    /// Sidereal rotation rate, rad/s.
    pub rotation_rate: f64,
}

impl Default for EarthConstants {
    fn default() -> Self {
        Self {
            gravitational_constant: 6.673e-20,
            mass: 5.974e24,
            radius: 6.378e6,
            mu: 3.986e14,
            rotation_rate: 7.292_115_9e-5,
        }
    }
}

/// Latitude/longitude in radians, altitude above the spherical Earth in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodeticPosition {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl GeodeticPosition {
    /// Validates latitude and altitude and wraps longitude into (−π, π].
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self> {
        if !(latitude.is_finite() && longitude.is_finite() && altitude.is_finite()) {
            return Err(Error::Domain("non-finite geodetic coordinate".into()));
        }
        if latitude.abs() > FRAC_PI_2 + 1e-12 {
            return Err(Error::Domain(format!("latitude {latitude} outside [-pi/2, pi/2]")));
        }
        if altitude < 0.0 {
            return Err(Error::Domain(format!("negative altitude {altitude}")));
        }
        Ok(Self {
            latitude: latitude.clamp(-FRAC_PI_2, FRAC_PI_2),
            longitude: wrap_angle(longitude),
            altitude,
        })
    }

    pub fn from_degrees(lat_deg: f64, lon_deg: f64, altitude: f64) -> Result<Self> {
        Self::new(lat_deg.to_radians(), lon_deg.to_radians(), altitude)
    }

    /// Earth-fixed Cartesian coordinates on a sphere of the given radius.
    pub fn to_cartesian(&self, earth_radius: f64) -> [f64; 3] {
        let r = earth_radius + self.altitude;
        let (slat, clat) = self.latitude.sin_cos();
        let (slon, clon) = self.longitude.sin_cos();
        [r * clat * clon, r * clat * slon, r * slat]
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}
