use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{EarthConstants, GeodeticPosition, TleRecord};
use crate::error::{Error, Result};

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Keplerian element set in SI units and radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalElements {
    pub eccentricity: f64,
    pub inclination: f64,
    pub raan: f64,
    pub arg_perigee: f64,
    pub mean_anomaly_at_epoch: f64,
    /// m
    pub semi_major_axis: f64,
    /// Specific angular momentum H, m²/s.
    pub angular_momentum: f64,
    /// rad/s
    pub mean_motion: f64,
}

/// How the eccentric anomaly is recovered from the mean anomaly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeplerSolver {
    /// E = M + e·sin M.
    #[default]
    FirstOrder,
    /// Newton iteration on E − e·sin E = M.
    Newton,
}

pub fn elements_from_tle(rec: &TleRecord, constants: &EarthConstants) -> Result<OrbitalElements> {
    if !(rec.mean_motion_rev_per_day > 0.0) {
        return Err(Error::Domain(format!(
            "mean motion {} rev/day must be positive",
            rec.mean_motion_rev_per_day
        )));
    }
    if !(0.0..1.0).contains(&rec.eccentricity) {
        return Err(Error::Domain(format!("eccentricity {} outside [0, 1)", rec.eccentricity)));
    }
    let n = rec.mean_motion_rev_per_day * TAU / SECONDS_PER_DAY;
    let a = (constants.mu / (n * n)).cbrt();
    if a <= constants.radius {
        return Err(Error::Domain(format!(
            "semi-major axis {a} m does not clear the Earth radius"
        )));
    }
    let e = rec.eccentricity;
    Ok(OrbitalElements {
        eccentricity: e,
        inclination: rec.inclination_deg.to_radians(),
        raan: rec.raan_deg.to_radians(),
        arg_perigee: rec.arg_perigee_deg.to_radians(),
        mean_anomaly_at_epoch: rec.mean_anomaly_deg.to_radians(),
        semi_major_axis: a,
        angular_momentum: (constants.mu * a * (1.0 - e * e)).sqrt(),
        mean_motion: n,
    })
}

pub fn eccentric_anomaly(mean_anomaly: f64, e: f64, solver: KeplerSolver) -> f64 {
    match solver {
        KeplerSolver::FirstOrder => mean_anomaly + e * mean_anomaly.sin(),
        KeplerSolver::Newton => {
            // Danby's starting guess.
            let mut ecc = mean_anomaly + 0.85 * e * mean_anomaly.sin().signum();
            for _ in 0..50 {
                let f = ecc - e * ecc.sin() - mean_anomaly;
                let step = f / (1.0 - e * ecc.cos());
                ecc -= step;
                if step.abs() < 1e-12 {
                    break;
                }
            }
            ecc
        }
    }
}

/// Half-angle formula, unwrapped onto the same revolution as `eccentric`.
pub fn true_anomaly(eccentric: f64, e: f64) -> f64 {
    let half = 0.5 * eccentric;
    let nu = 2.0 * ((1.0 + e).sqrt() * half.sin()).atan2((1.0 - e).sqrt() * half.cos());
    nu + TAU * ((eccentric - nu) / TAU).round()
}

pub fn conic_radius(elements: &OrbitalElements, true_anomaly: f64, constants: &EarthConstants) -> f64 {
    let h = elements.angular_momentum;
    (h * h / constants.mu) / (1.0 + elements.eccentricity * true_anomaly.cos())
}

/// Vis-viva speed at radius `r`.
pub fn orbital_speed(elements: &OrbitalElements, r: f64, constants: &EarthConstants) -> f64 {
    (constants.mu * (2.0 / r - 1.0 / elements.semi_major_axis)).sqrt()
}

/// Ground point beneath a satellite plus the Earth-fixed position it came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubPoint {
    pub position: GeodeticPosition,
    /// Earth-fixed position vector, m.
    pub earth_fixed: [f64; 3],
    /// Orbit radius, m.
    pub radius: f64,
    /// Set when the point sits on a pole and longitude is undefined (reported as 0).
    pub degenerate_pole: bool,
}

type Mat3 = [[f64; 3]; 3];

/// Rotation of the form used for the node, perigee and Earth-rotation axes.
fn about_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn about_x(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]]
}

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn apply(a: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

/// Propagates the elements `t` seconds past epoch and projects the position
/// onto the rotating Earth.
///
/// The perifocal vector is carried to the inertial frame by the transposes of
/// the node, inclination and perigee rotations and then into the Earth-fixed
/// frame by the Earth-rotation matrix with angle `rotation_rate·t`.
pub fn subpoint(
    elements: &OrbitalElements,
    t: f64,
    constants: &EarthConstants,
    solver: KeplerSolver,
) -> Result<SubPoint> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("propagation time {t} must be non-negative")));
    }
    let e = elements.eccentricity;
    let mean = elements.mean_anomaly_at_epoch + elements.mean_motion * t;
    let ecc_anom = eccentric_anomaly(mean, e, solver);
    let nu = true_anomaly(ecc_anom, e);
    let r = conic_radius(elements, nu, constants);
    let perifocal = [r * nu.cos(), r * nu.sin(), 0.0];

    let inertial_to_perifocal = mul(
        &mul(&about_z(elements.arg_perigee), &about_x(elements.inclination)),
        &about_z(elements.raan),
    );
    let perifocal_to_fixed = mul(
        &about_z(constants.rotation_rate * t),
        &transpose(&inertial_to_perifocal),
    );
    let rf = apply(&perifocal_to_fixed, perifocal);

    let norm = (rf[0] * rf[0] + rf[1] * rf[1] + rf[2] * rf[2]).sqrt();
    let latitude = (rf[2] / norm).clamp(-1.0, 1.0).asin();
    let cos_lat = latitude.cos();
    let (longitude, degenerate_pole) = if cos_lat.abs() < 1e-12 {
        (0.0, true)
    } else {
        let lon = (rf[0] / (norm * cos_lat)).clamp(-1.0, 1.0).acos();
        (if rf[1] < 0.0 { -lon } else { lon }, false)
    };
    let altitude = norm - constants.radius;
    Ok(SubPoint {
        position: GeodeticPosition::new(latitude, longitude, altitude.max(0.0))?,
        earth_fixed: rf,
        radius: r,
        degenerate_pole,
    })
}
