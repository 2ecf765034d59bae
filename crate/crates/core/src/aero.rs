//! HALE-UAV aerodynamics: ground-to-body velocity transform and the
//! parasite/induced required-power model.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbital::wrap_angle;

/// Airframe and atmosphere parameters of one UAV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavSpec {
    /// kg, metadata only
    pub mass: f64,
    /// m/s², metadata only
    pub gravity: f64,
    /// N. Consumed directly by the induced-power term.
    pub weight: f64,
    /// m²
    pub wing_area: f64,
    /// kg/m³
    pub air_density: f64,
    pub cd0: f64,
    pub k_induced: f64,
}

impl Default for UavSpec {
    fn default() -> Self {
        Self {
            mass: 1815.0,
            gravity: 9.81,
            weight: 17_799.0,
            wing_area: 6.61,
            air_density: 0.089,
            cd0: 0.045,
            k_induced: 0.052,
        }
    }
}

impl UavSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("gravity", self.gravity),
            ("weight", self.weight),
            ("wing_area", self.wing_area),
            ("air_density", self.air_density),
            ("cd0", self.cd0),
            ("k_induced", self.k_induced),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("uav {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Airspeed at which parasite and induced power are equal.
    pub fn crossover_speed(&self) -> f64 {
        (2.0 * self.weight / (self.air_density * self.wing_area)).sqrt()
            * (self.k_induced / self.cd0).powf(0.25)
    }
}

/// Yaw ψ, pitch θ, roll φ in radians, each wrapped into (−π, π].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Attitude {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl Attitude {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self {
            yaw: wrap_angle(yaw),
            pitch: wrap_angle(pitch),
            roll: wrap_angle(roll),
        }
    }
}

/// Velocity components (u₁, v₁, w₁) in the ground frame, m/s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundVelocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Velocity components (u, v, w) along the body axes, m/s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BodyVelocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Yaw about z, then pitch about y, then roll about x.
pub fn ground_to_body(vel: GroundVelocity, att: Attitude) -> BodyVelocity {
    let (sp, cp) = att.yaw.sin_cos();
    let u2 = cp * vel.u + sp * vel.v;
    let v2 = -sp * vel.u + cp * vel.v;
    let w2 = vel.w;

    let (st, ct) = att.pitch.sin_cos();
    let u3 = ct * u2 - st * w2;
    let v3 = v2;
    let w3 = st * u2 + ct * w2;

    let (sr, cr) = att.roll.sin_cos();
    BodyVelocity {
        u: u3,
        v: cr * v3 + sr * w3,
        w: -sr * v3 + cr * w3,
    }
}

pub fn airspeed(vel: BodyVelocity) -> f64 {
    (vel.u * vel.u + vel.v * vel.v + vel.w * vel.w).sqrt()
}

/// Parasite, induced and total power in watts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerBreakdown {
    pub parasite: f64,
    pub induced: f64,
    pub total: f64,
}

pub fn required_power(spec: &UavSpec, airspeed: f64) -> Result<PowerBreakdown> {
    if !(airspeed > 0.0) {
        return Err(Error::Domain(format!(
            "airspeed {airspeed} must be positive (induced power is singular at rest)"
        )));
    }
    let q = 0.5 * spec.air_density * airspeed * airspeed;
    let parasite = q * spec.wing_area * spec.cd0 * airspeed;
    let induced = spec.weight * spec.weight * spec.k_induced * airspeed / (q * spec.wing_area);
    Ok(PowerBreakdown {
        parasite,
        induced,
        total: parasite + induced,
    })
}

/// Adds independent N(0, σ²) noise to each attitude angle.
pub fn gust_perturb<R: Rng + ?Sized>(att: Attitude, sigma: f64, rng: &mut R) -> Result<Attitude> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("gust sigma {sigma} must be non-negative")));
    }
    if sigma == 0.0 {
        return Ok(att);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(Attitude::new(
        att.yaw + normal.sample(rng),
        att.pitch + normal.sample(rng),
        att.roll + normal.sample(rng),
    ))
}
