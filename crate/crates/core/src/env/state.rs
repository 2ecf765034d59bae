use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbital::GeodeticPosition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeviceKind {
    CubeSat,
    Uav,
}

/// A device as seen from one GS slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeviceRef {
    pub kind: DeviceKind,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeSatState {
    pub position: GeodeticPosition,
    /// Earth-fixed position vector, m.
    pub earth_fixed: [f64; 3],
    /// Orbital speed, m/s.
    pub speed: f64,
    /// Residual energy, J.
    pub energy: f64,
    pub sun_side: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UavState {
    pub position: GeodeticPosition,
    /// Commanded track, rad clockwise from north.
    pub heading: f64,
    /// Commanded ground speed, m/s.
    pub speed: f64,
    /// Body-axis airspeed after the latest gust, m/s. Drives propulsion power.
    pub airspeed: f64,
    pub energy: f64,
    /// Index of the waypoint being flown to.
    pub waypoint: usize,
}

/// Ground truth S(t).
#[derive(Clone, Debug, PartialEq)]
pub struct SaginState {
    pub t: usize,
    pub cubesats: Vec<CubeSatState>,
    pub uavs: Vec<UavState>,
    /// ξ̄_i(t) per GS.
    pub gs_limits: Vec<f64>,
}

/// Partial view S_i(t) of one GS as a fixed-width feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct GsObservation {
    pub gs: usize,
    pub features: Vec<f64>,
    /// Per slot: device above the elevation mask.
    pub coverage: Vec<bool>,
}

/// Scheduling bits x^i, one per slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleAction {
    pub bits: Vec<bool>,
}

impl ScheduleAction {
    pub fn none(slots: usize) -> Self {
        Self { bits: vec![false; slots] }
    }

    /// Bit b of `index` schedules slot b.
    pub fn from_index(index: usize, slots: usize) -> Result<Self> {
        if slots < usize::BITS as usize && index >> slots != 0 {
            return Err(Error::Index { index, len: 1 << slots });
        }
        Ok(Self {
            bits: (0..slots).map(|b| index >> b & 1 == 1).collect(),
        })
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .fold(0, |acc, (b, _)| acc | 1 << b)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&x| x).count()
    }
}

/// Per-slot link terms, evaluated for every slot whether or not it is covered.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkTerms {
    pub distance: f64,
    pub snr: f64,
    pub rate: f64,
    pub quality: f64,
    pub in_coverage: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardBreakdown {
    pub utility: f64,
    pub cost: f64,
    /// Always `utility - cost`.
    pub reward: f64,
    pub links: Vec<LinkTerms>,
    pub sigma_cubesat: f64,
    pub sigma_uav: f64,
}

/// Normalized per-step metrics of one GS.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepMetrics {
    pub gs: usize,
    pub reward: f64,
    pub utility: f64,
    pub cost: f64,
    /// Largest utility any feasible action could have collected this step.
    pub best_utility: f64,
    /// `reward` over `best_utility`, clamped to [0, 1].
    pub normalized_reward: f64,
    /// Mean quality over scheduled links, 0 when nothing is scheduled.
    pub qos: f64,
    /// Scheduled capacity over ξ̄_i.
    pub capacity: f64,
    pub mean_residual_cubesat: f64,
    pub mean_residual_uav: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_index_round_trip() {
        for k in 0..16 {
            let a = ScheduleAction::from_index(k, 4).unwrap();
            assert_eq!(a.index(), k);
        }
        let a = ScheduleAction::from_index(0b101, 3).unwrap();
        assert_eq!(a.bits, vec![true, false, true]);
        assert_eq!(a.count(), 2);
        assert!(ScheduleAction::from_index(8, 3).is_err());
    }
}
