use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbital::{
    elements_from_tle, elevation_angle, great_circle_distance, slant_distance, subpoint, EarthConstants,
    GeodeticPosition, KeplerSolver, TleRecord,
};

/// A ground site as read from the `--gs` CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundSite {
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    /// m
    #[serde(default)]
    pub altitude: f64,
}

/// Sampling window, seconds after the latest TLE epoch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitSpan {
    pub span: f64,
    pub step: f64,
    /// Minimum elevation for `visible`, degrees.
    pub mask_deg: f64,
}

/// One (time, satellite, site) sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    /// s after the reference epoch
    pub time: f64,
    /// Unix seconds.
    pub epoch: f64,
    pub satellite: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude: f64,
    pub ground_station: String,
    pub elevation_deg: f64,
    pub slant_range: f64,
    pub surface_distance: f64,
    pub visible: bool,
}

/// Sub-satellite track of every TLE against every site, sampled on a common
/// clock that starts at the latest epoch so no satellite runs backwards.
pub fn export_orbits(
    tles: &[TleRecord],
    sites: &[GroundSite],
    window: OrbitSpan,
    constants: &EarthConstants,
) -> Result<Vec<OrbitRow>> {
    if tles.is_empty() || sites.is_empty() {
        return Err(Error::Usage("need at least one TLE and one ground site".into()));
    }
    if !(window.step > 0.0 && window.span >= 0.0 && window.span.is_finite()) {
        return Err(Error::Usage(format!("span {} / step {} must be non-negative / positive", window.span, window.step)));
    }
    let positions = sites
        .iter()
        .map(|s| GeodeticPosition::from_degrees(s.latitude_deg, s.longitude_deg, s.altitude))
        .collect::<Result<Vec<_>>>()?;
    let elements = tles.iter().map(|t| elements_from_tle(t, constants)).collect::<Result<Vec<_>>>()?;
    let reference = tles.iter().map(|t| t.epoch).fold(f64::NEG_INFINITY, f64::max);
    let samples = (window.span / window.step).floor() as usize + 1;

    let mut rows = Vec::with_capacity(samples * tles.len() * sites.len());
    for k in 0..samples {
        let time = k as f64 * window.step;
        for (tle, el) in tles.iter().zip(&elements) {
            let sp = subpoint(el, time + reference - tle.epoch, constants, KeplerSolver::default())?;
            let name = if tle.name.is_empty() { tle.catalog_number.to_string() } else { tle.name.clone() };
            for (site, pos) in sites.iter().zip(&positions) {
                let elevation = elevation_angle(pos, &sp.position, constants).to_degrees();
                rows.push(OrbitRow {
                    time,
                    epoch: reference + time,
                    satellite: name.clone(),
                    latitude_deg: sp.position.latitude.to_degrees(),
                    longitude_deg: sp.position.longitude.to_degrees(),
                    altitude: sp.position.altitude,
                    ground_station: site.name.clone(),
                    elevation_deg: elevation,
                    slant_range: slant_distance(pos, &sp.position, constants),
                    surface_distance: great_circle_distance(pos, &sp.position, constants),
                    visible: elevation >= window.mask_deg,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::preset;

    #[test]
    fn grid_shape_and_visibility() {
        let tles = preset("small").unwrap().tle_records().unwrap();
        let sites = vec![
            GroundSite { name: "a".into(), latitude_deg: 10.0, longitude_deg: 20.0, altitude: 0.0 },
            GroundSite { name: "b".into(), latitude_deg: -40.0, longitude_deg: 170.0, altitude: 50.0 },
        ];
        let window = OrbitSpan { span: 600.0, step: 60.0, mask_deg: 10.0 };
        let rows = export_orbits(&tles, &sites, window, &EarthConstants::default()).unwrap();
        assert_eq!(rows.len(), 11 * tles.len() * 2);
        assert_eq!(rows.last().unwrap().time, 600.0);
        for r in &rows {
            assert_eq!(r.visible, r.elevation_deg >= 10.0);
            assert!(r.slant_range >= r.altitude - 1e-6);
            assert!(r.latitude_deg.abs() <= 51.7);
        }
    }

    #[test]
    fn site_under_satellite_sees_it_overhead() {
        let tles = preset("tiny").unwrap().tle_records().unwrap();
        let c = EarthConstants::default();
        let window = OrbitSpan { span: 0.0, step: 1.0, mask_deg: 10.0 };
        let probe = GroundSite { name: "p".into(), latitude_deg: 0.0, longitude_deg: 0.0, altitude: 0.0 };
        let first = &export_orbits(&tles[..1], &[probe], window, &c).unwrap()[0];
        let under = GroundSite {
            name: "u".into(),
            latitude_deg: first.latitude_deg,
            longitude_deg: first.longitude_deg,
            altitude: 0.0,
        };
        let row = &export_orbits(&tles[..1], &[under], window, &c).unwrap()[0];
        assert!((row.elevation_deg - 90.0).abs() < 1e-6, "{row:?}");
        assert!((row.slant_range - row.altitude).abs() < 1e-3);
        assert!(row.surface_distance < 1e-3);
        assert!(row.visible);
    }

    #[test]
    fn bad_window_is_usage_error() {
        let tles = preset("tiny").unwrap().tle_records().unwrap();
        let site = GroundSite { name: "a".into(), latitude_deg: 0.0, longitude_deg: 0.0, altitude: 0.0 };
        let w = OrbitSpan { span: 10.0, step: 0.0, mask_deg: 0.0 };
        assert!(matches!(export_orbits(&tles, &[site], w, &EarthConstants::default()), Err(Error::Usage(_))));
        let w = OrbitSpan { span: 10.0, step: 1.0, mask_deg: 0.0 };
        assert!(export_orbits(&tles, &[], w, &EarthConstants::default()).is_err());
    }
}
