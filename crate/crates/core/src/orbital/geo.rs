use super::{EarthConstants, GeodeticPosition};

/// Surface distance between the ground projections of `p` and `q`.
pub fn great_circle_distance(p: &GeodeticPosition, q: &GeodeticPosition, constants: &EarthConstants) -> f64 {
    constants.radius * central_angle(p, q)
}

/// Same angle as acos(cos φ₁ cos φ₂ cos Δλ + sin φ₁ sin φ₂), evaluated in the
/// atan2 form, which stays exact for coincident and antipodal points.
fn central_angle(p: &GeodeticPosition, q: &GeodeticPosition) -> f64 {
    // Fixed argument order keeps the result bit-symmetric.
    let (p, q) = if (p.latitude, p.longitude) <= (q.latitude, q.longitude) {
        (p, q)
    } else {
        (q, p)
    };
    let (s1, c1) = p.latitude.sin_cos();
    let (s2, c2) = q.latitude.sin_cos();
    let (sd, cd) = (q.longitude - p.longitude).sin_cos();
    let cosine = s1 * s2 + c1 * c2 * cd;
    let y = c2 * sd;
    let x = c1 * s2 - s1 * c2 * cd;
    (y * y + x * x).sqrt().atan2(cosine)
}

/// sqrt(H² + V²) with H the great-circle distance and V the altitude difference.
pub fn slant_distance(gs: &GeodeticPosition, device: &GeodeticPosition, constants: &EarthConstants) -> f64 {
    let h = great_circle_distance(gs, device, constants);
    let v = device.altitude - gs.altitude;
    h.hypot(v)
}

/// Elevation of `device` above the local horizon of `gs` on a spherical Earth.
pub fn elevation_angle(gs: &GeodeticPosition, device: &GeodeticPosition, constants: &EarthConstants) -> f64 {
    let gamma = central_angle(gs, device);
    let rg = constants.radius + gs.altitude;
    let rd = constants.radius + device.altitude;
    // Vertical and horizontal offsets in the site's local frame; atan2 keeps
    // full precision near the zenith where asin would not.
    let (s, c) = gamma.sin_cos();
    let up = rd * c - rg;
    let across = rd * s;
    if up == 0.0 && across == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    up.atan2(across)
}
