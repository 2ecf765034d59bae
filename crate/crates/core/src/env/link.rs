use super::config::{GroundStationConfig, LinkConfig};
use crate::error::{Error, Result};

/// Γ(d) = γ₀·(d_ref/d)^α.
pub fn snr(d: f64, link: &LinkConfig) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("link distance {d} must be positive")));
    }
    Ok(link.gamma0 * (link.reference_distance / d).powf(link.path_exponent))
}

/// Λ = W·log₂(1 + Γ) for a given SNR.
pub fn rate_from_snr(gamma: f64, link: &LinkConfig) -> f64 {
    link.bandwidth * gamma.ln_1p() / std::f64::consts::LN_2
}

/// q = 1/(1 + exp(−ξ₁(Λ − ξ₂))) for a given rate.
pub fn quality_from_rate(rate: f64, link: &LinkConfig) -> f64 {
    1.0 / (1.0 + (-link.xi1 * (rate - link.xi2)).exp())
}

pub fn data_rate(d: f64, link: &LinkConfig) -> Result<f64> {
    Ok(rate_from_snr(snr(d, link)?, link))
}

pub fn quality(d: f64, link: &LinkConfig) -> Result<f64> {
    Ok(quality_from_rate(data_rate(d, link)?, link))
}

/// ξ̄_i(t) = ϱ/(1 + e^(−ζ(t − τ))), t in steps.
pub fn capacity_limit(gs: &GroundStationConfig, t: f64) -> f64 {
    gs.rho / (1.0 + (-gs.zeta * (t - gs.tau)).exp())
}

/// Link energy e₀·(d/d_ref)^α·Δt of one scheduled step, J.
pub fn link_energy(d: f64, link: &LinkConfig, dt: f64) -> f64 {
    link.link_power * (d / link.reference_distance).powf(link.path_exponent) * dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gs(rho: f64, zeta: f64, tau: f64) -> GroundStationConfig {
        GroundStationConfig {
            latitude_deg: 0.0,
            longitude_deg: 0.0,
            altitude: 0.0,
            load: 0.0,
            rho,
            zeta,
            tau,
            max_served: 1,
            cubesats: vec![0],
            uavs: vec![],
        }
    }

    #[test]
    fn snr_reference_points() {
        let link = LinkConfig::default();
        assert_eq!(snr(link.reference_distance, &link).unwrap(), link.gamma0);
        let quarter = snr(2.0 * link.reference_distance, &link).unwrap();
        assert!((quarter - link.gamma0 / 4.0).abs() < 1e-9);
        assert!(snr(0.0, &link).is_err());
        assert!(snr(-5.0, &link).is_err());
        assert!(data_rate(0.0, &link).is_err());
    }

    #[test]
    fn rate_identities() {
        let link = LinkConfig::default();
        let w = link.bandwidth;
        assert_eq!(rate_from_snr(0.0, &link), 0.0);
        assert!((rate_from_snr(1.0, &link) - w).abs() < 1e-12 * w);
        assert!((rate_from_snr(3.0, &link) - 2.0 * w).abs() < 1e-12 * w);
    }

    #[test]
    fn quality_sigmoid() {
        let link = LinkConfig::default();
        assert_eq!(quality_from_rate(1024.0, &link), 0.5);
        let q = quality_from_rate(1024.0 + 100.0 * 3f64.ln(), &link);
        assert!((q - 0.75).abs() < 1e-12);
        assert!(quality_from_rate(1e6, &link) > 1.0 - 1e-12);
        assert!(quality_from_rate(-1e3, &link) > 0.0);
    }

    #[test]
    fn capacity_curve() {
        let g = gs(80.0, 0.3, 10.0);
        assert_eq!(capacity_limit(&g, 10.0), 40.0);
        assert!((capacity_limit(&g, 1e4) - 80.0).abs() < 1e-12);
        let flat = gs(80.0, 0.0, 10.0);
        assert_eq!(capacity_limit(&flat, 0.0), 40.0);
        assert_eq!(capacity_limit(&flat, 1e3), 40.0);
    }

    #[test]
    fn link_energy_at_reference() {
        let link = LinkConfig::default();
        let e = link_energy(link.reference_distance, &link, 5.0);
        assert_eq!(e, link.link_power * 5.0);
    }

    proptest! {
        #[test]
        fn snr_decreasing(a in 1.0f64..1e7, b in 1.0f64..1e7) {
            prop_assume!(a != b);
            let link = LinkConfig::default();
            let (near, far) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(snr(near, &link).unwrap() > snr(far, &link).unwrap());
        }

        #[test]
        fn quality_in_unit_interval_and_monotone(a in -1e4f64..3e3, b in -1e4f64..3e3) {
            let link = LinkConfig::default();
            let (qa, qb) = (quality_from_rate(a, &link), quality_from_rate(b, &link));
            prop_assert!(qa > 0.0 && qa < 1.0);
            if a < b { prop_assert!(qa <= qb); }
        }
    }
}
