//! Rotationally symmetric antenna patterns built from a single azimuth cut.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Synthetic patterns never drop below this relative gain, dB.
pub const SYNTHETIC_FLOOR_DB: f64 = -40.0;

/// Position and pointing of an antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPose {
    pub position: Vec3,
    pub boresight: Vec3,
}

impl AntennaPose {
    pub fn new(position: Vec3, boresight: Vec3) -> Result<Self> {
        let boresight = boresight
            .normalized()
            .ok_or_else(|| Error::invalid("antenna boresight must be nonzero"))?;
        if !position.is_finite() {
            return Err(Error::invalid("antenna position must be finite"));
        }
        Ok(AntennaPose { position, boresight })
    }

    /// Pose pointed by azimuth/elevation angles in degrees.
    pub fn from_az_el(position: Vec3, az_deg: f64, el_deg: f64) -> Result<Self> {
        AntennaPose::new(position, Vec3::from_az_el_deg(az_deg, el_deg))
    }
}

/// Relative gain cut rotated about boresight to form a 3D pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaPattern {
    pub boresight_gain_dbi: f64,
    /// `(angle_deg, relative_gain_db)` sorted by angle over `[-180, 180]`.
    cut: Vec<(f64, f64)>,
    pub hpbw_deg: f64,
}

impl AntennaPattern {
    /// Validates and stores a measured cut.
    pub fn from_cut(boresight_gain_dbi: f64, hpbw_deg: f64, mut cut: Vec<(f64, f64)>) -> Result<Self> {
        if cut.len() < 2 {
            return Err(Error::invalid("antenna cut needs at least two samples"));
        }
        if cut.iter().any(|(a, g)| !a.is_finite() || !g.is_finite()) {
            return Err(Error::invalid("antenna cut contains non-finite values"));
        }
        cut.sort_by(|a, b| a.0.total_cmp(&b.0));
        if cut.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("antenna cut has duplicate angles"));
        }
        let (first, last) = (cut[0].0, cut[cut.len() - 1].0);
        if first > -180.0 + 1e-9 || last < 180.0 - 1e-9 || first < -180.0 - 1e-9 || last > 180.0 + 1e-9 {
            return Err(Error::invalid(format!(
                "antenna cut must span [-180, 180] degrees, got [{first}, {last}]"
            )));
        }
        if let Some((a, g)) = cut.iter().find(|(_, g)| *g > 0.01) {
            return Err(Error::invalid(format!(
                "relative gain must be ≤ 0 dB, got {g} dB at {a}°"
            )));
        }
        let pattern = AntennaPattern {
            boresight_gain_dbi,
            cut,
            hpbw_deg,
        };
        let at_zero = pattern.cut_value(0.0);
        if at_zero.abs() > 0.01 {
            return Err(Error::invalid(format!(
                "relative gain at boresight must be 0 dB, got {at_zero} dB"
            )));
        }
        Ok(pattern)
    }

    /// Uniform pattern with the given gain.
    pub fn isotropic(gain_dbi: f64) -> Self {
        AntennaPattern {
            boresight_gain_dbi: gain_dbi,
            cut: vec![(-180.0, 0.0), (180.0, 0.0)],
            hpbw_deg: 360.0,
        }
    }

    pub fn cut(&self) -> &[(f64, f64)] {
        &self.cut
    }

    /// Linear-in-dB interpolation of the cut at a signed angle.
    fn cut_value(&self, angle_deg: f64) -> f64 {
        let c = &self.cut;
        let i = c.partition_point(|(a, _)| *a < angle_deg);
        if i == 0 {
            return c[0].1;
        }
        if i == c.len() {
            return c[c.len() - 1].1;
        }
        let (a0, g0) = c[i - 1];
        let (a1, g1) = c[i];
        g0 + (g1 - g0) * (angle_deg - a0) / (a1 - a0)
    }

    /// Relative gain at off-boresight angle `theta_deg ∈ [0, 180]`; the two sides of
    /// the cut are averaged so the result depends on θ alone.
    pub fn relative_gain_db(&self, theta_deg: f64) -> f64 {
        0.5 * (self.cut_value(theta_deg) + self.cut_value(-theta_deg))
    }

    /// Largest gain over all directions, dBi.
    pub fn peak_gain_dbi(&self) -> f64 {
        self.boresight_gain_dbi + self.cut.iter().map(|(_, g)| *g).fold(f64::NEG_INFINITY, f64::max).max(0.0)
    }

    /// Absolute gain toward a direction, dBi.
    pub fn gain_toward(&self, pose: &AntennaPose, direction: Vec3) -> f64 {
        let theta = pose.boresight.angle_to(direction).to_degrees();
        self.boresight_gain_dbi + self.relative_gain_db(theta)
    }
}

/// Gaussian main lobe `-3·(2θ/HPBW)²` dB sampled every 0.1°, floored at −40 dB.
pub fn synthetic_pattern(hpbw_deg: f64, boresight_gain_dbi: f64) -> Result<AntennaPattern> {
    if !(hpbw_deg > 0.0 && hpbw_deg < 180.0) {
        return Err(Error::invalid(format!("HPBW must be in (0, 180) degrees, got {hpbw_deg}")));
    }
    let cut = (-1800..=1800)
        .map(|i| {
            let a = i as f64 / 10.0;
            (a, synthetic_relative_gain(hpbw_deg, a))
        })
        .collect();
    AntennaPattern::from_cut(boresight_gain_dbi, hpbw_deg, cut)
}

/// Closed-form relative gain of [`synthetic_pattern`] at `theta_deg`.
pub fn synthetic_relative_gain(hpbw_deg: f64, theta_deg: f64) -> f64 {
    (-3.0 * (2.0 * theta_deg / hpbw_deg).powi(2)).max(SYNTHETIC_FLOOR_DB)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boresight_gain_of_142ghz_horn() {
        let p = synthetic_pattern(8.0, 27.0).unwrap();
        let pose = AntennaPose::new(Vec3::ZERO, Vec3::X).unwrap();
        assert!((p.gain_toward(&pose, Vec3::X) - 27.0).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_lookup() {
        let cut = vec![(-180.0, -30.0), (-90.0, -30.0), (0.0, 0.0), (90.0, -30.0), (180.0, -30.0)];
        let p = AntennaPattern::from_cut(20.0, 60.0, cut).unwrap();
        let pose = AntennaPose::new(Vec3::ZERO, Vec3::Z).unwrap();
        assert!((p.gain_toward(&pose, Vec3::X) - (-10.0)).abs() < 1e-12);
    }

    #[test]
    fn half_power_at_half_beamwidth() {
        for hpbw in [7.0, 8.0, 10.9, 15.0, 30.0] {
            let p = synthetic_pattern(hpbw, 20.0).unwrap();
            let pose = AntennaPose::new(Vec3::ZERO, Vec3::X).unwrap();
            let d = Vec3::from_az_el_deg(hpbw / 2.0, 0.0);
            assert!((p.gain_toward(&pose, d) - 17.0).abs() < 0.2, "hpbw {hpbw}");
        }
    }

    #[test]
    fn synthetic_values() {
        assert!((synthetic_relative_gain(30.0, 15.0) + 3.0).abs() < 1e-12);
        assert_eq!(synthetic_relative_gain(8.0, 0.0), 0.0);
        assert_eq!(synthetic_relative_gain(8.0, 16.0), -40.0);
        assert!(synthetic_pattern(0.0, 10.0).is_err());
        assert!(synthetic_pattern(180.0, 10.0).is_err());
    }

    #[test]
    fn cut_validation() {
        assert!(AntennaPattern::from_cut(10.0, 30.0, vec![(-90.0, 0.0), (90.0, 0.0)]).is_err());
        assert!(AntennaPattern::from_cut(10.0, 30.0, vec![(-180.0, 0.0), (0.0, 1.0), (180.0, 0.0)]).is_err());
        assert!(AntennaPattern::from_cut(10.0, 30.0, vec![(-180.0, -5.0), (0.0, -2.0), (180.0, -5.0)]).is_err());
        assert!(AntennaPose::new(Vec3::ZERO, Vec3::ZERO).is_err());
    }

    fn rotate_about(axis: Vec3, v: Vec3, angle: f64) -> Vec3 {
        // Rodrigues' rotation.
        let (s, c) = angle.sin_cos();
        v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
    }

    proptest! {
        #[test]
        fn rotation_about_boresight_is_invariant(
            az in -180.0f64..180.0, el in -89.0f64..89.0,
            daz in -180.0f64..180.0, del in -89.0f64..89.0,
            spin in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = synthetic_pattern(10.9, 24.5).unwrap();
            let pose = AntennaPose::from_az_el(Vec3::ZERO, az, el).unwrap();
            let d = Vec3::from_az_el_deg(daz, del);
            let r = rotate_about(pose.boresight, d, spin);
            prop_assert!((p.gain_toward(&pose, d) - p.gain_toward(&pose, r)).abs() < 1e-12);
        }

        #[test]
        fn boresight_is_maximum(daz in -180.0f64..180.0, del in -89.0f64..89.0) {
            let p = synthetic_pattern(15.0, 20.0).unwrap();
            let pose = AntennaPose::new(Vec3::ZERO, Vec3::Y).unwrap();
            prop_assert!(p.gain_toward(&pose, Vec3::from_az_el_deg(daz, del)) <= p.gain_toward(&pose, Vec3::Y));
        }
    }
}
