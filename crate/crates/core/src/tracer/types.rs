use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::propagation::{ScatteringParameters, SPEED_OF_LIGHT};

/// How a ray interacted with a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InteractionKind {
    Reflection,
    Penetration,
    Scattering,
}

impl InteractionKind {
    pub fn code(self) -> char {
        match self {
            InteractionKind::Reflection => 'R',
            InteractionKind::Penetration => 'P',
            InteractionKind::Scattering => 'S',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'R' => Some(InteractionKind::Reflection),
            'P' => Some(InteractionKind::Penetration),
            'S' => Some(InteractionKind::Scattering),
            _ => None,
        }
    }
}

/// One surface interaction along a traced path.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub obstruction: String,
    pub material: String,
    pub point: Vec3,
    /// Angle from the surface normal, `[0, π/2]`.
    pub incidence_angle: f64,
}

/// One entry of a surface signature. Scattering entries carry the launch-direction
/// index of the ray that found the scatter point, so distinct scatter points on the
/// same surface stay distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignatureEntry {
    pub obstruction: String,
    pub kind: InteractionKind,
    pub tile: Option<u32>,
}

/// Ordered sequence of surfaces a path interacts with.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Signature(pub Vec<SignatureEntry>);

impl Signature {
    pub fn los() -> Self {
        Signature(Vec::new())
    }

    pub fn count(&self, kind: InteractionKind) -> usize {
        self.0.iter().filter(|e| e.kind == kind).count()
    }

    pub fn is_los(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Signature {
    /// `LOS` for the direct path, else `id:K` entries joined by `>`; scattering entries
    /// append `@tile`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("LOS");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            write!(f, "{}:{}", e.obstruction, e.kind.code())?;
            if let Some(t) = e.tile {
                write!(f, "@{t}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "LOS" || s.is_empty() {
            return Ok(Signature::los());
        }
        let mut out = Vec::new();
        for part in s.split('>') {
            let (id, rest) = part
                .rsplit_once(':')
                .ok_or_else(|| Error::schema("signature", format!("malformed entry `{part}`")))?;
            let (code, tile) = match rest.split_once('@') {
                Some((c, t)) => (
                    c,
                    Some(t.parse::<u32>().map_err(|_| {
                        Error::schema("signature", format!("bad tile in `{part}`"))
                    })?),
                ),
                None => (rest, None),
            };
            let mut chars = code.chars();
            let kind = match (chars.next(), chars.next()) {
                (Some(c), None) => InteractionKind::from_code(c),
                _ => None,
            }
            .ok_or_else(|| Error::schema("signature", format!("bad interaction code in `{part}`")))?;
            out.push(SignatureEntry {
                obstruction: id.to_string(),
                kind,
                tile,
            });
        }
        Ok(Signature(out))
    }
}

/// One traced propagation path.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathComponent {
    /// Departure direction at the transmitter.
    pub aod: Vec3,
    /// Arrival direction at the receiver, pointing from the receiver back along the
    /// incoming ray.
    pub aoa: Vec3,
    pub tof_ns: f64,
    pub path_length_m: f64,
    pub power_dbm: f64,
    pub interactions: Vec<Interaction>,
    pub surface_signature: Signature,
    /// Path vertices from transmitter to receiver.
    pub points: Vec<Vec3>,
    /// Geometry comes from exact image/scatter construction rather than a raw SBR ray.
    pub corrected: bool,
}

impl MultipathComponent {
    pub fn n_reflections(&self) -> usize {
        self.surface_signature.count(InteractionKind::Reflection)
    }

    pub fn n_penetrations(&self) -> usize {
        self.surface_signature.count(InteractionKind::Penetration)
    }

    pub fn n_scatterings(&self) -> usize {
        self.surface_signature.count(InteractionKind::Scattering)
    }
}

/// Time of flight in ns for a path length in meters.
pub fn tof_ns(path_length_m: f64) -> f64 {
    path_length_m / SPEED_OF_LIGHT * 1e9
}

/// Tracer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    /// Icosahedral tessellation frequency of the launch grid.
    pub tessellation_frequency: u32,
    pub max_reflections: u32,
    pub max_penetrations: u32,
    pub rx_sensitivity_dbm: f64,
    pub frequency_ghz: f64,
    pub tx_power_dbm: f64,
    pub scattering_enabled: bool,
    /// Tessellation frequency of the half-icosahedron launched at scatter points.
    pub scatter_tessellation_frequency: u32,
    pub scattering: ScatteringParameters,
    /// Keeps every geometric candidate regardless of power (no sensitivity drop).
    pub discovery: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            tessellation_frequency: 30,
            max_reflections: 5,
            max_penetrations: 3,
            rx_sensitivity_dbm: -120.0,
            frequency_ghz: 28.0,
            tx_power_dbm: 0.0,
            scattering_enabled: false,
            scatter_tessellation_frequency: 10,
            scattering: ScatteringParameters::default(),
            discovery: false,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tessellation_frequency == 0 || self.scatter_tessellation_frequency == 0 {
            return Err(Error::invalid("tessellation frequency must be at least 1"));
        }
        if !(self.frequency_ghz > 0.0) || !self.frequency_ghz.is_finite() {
            return Err(Error::invalid(format!("frequency must be positive, got {}", self.frequency_ghz)));
        }
        if !self.rx_sensitivity_dbm.is_finite() {
            return Err(Error::invalid("RX sensitivity must be finite"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::invalid("TX power must be finite"));
        }
        self.scattering.validate()
    }
}

/// Counters collected during a trace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceStats {
    pub rays_launched: usize,
    /// Ray/scene intersection queries in the launch phase.
    pub hits_tested: usize,
    /// Ray segments followed (including branches).
    pub segments: usize,
    /// Distinct signatures captured by reception spheres.
    pub candidates: usize,
    pub components_before_dedup: usize,
    pub components_after_dedup: usize,
}

/// Output of [`crate::tracer::trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    /// Sorted by descending power; one per signature.
    pub components: Vec<MultipathComponent>,
    pub los_blocked: bool,
    pub stats: TraceStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_text_round_trip() {
        let sig = Signature(vec![
            SignatureEntry { obstruction: "north".into(), kind: InteractionKind::Reflection, tile: None },
            SignatureEntry { obstruction: "glass-1".into(), kind: InteractionKind::Penetration, tile: None },
            SignatureEntry { obstruction: "floor".into(), kind: InteractionKind::Scattering, tile: Some(812) },
        ]);
        let text = sig.to_string();
        assert_eq!(text, "north:R>glass-1:P>floor:S@812");
        assert_eq!(text.parse::<Signature>().unwrap(), sig);
        assert_eq!("LOS".parse::<Signature>().unwrap(), Signature::los());
        assert!("north:X".parse::<Signature>().is_err());
        assert!("north".parse::<Signature>().is_err());
    }

    #[test]
    fn tof_of_ten_meters() {
        assert!((tof_ns(10.0) - 33.356_409_52).abs() < 1e-6);
    }
}
