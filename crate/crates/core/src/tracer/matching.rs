use crate::geometry::Vec3;

use super::types::MultipathComponent;

/// A directional measurement: pointing angles of the strongest observed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredDirection {
    pub aoa: Vec3,
    pub aod: Vec3,
    pub power_dbm: f64,
}

/// Pairing of a measured direction with its closest simulated component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentMatch {
    pub measured: usize,
    /// Index into the simulated list; `None` when nothing is within the threshold.
    pub simulated: Option<usize>,
    /// AoA deviation plus AoD deviation of the best candidate, degrees
    /// (infinite if there were no candidates).
    pub deviation_deg: f64,
}

/// Picks, for each measured record, the simulated component with the least summed
/// AoA and AoD deviation. Candidates above `threshold_deg` are reported unmatched.
/// Ties go to the earlier (stronger, when sorted) simulated component.
pub fn match_components(
    simulated: &[MultipathComponent],
    measured: &[MeasuredDirection],
    threshold_deg: f64,
) -> Vec<ComponentMatch> {
    measured
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let mut best: Option<(usize, f64)> = None;
            for (si, s) in simulated.iter().enumerate() {
                let dev = (s.aoa.angle_to(m.aoa) + s.aod.angle_to(m.aod)).to_degrees();
                if best.is_none_or(|(_, b)| dev < b) {
                    best = Some((si, dev));
                }
            }
            match best {
                Some((si, dev)) if dev <= threshold_deg => ComponentMatch {
                    measured: mi,
                    simulated: Some(si),
                    deviation_deg: dev,
                },
                Some((_, dev)) => ComponentMatch {
                    measured: mi,
                    simulated: None,
                    deviation_deg: dev,
                },
                None => ComponentMatch {
                    measured: mi,
                    simulated: None,
                    deviation_deg: f64::INFINITY,
                },
            }
        })
        .collect()
}
