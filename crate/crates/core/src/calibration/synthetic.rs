use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::system::MeasurementRecord;
use crate::antenna::{AntennaPattern, AntennaPose};
use crate::error::{Error, Result};
use crate::geometry::{tessellate_icosahedron, EnvironmentMap, Vec3};
use crate::tracer::{trace_with_launch_set, Link, TraceConfig};

/// Settings for [`simulate_measurements`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticCampaign {
    pub tx_power_dbm: f64,
    /// Standard deviation of Normal noise added to measured powers, dB.
    pub noise_std_db: f64,
    pub seed: u64,
    /// Directional records per placement, strongest paths first.
    pub paths_per_placement: usize,
}

impl Default for SyntheticCampaign {
    fn default() -> Self {
        SyntheticCampaign {
            tx_power_dbm: 30.0,
            noise_std_db: 0.0,
            seed: 42,
            paths_per_placement: 1,
        }
    }
}

/// Directional measurements simulated on `env` (whose materials are the ground truth).
///
/// For each `(id, tx, rx)` the strongest paths with at least one interaction are
/// selected, both antennas are pointed along each and its power is recorded, plus
/// Normal noise when requested. Record ids are `<id>_<k>`.
pub fn simulate_measurements(
    env: &EnvironmentMap,
    placements: &[(String, Vec3, Vec3)],
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    config: &TraceConfig,
    campaign: &SyntheticCampaign,
) -> Result<Vec<MeasurementRecord>> {
    let SyntheticCampaign {
        tx_power_dbm,
        noise_std_db,
        seed,
        paths_per_placement,
    } = *campaign;
    if !(noise_std_db >= 0.0) {
        return Err(Error::invalid("noise standard deviation must be nonnegative"));
    }
    let tess = tessellate_icosahedron(config.tessellation_frequency)?;
    let cfg = TraceConfig {
        tx_power_dbm,
        discovery: true,
        scattering_enabled: false,
        ..config.clone()
    };
    let iso = AntennaPattern::isotropic(0.0);
    let found: Vec<Result<Vec<MeasurementRecord>>> = placements
        .par_iter()
        .map(|(id, tx, rx)| {
            let probe = AntennaPose::new(*tx, Vec3::X)?;
            let target = AntennaPose::new(*rx, Vec3::X)?;
            let link = Link {
                tx: &probe,
                rx: &target,
                tx_pattern: &iso,
                rx_pattern: &iso,
            };
            let result = trace_with_launch_set(env, &link, &cfg, &tess)?;
            result
                .components
                .iter()
                .filter(|c| !c.interactions.is_empty())
                .take(paths_per_placement)
                .enumerate()
                .map(|(k, best)| {
                    let tx_pose = AntennaPose::new(*tx, best.aod)?;
                    let rx_pose = AntennaPose::new(*rx, best.aoa)?;
                    let power = best.power_dbm
                        + tx_pattern.gain_toward(&tx_pose, best.aod)
                        + rx_pattern.gain_toward(&rx_pose, best.aoa);
                    Ok(MeasurementRecord {
                        id: format!("{id}_{k}"),
                        tx: tx_pose,
                        rx: rx_pose,
                        tx_power_dbm,
                        measured_power_dbm: power,
                        frequency_ghz: config.frequency_ghz,
                    })
                })
                .collect()
        })
        .collect();
    let mut records: Vec<MeasurementRecord> = found
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if noise_std_db > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, noise_std_db).map_err(|e| Error::invalid(e.to_string()))?;
        for r in &mut records {
            r.measured_power_dbm += noise.sample(&mut rng);
        }
    }
    Ok(records)
}
