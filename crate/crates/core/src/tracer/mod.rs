//! Hybrid tracer: ray launching finds which surfaces a path visits, the image method
//! then rebuilds each path exactly.

mod image;
mod launch;
mod matching;
mod types;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

pub use image::{correct_path, CorrectedPath, PathInteraction, SurfaceRef};
pub use matching::{match_components, ComponentMatch, MeasuredDirection};
pub use types::{
    tof_ns, Interaction, InteractionKind, MultipathComponent, Signature, SignatureEntry,
    TraceConfig, TraceResult, TraceStats,
};

use crate::antenna::{AntennaPattern, AntennaPose};
use crate::error::{Error, Result};
use crate::geometry::{
    tessellate_icosahedron, EnvironmentMap, Tessellation, Vec3, MIN_HIT_DISTANCE,
};
use crate::propagation::{fspl_db_unchecked, is_rough, scatter_gain, scattered_power_dbm, wavelength_m};
use launch::{launch_rays, passes_reception_sphere, FirstHit, PowerGate};

/// Transmitter/receiver antennas for one link.
#[derive(Debug, Clone, Copy)]
pub struct Link<'a> {
    pub tx: &'a AntennaPose,
    pub rx: &'a AntennaPose,
    pub tx_pattern: &'a AntennaPattern,
    pub rx_pattern: &'a AntennaPattern,
}

/// Traces every propagation path from `tx` to `rx`.
///
/// The direct path is always checked. Launch rays are followed through reflections
/// and penetrations; each surface sequence whose ray crosses the reception sphere is
/// rebuilt with [`correct_path`], powered with the link budget and deduplicated. With
/// scattering enabled, first-order hit points on rough surfaces also re-radiate a
/// half-icosahedron of rays toward the receiver.
pub fn trace(
    env: &EnvironmentMap,
    tx: &AntennaPose,
    rx: &AntennaPose,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    config: &TraceConfig,
) -> Result<TraceResult> {
    let tess = tessellate_icosahedron(config.tessellation_frequency)?;
    trace_with_launch_set(
        env,
        &Link { tx, rx, tx_pattern, rx_pattern },
        config,
        &tess,
    )
}

/// [`trace`] with a caller-supplied launch set, so repeated traces can share one
/// tessellation.
pub fn trace_with_launch_set(
    env: &EnvironmentMap,
    link: &Link<'_>,
    config: &TraceConfig,
    tess: &Tessellation,
) -> Result<TraceResult> {
    config.validate()?;
    let (txp, rxp) = (link.tx.position, link.rx.position);
    if txp.distance(rxp) <= MIN_HIT_DISTANCE {
        return Err(Error::invalid("transmitter and receiver coincide"));
    }
    for (name, p) in [("transmitter", txp), ("receiver", rxp)] {
        if !env.contains(p) {
            return Err(Error::invalid(format!(
                "{name} at ({}, {}, {}) lies outside the environment bounds",
                p.x, p.y, p.z
            )));
        }
    }

    let gate = PowerGate {
        base_dbm: config.tx_power_dbm + link.rx_pattern.peak_gain_dbi(),
        sensitivity_dbm: config.rx_sensitivity_dbm,
        enabled: !config.discovery,
    };
    let tx_gain = |d: Vec3| link.tx_pattern.gain_toward(link.tx, d);
    let outcome = launch_rays(env, tess, txp, rxp, config, &gate, tx_gain, config.scattering_enabled);

    let mut stats = TraceStats {
        rays_launched: tess.len(),
        hits_tested: outcome.hits_tested,
        segments: outcome.segments,
        ..TraceStats::default()
    };

    // Direct path: blocked if anything lies on the segment; through penetrable
    // surfaces it becomes a penetration-only candidate.
    let mut candidates = outcome.candidates;
    let direct = env.crossings(txp, (rxp - txp) / txp.distance(rxp), txp.distance(rxp), &[]);
    let los_blocked = !direct.is_empty();
    if direct.len() <= config.max_penetrations as usize
        && direct.iter().all(|h| !env.material_of(h.obstruction).is_opaque())
    {
        candidates.insert(
            direct
                .iter()
                .map(|h| (h.obstruction, InteractionKind::Penetration))
                .collect(),
        );
    }
    stats.candidates = candidates.len();

    let candidates: Vec<Vec<SurfaceRef>> = candidates.into_iter().collect();
    let mut raw: Vec<MultipathComponent> = candidates
        .par_iter()
        .filter_map(|sig| {
            let path = correct_path(env, sig, txp, rxp)?;
            Some(specular_component(env, link, config, &path))
        })
        .collect();

    if config.scattering_enabled {
        let mut first_hits = outcome.first_hits;
        first_hits.sort_by_key(|f| f.launch);
        let scatter_tess = tessellate_icosahedron(config.scatter_tessellation_frequency)?;
        let scattered: Vec<MultipathComponent> = first_hits
            .par_iter()
            .filter_map(|fh| scatter_component(env, link, config, &scatter_tess, fh))
            .collect();
        raw.extend(scattered);
    }

    stats.components_before_dedup = raw.len();
    let mut components = dedup_components(raw);
    if !config.discovery {
        components.retain(|c| c.power_dbm >= config.rx_sensitivity_dbm);
    }
    stats.components_after_dedup = components.len();
    Ok(TraceResult {
        components,
        los_blocked,
        stats,
    })
}

fn signature_of(env: &EnvironmentMap, path: &CorrectedPath) -> Signature {
    Signature(
        path.interactions
            .iter()
            .map(|i| SignatureEntry {
                obstruction: env.obstruction(i.obstruction).id.clone(),
                kind: i.kind,
                tile: None,
            })
            .collect(),
    )
}

fn specular_component(
    env: &EnvironmentMap,
    link: &Link<'_>,
    config: &TraceConfig,
    path: &CorrectedPath,
) -> MultipathComponent {
    let losses: f64 = path
        .interactions
        .iter()
        .map(|i| {
            let m = env.material_of(i.obstruction);
            match i.kind {
                InteractionKind::Reflection => m.effective_reflection_loss_db(),
                InteractionKind::Penetration => m.effective_penetration_loss_db().unwrap_or(0.0),
                InteractionKind::Scattering => 0.0,
            }
        })
        .sum();
    let power_dbm = config.tx_power_dbm
        + link.tx_pattern.gain_toward(link.tx, path.aod)
        + link.rx_pattern.gain_toward(link.rx, path.aoa)
        - fspl_db_unchecked(path.length, config.frequency_ghz)
        - losses;
    MultipathComponent {
        aod: path.aod,
        aoa: path.aoa,
        tof_ns: tof_ns(path.length),
        path_length_m: path.length,
        power_dbm,
        interactions: path
            .interactions
            .iter()
            .map(|i| Interaction {
                kind: i.kind,
                obstruction: env.obstruction(i.obstruction).id.clone(),
                material: env.obstruction(i.obstruction).material_id.clone(),
                point: i.point,
                incidence_angle: i.incidence_angle,
            })
            .collect(),
        surface_signature: signature_of(env, path),
        points: path.points.clone(),
        corrected: true,
    }
}

fn scatter_component(
    env: &EnvironmentMap,
    link: &Link<'_>,
    config: &TraceConfig,
    scatter_tess: &Tessellation,
    fh: &FirstHit,
) -> Option<MultipathComponent> {
    let obs = env.obstruction(fh.hit.obstruction);
    let material = env.material_of(fh.hit.obstruction);
    let lambda = wavelength_m(config.frequency_ghz);
    if !(material.scattering || is_rough(material, lambda, fh.hit.incidence_angle)) {
        return None;
    }
    let s = fh.hit.point;
    let (txp, rxp) = (link.tx.position, link.rx.position);
    // Scatter rays leave on the side the incident ray came from.
    let n = obs.normal();
    let facing = if fh.dir.dot(n) < 0.0 { n } else { -n };
    let to_rx = rxp - s;
    let seg2 = to_rx.norm();
    if seg2 <= MIN_HIT_DISTANCE || to_rx.dot(facing) <= 0.0 {
        return None;
    }
    let caught = scatter_tess
        .directions
        .iter()
        .filter(|d| d.dot(facing) >= -1e-12)
        .any(|d| passes_reception_sphere(s, *d, 0.0, f64::INFINITY, 0.0, rxp, scatter_tess.coverage_spacing() / 3f64.sqrt()));
    if !caught {
        return None;
    }
    let out_dir = to_rx / seg2;
    if !env.crossings(s, out_dir, seg2, &[fh.hit.obstruction]).is_empty() {
        return None;
    }
    let seg1 = fh.hit.distance;
    let incident_dbm = config.tx_power_dbm + link.tx_pattern.gain_toward(link.tx, fh.dir)
        - fspl_db_unchecked(seg1, config.frequency_ghz);
    let psi_forward = out_dir.angle_to(fh.dir.reflect(n));
    let psi_back = out_dir.angle_to(-fh.dir);
    let lobe = scatter_gain(psi_forward, psi_back, &config.scattering).ok()?;
    if lobe <= 0.0 {
        return None;
    }
    let aoa = -out_dir;
    let power_dbm = scattered_power_dbm(incident_dbm, seg1, seg2, lobe, &config.scattering, config.frequency_ghz).ok()?
        + link.rx_pattern.gain_toward(link.rx, aoa);
    let length = seg1 + seg2;
    Some(MultipathComponent {
        aod: fh.dir,
        aoa,
        tof_ns: tof_ns(length),
        path_length_m: length,
        power_dbm,
        interactions: vec![Interaction {
            kind: InteractionKind::Scattering,
            obstruction: obs.id.clone(),
            material: obs.material_id.clone(),
            point: s,
            incidence_angle: fh.hit.incidence_angle,
        }],
        surface_signature: Signature(vec![SignatureEntry {
            obstruction: obs.id.clone(),
            kind: InteractionKind::Scattering,
            tile: Some(fh.launch),
        }]),
        points: vec![txp, s, rxp],
        corrected: true,
    })
}

fn by_power_then_signature(a: &(String, MultipathComponent), b: &(String, MultipathComponent)) -> Ordering {
    b.1.power_dbm
        .total_cmp(&a.1.power_dbm)
        .then_with(|| a.0.cmp(&b.0))
}

/// One component per surface signature, preferring corrected geometry, then higher
/// power. Output is sorted by descending power with ties broken by the signature text.
pub fn dedup_components(raw: Vec<MultipathComponent>) -> Vec<MultipathComponent> {
    let mut best: BTreeMap<String, MultipathComponent> = BTreeMap::new();
    for c in raw {
        let key = c.surface_signature.to_string();
        let replace = match best.get(&key) {
            Some(kept) => (c.corrected, c.power_dbm) > (kept.corrected, kept.power_dbm),
            None => true,
        };
        if replace {
            best.insert(key, c);
        }
    }
    let mut out: Vec<(String, MultipathComponent)> = best.into_iter().collect();
    out.sort_by(by_power_then_signature);
    out.into_iter().map(|(_, c)| c).collect()
}
