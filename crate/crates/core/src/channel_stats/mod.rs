//! Delay and angular spreads of multipath component lists.

mod plot;

pub use plot::{pdp_svg, scatter_svg};

use crate::error::{Error, Result};
use crate::tracer::MultipathComponent;

/// Circular spread saturates here; beyond it the resultant is too short to resolve.
pub const ANGULAR_SPREAD_CAP_DEG: f64 = 180.0;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Received power binned in delay.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    /// `(delay_ns, power_mw)` of nonempty bins, ascending in delay.
    pub bins: Vec<(f64, f64)>,
    pub resolution_ns: f64,
}

impl PowerDelayProfile {
    pub fn total_power_mw(&self) -> f64 {
        self.bins.iter().map(|b| b.1).sum()
    }
}

/// Bins component powers into delay bins of width `resolution_ns` anchored at the
/// earliest arrival.
pub fn synthesize_pdp(components: &[MultipathComponent], resolution_ns: f64) -> Result<PowerDelayProfile> {
    if components.is_empty() {
        return Err(Error::EmptyInput("power delay profile needs at least one component".into()));
    }
    if !(resolution_ns > 0.0) || !resolution_ns.is_finite() {
        return Err(Error::invalid(format!("resolution must be positive, got {resolution_ns}")));
    }
    let t0 = components.iter().map(|c| c.tof_ns).fold(f64::INFINITY, f64::min);
    let mut acc: std::collections::BTreeMap<u64, f64> = Default::default();
    for c in components {
        let k = ((c.tof_ns - t0) / resolution_ns).floor() as u64;
        *acc.entry(k).or_insert(0.0) += dbm_to_mw(c.power_dbm);
    }
    Ok(PowerDelayProfile {
        bins: acc
            .into_iter()
            .map(|(k, p)| (t0 + k as f64 * resolution_ns, p))
            .collect(),
        resolution_ns,
    })
}

/// RMS delay spread of `(delay_ns, power_mw)` taps.
pub fn delay_spread(taps: &[(f64, f64)]) -> f64 {
    let total: f64 = taps.iter().map(|t| t.1).sum();
    if taps.is_empty() || total <= 0.0 {
        return 0.0;
    }
    // Centre on the first tap so large common offsets do not cancel catastrophically.
    let origin = taps[0].0;
    let m1 = taps.iter().map(|(t, p)| p * (t - origin)).sum::<f64>() / total;
    let m2 = taps.iter().map(|(t, p)| p * (t - origin).powi(2)).sum::<f64>() / total;
    (m2 - m1 * m1).max(0.0).sqrt()
}

/// Circular RMS spread of `(azimuth_rad, power_mw)` arrivals, degrees, and whether
/// it hit [`ANGULAR_SPREAD_CAP_DEG`].
pub fn angular_spread(arrivals: &[(f64, f64)]) -> (f64, bool) {
    let total: f64 = arrivals.iter().map(|a| a.1).sum();
    if arrivals.is_empty() || total <= 0.0 {
        return (0.0, false);
    }
    // 1 − R² from pairwise angle differences stays accurate when R is close to 1.
    let mut d = 0.0;
    for (i, (ai, pi)) in arrivals.iter().enumerate() {
        for (aj, pj) in &arrivals[i + 1..] {
            d += 4.0 * pi * pj * ((ai - aj) / 2.0).sin().powi(2);
        }
    }
    let d = d / (total * total);
    if d >= 1.0 {
        return (ANGULAR_SPREAD_CAP_DEG, true);
    }
    let s = (-(-d).ln_1p()).max(0.0).sqrt().to_degrees();
    if s >= ANGULAR_SPREAD_CAP_DEG {
        (ANGULAR_SPREAD_CAP_DEG, true)
    } else {
        (s, false)
    }
}

/// RMS delay spread in ns over the unbinned components.
pub fn rms_delay_spread(components: &[MultipathComponent]) -> f64 {
    let taps: Vec<(f64, f64)> = components.iter().map(|c| (c.tof_ns, dbm_to_mw(c.power_dbm))).collect();
    delay_spread(&taps)
}

fn arrivals(components: &[MultipathComponent]) -> Vec<(f64, f64)> {
    components
        .iter()
        .map(|c| (c.aoa.y.atan2(c.aoa.x), dbm_to_mw(c.power_dbm)))
        .collect()
}

/// Azimuth AoA angular spread in degrees.
pub fn rms_angular_spread(components: &[MultipathComponent]) -> f64 {
    angular_spread(&arrivals(components)).0
}

/// Spreads for one location.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadReport {
    pub rms_delay_spread_ns: f64,
    pub rms_angular_spread_deg: f64,
    pub n_components: usize,
    pub angular_capped: bool,
}

pub fn spread_report(components: &[MultipathComponent]) -> SpreadReport {
    let (as_deg, capped) = angular_spread(&arrivals(components));
    SpreadReport {
        rms_delay_spread_ns: rms_delay_spread(components),
        rms_angular_spread_deg: as_deg,
        n_components: components.len(),
        angular_capped: capped,
    }
}

/// Mean and spread of one statistic over locations, measured against predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub statistic: &'static str,
    pub mean_measured: f64,
    pub mean_predicted: f64,
    pub mean_delta: f64,
    /// Sample standard deviations; `None` with a single location.
    pub std_measured: Option<f64>,
    pub std_predicted: Option<f64>,
    pub std_delta: Option<f64>,
}

fn mean_std(x: &[f64]) -> (f64, Option<f64>) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (m, None);
    }
    (m, Some((x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()))
}

fn compare_row(statistic: &'static str, measured: &[f64], predicted: &[f64]) -> ComparisonRow {
    let (mm, sm) = mean_std(measured);
    let (mp, sp) = mean_std(predicted);
    ComparisonRow {
        statistic,
        mean_measured: mm,
        mean_predicted: mp,
        mean_delta: mm - mp,
        std_measured: sm,
        std_predicted: sp,
        std_delta: sm.zip(sp).map(|(a, b)| a - b),
    }
}

/// Angular-spread and delay-spread rows for location-aligned report lists.
/// Differences are measured minus predicted.
pub fn compare_statistics(measured: &[SpreadReport], predicted: &[SpreadReport]) -> Result<Vec<ComparisonRow>> {
    if measured.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "location count mismatch: {} measured vs {} predicted",
            measured.len(),
            predicted.len()
        )));
    }
    if measured.is_empty() {
        return Err(Error::EmptyInput("no locations to compare".into()));
    }
    let pick = |r: &[SpreadReport], f: fn(&SpreadReport) -> f64| r.iter().map(f).collect::<Vec<_>>();
    Ok(vec![
        compare_row(
            "angular_spread_deg",
            &pick(measured, |r| r.rms_angular_spread_deg),
            &pick(predicted, |r| r.rms_angular_spread_deg),
        ),
        compare_row(
            "delay_spread_ns",
            &pick(measured, |r| r.rms_delay_spread_ns),
            &pick(predicted, |r| r.rms_delay_spread_ns),
        ),
    ])
}
