use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::antenna::{AntennaPattern, AntennaPose};
use crate::error::{Error, Result};
use crate::geometry::{tessellate_icosahedron, EnvironmentMap};
use crate::propagation::{fspl_db_unchecked, MaterialProfile};
use crate::tracer::{
    match_components, trace_with_launch_set, InteractionKind, Link, MeasuredDirection,
    MultipathComponent, TraceConfig,
};

/// Reflection loss used while discovering paths: |Γ| = 0.9.
pub const DISCOVERY_REFLECTION_LOSS_DB: f64 = 0.915_149_811_213_503_3;
/// Penetration loss used while discovering paths.
pub const DISCOVERY_PENETRATION_LOSS_DB: f64 = 1.0;

/// One directional measurement: both antennas pointed along the strongest path.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub id: String,
    pub tx: AntennaPose,
    pub rx: AntennaPose,
    pub tx_power_dbm: f64,
    pub measured_power_dbm: f64,
    pub frequency_ghz: f64,
}

impl MeasurementRecord {
    pub fn validate(&self) -> Result<()> {
        if !self.tx_power_dbm.is_finite() || !self.measured_power_dbm.is_finite() {
            return Err(Error::invalid(format!("record `{}`: powers must be finite", self.id)));
        }
        if !(self.frequency_ghz > 0.0) || !self.frequency_ghz.is_finite() {
            return Err(Error::invalid(format!("record `{}`: frequency must be positive", self.id)));
        }
        Ok(())
    }

    pub fn measured_direction(&self) -> MeasuredDirection {
        MeasuredDirection {
            aoa: self.rx.boresight,
            aod: self.tx.boresight,
            power_dbm: self.measured_power_dbm,
        }
    }
}

/// Why a record did not contribute a row.
#[derive(Debug, Clone, PartialEq)]
pub enum Exclusion {
    /// No simulated path within the angular threshold.
    Unmatched { deviation_deg: f64 },
    /// Matched path has no reflections or penetrations.
    NoUnknowns,
    TraceFailed(String),
}

impl std::fmt::Display for Exclusion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exclusion::Unmatched { deviation_deg } => {
                write!(f, "unmatched (closest path {deviation_deg:.2} deg away)")
            }
            Exclusion::NoUnknowns => write!(f, "no unknowns (line-of-sight path)"),
            Exclusion::TraceFailed(msg) => write!(f, "trace failed: {msg}"),
        }
    }
}

/// Weight matrix `W` and link-budget residuals `A` with `W L = A`.
///
/// Columns are the penetration counts of every material followed by the reflection
/// counts, both in `material_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSystem {
    pub weights: DMatrix<f64>,
    pub residuals: DVector<f64>,
    pub material_order: Vec<String>,
    /// Record id per row.
    pub record_ids: Vec<String>,
    pub excluded: Vec<(String, Exclusion)>,
}

impl CalibrationSystem {
    /// Builds a system from explicit rows. Weights must be nonnegative integers.
    pub fn from_rows(
        material_order: Vec<String>,
        weights: DMatrix<f64>,
        residuals: DVector<f64>,
    ) -> Result<Self> {
        let n = material_order.len();
        if weights.ncols() != 2 * n {
            return Err(Error::invalid(format!(
                "weight matrix has {} columns, expected {}",
                weights.ncols(),
                2 * n
            )));
        }
        if weights.nrows() != residuals.len() {
            return Err(Error::invalid("weights and residuals differ in row count"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || w.fract() != 0.0) {
            return Err(Error::invalid("weights must be nonnegative integers"));
        }
        if residuals.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("residuals must be finite"));
        }
        if weights.nrows() == 0 {
            return Err(Error::EmptySystem("no rows".into()));
        }
        let record_ids = (0..weights.nrows()).map(|j| format!("row{j}")).collect();
        Ok(CalibrationSystem {
            weights,
            residuals,
            material_order,
            record_ids,
            excluded: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.weights.nrows()
    }

    pub fn n_materials(&self) -> usize {
        self.material_order.len()
    }

    /// Columns with at least one nonzero weight.
    pub fn retained_columns(&self) -> Vec<usize> {
        (0..self.weights.ncols())
            .filter(|&c| self.weights.column(c).iter().any(|w| *w != 0.0))
            .collect()
    }

    /// Appends a row; used to build systems incrementally.
    pub fn with_row(mut self, id: impl Into<String>, weights: &[f64], residual: f64) -> Result<Self> {
        if weights.len() != self.weights.ncols() {
            return Err(Error::invalid("row length mismatch"));
        }
        let m = self.weights.nrows();
        self.weights = self.weights.insert_row(m, 0.0);
        for (c, w) in weights.iter().enumerate() {
            self.weights[(m, c)] = *w;
        }
        self.residuals = self.residuals.push(residual);
        self.record_ids.push(id.into());
        Ok(self)
    }
}

/// Material table used for uncalibrated path discovery.
pub fn discovery_materials(materials: &BTreeMap<String, MaterialProfile>) -> BTreeMap<String, MaterialProfile> {
    materials
        .iter()
        .map(|(k, m)| {
            let mut d = m.clone();
            d.reflection_loss_db = DISCOVERY_REFLECTION_LOSS_DB;
            d.penetration_loss_db = m.penetration_loss_db.map(|_| DISCOVERY_PENETRATION_LOSS_DB);
            (k.clone(), d)
        })
        .collect()
}

enum RowOutcome {
    Row(Vec<f64>, f64),
    Excluded(Exclusion),
}

/// Traces every record in discovery mode, matches the measured direction and
/// collects one row per matched path.
pub fn assemble_system(
    records: &[MeasurementRecord],
    env: &EnvironmentMap,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    config: &TraceConfig,
    match_threshold_deg: f64,
) -> Result<CalibrationSystem> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no measurement records".into()));
    }
    for r in records {
        r.validate()?;
    }
    let discovery_env = env.with_materials(discovery_materials(env.materials()))?;
    let material_order: Vec<String> = env.materials().keys().cloned().collect();
    let column: BTreeMap<&str, usize> = material_order
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    let n = material_order.len();
    let tess = tessellate_icosahedron(config.tessellation_frequency)?;

    let outcomes: Vec<RowOutcome> = records
        .par_iter()
        .map(|rec| {
            let cfg = TraceConfig {
                discovery: true,
                scattering_enabled: false,
                frequency_ghz: rec.frequency_ghz,
                tx_power_dbm: rec.tx_power_dbm,
                ..config.clone()
            };
            let link = Link {
                tx: &rec.tx,
                rx: &rec.rx,
                tx_pattern,
                rx_pattern,
            };
            let result = match trace_with_launch_set(&discovery_env, &link, &cfg, &tess) {
                Ok(r) => r,
                Err(e) => return RowOutcome::Excluded(Exclusion::TraceFailed(e.to_string())),
            };
            let m = match_components(&result.components, &[rec.measured_direction()], match_threshold_deg)[0];
            let Some(si) = m.simulated else {
                return RowOutcome::Excluded(Exclusion::Unmatched {
                    deviation_deg: m.deviation_deg,
                });
            };
            let comp = &result.components[si];
            if comp.interactions.is_empty() {
                return RowOutcome::Excluded(Exclusion::NoUnknowns);
            }
            let weights = weight_row(comp, &column, n);
            let a = rec.tx_power_dbm
                + tx_pattern.gain_toward(&rec.tx, comp.aod)
                + rx_pattern.gain_toward(&rec.rx, comp.aoa)
                - fspl_db_unchecked(comp.path_length_m, rec.frequency_ghz)
                - rec.measured_power_dbm;
            RowOutcome::Row(weights, a)
        })
        .collect();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut record_ids = Vec::new();
    let mut excluded = Vec::new();
    for (rec, outcome) in records.iter().zip(outcomes) {
        match outcome {
            RowOutcome::Row(w, a) => {
                rows.extend(w);
                rhs.push(a);
                record_ids.push(rec.id.clone());
            }
            RowOutcome::Excluded(why) => excluded.push((rec.id.clone(), why)),
        }
    }
    if rhs.is_empty() {
        let all_los = excluded.iter().all(|(_, e)| *e == Exclusion::NoUnknowns);
        let msg = if all_los {
            "no unknowns: every matched path is line-of-sight".to_string()
        } else {
            format!("none of {} records matched a simulated path", records.len())
        };
        return Err(Error::EmptySystem(msg));
    }
    Ok(CalibrationSystem {
        weights: DMatrix::from_row_slice(rhs.len(), 2 * n, &rows),
        residuals: DVector::from_vec(rhs),
        material_order,
        record_ids,
        excluded,
    })
}

/// Per-material interaction counts of one path: penetrations, then reflections.
pub fn weight_row(comp: &MultipathComponent, column: &BTreeMap<&str, usize>, n: usize) -> Vec<f64> {
    let mut w = vec![0.0; 2 * n];
    for i in &comp.interactions {
        let Some(&c) = column.get(i.material.as_str()) else {
            continue;
        };
        match i.kind {
            InteractionKind::Penetration => w[c] += 1.0,
            InteractionKind::Reflection => w[n + c] += 1.0,
            InteractionKind::Scattering => {}
        }
    }
    w
}
