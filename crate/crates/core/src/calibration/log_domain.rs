use nalgebra::{DMatrix, DVector};

use super::lstsq;
use super::system::CalibrationSystem;
use crate::error::{Error, Result};

/// Fitted losses: penetration for every material, then reflection. `None` marks a
/// column that no matched path exercised.
#[derive(Debug, Clone, PartialEq)]
pub struct LossVector {
    pub values: Vec<Option<f64>>,
    pub material_order: Vec<String>,
}

impl LossVector {
    pub fn penetration_db(&self, material: &str) -> Option<f64> {
        let i = self.material_order.iter().position(|m| m == material)?;
        self.values[i]
    }

    pub fn reflection_db(&self, material: &str) -> Option<f64> {
        let i = self.material_order.iter().position(|m| m == material)?;
        self.values[self.material_order.len() + i]
    }

    pub fn has_negative(&self) -> bool {
        self.values.iter().flatten().any(|v| *v < 0.0)
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// Dense vector with missing entries as 0 (they multiply zero columns).
    pub fn dense(&self) -> DVector<f64> {
        DVector::from_iterator(self.values.len(), self.values.iter().map(|v| v.unwrap_or(0.0)))
    }

    /// Losses clamped at 0 dB for forward simulation.
    pub fn clamped(&self) -> LossVector {
        LossVector {
            values: self.values.iter().map(|v| v.map(|x| x.max(0.0))).collect(),
            material_order: self.material_order.clone(),
        }
    }
}

/// Result of the dB-domain fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSolution {
    pub losses: LossVector,
    /// Σ (A_j − w_j L)².
    pub of_db_sum_squares: f64,
    /// Root-mean-square per-record error, dB.
    pub of_db_rms: f64,
    /// `A − W L` per row: predicted minus measured power, dB.
    pub record_residuals: Vec<f64>,
    pub rank: usize,
    pub retained_columns: Vec<usize>,
    pub rank_deficient: bool,
}

/// Per-row errors `A − W L`.
pub fn residuals_db(system: &CalibrationSystem, losses: &LossVector) -> Vec<f64> {
    let r = &system.residuals - &system.weights * losses.dense();
    r.iter().copied().collect()
}

/// `(sum of squares, rms)` of the dB errors.
pub fn objective_db(system: &CalibrationSystem, losses: &LossVector) -> (f64, f64) {
    let r = residuals_db(system, losses);
    let ss: f64 = r.iter().map(|x| x * x).sum();
    (ss, (ss / r.len() as f64).sqrt())
}

/// Least-squares losses minimising Σ (A_j − w_j L)² over the exercised columns.
/// Rank-deficient systems get the minimum-norm solution and `rank_deficient = true`.
pub fn solve_log_domain(system: &CalibrationSystem) -> Result<LogSolution> {
    let retained = system.retained_columns();
    if system.rows() == 0 || retained.is_empty() {
        return Err(Error::EmptySystem("no unknowns: every weight is zero".into()));
    }
    let w = DMatrix::from_fn(system.rows(), retained.len(), |i, j| system.weights[(i, retained[j])]);
    let fit = lstsq::solve(&w, &system.residuals);
    let mut values = vec![None; system.weights.ncols()];
    for (k, &c) in retained.iter().enumerate() {
        values[c] = Some(fit.solution[k]);
    }
    let losses = LossVector {
        values,
        material_order: system.material_order.clone(),
    };
    let record_residuals = residuals_db(system, &losses);
    let (ss, rms) = objective_db(system, &losses);
    Ok(LogSolution {
        losses,
        of_db_sum_squares: ss,
        of_db_rms: rms,
        record_residuals,
        rank: fit.rank,
        rank_deficient: fit.rank < retained.len(),
        retained_columns: retained,
    })
}
