use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::log_domain::{objective_db, residuals_db, solve_log_domain, LossVector};
use super::system::CalibrationSystem;
use crate::error::Result;

/// Fixed annealing schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealingSchedule {
    pub levels: usize,
    pub moves_per_level: usize,
    pub cooling: f64,
    pub step_sigma: f64,
    pub target_acceptance: f64,
    /// Trial moves used to size the starting temperature.
    pub probe_moves: usize,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        AnnealingSchedule {
            levels: 200,
            moves_per_level: 50,
            cooling: 0.95,
            step_sigma: 0.05,
            target_acceptance: 0.8,
            probe_moves: 100,
        }
    }
}

/// Result of the linear-domain fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub losses: LossVector,
    pub of_lin: f64,
    /// OF_lin at the starting point (the clamped dB-domain solution).
    pub of_lin_start: f64,
    pub of_db_sum_squares: f64,
    pub of_db_rms: f64,
    pub record_residuals: Vec<f64>,
    pub initial_temperature: f64,
    pub accepted_moves: usize,
}

fn model_power(system: &CalibrationSystem, retained: &[usize], l: &[f64], row: usize) -> f64 {
    retained
        .iter()
        .zip(l)
        .map(|(&c, li)| li.powf(system.weights[(row, c)]))
        .product()
}

fn of_lin_coeffs(system: &CalibrationSystem, retained: &[usize], l: &[f64]) -> f64 {
    let m = system.rows();
    let ss: f64 = (0..m)
        .map(|j| {
            let b = 10f64.powf(-system.residuals[j] / 10.0);
            let e = b - model_power(system, retained, l, j);
            e * e
        })
        .sum();
    (ss / m as f64).sqrt()
}

/// RMS of linear-power errors `B_j − Π l^w` with `B_j = 10^(−A_j/10)` and
/// `l = 10^(−L/10)`. Losses are clamped at 0 dB first.
pub fn objective_linear(system: &CalibrationSystem, losses: &LossVector) -> f64 {
    let retained = system.retained_columns();
    let l: Vec<f64> = retained
        .iter()
        .map(|&c| 10f64.powf(-losses.values[c].unwrap_or(0.0).max(0.0) / 10.0))
        .collect();
    of_lin_coeffs(system, &retained, &l)
}

fn propose(rng: &mut ChaCha8Rng, l: &[f64], sigma: f64) -> Vec<f64> {
    l.iter()
        .map(|x| {
            let z: f64 = rng.sample(StandardNormal);
            (x * (sigma * z).exp()).clamp(f64::MIN_POSITIVE, 1.0)
        })
        .collect()
}

/// Simulated annealing on the linear coefficients, started from the dB-domain fit.
pub fn solve_linear_domain(system: &CalibrationSystem, seed: u64) -> Result<LinearSolution> {
    solve_linear_domain_with(system, seed, &AnnealingSchedule::default())
}

pub fn solve_linear_domain_with(
    system: &CalibrationSystem,
    seed: u64,
    schedule: &AnnealingSchedule,
) -> Result<LinearSolution> {
    let start = solve_log_domain(system)?;
    let retained = start.retained_columns.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut current: Vec<f64> = retained
        .iter()
        .map(|&c| 10f64.powf(-start.losses.values[c].unwrap_or(0.0).max(0.0) / 10.0))
        .collect();
    let mut current_of = of_lin_coeffs(system, &retained, &current);
    let of_lin_start = current_of;

    // T0 such that an average uphill probe move is accepted with the target rate.
    let mut uphill = Vec::new();
    for _ in 0..schedule.probe_moves {
        let cand = propose(&mut rng, &current, schedule.step_sigma);
        let delta = of_lin_coeffs(system, &retained, &cand) - current_of;
        if delta > 0.0 {
            uphill.push(delta);
        }
    }
    let t0 = if uphill.is_empty() {
        f64::MIN_POSITIVE
    } else {
        let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
        -mean / schedule.target_acceptance.ln()
    };

    let mut best = current.clone();
    let mut best_of = current_of;
    let mut accepted = 0;
    let mut temperature = t0;
    for _ in 0..schedule.levels {
        for _ in 0..schedule.moves_per_level {
            let cand = propose(&mut rng, &current, schedule.step_sigma);
            let cand_of = of_lin_coeffs(system, &retained, &cand);
            let delta = cand_of - current_of;
            let u: f64 = rng.random();
            if delta <= 0.0 || (temperature > 0.0 && u < (-delta / temperature).exp()) {
                current = cand;
                current_of = cand_of;
                accepted += 1;
                if current_of < best_of {
                    best_of = current_of;
                    best.clone_from(&current);
                }
            }
        }
        temperature *= schedule.cooling;
    }

    let mut values = vec![None; system.weights.ncols()];
    for (k, &c) in retained.iter().enumerate() {
        values[c] = Some(-10.0 * best[k].log10());
    }
    let losses = LossVector {
        values,
        material_order: system.material_order.clone(),
    };
    let (ss, rms) = objective_db(system, &losses);
    Ok(LinearSolution {
        record_residuals: residuals_db(system, &losses),
        losses,
        of_lin: best_of,
        of_lin_start,
        of_db_sum_squares: ss,
        of_db_rms: rms,
        initial_temperature: t0,
        accepted_moves: accepted,
    })
}
