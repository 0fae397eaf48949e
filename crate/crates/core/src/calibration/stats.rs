use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Candidate error distributions compared by AIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorDistribution {
    Normal,
    /// Fitted to |error|.
    Exponential,
    /// Fitted to |error|.
    Rayleigh,
}

impl std::fmt::Display for ErrorDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorDistribution::Normal => "normal",
            ErrorDistribution::Exponential => "exponential",
            ErrorDistribution::Rayleigh => "rayleigh",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStatistics {
    pub n: usize,
    pub mean_db: f64,
    /// Maximum-likelihood standard deviation.
    pub std_db: f64,
    /// Standard deviation of |error|.
    pub abs_std_db: f64,
    /// `None` when every residual is zero.
    pub best_fit: Option<ErrorDistribution>,
    /// AIC per candidate, in enum order.
    pub aic: Vec<(ErrorDistribution, f64)>,
    pub degenerate: bool,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn std_mle(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Summary statistics and the AIC-best distribution.
///
/// The one-sided fits on |error| are scored as their symmetric extensions (density
/// halved on each side) so all three likelihoods refer to the signed errors.
pub fn error_statistics(residuals: &[f64]) -> Result<ErrorStatistics> {
    let n = residuals.len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::invalid("residuals must be finite"));
    }
    let nf = n as f64;
    let abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let mu = mean(residuals);
    let sigma = std_mle(residuals);
    let abs_std = std_mle(&abs);
    let degenerate = abs.iter().all(|a| *a == 0.0);
    if degenerate || sigma == 0.0 {
        return Ok(ErrorStatistics {
            n,
            mean_db: mu,
            std_db: sigma,
            abs_std_db: abs_std,
            best_fit: None,
            aic: Vec::new(),
            degenerate: true,
        });
    }

    let ll_normal = -0.5 * nf * (2.0 * PI * sigma * sigma).ln() - 0.5 * nf;

    let abs_mean = mean(&abs);
    let rate = 1.0 / abs_mean;
    let ll_exp = nf * rate.ln() - nf - nf * LN_2;

    let s2 = abs.iter().map(|a| a * a).sum::<f64>() / (2.0 * nf);
    let ll_rayleigh = if abs.iter().any(|a| *a == 0.0) {
        f64::NEG_INFINITY
    } else {
        abs.iter().map(|a| a.ln()).sum::<f64>() - nf * s2.ln() - nf - nf * LN_2
    };

    let aic = vec![
        (ErrorDistribution::Normal, 2.0 * 2.0 - 2.0 * ll_normal),
        (ErrorDistribution::Exponential, 2.0 * 1.0 - 2.0 * ll_exp),
        (ErrorDistribution::Rayleigh, 2.0 * 1.0 - 2.0 * ll_rayleigh),
    ];
    let best_fit = aic
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(d, _)| *d);
    Ok(ErrorStatistics {
        n,
        mean_db: mu,
        std_db: sigma,
        abs_std_db: abs_std,
        best_fit,
        aic,
        degenerate: false,
    })
}
