//! Least-squares fits of running-time models `T(N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base of the logarithm inside `√((N/M) log(N/M))`.
///
/// The fitted prefactor depends on the base: `c_e = c_2 / √(ln 2)`.
/// Base 2 is the default because it is the base in which the published
/// prefactors (≈0.77 for one target) come out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.ln(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::Natural => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2" | "log2" | "two" => Ok(LogBase::Two),
            "e" | "ln" | "natural" => Ok(LogBase::Natural),
            other => Err(Error::Parse(format!("unknown log base `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FitModel {
    /// `T = c · N^b`
    PowerLaw,
    /// `T = c · √((N/M) · log(N/M))`
    ScaledSqrtLog { targets: usize, base: LogBase },
}

impl FitModel {
    pub fn name(&self) -> &'static str {
        match self {
            FitModel::PowerLaw => "power_law",
            FitModel::ScaledSqrtLog { .. } => "scaled_sqrt_log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub c: f64,
    /// Exponent, for the power law only.
    pub b: Option<f64>,
    /// Root-mean-square residual in the space the fit was done in
    /// (log-log for the power law, linear otherwise).
    pub residual: f64,
    pub n_points: usize,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        match self.model {
            FitModel::PowerLaw => self.c * n.powf(self.b.unwrap_or(0.0)),
            FitModel::ScaledSqrtLog { targets, base } => self.c * sqrt_log_predictor(n, targets, base),
        }
    }
}

pub fn sqrt_log_predictor(n: f64, targets: usize, base: LogBase) -> f64 {
    let ratio = n / targets as f64;
    (ratio * base.log(ratio)).sqrt()
}

/// Ordinary least squares of `ln T` on `ln N`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("power law needs >= 3 points, got {}", points.len())));
    }
    if let Some(&(n, t)) = points.iter().find(|&&(n, t)| !(n > 0.0 && t > 0.0 && n.is_finite() && t.is_finite())) {
        return Err(Error::Fit(format!("power law needs positive data, got ({n}, {t})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, t)| (n.ln(), t.ln())).collect();
    let k = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all N identical".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(FitResult {
        model: FitModel::PowerLaw,
        c: intercept.exp(),
        b: Some(slope),
        residual: (rss / k).sqrt(),
        n_points: points.len(),
    })
}

/// Closed-form least squares for the single coefficient `c`.
pub fn fit_scaled_sqrt_log(points: &[(f64, f64)], targets: usize, base: LogBase) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need >= 2 points, got {}", points.len())));
    }
    if targets == 0 {
        return Err(Error::Fit("target count must be >= 1".into()));
    }
    let mut xs = Vec::with_capacity(points.len());
    for &(n, t) in points {
        if !(n.is_finite() && t.is_finite()) || n / targets as f64 <= 1.0 {
            return Err(Error::Fit(format!("need finite data with N/M > 1, got ({n}, {t})")));
        }
        xs.push((sqrt_log_predictor(n, targets, base), t));
    }
    let sxx: f64 = xs.iter().map(|p| p.0 * p.0).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate predictor".into()));
    }
    let c = xs.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx;
    let rss: f64 = xs.iter().map(|p| (p.1 - c * p.0).powi(2)).sum();
    Ok(FitResult {
        model: FitModel::ScaledSqrtLog { targets, base },
        c,
        b: None,
        residual: (rss / xs.len() as f64).sqrt(),
        n_points: points.len(),
    })
}

/// Serialized form of a fit: `{model, M, c, b?, residual, n_points, fit_window, log_base?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    #[serde(rename = "M")]
    pub m: usize,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<f64>,
    pub residual: f64,
    pub n_points: usize,
    /// Smallest and largest N included.
    pub fit_window: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub log_base: Option<String>,
}

impl FitReport {
    pub fn new(fit: &FitResult, m: usize, points: &[(f64, f64)]) -> Self {
        let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let log_base = match fit.model {
            FitModel::ScaledSqrtLog { base, .. } => Some(base.as_str().to_string()),
            FitModel::PowerLaw => None,
        };
        FitReport {
            model: fit.model.name().to_string(),
            m,
            c: fit.c,
            b: fit.b,
            residual: fit.residual,
            n_points: fit.n_points,
            fit_window: [lo, hi],
            log_base,
        }
    }
}
