//! Iterated search: success-probability series, first peaks, threshold
//! crossings and amplitude-amplification accounting.

use serde::{Deserialize, Serialize};

use crate::coin::CoinSpec;
use crate::error::{Error, Result};
use crate::lattice::Geometry;
use crate::walk::{OracleMode, OracleSpec, Walk};

/// Minimum prominence of a first peak, relative to its height.
pub const DEFAULT_MIN_RELATIVE_PROMINENCE: f64 = 0.1;

/// Parameters of one search run, kept alongside its series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dim: usize,
    pub side: usize,
    pub n_vertices: usize,
    pub n_targets: usize,
    pub coin: CoinSpec,
    pub oracle_mode: OracleMode,
}

/// Success probability after `t = 0..=t_max` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySeries {
    pub probabilities: Vec<f64>,
    pub config: RunConfig,
}

impl ProbabilitySeries {
    pub fn t_max(&self) -> usize {
        self.probabilities.len().saturating_sub(1)
    }

    /// `2M/N`: the default peak floor.
    pub fn default_floor(&self) -> f64 {
        2.0 * self.config.n_targets as f64 / self.config.n_vertices as f64
    }
}

/// A located peak or crossing: step index and probability there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: usize,
    pub p: f64,
}

/// Step budget used when none is given: `4N` on a ring, `4√(N ln N)` otherwise.
pub fn default_t_max(geometry: &Geometry) -> usize {
    let n = geometry.n_vertices() as f64;
    if geometry.dim() == 1 {
        4 * geometry.n_vertices()
    } else {
        (4.0 * (n * n.ln()).sqrt()).ceil() as usize
    }
}

pub fn run_search(
    geometry: &Geometry,
    coin: &CoinSpec,
    oracle: &OracleSpec,
    t_max: usize,
) -> Result<ProbabilitySeries> {
    if t_max < 1 {
        return Err(Error::InvalidArgument("t_max must be >= 1".into()));
    }
    let walk = Walk::new(geometry.clone(), coin.clone(), oracle.clone())?;
    let mut probabilities = Vec::with_capacity(t_max + 1);
    walk.evolve(walk.initial_state(), t_max, |_, state| {
        let p = walk.success_probability(state);
        debug_assert!(
            (-1e-12..=1.0 + 1e-12).contains(&p),
            "success probability {p} out of range"
        );
        probabilities.push(p.clamp(0.0, 1.0));
    })?;
    Ok(ProbabilitySeries {
        probabilities,
        config: RunConfig {
            dim: geometry.dim(),
            side: geometry.side(),
            n_vertices: geometry.n_vertices(),
            n_targets: oracle.targets.len(),
            coin: coin.clone(),
            oracle_mode: oracle.mode,
        },
    })
}

/// How a first peak is recognised.
///
/// A candidate is a step `t` with `p[t-1] < p[t] >= p[t+1]` and
/// `p[t] >= floor`. It is accepted when its topographic prominence (height
/// above the higher of the two lowest points separating it from higher
/// ground, or from the ends of the series) is at least
/// `min_relative_prominence * p[t]`. Zero prominence accepts every local
/// maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRule {
    pub floor: f64,
    pub min_relative_prominence: f64,
}

impl PeakRule {
    pub fn with_floor(floor: f64) -> Self {
        PeakRule {
            floor,
            min_relative_prominence: DEFAULT_MIN_RELATIVE_PROMINENCE,
        }
    }

    /// Every local maximum above the floor counts.
    pub fn strict(floor: f64) -> Self {
        PeakRule {
            floor,
            min_relative_prominence: 0.0,
        }
    }
}

fn prominence(p: &[f64], t: usize) -> f64 {
    let height = p[t];
    let left = p[..t]
        .iter()
        .rev()
        .take_while(|&&x| x <= height)
        .fold(height, |m, &x| m.min(x));
    let right = p[t + 1..]
        .iter()
        .take_while(|&&x| x <= height)
        .fold(height, |m, &x| m.min(x));
    height - left.max(right)
}

pub fn first_peak_in(p: &[f64], rule: PeakRule) -> Option<Peak> {
    (1..p.len().saturating_sub(1))
        .filter(|&t| p[t - 1] < p[t] && p[t] >= p[t + 1] && p[t] >= rule.floor)
        .find(|&t| prominence(p, t) >= rule.min_relative_prominence * p[t])
        .map(|t| Peak { t, p: p[t] })
}

/// Earliest qualifying local maximum; `None` when the series has none.
pub fn first_peak(series: &ProbabilitySeries, floor: f64) -> Option<Peak> {
    first_peak_in(&series.probabilities, PeakRule::with_floor(floor))
}

pub fn first_peak_by(series: &ProbabilitySeries, rule: PeakRule) -> Option<Peak> {
    first_peak_in(&series.probabilities, rule)
}

pub fn first_threshold_crossing_in(p: &[f64], threshold: f64) -> Option<Peak> {
    p.iter()
        .position(|&x| x >= threshold)
        .map(|t| Peak { t, p: p[t] })
}

pub fn first_threshold_crossing(series: &ProbabilitySeries, threshold: f64) -> Option<Peak> {
    first_threshold_crossing_in(&series.probabilities, threshold)
}

/// Running time once amplitude amplification lifts `p_s` to O(1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedComplexity {
    pub t1: usize,
    pub p_s: f64,
    pub repetitions: usize,
    pub total: usize,
}

/// `repetitions = ceil(1/√p_s)`, `total = t1 · repetitions`.
pub fn amplified_complexity(t1: usize, p_s: f64) -> Result<AmplifiedComplexity> {
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "success probability must lie in (0, 1], got {p_s}"
        )));
    }
    let r = 1.0 / p_s.sqrt();
    // 1/√0.04 evaluates a hair above 5; don't let round-off add a repetition.
    let nearest = r.round();
    let repetitions = if (r - nearest).abs() <= 1e-12 * nearest {
        nearest
    } else {
        r.ceil()
    } as usize;
    Ok(AmplifiedComplexity {
        t1,
        p_s,
        repetitions,
        total: t1 * repetitions,
    })
}
