//! Parameter sweeps over lattice size and self-loop weight.
//!
//! A [`SweepSpec`] fully determines its output: target placement, self-loop
//! weight and step budget are all rules of the lattice size, and no
//! randomness is involved anywhere. Rows come back sorted by `N`, then in the
//! order the self-loop rules were given, whatever order the workers finish in.

mod parse;
pub mod presets;
pub mod table;

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinSpec, HadamardKind, HadamardParams};
use crate::error::{Error, Result};
use crate::lattice::Geometry;
use crate::search::{default_t_max, first_peak, first_threshold_crossing, run_search};
use crate::walk::{OracleMode, OracleSpec};

pub use parse::{parse_size_range, parse_sweep_spec, TargetToken};
pub use presets::{preset, preset_names, Preset, SelfLoopSweep, SeriesSpec};
pub use table::{emit_table, read_table, write_self_loop_csv, write_series_csv, write_table, TableFormat};

/// Self-loop weight as a function of the vertex count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfLoopRule {
    Absolute(f64),
    /// `a = c / N`
    PerVertex(f64),
}

impl SelfLoopRule {
    pub fn weight(self, n_vertices: usize) -> f64 {
        match self {
            SelfLoopRule::Absolute(a) => a,
            SelfLoopRule::PerVertex(c) => c / n_vertices as f64,
        }
    }
}

impl fmt::Display for SelfLoopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelfLoopRule::Absolute(a) => write!(f, "{a:?}"),
            SelfLoopRule::PerVertex(c) => write!(f, "{c:?}/N"),
        }
    }
}

/// Number of steps to simulate for a given lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `4N` on rings, `4√(N ln N)` on tori.
    Default,
    Fixed(usize),
    /// `ceil(c · N)`
    PerVertex(f64),
    /// `ceil(c · √(N ln N))`
    SqrtNLogN(f64),
}

impl StepRule {
    pub fn steps(self, g: &Geometry) -> usize {
        let n = g.n_vertices() as f64;
        let steps = match self {
            StepRule::Default => default_t_max(g),
            StepRule::Fixed(t) => t,
            StepRule::PerVertex(c) => (c * n).ceil() as usize,
            StepRule::SqrtNLogN(c) => (c * (n * n.ln()).sqrt()).ceil() as usize,
        };
        steps.max(1)
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepRule::Default => write!(f, "default"),
            StepRule::Fixed(t) => write!(f, "{t}"),
            StepRule::PerVertex(c) => write!(f, "{c:?}N"),
            StepRule::SqrtNLogN(c) => write!(f, "{c:?}sqrt(NlnN)"),
        }
    }
}

/// Success-probability level whose first crossing is recorded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `1 / ln N`
    InverseLn,
    /// `1 / log₂ N`
    InverseLog2,
    Fixed(f64),
}

impl ThresholdRule {
    pub fn value(self, n_vertices: usize) -> f64 {
        let n = n_vertices as f64;
        match self {
            ThresholdRule::InverseLn => 1.0 / n.ln(),
            ThresholdRule::InverseLog2 => 1.0 / n.log2(),
            ThresholdRule::Fixed(p) => p,
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::InverseLn => write!(f, "1/lnN"),
            ThresholdRule::InverseLog2 => write!(f, "1/log2N"),
            ThresholdRule::Fixed(p) => write!(f, "{p:?}"),
        }
    }
}

/// Coin family of a sweep; the Grover weight comes from the self-loop rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoinRule {
    Grover,
    Hadamard {
        gamma: f64,
        target_gamma: Option<f64>,
        kind: HadamardKind,
    },
}

impl CoinRule {
    pub fn build(self, self_loop: f64) -> Result<CoinSpec> {
        match self {
            CoinRule::Grover => CoinSpec::grover(self_loop),
            CoinRule::Hadamard {
                gamma,
                target_gamma,
                kind,
            } => Ok(CoinSpec::hadamard(
                HadamardParams::new(gamma, kind)?,
                target_gamma.map(|g| HadamardParams::new(g, kind)).transpose()?,
            )),
        }
    }
}

impl fmt::Display for CoinRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinRule::Grover => write!(f, "grover"),
            CoinRule::Hadamard {
                gamma,
                target_gamma: Some(t),
                kind,
            } => write!(f, "hadamard:{gamma:?}:{t:?}:{}", kind.delta()),
            CoinRule::Hadamard {
                gamma,
                target_gamma: None,
                kind,
            } => write!(f, "hadamard:{gamma:?}:{}", kind.delta()),
        }
    }
}

/// Where the targets go on each lattice of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetPlacement {
    /// See [`place_targets`].
    Standard,
    /// Explicit coordinates, used unchanged on every lattice.
    Coordinates(Vec<Vec<usize>>),
}

impl TargetPlacement {
    pub fn resolve(&self, g: &Geometry, m: usize) -> Result<Vec<usize>> {
        match self {
            TargetPlacement::Standard => place_targets(g, m),
            TargetPlacement::Coordinates(cs) => {
                if cs.len() != m {
                    return Err(Error::Placement(format!("{} coordinates given for M = {m}", cs.len())));
                }
                let targets = cs.iter().map(|c| g.vertex_index(c)).collect::<Result<Vec<_>>>()?;
                OracleSpec::per_target_flip(targets.clone()).validate(g)?;
                Ok(targets)
            }
        }
    }
}

/// Diagonal target sequence on tori; the first entry sits at the centre.
const TORUS_TARGETS: [Option<usize>; 6] = [None, Some(2), Some(7), Some(4), Some(8), Some(10)];

/// The first `m` targets of the fixed placement sequence.
///
/// On a ring the single target sits at `⌊N/2⌋`. On a torus the sequence is
/// `(⌊√N/2⌋, ⌊√N/2⌋), (2,2), (7,7), (4,4), (8,8), (10,10)`; sides on which
/// two of the first `m` coincide or fall off the lattice are rejected.
pub fn place_targets(g: &Geometry, m: usize) -> Result<Vec<usize>> {
    match g.dim() {
        1 => {
            if m != 1 {
                return Err(Error::Placement(format!("rings take exactly one target, got M = {m}")));
            }
            Ok(vec![g.n_vertices() / 2])
        }
        2 => {
            if !(1..=TORUS_TARGETS.len()).contains(&m) {
                return Err(Error::Placement(format!("tori take 1..=6 targets, got M = {m}")));
            }
            let centre = g.side() / 2;
            let mut targets = Vec::with_capacity(m);
            for diag in TORUS_TARGETS.iter().take(m).map(|d| d.unwrap_or(centre)) {
                if diag >= g.side() {
                    return Err(Error::Placement(format!("target ({diag}, {diag}) is off a side-{} torus", g.side())));
                }
                let v = g.vertex_index(&[diag, diag])?;
                if targets.contains(&v) {
                    return Err(Error::Placement(format!(
                        "target ({diag}, {diag}) collides on a side-{} torus",
                        g.side()
                    )));
                }
                targets.push(v);
            }
            Ok(targets)
        }
        d => Err(Error::Placement(format!("no standard placement in {d} dimensions"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub dim: usize,
    pub sides: Vec<usize>,
    /// Number of targets, M.
    pub targets: usize,
    pub placement: TargetPlacement,
    /// One row per lattice per rule.
    pub self_loops: Vec<SelfLoopRule>,
    pub coin: CoinRule,
    pub oracle_mode: OracleMode,
    pub t_max: StepRule,
    pub threshold: Option<ThresholdRule>,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidArgument("dim must be >= 1".into()));
        }
        if self.targets < 1 {
            return Err(Error::InvalidArgument("M must be >= 1".into()));
        }
        if self.self_loops.is_empty() {
            return Err(Error::InvalidArgument("at least one self-loop rule is required".into()));
        }
        for rule in &self.self_loops {
            let (SelfLoopRule::Absolute(x) | SelfLoopRule::PerVertex(x)) = *rule;
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidArgument(format!("self-loop rule {rule} must be finite and >= 0")));
            }
        }
        if let Some(ThresholdRule::Fixed(p)) = self.threshold {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidArgument(format!("threshold {p} outside (0, 1]")));
            }
        }
        match self.t_max {
            StepRule::Fixed(0) => return Err(Error::InvalidArgument("t_max must be >= 1".into())),
            StepRule::PerVertex(c) | StepRule::SqrtNLogN(c) if !(c.is_finite() && c > 0.0) => {
                return Err(Error::InvalidArgument(format!("t_max factor {c} must be > 0")))
            }
            _ => {}
        }
        if matches!(self.coin, CoinRule::Hadamard { .. }) && self.dim != 1 {
            return Err(Error::InvalidArgument("hadamard sweeps need dim = 1".into()));
        }
        self.coin.build(0.0)?;
        for &side in &self.sides {
            Geometry::new(self.dim, side)?;
        }
        Ok(())
    }
}

/// One lattice size (and self-loop weight) of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dim: usize,
    pub side: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// Absent for Hadamard coins.
    pub a: Option<f64>,
    pub mode: String,
    pub t_peak: usize,
    pub p_peak: f64,
    pub t_threshold: Option<usize>,
    pub p_threshold: Option<f64>,
}

fn mode_label(coin: &CoinSpec, mode: OracleMode) -> &'static str {
    match coin {
        CoinSpec::Hadamard { target_coin: Some(_), .. } => "target_coin",
        _ => mode.as_str(),
    }
}

/// Run one point. `Ok(None)` when the series has no first peak.
fn run_point(spec: &SweepSpec, side: usize, rule: SelfLoopRule) -> Result<Option<SweepRow>> {
    let g = Geometry::new(spec.dim, side)?;
    let n = g.n_vertices();
    let targets = spec.placement.resolve(&g, spec.targets)?;
    let a = rule.weight(n);
    let coin = spec.coin.build(a)?;
    let oracle = OracleSpec::new(targets, spec.oracle_mode);
    let series = run_search(&g, &coin, &oracle, spec.t_max.steps(&g))?;
    let Some(peak) = first_peak(&series, series.default_floor()) else {
        log::warn!("no first peak for dim={} side={side} a={a}; row skipped", spec.dim);
        return Ok(None);
    };
    let crossing = spec
        .threshold
        .and_then(|rule| first_threshold_crossing(&series, rule.value(n)));
    Ok(Some(SweepRow {
        dim: spec.dim,
        side,
        n,
        m: spec.targets,
        a: coin.self_loop(),
        mode: mode_label(&coin, spec.oracle_mode).to_string(),
        t_peak: peak.t,
        p_peak: peak.p,
        t_threshold: crossing.map(|c| c.t),
        p_threshold: crossing.map(|c| c.p),
    }))
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Run every `(side, self-loop rule)` point on at most `jobs` workers
/// (`0` lets rayon decide).
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut sides = spec.sides.clone();
    sides.sort_unstable();
    sides.dedup();
    let mut points: Vec<(usize, usize, SelfLoopRule)> = Vec::new();
    for &side in &sides {
        for rule in &spec.self_loops {
            points.push((side, points.len(), *rule));
        }
    }
    let rows = with_pool(jobs, || {
        points
            .par_iter()
            .map(|&(side, _, rule)| run_point(spec, side, rule))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(rows.into_iter().flatten().collect())
}

/// First-peak probability across self-loop weights on one lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfLoopPoint {
    pub a: f64,
    /// `N · a`
    pub na: f64,
    pub t_peak: Option<usize>,
    pub p_peak: Option<f64>,
}

pub fn sweep_self_loop(
    g: &Geometry,
    m: usize,
    a_grid: &[f64],
    oracle_mode: OracleMode,
    jobs: usize,
) -> Result<Vec<SelfLoopPoint>> {
    if a_grid.iter().any(|&a| !(a.is_finite() && a > 0.0)) {
        return Err(Error::InvalidArgument("self-loop grid must be positive".into()));
    }
    if a_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("self-loop grid must be ascending".into()));
    }
    let spec = SweepSpec {
        dim: g.dim(),
        sides: vec![g.side()],
        targets: m,
        placement: TargetPlacement::Standard,
        self_loops: a_grid.iter().map(|&a| SelfLoopRule::Absolute(a)).collect(),
        coin: CoinRule::Grover,
        oracle_mode,
        t_max: StepRule::Default,
        threshold: None,
        output: None,
    };
    spec.validate()?;
    let n = g.n_vertices() as f64;
    with_pool(jobs, || {
        a_grid
            .par_iter()
            .map(|&a| {
                let row = run_point(&spec, g.side(), SelfLoopRule::Absolute(a))?;
                Ok(SelfLoopPoint {
                    a,
                    na: n * a,
                    t_peak: row.as_ref().map(|r| r.t_peak),
                    p_peak: row.as_ref().map(|r| r.p_peak),
                })
            })
            .collect()
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus_coords(side: usize, targets: &[usize]) -> Vec<(usize, usize)> {
        let g = Geometry::torus(side).unwrap();
        targets
            .iter()
            .map(|&v| {
                let c = g.vertex_coords(v).unwrap();
                (c[0], c[1])
            })
            .collect()
    }

    #[test]
    fn standard_torus_targets() {
        let g = Geometry::torus(70).unwrap();
        let t = place_targets(&g, 3).unwrap();
        assert_eq!(torus_coords(70, &t), vec![(35, 35), (2, 2), (7, 7)]);
        let t = place_targets(&g, 6).unwrap();
        assert_eq!(torus_coords(70, &t), vec![(35, 35), (2, 2), (7, 7), (4, 4), (8, 8), (10, 10)]);
    }

    #[test]
    fn placement_collisions_and_limits() {
        assert!(place_targets(&Geometry::torus(14).unwrap(), 4).is_err());
        assert!(place_targets(&Geometry::torus(14).unwrap(), 2).is_ok());
        assert!(place_targets(&Geometry::torus(10).unwrap(), 6).is_err());
        assert!(place_targets(&Geometry::torus(70).unwrap(), 7).is_err());
        assert!(place_targets(&Geometry::torus(70).unwrap(), 0).is_err());
        assert_eq!(place_targets(&Geometry::ring(201).unwrap(), 1).unwrap(), vec![100]);
        assert!(place_targets(&Geometry::ring(200).unwrap(), 2).is_err());
        assert!(place_targets(&Geometry::new(3, 5).unwrap(), 1).is_err());
    }

    #[test]
    fn rules() {
        assert_eq!(SelfLoopRule::PerVertex(2.0).weight(200), 0.01);
        assert_eq!(StepRule::PerVertex(1.5).steps(&Geometry::ring(1000).unwrap()), 1500);
        assert_eq!(StepRule::Default.steps(&Geometry::ring(10).unwrap()), 40);
        assert!((ThresholdRule::InverseLn.value(200) - 0.188739).abs() < 1e-6);
        assert_eq!(ThresholdRule::InverseLog2.value(1024), 0.1);
    }

    fn small_spec() -> SweepSpec {
        SweepSpec {
            dim: 1,
            sides: vec![60, 20, 40],
            targets: 1,
            placement: TargetPlacement::Standard,
            self_loops: vec![SelfLoopRule::PerVertex(2.0)],
            coin: CoinRule::Grover,
            oracle_mode: OracleMode::PerTargetFlip,
            t_max: StepRule::Default,
            threshold: Some(ThresholdRule::InverseLn),
            output: None,
        }
    }

    #[test]
    fn sweep_rows_are_sorted_and_complete() {
        let rows = run_sweep(&small_spec(), 2).unwrap();
        let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![20, 40, 60]);
        for r in &rows {
            assert!(r.t_threshold.unwrap() <= r.t_peak);
            assert_eq!(r.a, Some(2.0 / r.n as f64));
            assert_eq!(r.mode, "per_target_flip");
        }
    }

    #[test]
    fn empty_sweep() {
        let mut spec = small_spec();
        spec.sides.clear();
        assert!(run_sweep(&spec, 1).unwrap().is_empty());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small_spec();
        spec.self_loops.clear();
        assert!(run_sweep(&spec, 1).is_err());
        let mut spec = small_spec();
        spec.sides = vec![1];
        assert!(run_sweep(&spec, 1).is_err());
        let mut spec = small_spec();
        spec.threshold = Some(ThresholdRule::Fixed(0.0));
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.dim = 2;
        spec.coin = CoinRule::Hadamard { gamma: 0.5, target_gamma: None, kind: HadamardKind::Symmetric };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn self_loop_grid_checks() {
        let g = Geometry::torus(12).unwrap();
        assert!(sweep_self_loop(&g, 1, &[0.02, 0.01], OracleMode::PerTargetFlip, 1).is_err());
        assert!(sweep_self_loop(&g, 1, &[0.0], OracleMode::PerTargetFlip, 1).is_err());
        let pts = sweep_self_loop(&g, 1, &[0.03], OracleMode::PerTargetFlip, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].na - 144.0 * 0.03).abs() < 1e-12);
    }
}
