//! Named experiment configurations.

use std::path::PathBuf;

use super::{
    place_targets, sweep_self_loop, CoinRule, SelfLoopPoint, SelfLoopRule, StepRule, SweepSpec,
    TargetPlacement, ThresholdRule,
};
use crate::coin::HadamardKind;
use crate::error::{Error, Result};
use crate::lattice::Geometry;
use crate::search::{run_search, ProbabilitySeries};
use crate::walk::{OracleMode, OracleSpec};

/// A single success-probability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub dim: usize,
    pub side: usize,
    pub targets: usize,
    pub coin: CoinRule,
    pub self_loop: SelfLoopRule,
    pub oracle_mode: OracleMode,
    pub t_max: StepRule,
}

impl SeriesSpec {
    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.dim, self.side)
    }

    pub fn run(&self) -> Result<ProbabilitySeries> {
        let g = self.geometry()?;
        let targets = place_targets(&g, self.targets)?;
        let coin = self.coin.build(self.self_loop.weight(g.n_vertices()))?;
        run_search(&g, &coin, &OracleSpec::new(targets, self.oracle_mode), self.t_max.steps(&g))
    }
}

/// First-peak probability against `N·a` on one lattice, for several `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfLoopSweep {
    pub dim: usize,
    pub side: usize,
    pub target_counts: Vec<usize>,
    /// Values of `N·a`.
    pub na_grid: Vec<f64>,
    pub oracle_mode: OracleMode,
}

impl SelfLoopSweep {
    pub fn run(&self, jobs: usize) -> Result<Vec<(usize, Vec<SelfLoopPoint>)>> {
        let g = Geometry::new(self.dim, self.side)?;
        let n = g.n_vertices() as f64;
        let a_grid: Vec<f64> = self.na_grid.iter().map(|na| na / n).collect();
        self.target_counts
            .iter()
            .map(|&m| Ok((m, sweep_self_loop(&g, m, &a_grid, self.oracle_mode, jobs)?)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Series(SeriesSpec),
    Sweeps(Vec<SweepSpec>),
    SelfLoop(SelfLoopSweep),
}

const NAMES: [&str; 14] = [
    "fig1a", "fig1b", "fig2", "fig3", "fig4", "fig4-m1", "fig4-m2", "fig4-m3", "fig5", "fig5-m4",
    "fig5-m5", "fig5-m6", "fig6", "smoke",
];

/// Per-M self-loop constants `c` in `a = c/N` for the 2D sweeps.
const TORUS_LOOP_CONSTANTS: [f64; 6] = [4.01, 7.8, 10.4, 15.2, 18.6, 21.7];

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn torus_sweep(m: usize) -> SweepSpec {
    SweepSpec {
        dim: 2,
        sides: (50..=120).step_by(10).collect(),
        targets: m,
        placement: TargetPlacement::Standard,
        self_loops: vec![SelfLoopRule::PerVertex(TORUS_LOOP_CONSTANTS[m - 1])],
        coin: CoinRule::Grover,
        oracle_mode: OracleMode::PerTargetFlip,
        t_max: StepRule::Default,
        threshold: None,
        output: Some(PathBuf::from(format!("fig{}-m{m}.csv", if m <= 3 { 4 } else { 5 }))),
    }
}

fn ring_sweep(sides: Vec<usize>, threshold: Option<ThresholdRule>, output: &str) -> SweepSpec {
    SweepSpec {
        dim: 1,
        sides,
        targets: 1,
        placement: TargetPlacement::Standard,
        self_loops: vec![SelfLoopRule::PerVertex(2.0)],
        coin: CoinRule::Grover,
        oracle_mode: OracleMode::PerTargetFlip,
        t_max: StepRule::PerVertex(1.5),
        threshold,
        output: Some(PathBuf::from(output)),
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let ring_series = |coin, self_loop| SeriesSpec {
        dim: 1,
        side: 200,
        targets: 1,
        coin,
        self_loop,
        oracle_mode: OracleMode::PerTargetFlip,
        t_max: StepRule::Fixed(800),
    };
    Ok(match name {
        "fig1a" => Preset::Series(ring_series(
            CoinRule::Hadamard { gamma: 0.5, target_gamma: Some(0.4), kind: HadamardKind::Symmetric },
            SelfLoopRule::Absolute(0.0),
        )),
        "fig1b" => Preset::Series(ring_series(CoinRule::Grover, SelfLoopRule::PerVertex(2.0))),
        "fig2" => Preset::Sweeps(vec![ring_sweep((100..=5000).step_by(100).collect(), None, "fig2.csv")]),
        "fig3" => Preset::Sweeps(vec![ring_sweep(
            (1000..=20000).step_by(1000).collect(),
            Some(ThresholdRule::InverseLn),
            "fig3.csv",
        )]),
        "fig4" => Preset::Sweeps((1..=3).map(torus_sweep).collect()),
        "fig5" => Preset::Sweeps((4..=6).map(torus_sweep).collect()),
        "fig4-m1" | "fig4-m2" | "fig4-m3" | "fig5-m4" | "fig5-m5" | "fig5-m6" => {
            let m = name[name.len() - 1..].parse().expect("preset suffix is a digit");
            Preset::Sweeps(vec![torus_sweep(m)])
        }
        "fig6" => Preset::SelfLoop(SelfLoopSweep {
            dim: 2,
            side: 70,
            target_counts: (1..=6).collect(),
            na_grid: (1..=50).map(|k| 0.5 * k as f64).collect(),
            oracle_mode: OracleMode::PerTargetFlip,
        }),
        "smoke" => Preset::Sweeps(vec![SweepSpec {
            sides: vec![20, 40, 60],
            t_max: StepRule::PerVertex(4.0),
            threshold: Some(ThresholdRule::InverseLog2),
            output: Some(PathBuf::from("smoke.csv")),
            ..ring_sweep(Vec::new(), None, "")
        }]),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset `{other}`; known: {}",
                NAMES.join(", ")
            )))
        }
    })
}
