//! Sparse evolution of the coin ⊗ vertex state.
//!
//! Amplitudes are stored coin-major: the amplitude of direction `c` at vertex
//! `v` lives at `c * N + v`. One step is `U = S · C̃`: the oracle-marked coin
//! followed by the flip-flop shift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{grover_coin_state, CoinSpec};
use crate::error::{Error, Result};
use crate::lattice::{Direction, Geometry};

/// How target vertices are distinguished from the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    /// Negate the coin at every target vertex.
    #[default]
    PerTargetFlip,
    /// Reflect about the normalised target superposition `|T_M⟩` in vertex
    /// space, then apply the coin.
    SuperpositionReflection,
}

impl OracleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMode::PerTargetFlip => "per_target_flip",
            OracleMode::SuperpositionReflection => "superposition_reflection",
        }
    }
}

impl std::str::FromStr for OracleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "per_target_flip" | "flip" => Ok(OracleMode::PerTargetFlip),
            "superposition_reflection" | "reflection" => Ok(OracleMode::SuperpositionReflection),
            other => Err(Error::Parse(format!("unknown oracle mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OracleSpec {
    pub targets: Vec<usize>,
    pub mode: OracleMode,
}

impl OracleSpec {
    pub fn new(targets: Vec<usize>, mode: OracleMode) -> Self {
        OracleSpec { targets, mode }
    }

    pub fn per_target_flip(targets: Vec<usize>) -> Self {
        OracleSpec::new(targets, OracleMode::PerTargetFlip)
    }

    /// No targets: free evolution.
    pub fn none() -> Self {
        OracleSpec::default()
    }

    pub fn validate(&self, geometry: &Geometry) -> Result<()> {
        let mut seen = vec![false; geometry.n_vertices()];
        for &t in &self.targets {
            if t >= geometry.n_vertices() {
                return Err(Error::InvalidOracle(format!(
                    "target {t} outside [0, {})",
                    geometry.n_vertices()
                )));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidOracle(format!("duplicate target {t}")));
            }
        }
        Ok(())
    }
}

/// Complex amplitudes over coin directions × vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    geometry: Geometry,
    coin_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    pub fn from_amplitudes(geometry: Geometry, coin_dim: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let degree = geometry.degree();
        if coin_dim != degree && coin_dim != degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: degree + 1,
                got: coin_dim,
            });
        }
        let expected = coin_dim * geometry.n_vertices();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        Ok(WalkState {
            geometry,
            coin_dim,
            amplitudes,
        })
    }

    pub fn zeros(geometry: Geometry, coin_dim: usize) -> Result<Self> {
        let len = coin_dim * geometry.n_vertices();
        WalkState::from_amplitudes(geometry, coin_dim, vec![Complex64::new(0.0, 0.0); len])
    }

    /// The basis state `|dir⟩ ⊗ |v⟩`.
    pub fn basis(geometry: Geometry, coin_dim: usize, dir: Direction, v: usize) -> Result<Self> {
        let mut s = WalkState::zeros(geometry, coin_dim)?;
        let c = dir.coin_index(s.geometry.dim());
        if c >= coin_dim || v >= s.geometry.n_vertices() {
            return Err(Error::InvalidArgument(format!("no basis state ({c}, {v})")));
        }
        let n = s.geometry.n_vertices();
        s.amplitudes[c * n + v] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    pub fn has_self_loop(&self) -> bool {
        self.coin_dim == self.geometry.degree() + 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, coin: usize, v: usize) -> Complex64 {
        self.amplitudes[coin * self.geometry.n_vertices() + v]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Probability of measuring the walker at `v`, summed over directions.
    pub fn vertex_probability(&self, v: usize) -> f64 {
        let n = self.geometry.n_vertices();
        (0..self.coin_dim).map(|c| self.amplitudes[c * n + v].norm_sqr()).sum()
    }
}

/// Per-vertex coin kernel with everything precomputed.
#[derive(Debug, Clone)]
enum Kernel {
    Grover { psi: Vec<f64> },
    Hadamard {
        coin: [[Complex64; 2]; 2],
        target: Option<[[Complex64; 2]; 2]>,
    },
}

/// A validated walk: geometry, coin and oracle with neighbour tables built.
#[derive(Debug, Clone)]
pub struct Walk {
    geometry: Geometry,
    coin: CoinSpec,
    oracle: OracleSpec,
    coin_dim: usize,
    kernel: Kernel,
    is_target: Vec<bool>,
    /// `(plus, minus)` neighbour tables per axis.
    neighbors: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Walk {
    pub fn new(geometry: Geometry, coin: CoinSpec, oracle: OracleSpec) -> Result<Self> {
        coin.validate(&geometry)?;
        oracle.validate(&geometry)?;
        let coin_dim = coin.coin_dim(&geometry);
        let kernel = match &coin {
            CoinSpec::GroverLoop { self_loop } => Kernel::Grover {
                psi: grover_coin_state(geometry.degree(), *self_loop),
            },
            CoinSpec::Hadamard { coin, target_coin } => Kernel::Hadamard {
                coin: coin.matrix(),
                target: target_coin.map(|t| t.matrix()),
            },
        };
        let mut is_target = vec![false; geometry.n_vertices()];
        for &t in &oracle.targets {
            is_target[t] = true;
        }
        let neighbors = (0..geometry.dim())
            .map(|axis| {
                (
                    geometry.neighbor_table(Direction::plus(axis)),
                    geometry.neighbor_table(Direction::minus(axis)),
                )
            })
            .collect();
        Ok(Walk {
            geometry,
            coin,
            oracle,
            coin_dim,
            kernel,
            is_target,
            neighbors,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn coin(&self) -> &CoinSpec {
        &self.coin
    }

    pub fn oracle(&self) -> &OracleSpec {
        &self.oracle
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Uniform over vertices, tensored with the coin's starting state.
    pub fn initial_state(&self) -> WalkState {
        let n = self.geometry.n_vertices();
        let vertex_amp = 1.0 / (n as f64).sqrt();
        let coin_amps: Vec<f64> = match &self.kernel {
            Kernel::Grover { psi } => psi.clone(),
            Kernel::Hadamard { .. } => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
        };
        let mut amplitudes = Vec::with_capacity(self.coin_dim * n);
        for c in coin_amps {
            amplitudes.extend(std::iter::repeat_n(Complex64::new(c * vertex_amp, 0.0), n));
        }
        WalkState {
            geometry: self.geometry.clone(),
            coin_dim: self.coin_dim,
            amplitudes,
        }
    }

    fn check(&self, state: &WalkState) -> Result<()> {
        if state.coin_dim != self.coin_dim || state.geometry != self.geometry {
            return Err(Error::DimensionMismatch {
                expected: self.coin_dim * self.geometry.n_vertices(),
                got: state.coin_dim * state.geometry.n_vertices(),
            });
        }
        Ok(())
    }

    /// Whether targets are marked by the oracle rather than by a target coin.
    fn oracle_marks(&self) -> bool {
        !matches!(self.kernel, Kernel::Hadamard { target: Some(_), .. })
    }

    /// `C̃`: the oracle-modified coin, in place.
    pub fn apply_oracle_coin(&self, state: &mut WalkState) -> Result<()> {
        self.check(state)?;
        let n = self.geometry.n_vertices();
        let amps = &mut state.amplitudes;
        let marks = self.oracle_marks() && !self.oracle.targets.is_empty();

        if marks && self.oracle.mode == OracleMode::SuperpositionReflection {
            // I - 2|T⟩⟨T| with |T⟩ = Σ|t⟩/√M, per coin direction.
            let scale = 2.0 / self.oracle.targets.len() as f64;
            for plane in amps.chunks_exact_mut(n) {
                let overlap: Complex64 = self.oracle.targets.iter().map(|&t| plane[t]).sum();
                let shift = overlap * scale;
                for &t in &self.oracle.targets {
                    plane[t] -= shift;
                }
            }
        }

        match &self.kernel {
            Kernel::Grover { psi } => {
                let dim = psi.len();
                let mut column = vec![Complex64::new(0.0, 0.0); dim];
                for v in 0..n {
                    let mut overlap = Complex64::new(0.0, 0.0);
                    for (c, slot) in column.iter_mut().enumerate() {
                        *slot = amps[c * n + v];
                        overlap += *slot * psi[c];
                    }
                    let overlap = overlap * 2.0;
                    for (c, slot) in column.iter().enumerate() {
                        amps[c * n + v] = overlap * psi[c] - slot;
                    }
                }
            }
            Kernel::Hadamard { coin, target } => {
                let (first, second) = amps.split_at_mut(n);
                for v in 0..n {
                    let m = match target {
                        Some(t) if self.is_target[v] => t,
                        _ => coin,
                    };
                    let (x0, x1) = (first[v], second[v]);
                    first[v] = m[0][0] * x0 + m[0][1] * x1;
                    second[v] = m[1][0] * x0 + m[1][1] * x1;
                }
            }
        }

        if marks && self.oracle.mode == OracleMode::PerTargetFlip {
            for plane in amps.chunks_exact_mut(n) {
                for &t in &self.oracle.targets {
                    plane[t] = -plane[t];
                }
            }
        }
        Ok(())
    }

    /// Flip-flop shift of `src` written into `dst`.
    pub fn apply_shift_into(&self, src: &WalkState, dst: &mut WalkState) -> Result<()> {
        self.check(src)?;
        self.check(dst)?;
        shift_planes(&self.neighbors, self.geometry.n_vertices(), &src.amplitudes, &mut dst.amplitudes);
        Ok(())
    }

    /// One application of `U = S · C̃`. `scratch` is reused between steps.
    pub fn step(&self, state: &mut WalkState, scratch: &mut WalkState) -> Result<()> {
        self.apply_oracle_coin(state)?;
        self.apply_shift_into(state, scratch)?;
        std::mem::swap(state, scratch);
        Ok(())
    }

    /// Iterate `steps` times from `state`, calling `observe(t, &state)` for
    /// `t = 0..=steps`.
    pub fn evolve<F>(&self, mut state: WalkState, steps: usize, mut observe: F) -> Result<WalkState>
    where
        F: FnMut(usize, &WalkState),
    {
        self.check(&state)?;
        let mut scratch = state.clone();
        observe(0, &state);
        for t in 1..=steps {
            self.step(&mut state, &mut scratch)?;
            observe(t, &state);
        }
        Ok(state)
    }

    pub fn success_probability(&self, state: &WalkState) -> f64 {
        success_probability(state, &self.oracle.targets)
    }
}

fn shift_planes(
    neighbors: &[(Vec<usize>, Vec<usize>)],
    n: usize,
    src: &[Complex64],
    dst: &mut [Complex64],
) {
    for (axis, (plus, minus)) in neighbors.iter().enumerate() {
        let src_plus = &src[2 * axis * n..(2 * axis + 1) * n];
        let src_minus = &src[(2 * axis + 1) * n..(2 * axis + 2) * n];
        let (dst_plus, dst_minus) = dst[2 * axis * n..(2 * axis + 2) * n].split_at_mut(n);
        // |+, v⟩ → |-, v+1⟩ and |-, v⟩ → |+, v-1⟩
        for v in 0..n {
            dst_minus[plus[v]] = src_plus[v];
            dst_plus[minus[v]] = src_minus[v];
        }
    }
    let edges = 2 * neighbors.len() * n;
    dst[edges..].copy_from_slice(&src[edges..]);
}

/// Starting state for `coin` on `geometry`.
pub fn initial_state(geometry: &Geometry, coin: &CoinSpec) -> Result<WalkState> {
    Ok(Walk::new(geometry.clone(), coin.clone(), OracleSpec::none())?.initial_state())
}

pub fn apply_oracle_coin(state: &WalkState, coin: &CoinSpec, oracle: &OracleSpec) -> Result<WalkState> {
    let walk = Walk::new(state.geometry.clone(), coin.clone(), oracle.clone())?;
    let mut out = state.clone();
    walk.apply_oracle_coin(&mut out)?;
    Ok(out)
}

/// Flip-flop shift. Self-loop amplitudes (if any) stay in place.
pub fn apply_shift(state: &WalkState) -> WalkState {
    let g = &state.geometry;
    let neighbors: Vec<_> = (0..g.dim())
        .map(|axis| {
            (
                g.neighbor_table(Direction::plus(axis)),
                g.neighbor_table(Direction::minus(axis)),
            )
        })
        .collect();
    let mut out = state.clone();
    shift_planes(&neighbors, g.n_vertices(), &state.amplitudes, &mut out.amplitudes);
    out
}

pub fn walk_step(state: &WalkState, coin: &CoinSpec, oracle: &OracleSpec) -> Result<WalkState> {
    let walk = Walk::new(state.geometry.clone(), coin.clone(), oracle.clone())?;
    let mut s = state.clone();
    let mut scratch = state.clone();
    walk.step(&mut s, &mut scratch)?;
    Ok(s)
}

/// Total probability at the target vertices, summed over coin directions.
pub fn success_probability(state: &WalkState, targets: &[usize]) -> f64 {
    targets.iter().map(|&t| state.vertex_probability(t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::HadamardKind;
    use crate::coin::HadamardParams;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_diff(a: &WalkState, b: &WalkState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn initial_state_loopless_ring() {
        let g = Geometry::ring(4).unwrap();
        let s = initial_state(&g, &CoinSpec::grover(0.0).unwrap()).unwrap();
        let expected = 1.0 / 8f64.sqrt();
        for v in 0..4 {
            assert!((s.amplitude(0, v) - c(expected)).norm() < 1e-15);
            assert!((s.amplitude(1, v) - c(expected)).norm() < 1e-15);
            assert_eq!(s.amplitude(2, v), c(0.0));
        }
    }

    #[test]
    fn initial_self_loop_amplitude() {
        let g = Geometry::ring(200).unwrap();
        let s = initial_state(&g, &CoinSpec::grover(0.01).unwrap()).unwrap();
        // √0.01 / (√2.01 · √200), evaluated independently.
        let expected = 0.1 / (2.01f64.sqrt() * 200f64.sqrt());
        assert!((expected - 4.9875e-3).abs() < 5e-7);
        for v in [0, 57, 199] {
            assert!((s.amplitude(2, v).re - expected).abs() < 1e-15);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_initial_state() {
        let g = Geometry::ring(10).unwrap();
        let coin = CoinSpec::symmetric_hadamard(0.5, 0.4).unwrap();
        let s = initial_state(&g, &coin).unwrap();
        assert_eq!(s.coin_dim(), 2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_moves_and_flips() {
        let g = Geometry::ring(5).unwrap();
        let s = WalkState::basis(g.clone(), 3, Direction::plus(0), 0).unwrap();
        let out = apply_shift(&s);
        assert_eq!(out.amplitude(1, 1), c(1.0));
        assert!((out.norm_sqr() - 1.0).abs() == 0.0);

        let s = WalkState::basis(g.clone(), 3, Direction::minus(0), 0).unwrap();
        assert_eq!(apply_shift(&s).amplitude(0, 4), c(1.0));

        let s = WalkState::basis(g, 3, Direction::SelfLoop, 2).unwrap();
        assert_eq!(apply_shift(&s), s);
    }

    #[test]
    fn coin_fixes_initial_state() {
        let g = Geometry::torus(6).unwrap();
        let coin = CoinSpec::grover(0.3).unwrap();
        let s = initial_state(&g, &coin).unwrap();
        let out = apply_oracle_coin(&s, &coin, &OracleSpec::none()).unwrap();
        assert!(max_diff(&s, &out) < 1e-15);
        let stepped = walk_step(&s, &coin, &OracleSpec::none()).unwrap();
        assert!(max_diff(&s, &stepped) < 1e-15);
    }

    #[test]
    fn oracle_modes_agree_for_one_target() {
        let g = Geometry::torus(5).unwrap();
        let coin = CoinSpec::grover(4.01 / 25.0).unwrap();
        let mut s = initial_state(&g, &coin).unwrap();
        let oracle = OracleSpec::per_target_flip(vec![12]);
        s = walk_step(&s, &coin, &oracle).unwrap();
        let flip = apply_oracle_coin(&s, &coin, &oracle).unwrap();
        let refl = apply_oracle_coin(&s, &coin, &OracleSpec::new(vec![12], OracleMode::SuperpositionReflection)).unwrap();
        assert!(max_diff(&flip, &refl) <= 1e-15);
    }

    #[test]
    fn oracle_modes_differ_for_two_targets() {
        let g = Geometry::ring(4).unwrap();
        let coin = CoinSpec::grover(0.5).unwrap();
        let oracle = OracleSpec::per_target_flip(vec![0, 2]);
        // A state with unequal amplitudes at the two targets.
        let amps: Vec<Complex64> = (0..12).map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s = WalkState::from_amplitudes(g, 3, amps.iter().map(|z| z / norm).collect()).unwrap();
        let flip = apply_oracle_coin(&s, &coin, &oracle).unwrap();
        let refl = apply_oracle_coin(&s, &coin, &OracleSpec::new(vec![0, 2], OracleMode::SuperpositionReflection)).unwrap();
        assert!(max_diff(&flip, &refl) > 1e-3);
        assert!((flip.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((refl.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn target_coin_replaces_marking() {
        let g = Geometry::ring(6).unwrap();
        let coin = CoinSpec::symmetric_hadamard(0.5, 0.4).unwrap();
        let s = initial_state(&g, &coin).unwrap();
        let out = apply_oracle_coin(&s, &coin, &OracleSpec::per_target_flip(vec![3])).unwrap();
        let h = HadamardParams::new(0.4, HadamardKind::Symmetric).unwrap().matrix();
        let x = s.amplitude(0, 3);
        assert!((out.amplitude(0, 3) - (h[0][0] * x + h[0][1] * x)).norm() < 1e-15);
    }

    #[test]
    fn rejects_mismatched_state() {
        let coin = CoinSpec::grover(0.1).unwrap();
        let s = initial_state(&Geometry::ring(4).unwrap(), &coin).unwrap();
        let walk = Walk::new(Geometry::ring(5).unwrap(), coin, OracleSpec::none()).unwrap();
        let mut s2 = s.clone();
        assert!(walk.apply_oracle_coin(&mut s2).is_err());
        assert!(WalkState::from_amplitudes(Geometry::ring(4).unwrap(), 3, vec![c(0.0); 5]).is_err());
    }

    #[test]
    fn rejects_bad_oracle() {
        let g = Geometry::ring(4).unwrap();
        let coin = CoinSpec::grover(0.1).unwrap();
        assert!(Walk::new(g.clone(), coin.clone(), OracleSpec::per_target_flip(vec![1, 1])).is_err());
        assert!(Walk::new(g, coin, OracleSpec::per_target_flip(vec![4])).is_err());
    }

    #[test]
    fn success_probability_of_initial_and_concentrated_states() {
        let g = Geometry::torus(7).unwrap();
        let coin = CoinSpec::grover(0.2).unwrap();
        let s = initial_state(&g, &coin).unwrap();
        assert!((success_probability(&s, &[3, 10, 20]) - 3.0 / 49.0).abs() < 1e-12);
        let b = WalkState::basis(g, 5, Direction::minus(1), 10).unwrap();
        assert_eq!(success_probability(&b, &[10]), 1.0);
    }

    fn random_state(g: Geometry, coin_dim: usize, seeds: &[f64]) -> WalkState {
        let len = coin_dim * g.n_vertices();
        let amps: Vec<Complex64> = (0..len)
            .map(|i| Complex64::new(seeds[i % seeds.len()] + i as f64 * 0.01, seeds[(i * 7 + 3) % seeds.len()]))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        WalkState::from_amplitudes(g, coin_dim, amps.into_iter().map(|z| z / norm).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn shift_is_an_involution(dim in 1usize..=3, side in 2usize..=6, loop_ in any::<bool>(),
                                  seeds in proptest::collection::vec(-1.0f64..1.0, 1..20)) {
            let g = Geometry::new(dim, side).unwrap();
            let s = random_state(g.clone(), 2 * dim + usize::from(loop_), &seeds);
            let twice = apply_shift(&apply_shift(&s));
            prop_assert_eq!(&twice, &s);
            let bits = |w: &WalkState| {
                let mut v: Vec<(u64, u64)> =
                    w.amplitudes().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect();
                v.sort_unstable();
                v
            };
            prop_assert_eq!(bits(&apply_shift(&s)), bits(&s));
        }

        #[test]
        fn step_preserves_norm(dim in 1usize..=2, side in 2usize..=8, a in 0.0f64..5.0,
                               reflect in any::<bool>(),
                               seeds in proptest::collection::vec(-1.0f64..1.0, 1..20)) {
            let g = Geometry::new(dim, side).unwrap();
            let n = g.n_vertices();
            let s = random_state(g, 2 * dim + 1, &seeds);
            let mode = if reflect { OracleMode::SuperpositionReflection } else { OracleMode::PerTargetFlip };
            let targets: Vec<usize> = if n > 2 { vec![0, n / 2] } else { vec![0] };
            let out = walk_step(&s, &CoinSpec::grover(a).unwrap(), &OracleSpec::new(targets, mode)).unwrap();
            prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() <= 1e-14 * s.norm_sqr());
        }
    }
}
