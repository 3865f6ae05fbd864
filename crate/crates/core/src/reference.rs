//! Dense-matrix ground truth for small walks.
//!
//! The full `(coin_dim · N)²` evolution operator is assembled column by
//! column, pushing each basis vector through a deliberately naive step that
//! shares no code with [`crate::walk`]: dense coin matrices, an explicit
//! vertex-space oracle, and shift targets computed from coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::coin::{grover_coin_matrix, CoinSpec};
use crate::error::{Error, Result};
use crate::lattice::Geometry;
use crate::walk::{OracleMode, OracleSpec, Walk};

/// Largest operator dimension the oracle will build.
pub const DENSE_DIM_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }

    /// Largest entry of `|U†U - I|`. Cubic in the dimension.
    pub fn unitarity_deviation(&self) -> f64 {
        crate::coin::unitarity_deviation(&self.matrix)
    }

    /// Largest `| |λ| - 1 |` over the eigenvalues, from a complex Schur form.
    /// `None` above 512 dimensions or if the decomposition does not converge.
    pub fn spectral_radius_deviation(&self) -> Option<f64> {
        if self.dim() > 512 {
            return None;
        }
        let schur = nalgebra::linalg::Schur::try_new(self.matrix.clone(), 1e-14, 10_000)?;
        let (_, t) = schur.unpack();
        Some((0..self.dim()).map(|i| (t[(i, i)].norm() - 1.0).abs()).fold(0.0, f64::max))
    }
}

struct NaiveStep {
    dim: usize,
    side: usize,
    n: usize,
    coin_dim: usize,
    coin: DMatrix<Complex64>,
    target_coin: Option<DMatrix<Complex64>>,
    targets: Vec<usize>,
    /// Vertex-space operator applied before the coin, if any.
    pre_oracle: Option<DMatrix<Complex64>>,
    /// Whether the coin is negated at targets.
    flip: bool,
}

impl NaiveStep {
    fn new(g: &Geometry, coin: &CoinSpec, oracle: &OracleSpec) -> Result<Self> {
        coin.validate(g)?;
        oracle.validate(g)?;
        let n = g.n_vertices();
        let (coin_m, target_coin) = match coin {
            CoinSpec::GroverLoop { self_loop } => (grover_coin_matrix(g.degree(), *self_loop)?, None),
            CoinSpec::Hadamard { coin, target_coin } => {
                let to_dense = |p: &crate::coin::HadamardParams| {
                    let m = p.matrix();
                    DMatrix::from_fn(2, 2, |i, j| m[i][j])
                };
                (to_dense(coin), target_coin.as_ref().map(to_dense))
            }
        };
        let marks = target_coin.is_none() && !oracle.targets.is_empty();
        let pre_oracle = (marks && oracle.mode == OracleMode::SuperpositionReflection).then(|| {
            let amp = 1.0 / (oracle.targets.len() as f64).sqrt();
            let mut t_vec = DVector::<Complex64>::zeros(n);
            for &t in &oracle.targets {
                t_vec[t] = Complex64::new(amp, 0.0);
            }
            DMatrix::<Complex64>::identity(n, n) - (&t_vec * t_vec.adjoint()) * Complex64::new(2.0, 0.0)
        });
        Ok(NaiveStep {
            dim: g.dim(),
            side: g.side(),
            n,
            coin_dim: coin.coin_dim(g),
            coin: coin_m,
            target_coin,
            targets: oracle.targets.clone(),
            pre_oracle,
            flip: marks && oracle.mode == OracleMode::PerTargetFlip,
        })
    }

    fn coords(&self, mut v: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim];
        for axis in (0..self.dim).rev() {
            c[axis] = v % self.side;
            v /= self.side;
        }
        c
    }

    fn index(&self, c: &[usize]) -> usize {
        c.iter().fold(0, |acc, &x| acc * self.side + x)
    }

    /// `(coin, vertex)` reached by the flip-flop shift from `(coin, v)`.
    fn shift_target(&self, coin: usize, v: usize) -> (usize, usize) {
        if coin == 2 * self.dim {
            return (coin, v);
        }
        let axis = coin / 2;
        let plus = coin.is_multiple_of(2);
        let mut c = self.coords(v);
        c[axis] = if plus {
            (c[axis] + 1) % self.side
        } else {
            (c[axis] + self.side - 1) % self.side
        };
        let new_coin = if plus { coin + 1 } else { coin - 1 };
        (new_coin, self.index(&c))
    }

    fn apply(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let (n, k) = (self.n, self.coin_dim);
        // as a coin_dim × N matrix: row = direction, column = vertex
        let mut m = DMatrix::from_fn(k, n, |c, v| x[c * n + v]);
        if let Some(r) = &self.pre_oracle {
            m = &m * r.transpose();
        }
        let mut after_coin = DMatrix::<Complex64>::zeros(k, n);
        for v in 0..n {
            let is_target = self.targets.contains(&v);
            let c = match &self.target_coin {
                Some(tc) if is_target => tc,
                _ => &self.coin,
            };
            let mut col = c * m.column(v);
            if self.flip && is_target {
                col = -col;
            }
            after_coin.set_column(v, &col);
        }
        let mut out = DVector::<Complex64>::zeros(k * n);
        for c in 0..k {
            for v in 0..n {
                let (c2, v2) = self.shift_target(c, v);
                out[c2 * n + v2] += after_coin[(c, v)];
            }
        }
        out
    }
}

/// `S · C̃` as an explicit matrix in the `(direction, vertex)` basis.
pub fn build_dense_unitary(g: &Geometry, coin: &CoinSpec, oracle: &OracleSpec) -> Result<DenseOperator> {
    let dim = coin.coin_dim(g) * g.n_vertices();
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::DenseLimit {
            dim,
            limit: DENSE_DIM_LIMIT,
        });
    }
    let step = NaiveStep::new(g, coin, oracle)?;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut probe = DVector::<Complex64>::zeros(dim);
    for j in 0..dim {
        probe[j] = Complex64::new(1.0, 0.0);
        matrix.set_column(j, &step.apply(&probe));
        probe[j] = Complex64::new(0.0, 0.0);
    }
    Ok(DenseOperator { matrix })
}

/// Outcome of comparing dense and sparse evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub steps: usize,
    pub tolerance: f64,
    /// Max-norm deviation after each step `t = 1..=steps`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Compare `U^t ψ_in` against `t` sparse steps for every `t` up to `steps`.
pub fn verify_equivalence(
    g: &Geometry,
    coin: &CoinSpec,
    oracle: &OracleSpec,
    steps: usize,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    let dense = build_dense_unitary(g, coin, oracle)?;
    let walk = Walk::new(g.clone(), coin.clone(), oracle.clone())?;
    let start = walk.initial_state();
    let mut reference = DVector::from_column_slice(start.amplitudes());
    let mut deviations = Vec::with_capacity(steps);
    walk.evolve(start, steps, |t, state| {
        if t == 0 {
            return;
        }
        reference = dense.apply(&reference);
        let dev = state
            .amplitudes()
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        deviations.push(dev);
    })?;
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        steps,
        tolerance,
        passed: max_deviation <= tolerance,
        deviations,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Direction;
    use crate::walk::{walk_step, WalkState};

    #[test]
    fn tiny_ring_is_unitary() {
        let g = Geometry::ring(2).unwrap();
        let u = build_dense_unitary(&g, &CoinSpec::grover(0.0).unwrap(), &OracleSpec::none()).unwrap();
        assert_eq!(u.dim(), 6);
        assert!(u.unitarity_deviation() <= 1e-12);
    }

    #[test]
    fn columns_match_sparse_step() {
        let g = Geometry::ring(4).unwrap();
        let coin = CoinSpec::grover(0.5).unwrap();
        let oracle = OracleSpec::per_target_flip(vec![1]);
        let u = build_dense_unitary(&g, &coin, &oracle).unwrap();
        for c in 0..3 {
            for v in 0..4 {
                let dir = Direction::from_coin_index(c, 1, true).unwrap();
                let e = WalkState::basis(g.clone(), 3, dir, v).unwrap();
                let stepped = walk_step(&e, &coin, &oracle).unwrap();
                let col = u.matrix().column(c * 4 + v);
                for (a, b) in stepped.amplitudes().iter().zip(col.iter()) {
                    assert!((a - b).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn uniform_state_is_stationary() {
        let g = Geometry::torus(3).unwrap();
        let coin = CoinSpec::grover(0.7).unwrap();
        let u = build_dense_unitary(&g, &coin, &OracleSpec::none()).unwrap();
        let s = crate::walk::initial_state(&g, &coin).unwrap();
        let v = DVector::from_column_slice(s.amplitudes());
        assert!((u.apply(&v) - &v).camax() < 1e-14);
    }

    #[test]
    fn guard_rejects_large_operators() {
        let g = Geometry::torus(40).unwrap();
        let err = build_dense_unitary(&g, &CoinSpec::grover(0.1).unwrap(), &OracleSpec::none());
        assert!(matches!(err, Err(Error::DenseLimit { dim: 8000, .. })));
    }

    #[test]
    fn equivalence_passes_and_zero_tolerance_fails() {
        let g = Geometry::ring(8).unwrap();
        let coin = CoinSpec::grover(2.0 / 8.0).unwrap();
        let oracle = OracleSpec::per_target_flip(vec![4]);
        let r = verify_equivalence(&g, &coin, &oracle, 50, 1e-10).unwrap();
        assert!(r.passed, "{}", r.max_deviation);
        assert_eq!(r.deviations.len(), 50);
        let r = verify_equivalence(&g, &coin, &oracle, 50, 0.0).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn torus_equivalence() {
        let g = Geometry::torus(3).unwrap();
        let coin = CoinSpec::grover(4.01 / 9.0).unwrap();
        let r = verify_equivalence(&g, &coin, &OracleSpec::per_target_flip(vec![4]), 30, 1e-10).unwrap();
        assert!(r.passed, "{}", r.max_deviation);
    }

    #[test]
    fn eigenvalues_on_unit_circle() {
        let g = Geometry::ring(6).unwrap();
        let coin = CoinSpec::grover(0.3).unwrap();
        let u = build_dense_unitary(&g, &coin, &OracleSpec::per_target_flip(vec![2])).unwrap();
        assert!(u.spectral_radius_deviation().unwrap() <= 1e-10);
    }
}
