//! Coin operators: the weighted Grover diffusion coin and the biased /
//! symmetric Hadamard coins.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Geometry;

/// Which of the two Hadamard families a coin belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HadamardKind {
    /// Real coin with diagonal `(√γ, -√γ)`.
    Biased,
    /// Complex coin with off-diagonal `i√(1-γ)` and diagonal `(√γ, √γ)`.
    Symmetric,
}

impl HadamardKind {
    pub fn delta(self) -> u8 {
        match self {
            HadamardKind::Biased => 0,
            HadamardKind::Symmetric => 1,
        }
    }

    pub fn from_delta(delta: u8) -> Result<Self> {
        match delta {
            0 => Ok(HadamardKind::Biased),
            1 => Ok(HadamardKind::Symmetric),
            d => Err(Error::InvalidCoin(format!("hadamard delta must be 0 or 1, got {d}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardParams {
    pub gamma: f64,
    pub kind: HadamardKind,
}

impl HadamardParams {
    pub fn new(gamma: f64, kind: HadamardKind) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidCoin(format!("hadamard gamma must lie in [0, 1], got {gamma}")));
        }
        Ok(HadamardParams { gamma, kind })
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        hadamard_entries(self.gamma, self.kind)
    }
}

/// Coin applied at every vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoinSpec {
    /// Grover diffusion about the coin state weighted by a self-loop of
    /// weight `self_loop`. Coin dimension `2d + 1`.
    GroverLoop { self_loop: f64 },
    /// Loopless Hadamard coin on a ring (coin dimension 2). With
    /// `target_coin`, targets get that coin instead of being marked by the
    /// oracle.
    Hadamard {
        coin: HadamardParams,
        target_coin: Option<HadamardParams>,
    },
}

impl CoinSpec {
    pub fn grover(self_loop: f64) -> Result<Self> {
        if !(self_loop.is_finite() && self_loop >= 0.0) {
            return Err(Error::InvalidCoin(format!(
                "self-loop weight must be finite and >= 0, got {self_loop}"
            )));
        }
        Ok(CoinSpec::GroverLoop { self_loop })
    }

    pub fn hadamard(coin: HadamardParams, target_coin: Option<HadamardParams>) -> Self {
        CoinSpec::Hadamard { coin, target_coin }
    }

    /// Symmetric Hadamard coin `gamma` everywhere and `target_gamma` on targets.
    pub fn symmetric_hadamard(gamma: f64, target_gamma: f64) -> Result<Self> {
        Ok(CoinSpec::Hadamard {
            coin: HadamardParams::new(gamma, HadamardKind::Symmetric)?,
            target_coin: Some(HadamardParams::new(target_gamma, HadamardKind::Symmetric)?),
        })
    }

    pub fn self_loop(&self) -> Option<f64> {
        match self {
            CoinSpec::GroverLoop { self_loop } => Some(*self_loop),
            CoinSpec::Hadamard { .. } => None,
        }
    }

    pub fn has_self_loop(&self) -> bool {
        matches!(self, CoinSpec::GroverLoop { .. })
    }

    pub fn coin_dim(&self, geometry: &Geometry) -> usize {
        geometry.degree() + usize::from(self.has_self_loop())
    }

    /// Check the coin's parameters and that it fits `geometry`.
    pub fn validate(&self, geometry: &Geometry) -> Result<()> {
        match self {
            CoinSpec::GroverLoop { self_loop } => {
                CoinSpec::grover(*self_loop)?;
            }
            CoinSpec::Hadamard { coin, target_coin } => {
                if geometry.dim() != 1 {
                    return Err(Error::InvalidCoin(format!(
                        "hadamard coins need a 1D ring, got dimension {}",
                        geometry.dim()
                    )));
                }
                for p in std::iter::once(coin).chain(target_coin.as_ref()) {
                    HadamardParams::new(p.gamma, p.kind)?;
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            CoinSpec::GroverLoop { .. } => "grover".to_string(),
            CoinSpec::Hadamard { coin, target_coin } => match target_coin {
                Some(t) => format!("hadamard:{}:{}:{}", coin.gamma, t.gamma, coin.kind.delta()),
                None => format!("hadamard:{}:{}", coin.gamma, coin.kind.delta()),
            },
        }
    }
}

/// The weighted uniform coin state: `1/√(2d+a)` on each edge direction and
/// `√a/√(2d+a)` on the self-loop (last entry).
pub fn grover_coin_state(degree: usize, self_loop: f64) -> Vec<f64> {
    let norm = (degree as f64 + self_loop).sqrt();
    let mut psi = vec![1.0 / norm; degree + 1];
    psi[degree] = self_loop.sqrt() / norm;
    psi
}

/// `2|ψ_c⟩⟨ψ_c| - I` of size `(degree + 1)²`.
pub fn grover_coin_matrix(degree: usize, self_loop: f64) -> Result<DMatrix<Complex64>> {
    if degree == 0 || !degree.is_multiple_of(2) {
        return Err(Error::InvalidCoin(format!("degree must be a positive even number, got {degree}")));
    }
    CoinSpec::grover(self_loop)?;
    let psi = grover_coin_state(degree, self_loop);
    let n = degree + 1;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(2.0 * psi[i] * psi[j] - delta, 0.0)
    }))
}

fn hadamard_entries(gamma: f64, kind: HadamardKind) -> [[Complex64; 2]; 2] {
    let diag = Complex64::new(gamma.sqrt(), 0.0);
    let off = (1.0 - gamma).sqrt();
    match kind {
        HadamardKind::Biased => [
            [diag, Complex64::new(off, 0.0)],
            [Complex64::new(off, 0.0), -diag],
        ],
        // (-1)^(1/2) taken as +i, which makes (-1)^(1+δ) = +1.
        HadamardKind::Symmetric => [
            [diag, Complex64::new(0.0, off)],
            [Complex64::new(0.0, off), diag],
        ],
    }
}

pub fn hadamard_coin_matrix(gamma: f64, kind: HadamardKind) -> Result<DMatrix<Complex64>> {
    let p = HadamardParams::new(gamma, kind)?;
    let m = p.matrix();
    Ok(DMatrix::from_fn(2, 2, |i, j| m[i][j]))
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let product = m.adjoint() * m;
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn re(m: &DMatrix<Complex64>, i: usize, j: usize) -> f64 {
        assert_eq!(m[(i, j)].im, 0.0);
        m[(i, j)].re
    }

    #[test]
    fn grover_2d_loopless() {
        let c = grover_coin_matrix(4, 0.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { -0.5 } else { 0.5 };
                assert_abs_diff_eq!(re(&c, i, j), want, epsilon = 1e-15);
            }
            assert_abs_diff_eq!(re(&c, i, 4), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(re(&c, 4, i), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(re(&c, 4, 4), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn grover_1d_weight_two() {
        // ψ_c = (1, 1, √2) / 2
        let c = grover_coin_matrix(2, 2.0).unwrap();
        let half_root2 = std::f64::consts::SQRT_2 / 2.0;
        assert_abs_diff_eq!(re(&c, 0, 0), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(re(&c, 1, 1), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(re(&c, 2, 2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(re(&c, 0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(re(&c, 0, 2), half_root2, epsilon = 1e-15);
        assert_abs_diff_eq!(re(&c, 2, 1), half_root2, epsilon = 1e-15);
    }

    #[test]
    fn grover_rejects_bad_input() {
        assert!(grover_coin_matrix(3, 1.0).is_err());
        assert!(grover_coin_matrix(2, -0.1).is_err());
        assert!(grover_coin_matrix(2, f64::NAN).is_err());
    }

    #[test]
    fn standard_hadamard() {
        let h = hadamard_coin_matrix(0.5, HadamardKind::Biased).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(h[(0, 0)].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 1)].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 0)].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 1)].re, -r, epsilon = 1e-15);

        let d = hadamard_coin_matrix(1.0, HadamardKind::Biased).unwrap();
        assert_eq!(d[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(d[(1, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(d[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn symmetric_hadamard_half() {
        let h = hadamard_coin_matrix(0.5, HadamardKind::Symmetric).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(h[(0, 0)].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 1)].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(0, 1)].im, r, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(1, 0)].im, r, epsilon = 1e-15);
        assert_eq!(h[(0, 1)].re, 0.0);
        assert!(unitarity_deviation(&h) <= 1e-12);
    }

    #[test]
    fn hadamard_rejects_gamma_outside_unit_interval() {
        assert!(hadamard_coin_matrix(1.2, HadamardKind::Symmetric).is_err());
        assert!(hadamard_coin_matrix(-0.01, HadamardKind::Biased).is_err());
        assert!(HadamardKind::from_delta(2).is_err());
    }

    #[test]
    fn hadamard_needs_a_ring() {
        let coin = CoinSpec::symmetric_hadamard(0.5, 0.4).unwrap();
        assert!(coin.validate(&Geometry::torus(4).unwrap()).is_err());
        assert!(coin.validate(&Geometry::ring(4).unwrap()).is_ok());
        assert_eq!(coin.coin_dim(&Geometry::ring(4).unwrap()), 2);
        assert_eq!(CoinSpec::grover(0.1).unwrap().coin_dim(&Geometry::torus(4).unwrap()), 5);
    }

    proptest! {
        #[test]
        fn grover_is_unitary_involution(dim in 1usize..=4, a in 0.0f64..50.0) {
            let c = grover_coin_matrix(2 * dim, a).unwrap();
            prop_assert!(unitarity_deviation(&c) <= 1e-12);
            let sq = &c * &c;
            let id = DMatrix::<Complex64>::identity(c.nrows(), c.ncols());
            prop_assert!((sq - id).iter().all(|z| z.norm() <= 1e-12));
            prop_assert!((c.transpose() - &c).iter().all(|z| z.norm() == 0.0));
        }

        #[test]
        fn hadamard_is_unitary(gamma in 0.0f64..=1.0, symmetric in any::<bool>()) {
            let kind = if symmetric { HadamardKind::Symmetric } else { HadamardKind::Biased };
            let h = hadamard_coin_matrix(gamma, kind).unwrap();
            prop_assert!(unitarity_deviation(&h) <= 1e-12);
        }
    }
}
