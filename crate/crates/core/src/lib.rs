//! Simulation and experiment harness for lackadaisical discrete-time
//! quantum-walk search on rings and tori.
//!
//! The walk lives on `coin ⊗ vertex` space. Each step applies a coin (the
//! self-loop-weighted Grover diffusion, or a Hadamard coin on rings) marked
//! at target vertices by an oracle, followed by the flip-flop shift. The
//! [`search`] module records how the probability of finding a target evolves
//! and where it first peaks; [`harness`] sweeps lattice sizes and fits
//! running-time models to the results.

pub mod coin;
pub mod error;
pub mod fit;
pub mod harness;
pub mod lattice;
pub mod reference;
pub mod search;
pub mod walk;

pub use coin::{CoinSpec, HadamardKind, HadamardParams};
pub use error::{Error, Result};
pub use lattice::{Direction, Geometry, Sign};
pub use search::{Peak, PeakRule, ProbabilitySeries};
pub use walk::{OracleMode, OracleSpec, Walk, WalkState};
