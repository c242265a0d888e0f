//! Numerics for quantum conditional entropy and conditional majorization.
//!
//! The crate covers dense linear algebra on density operators, quantum
//! channels and their Choi matrices, verification and construction of
//! conditionally unital semi-causal (CUSC) channels, conditional entropies,
//! classical conditional majorization via linear programming, quantum
//! gambling games on states and channels, and a Monte Carlo simulator of
//! single game rounds.

pub mod error;
pub mod channels;
pub mod classical;
pub mod cusc;
pub mod entropy;
pub mod linalg;
pub mod lp;
pub mod games;
pub mod optim;
pub mod state_games;
pub mod channel_games;
pub mod mc;
pub mod io;

pub use error::{QceError, Result};
pub use channels::QuantumChannel;
pub use linalg::{ComplexMatrix, DensityOperator};
