//! Log-determinant quasi-entropy for orientationally averaged tensors on SO(3).
//!
//! The crate provides, bottom up:
//!
//! * [`tensor`] — symmetric (traceless) tensor algebra on R^3 up to order 4,
//!   rotations, the `Psi3`/`Psi4` reshaping maps and auxiliary epsilon-built
//!   tensors;
//! * [`linalg`] — log-determinants of small symmetric positive definite
//!   matrices via Cholesky pivots;
//! * [`quasi`] — closed-form quasi-entropies for the eight point groups
//!   (D-infinity, C-infinity, C2, D2, O, T, D4, D3), their gradients and
//!   inner-minimized variants;
//! * [`cov`] — independent covariance-matrix construction used as an oracle
//!   for every explicit formula in [`quasi`];
//! * [`entropy`] — the constrained-minimization entropy (1D rod solver and a
//!   moment-matching solver on SO(3)) used for calibration;
//! * [`models`] — free-energy models (rod, D2, bent-core, tetrahedral /
//!   octahedral) as value + gradient over reduced coordinates;
//! * [`optimize`] — multi-start minimization, stationary-point classification
//!   and executable checks of the structural theorems;
//! * [`phase`] — parameter sweeps, phase classification and CSV / plot-script
//!   emission;
//! * [`verify`] — the acceptance battery run by the CLI and the test suite.

pub mod cov;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod models;
pub mod optimize;
pub mod phase;
pub mod quasi;
pub mod so3;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use models::ModelCoefficients;
pub use quasi::{Group, OrderParameterSet, QuasiEntropyValue};
pub use tensor::{EulerAngles, FullTensor, Rotation, SymTensor, SymTracelessTensor};
