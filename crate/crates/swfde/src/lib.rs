//! Stability certificates and numerical verification for switched time-delay
//! systems.
//!
//! The crate has two halves that check each other:
//!
//! * **Certification** ([`linalg`], [`certify`]): positive-vector stability
//!   certificates for switched functional differential systems whose modes are
//!   bounded by a Metzler matrix `Â` plus a nonnegative delay-variation matrix
//!   `V̂`. A feasible certificate yields a decay rate `α`, a mode-mismatch
//!   factor `γ`, and the average-dwell-time threshold `τ* = ln γ / α`.
//! * **Simulation** ([`switching`], [`simulate`], [`verify`]): a method-of-steps
//!   RK4 integrator with cubic Hermite history, ADT-constrained switching
//!   signal generators, and a Monte-Carlo harness that tests certified decay
//!   envelopes against actual trajectories.
//!
//! ```
//! use swfde::linalg::{metzler_projection, find_positive_vector, Matrix};
//!
//! let closed = Matrix::from_rows(&[vec![-3.0, 2.0], vec![2.0, -2.0]]).unwrap();
//! let m = metzler_projection(&closed).unwrap();
//! let xi = find_positive_vector(&m).expect("Hurwitz Metzler matrix");
//! assert!(xi.iter().all(|&v| v > 0.0));
//! ```

pub mod builtin;
pub mod certify;
mod error;
pub mod linalg;
pub mod simulate;
pub mod switching;
pub mod system;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};

use std::path::Path;

/// Loads a system spec file, resolving black-box RHS and φ names against the
/// [`builtin`] registry.
///
/// Returns the system together with the embedded initial history, if any.
pub fn load_system(
    path: &Path,
) -> Result<(system::SwitchedSystem, Option<system::InitialHistory>)> {
    let text = std::fs::read_to_string(path)?;
    let file = system::SystemFile::parse(&text)?;
    file.build(&builtin::rhs, &builtin::phi)
}
