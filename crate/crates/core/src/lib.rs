//! Exact computational commutative algebra for finite-level Taylor–Wiles
//! patching experiments.
//!
//! The crate is organised bottom-up:
//!
//! * [`rings`]: finite local rings `Z/p^m[(Z/p^N)^q][z_1..z_j]/(z^t)` and the
//!   structure maps between them.
//! * [`linalg`]: Smith normal form over `Z/p^m`, kernels, and finite
//!   modules with generator actions.
//! * [`complexes`]: bounded complexes of finite free modules: cohomology,
//!   minimization, base change, homology comparison.
//! * [`ordinary`]: Fitting decompositions and Hecke-style projectors.
//! * [`graded`]: Gröbner bases, Hilbert series, minimal free resolutions
//!   and depth over `F_p[x_1..x_q]`.
//! * [`patching`]: patching data, fingerprints and the pigeonhole engine.
//! * [`numerology`]: closed-form invariants `l0`, `q0` and friends.
//! * [`scenario`]: JSON scenario ingestion and deterministic reports.

pub mod complexes;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod numerology;
pub mod ordinary;
pub mod patching;
pub mod rings;
pub mod scenario;

pub use error::{Error, Result};
