//! Exact linear algebra over `Z/p^m`.

pub mod module;
pub mod snf;
mod zmatrix;
mod zpm;

pub use module::{cokernel_structure, FiniteModule, IsoVerdict, Structure, Subquotient};
pub use snf::{kernel, smith_normal_form, KernelBasis, Snf, Solver, Track};
pub use zmatrix::ZMatrix;
pub use zpm::{is_prime, Zpm, MAX_MODULUS};
