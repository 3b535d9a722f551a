//! Numerical Kähler-Atiyah / Clifford algebra engine.
//!
//! Constructs irreducible complex Clifford modules in arbitrary signature
//! (d ≤ 10), computes Hermitian and complex-bilinear squares of spinors,
//! verifies their algebraic characterizations as residual systems, and
//! evaluates spinorial instanton and curving conditions, with JSON
//! interchange throughout.

pub mod acceptance;
pub mod algebra;
pub mod error;
pub mod instanton;
pub mod json;
pub mod linalg;
pub mod lowdim;
pub mod pairing;
pub mod rep;
pub mod sample;
pub mod square;

pub use algebra::{Multivector, Signature};
pub use error::KaError;
pub use rep::{CliffordRep, Spinor};
