//! Exact rank parity and torsion invariants over truncated power-series
//! rings.
//!
//! The crate machine-checks a family of parity and monotonicity statements
//! about skew-symmetric matrix families, isotropic lattice pairs, and
//! two-term complexes over `K[s]/(s^k)`:
//!
//! * [`skew`] — block anti-triangular rank sequences of skew families and
//!   the square-zero plane-ring counterexample showing where parity fails;
//! * [`isotropic`] — intersection dimensions of totally isotropic lattices
//!   in a symmetric bilinear space, computed both structurally (through an
//!   extracted skew family) and by a direct kernel oracle;
//! * [`torsion`] — local Smith-form invariants, torsion profiles, splitting
//!   checks, and two-term complex base change;
//! * [`campaign`] — seeded, reproducible random campaigns over all of the
//!   above, with JSON/CSV reporting.
//!
//! Scalars ([`series`]) and matrices ([`linalg`]) are exact: prime fields of
//! odd characteristic or arbitrary-precision rationals ([`field`]); no
//! floating point anywhere.

pub mod campaign;
pub mod error;
pub mod field;
pub mod isotropic;
pub mod linalg;
pub mod report;
pub mod series;
pub mod skew;
pub mod torsion;

pub use error::{Error, Result};
pub use field::{Field, PrimeField, Rationals};
