//! Exact-arithmetic invariants of hypersurface and plane-curve singularities
//! over fields of arbitrary characteristic.
//!
//! The crate is organized in layers:
//! - [`field`]: coefficient arithmetic for `Q`, prime fields `F_p` and
//!   dynamically built extensions `F_{p^k}`, with univariate root finding;
//! - [`series`]: truncated multivariate power series, Y-polynomials,
//!   Weierstrass division/preparation, resultants, blow-ups;
//! - [`localstd`]: local standard bases (Mora's tangent cone algorithm),
//!   colengths and ideal membership;
//! - [`invariants`]: Milnor and Tjurina numbers, Hilbert-Samuel multiplicity
//!   of the Tjurina ideal via generic units, mu-stability;
//! - [`numsgp`]: numerical semigroup arithmetic (conductor, Apery sets,
//!   symmetry, tameness);
//! - [`branch`]: plane-branch analysis (parametrization, semigroup of
//!   values, intersection multiplicities, approximate roots, jacobian
//!   sweep machinery);
//! - [`fibration`]: local-smoothing verdicts for the fibration `f = s`.
//!
//! The crate is `no_std` (it requires `alloc`); IO, parsing of command-line
//! options and report formats live in the companion CLI crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod extnat;
pub mod field;
pub mod series;
pub mod expr;
pub mod localstd;
pub mod numsgp;
pub mod invariants;
pub mod branch;
pub mod fibration;

pub use error::Error;
pub use extnat::ExtNat;
pub use field::{FieldCtx, FieldElem};
pub use series::TruncSeries;
