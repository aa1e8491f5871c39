//! Power-series echelons with assigned scopes.
//!
//! An echelon is a sum `sum_i K[[x_1..x_{s_i}]] * f_i` inside the power
//! series ring: like an ideal, but each generator may only be multiplied by
//! series in its first `s_i` variables. This crate provides exact truncated
//! power series over the rationals, echelon division with remainder, the
//! scope-respecting S-pair enlargement toward a standard basis, a brute-force
//! linear-algebra certifier, and a full reconstruction of Gabrielov's example
//! `f = 1, g = x (e^z - 1), h = yz - x`.

pub mod cli;
pub mod division;
pub mod echelon;
pub mod error;
pub mod gabrielov;
pub mod io;
pub mod oracle;
pub mod order;
pub mod series;
pub mod stdbasis;
pub mod verify;

pub use division::{echelon_divide, verify_star, DivisionResult};
pub use echelon::{EchelonPresentation, Region, RegionPartition, ScopedGenerator};
pub use error::{Error, Result};
pub use order::{initial_term, MonomialOrder, OrderKind};
pub use series::{Exponent, Rational, Series, Term};
