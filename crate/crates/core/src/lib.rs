//! Exact and p-adic machinery for arithmetic dynamics on P1, P2 and (P1)^N.
//!
//! The crate is layered bottom-up:
//! - [`exactnum`]: rationals, polynomials, factorization over Q, number fields.
//! - [`padic`]: capped-precision Q_p arithmetic, Newton polygons, places above p.
//! - [`projdyn`]: points, maps, orbits, fixed points and multipliers.
//! - [`tate`]: truncated bivariate Tate series and the attractor of a polydisk map.
//! - [`localdyn`]: good primes, invariant polydisks, analytic arcs, return-time sets.
//! - [`classify`]: critical orbits and monomial/Lattès/nonexceptional typing on P1.
//! - [`zdo`]: orbit-closure interpolation, invariant curves, multiplier criteria.

pub mod classify;
pub mod error;
pub mod exactnum;
pub mod localdyn;
pub mod padic;
pub mod projdyn;
pub mod tate;
pub mod zdo;

pub use error::{Error, Result};

/// Default p-adic precision (absolute, in digits).
pub const DEFAULT_PRECISION: i64 = 40;
