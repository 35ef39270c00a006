//! p-adic local dynamics: good primes, invariant polydisks at fixed points,
//! analytic arcs through orbits and return-time sets.

pub mod arc;
pub mod dml;
pub mod goodprime;
pub mod polydisk;

pub use arc::{build_arc, build_arc_auto, with_period_multiple, ArcClass, ArcFlow};
pub use dml::{dml_decide, ClassKind, ClassVerdict, Confidence, DmlVerdict, Progression, DEFAULT_N_DIRECT};
pub use goodprime::{find_good_prime, find_good_prime_capped, GoodPrimeReport, DEFAULT_M_MAX};
pub use polydisk::{affine_polynomial_pair, invariant_polydisk, is_reduced_triangular, minimal_radius, InvariantPolydisk};
