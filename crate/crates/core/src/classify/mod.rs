//! Type classification of endomorphisms of P^1: critical orbits, postcritical
//! portraits and orbifold signatures, exceptional points and semiconjugacies.

pub mod critical;
pub mod types;

pub use critical::{critical_orbits, CriticalData, CriticalPoint, OrbitStatus, DEFAULT_N_BOUND};
pub use types::{
    classify_type, conjugate, exceptional_points, mobius, mobius_inverse, verify_semiconjugacy, Confidence,
    ExceptionalReport, MapType, TypeVerdict, Witness,
};
