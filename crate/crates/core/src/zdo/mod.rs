//! Degree-bounded density experiments and structural criteria: orbit-closure
//! interpolation, invariant curves of split maps, multiplier conditions,
//! Diophantine checks, adelic membership and invariant subvarieties of (P^1)^N.

pub mod adelic;
pub mod closure;
pub mod curves;
pub mod diophantine;
pub mod modq;
pub mod multipliers;
pub mod structure;

pub use curves::{invariant_curve_check, invariant_curve_search, CurveCheck, CurveSearch, FoundCurve};
pub use closure::{orbit_closure, ClosureReport, ClosureVerdict};
pub use multipliers::{
    good_fixed_point, good_multipliers, multiplicative_independence, r_property, GoodFixedPoint, GoodVerdict,
    GoodWitness, Independence, MultiplierPair, RProperty,
};
pub use diophantine::{verify_diophantine, DiophantineReport};
pub use adelic::{adelic_member, find_member, AdelicRegion, Membership};
pub use structure::{split_invariant_structure, StructureReport, StructureVerdict};
