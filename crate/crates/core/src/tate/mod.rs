//! Truncated Tate series on the unit polydisk and attractors of polydisk self-maps.

pub mod attractor;
pub mod series;

pub use attractor::{
    attractor_psi, compose, contraction_constants, psi_is_identity_on_attractor, rho_f_seminorm,
    semiconjugacy_residual, AttractorData, Contraction, Membership, NormalForm, PolydiskMap, SeminormReport,
    GUARD,
};
pub use series::{GaussNorm, TateSeries2};

/// Default total-degree truncation.
pub const DEFAULT_T: u32 = 24;
