//! Exact arithmetic: rationals, polynomials over Q and F_p, factorization,
//! number fields, algebraic numbers, resultants and certified complex roots.

pub mod factor;
pub mod field;
pub mod fp;
pub mod linalg;
pub mod mpoly;
pub mod nfpoly;
pub mod poly;
pub mod primitive;
pub mod rational;
pub mod resultant;
pub mod roots;

pub use factor::factor_poly_q;
pub use field::{complex_abs_values, compare_abs, generator, AlgebraicNumber, Decision, FieldRef, NumberField};
pub use mpoly::MPoly;
pub use nfpoly::NfPoly;
pub use poly::Poly;
pub use primitive::{adjoin_root, field_generated_degree, joint_field, primitive_element, to_joint_field, FieldEmbedding};
pub use rational::Rational;
pub use resultant::{resultant, resultant_univariate, BiPoly, Var};
pub use roots::{certified_roots, CRoot};

/// Default decision margin for archimedean comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;
