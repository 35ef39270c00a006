//! Endomorphisms of P^1, P^2 and split endomorphisms of (P^1)^N over number fields.

pub mod degrees;
pub mod fixed;
pub mod map;
pub mod orbit;
pub mod preimage;

pub use degrees::{degrees, Degrees};
pub use fixed::{check_base_point_free, fixed_points, FixedPointData};
pub use map::{evaluate, BasePointCheck, MapSpec, MapSpecWire, P1Map, P2Map, ProjPoint, Space};
pub use orbit::{orbit, OrbitReport, Preperiodic};
pub use preimage::{preimage_chain, ChainLink, PreimageChain, DEFAULT_DEGREE_CAP};
