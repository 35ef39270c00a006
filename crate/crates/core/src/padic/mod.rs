//! p-adic numbers at capped precision and local tools built on them.

pub mod element;
pub mod hensel;
pub mod logexp;
pub mod newton;
pub mod places;
pub mod series;

pub use element::{abs_value, PadicElement};
pub use hensel::{eval_poly, hensel_root};
pub use logexp::{padic_exp, padic_log};
pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use places::{places_above, PlaceAbove};
pub use series::{strassmann_count, PadicSeries1, StrassmannCount, TailBound};
