//! Okounkov bodies, diagonal adelic vector bundles and concave transforms,
//! checked against a toric model where every quantity has a closed form.

pub mod adelic;
pub mod concave;
pub mod convex_geom;
pub mod extrapolate;
pub mod graded;
pub mod report;
pub mod roof;
pub mod scalar;
pub mod toric;

pub use num_rational::BigRational as Rational;

pub use convex_geom::{ConvexBody, GeomError, Halfspace};
pub use scalar::Scalar;

/// Point with exact rational coordinates.
pub type RationalPoint = Vec<Rational>;
/// Exact rational polytope.
pub type Polytope = ConvexBody<Rational>;
/// Floating-point polytope, for quick approximate work.
pub type FloatPolytope = ConvexBody<f64>;
