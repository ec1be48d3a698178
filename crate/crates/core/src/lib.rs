//! Smallest k-enclosing rectangles.
//!
//! Exact divide-and-conquer solvers built on a semi-dynamic diagonal
//! structure, k-sensitive solvers built on shallow cuttings, a randomized
//! (1+ε)-approximation for area, and weighted / subset-sum / colored
//! variants. Every solver returns a [`Solution`].
//!
//! Generic code is written against [`Scalar`]; the aliases below fix the
//! scalar to `f64` or `i64`.

pub mod approx;
pub mod cover;
pub mod diag1d;
mod error;
pub mod exact;
pub mod gen;
mod geom;
pub mod minplus;
pub mod oracle;
pub mod reduction;
mod scalar;
pub mod subsetsum;

pub use error::{Error, Result};
pub use geom::{
    order_by_x, order_by_y, score, transform_x, OrientedRect, Point, Rect, ScoreKind, Solution,
    SolutionRect, Transform, WeightedPoint,
};
pub use scalar::{Real, Scalar};

pub type Point64 = Point<f64>;
pub type Rect64 = Rect<f64>;
pub type WeightedPoint64 = WeightedPoint<f64>;
pub type Solution64 = Solution<f64>;
pub type PointI = Point<i64>;
pub type RectI = Rect<i64>;
pub type SolutionI = Solution<i64>;
