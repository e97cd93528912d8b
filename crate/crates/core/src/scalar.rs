//! Scalar abstraction for feature values.

use std::fmt;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Feature scalar: f32 or f64.
///
/// Datasets are generic over this trait so single-precision inputs can be
/// stored without widening. All distance and mean arithmetic converts to
/// f64 before accumulating, so results do not depend on the storage type
/// beyond the values themselves.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Widen to f64 for accumulation.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Squared Euclidean distance between a stored point and an f64 center,
/// accumulated in double precision.
pub(crate) fn sq_dist<S: Scalar>(point: &[S], center: &[f64]) -> f64 {
    debug_assert_eq!(point.len(), center.len());
    point
        .iter()
        .zip(center)
        .map(|(&x, &c)| {
            let d = x.as_f64() - c;
            d * d
        })
        .sum()
}

/// Squared Euclidean distance between two stored points.
pub(crate) fn sq_dist_points<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x.as_f64() - y.as_f64();
            d * d
        })
        .sum()
}
