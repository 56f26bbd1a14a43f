//! Scalar abstraction for every derived real-valued quantity.
//!
//! Counting stays in exact integers everywhere in this crate; probabilities,
//! correlation coefficients, p-values, distances and entropies are computed
//! in a caller-chosen floating-point type. `f64` aliases live at the crate
//! root.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Serialize + std::fmt::Debug + std::fmt::Display + Send + Sync
{
    /// Lossy conversion from an exact count.
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("u64 converts to any float")
    }

    /// count / total as a probability.
    fn ratio(count: u64, total: u64) -> Self {
        Self::from_count(count) / Self::from_count(total)
    }
}

impl Real for f32 {}
impl Real for f64 {}
