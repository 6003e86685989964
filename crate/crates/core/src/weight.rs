//! Scalar abstraction for edge weights and congestion values.
//!
//! Everything in the graph layer is generic over an unsigned primitive integer.
//! Edge multiplicities are counts, so floating point types are not admitted.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{NumCast, PrimInt, Unsigned};

/// An unsigned integer type usable as an edge weight.
pub trait Weight: PrimInt + Unsigned + Hash + Debug + Display + Send + Sync + 'static {
    /// Lossless widening used by the search internals.
    fn widen(self) -> u64 {
        self.to_u64().expect("weight does not fit in u64")
    }

    /// Narrowing back from the search internals. `None` on overflow.
    fn narrow(value: u64) -> Option<Self> {
        <Self as NumCast>::from(value)
    }
}

impl<T> Weight for T where T: PrimInt + Unsigned + Hash + Debug + Display + Send + Sync + 'static {}

/// Sum of weights, `None` on overflow of `W`.
pub fn checked_sum<W: Weight>(values: impl IntoIterator<Item = W>) -> Option<W> {
    values.into_iter().try_fold(W::zero(), |acc, w| acc.checked_add(&w))
}
