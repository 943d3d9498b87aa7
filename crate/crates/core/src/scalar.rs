//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar usable as a tensor entry.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant; every `f64` is representable (possibly
    /// rounded) in the implementing types.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// A relative tolerance never tighter than a small multiple of machine
    /// epsilon for this type.
    #[inline]
    fn rel_tol(requested: f64) -> Self {
        let floor = Self::epsilon() * Self::of(4.0);
        Self::of(requested).max(floor)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
