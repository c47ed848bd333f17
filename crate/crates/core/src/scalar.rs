use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type used for coordinates, distances, values and energies.
///
/// Implemented for `f32` and `f64`. All parsers and serializers go through
/// `FromStr`/`Display`, which for the primitive floats produce the shortest
/// string that round-trips exactly.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Default + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count.
    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `|a - b| <= tol * max(|a|, |b|, 1)`.
pub fn approx_eq_rel<T: Scalar>(a: T, b: T, tol: T) -> bool {
    let scale = a.abs().max(b.abs()).max(T::one());
    (a - b).abs() <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_roundtrip() {
        assert_eq!(f64::lit(0.1), 0.1);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(f64::of_usize(7), 7.0);
    }

    #[test]
    fn relative_comparison() {
        assert!(approx_eq_rel(1e9, 1e9 + 0.5, 1e-9));
        assert!(!approx_eq_rel(1.0, 1.1, 1e-9));
        assert!(approx_eq_rel(0.0f64, 1e-12, 1e-9));
    }
}
