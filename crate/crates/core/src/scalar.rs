//! Numeric abstraction shared by the exact and floating-point code paths.
//!
//! Linear algebra, the simplex method and the system builders are written
//! against [`Scalar`], so they run on `f64`, `f32` and [`BigRational`].
//! Iterative solvers need transcendental functions and take [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, NumAssign, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + PartialOrd + Num + NumAssign + Signed + Send + Sync + 'static {
    /// Magnitude below which a value is treated as zero. Zero for exact types.
    fn tolerance() -> Self;

    /// Conversion from a stored probability. Exact types read the shortest
    /// decimal representation, so `0.8` becomes `4/5` rather than the binary
    /// expansion of the double.
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

/// Floating-point scalars with the functions the iterative solvers need.
pub trait Real: Scalar + Copy {
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn max_value() -> Self;
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            fn tolerance() -> Self {
                $tol
            }
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }

        impl Real for $t {
            fn exp(self) -> Self {
                Float::exp(self)
            }
            fn ln(self) -> Self {
                Float::ln(self)
            }
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            fn max_value() -> Self {
                <$t>::MAX
            }
        }
    };
}

impl_float_scalar!(f64, 1e-10);
impl_float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_f64(v: f64) -> Self {
        parse_decimal(&format!("{v}"))
            .or_else(|| <BigRational as FromPrimitive>::from_f64(v))
            .unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Parses a plain or scientific decimal literal into an exact rational.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10)?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_is_exact() {
        assert_eq!(parse_decimal("0.8"), Some(BigRational::new(4.into(), 5.into())));
        assert_eq!(parse_decimal("1e-3"), Some(BigRational::new(1.into(), 1000.into())));
        assert_eq!(parse_decimal("-2.50"), Some(BigRational::new((-5).into(), 2.into())));
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(<BigRational as Scalar>::from_f64(0.9), BigRational::new(9.into(), 10.into()));
    }

    #[test]
    fn float_round_trip() {
        assert_eq!(<f64 as Scalar>::from_f64(0.25), 0.25);
        assert!((Scalar::to_f64(&<f32 as Scalar>::from_f64(0.1)) - 0.1).abs() < 1e-7);
        assert!(<f64 as Scalar>::is_negligible(&1e-12));
    }
}
