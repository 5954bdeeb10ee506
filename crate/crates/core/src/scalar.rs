//! The scalar abstraction every numeric routine in the crate is generic over.
//!
//! `Scalar` is a thin layer on top of `num_traits::Num`: field arithmetic comes
//! from num-traits, the elementary functions the benchmark systems need are
//! added here. Implemented for `f32`, `f64` and the multiprecision [`Real`].
//!
//! [`Real`]: crate::Real

use std::fmt;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    /// Decimal digits carried by the current working precision.
    fn decimal_digits() -> u32;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan(&self) -> Self;
    fn powf(&self, exponent: &Self) -> Self;
    fn is_finite(&self) -> bool;

    /// Lossy conversion for reporting.
    fn to_f64(&self) -> f64;

    /// `log10(|x|)` as an `f64`; `-inf` for zero. Valid even where `to_f64`
    /// would underflow.
    fn log10_abs(&self) -> f64;

    /// Parses a decimal literal at working precision.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Scientific notation with `sig` significant digits, e.g. `8.3210e-4`.
    fn to_sci(&self, sig: usize) -> String;

    /// `10^exp` at working precision.
    fn pow10(exp: i32) -> Self {
        let ten = Self::from_u32(10).expect("10 is representable");
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc * ten.clone();
        }
        if exp < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer is representable") / Self::from_i64(den).expect("integer is representable")
    }

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }

    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
    }

    /// Magnitudes below this are rounding noise at working precision:
    /// `10^-(digits - 10)`.
    fn noise_floor() -> Self {
        Self::pow10(-(Self::decimal_digits() as i32 - 10).max(1))
    }
}

/// Formats `0.d1d2d3... x 10^exp` (the digit-string convention of MPFR) as
/// `d1.d2d3...e±(exp-1)`.
pub(crate) fn format_sci(negative: bool, digits: &str, exp: i64) -> String {
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let (lead, rest) = digits.split_at(1);
    out.push_str(lead);
    if !rest.is_empty() {
        out.push('.');
        out.push_str(rest);
    }
    let e = exp - 1;
    if e < 0 {
        out.push_str(&format!("e-{}", -e));
    } else {
        out.push_str(&format!("e+{e}"));
    }
    out
}

/// Re-styles Rust's `{:e}` output (`8.3210e-4`, `1.0e0`) to carry an explicit sign.
fn restyle_exponent(s: String) -> String {
    match s.split_once('e') {
        Some((mant, exp)) if !exp.starts_with('-') => format!("{mant}e+{exp}"),
        _ => s,
    }
}

macro_rules! impl_scalar_for_float {
    ($t:ty) => {
        impl Scalar for $t {
            fn decimal_digits() -> u32 {
                <$t>::DIGITS
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn atan(&self) -> Self {
                <$t>::atan(*self)
            }
            fn powf(&self, exponent: &Self) -> Self {
                <$t>::powf(*self, *exponent)
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn log10_abs(&self) -> f64 {
                (<$t>::abs(*self) as f64).log10()
            }
            fn parse_decimal(s: &str) -> Option<Self> {
                s.trim().parse().ok()
            }
            fn to_sci(&self, sig: usize) -> String {
                restyle_exponent(format!("{:.*e}", sig.saturating_sub(1), self))
            }
            fn pow10(exp: i32) -> Self {
                (10.0 as $t).powi(exp)
            }
            fn mul_add_assign(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }
            fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
                *self -= a * b;
            }
        }
    };
}

impl_scalar_for_float!(f32);
impl_scalar_for_float!(f64);
