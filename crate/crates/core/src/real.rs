//! Multiprecision real scalar backed by MPFR.
//!
//! Every value created or produced by arithmetic is rounded to nearest at the
//! thread's working precision. The precision is a thread-local setting so that
//! independent runs on separate threads can use different precisions.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{FromPrimitive, Num, One, Zero};
use rug::ops::Pow;
use rug::Float;

use crate::error::{NlError, Result};
use crate::scalar::{format_sci, Scalar};

/// 512 bits, roughly 154 decimal digits.
pub const DEFAULT_PRECISION_BITS: u32 = 512;
pub const MIN_PRECISION_BITS: u32 = 64;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION_BITS) };
}

/// Current working precision in bits for this thread.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(Cell::get)
}

/// Restores the previous working precision when dropped.
#[must_use = "the precision reverts when the guard is dropped"]
pub struct PrecisionGuard {
    previous: u32,
}

impl PrecisionGuard {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_PRECISION_BITS {
            return Err(NlError::InvalidPrecision {
                bits,
                min: MIN_PRECISION_BITS,
            });
        }
        let previous = WORKING_PRECISION.with(|p| p.replace(bits));
        Ok(Self { previous })
    }
}

impl Drop for PrecisionGuard {
    fn drop(&mut self) {
        WORKING_PRECISION.with(|p| p.set(self.previous));
    }
}

/// Runs `f` with the thread's working precision set to `bits`.
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> Result<R> {
    let _guard = PrecisionGuard::new(bits)?;
    Ok(f())
}

/// Binary digits to decimal digits, rounded down.
pub fn bits_to_decimal_digits(bits: u32) -> u32 {
    (f64::from(bits) * std::f64::consts::LOG10_2).floor() as u32
}

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Real(Float);

impl Real {
    pub fn from_float(value: Float) -> Self {
        Self(Float::with_val(working_precision(), value))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    fn wrap<T>(value: T) -> Self
    where
        Float: rug::Assign<T>,
    {
        Self(Float::with_val(working_precision(), value))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_sci(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20).max(1);
        f.write_str(&self.to_sci(digits))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::wrap((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                Real::wrap((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
forward_binop!(Rem, rem);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Zero for Real {
    fn zero() -> Self {
        Self(Float::new(working_precision()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Real {
    fn one() -> Self {
        Self::wrap(1u32)
    }
}

impl Num for Real {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(Self::wrap(parsed))
    }
}

impl FromPrimitive for Real {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Self::wrap(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Self::wrap(n))
    }
    fn from_f64(n: f64) -> Option<Self> {
        n.is_finite().then(|| Self::wrap(n))
    }
}

impl Scalar for Real {
    fn decimal_digits() -> u32 {
        bits_to_decimal_digits(working_precision())
    }
    fn abs(&self) -> Self {
        Self::wrap(self.0.abs_ref())
    }
    fn sqrt(&self) -> Self {
        Self::wrap(self.0.sqrt_ref())
    }
    fn exp(&self) -> Self {
        Self::wrap(self.0.exp_ref())
    }
    fn ln(&self) -> Self {
        Self::wrap(self.0.ln_ref())
    }
    fn sin(&self) -> Self {
        Self::wrap(self.0.sin_ref())
    }
    fn cos(&self) -> Self {
        Self::wrap(self.0.cos_ref())
    }
    fn atan(&self) -> Self {
        Self::wrap(self.0.atan_ref())
    }
    fn powf(&self, exponent: &Self) -> Self {
        Self::wrap((&self.0).pow(&exponent.0))
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn log10_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(64, self.0.abs_ref()).log10().to_f64()
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        Float::parse(s.trim()).ok().map(Self::wrap)
    }
    fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        let (negative, digits, exp) = self.0.to_sign_string_exp(10, Some(sig));
        match exp {
            Some(exp) => format_sci(negative, &digits, i64::from(exp)),
            None if self.0.is_zero() => format_sci(negative, &"0".repeat(sig), 1),
            None => digits,
        }
    }
    fn pow10(exp: i32) -> Self {
        Self::wrap(Float::with_val(working_precision() + 32, 10u32).pow(exp))
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.0 += &a.0 * &b.0;
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        self.0 -= &a.0 * &b.0;
    }
}

impl PartialEq<f64> for Real {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Real {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_guard_is_scoped() {
        assert_eq!(working_precision(), DEFAULT_PRECISION_BITS);
        {
            let _g = PrecisionGuard::new(1024).unwrap();
            assert_eq!(working_precision(), 1024);
            assert_eq!(Real::one().precision_bits(), 1024);
        }
        assert_eq!(working_precision(), DEFAULT_PRECISION_BITS);
    }

    #[test]
    fn rejects_tiny_precision() {
        assert!(matches!(
            PrecisionGuard::new(32),
            Err(NlError::InvalidPrecision { bits: 32, .. })
        ));
    }

    #[test]
    fn decimal_digits_at_default() {
        assert_eq!(Real::decimal_digits(), 154);
    }

    #[test]
    fn arithmetic_keeps_working_precision() {
        let third = Real::one() / real(3.0);
        let back = third.clone() * real(3.0);
        assert!((back - Real::one()).abs() < Real::pow10(-150));
        assert_eq!(third.precision_bits(), 512);
    }

    #[test]
    fn sci_formatting() {
        assert_eq!(Real::parse_decimal("8.3210e-4").unwrap().to_sci(5), "8.3210e-4");
        assert_eq!(Real::parse_decimal("1.1905e-101").unwrap().to_sci(5), "1.1905e-101");
        assert_eq!(Real::parse_decimal("2.2955").unwrap().to_sci(5), "2.2955e+0");
        assert_eq!(Real::zero().to_sci(3), "0.00e+0");
    }

    #[test]
    fn tiny_magnitudes_survive_log10() {
        let x = Real::pow10(-400);
        assert!((x.log10_abs() + 400.0).abs() < 1e-9);
        assert_eq!(x.to_f64(), 0.0);
    }

    #[test]
    fn elementary_functions() {
        let one = Real::one();
        assert!((one.exp().ln() - one.clone()).abs() < Real::pow10(-150));
        let four = real(4.0);
        assert!((Real::one().atan() * four - pi()).abs() < Real::pow10(-150));
        let half = Real::ratio(1, 2);
        let s = half.sin();
        let c = half.cos();
        assert!((s.clone() * s + c.clone() * c - Real::one()).abs() < Real::pow10(-150));
        assert!((real(2.0).powf(&Real::ratio(1, 2)) - real(2.0).sqrt()).abs() < Real::pow10(-150));
    }

    fn real(v: f64) -> Real {
        <Real as FromPrimitive>::from_f64(v).unwrap()
    }

    fn pi() -> Real {
        Real::from_float(Float::with_val(working_precision(), rug::float::Constant::Pi))
    }
}
