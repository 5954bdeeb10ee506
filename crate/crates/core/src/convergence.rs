//! Order verification: the fourth-order conditions of the weighted family,
//! the computational order of convergence of a trace, and a high-precision
//! measurement of the third-order error constant on scalar equations.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{NlError, Result};
use crate::linalg::{norm, FlopCounter, Matrix, NormKind, Vector};
use crate::problems::FnSystem;
use crate::real::{PrecisionGuard, Real};
use crate::scalar::Scalar;
use crate::solvers::{m3_step, IterationTrace, MethodParams};

/// Arithmetic needed by the order conditions. Exact for `BigRational`;
/// floating types treat values below a precision-dependent threshold as zero.
pub trait OrderField: Clone + fmt::Debug + Num + Neg<Output = Self> {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_negligible(&self) -> bool;
    fn approx_f64(&self) -> f64;
}

impl OrderField for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T: Scalar> OrderField for T {
    fn from_ratio(num: i64, den: i64) -> Self {
        T::ratio(num, den)
    }
    /// Below `1e-30`, or a few digits above the rounding level when the
    /// type cannot resolve `1e-30`.
    fn is_negligible(&self) -> bool {
        let digits = T::decimal_digits() as i32;
        let exp = if digits >= 33 { -30 } else { -(digits - 3).max(1) };
        self.abs() < T::pow10(exp)
    }
    fn approx_f64(&self) -> f64 {
        self.to_f64()
    }
}

/// Parses `2/3`, `-9/4`, `0.25` or `1e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AchievedOrder {
    #[serde(rename = "<=2")]
    AtMostTwo,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4")]
    Four,
}

impl fmt::Display for AchievedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AtMostTwo => "<=2",
            Self::Three => "3",
            Self::Four => "4",
        })
    }
}

/// Coefficients of the error expansion of the weighted family.
///
/// With `S = a1 + a2 + a3`,
/// `e+ = (1 - S) e - T1/2 C2 e^2 - 1/2 (T2 C2^2 + T3 C3) e^3
///       - 1/2 (T4 C2^3 + T5 C2C3 + T6 C3C2 + T7 C4) e^4 + ...`
#[derive(Debug, Clone)]
pub struct OrderConditionReport<F> {
    pub a_sum_minus_one: F,
    pub p1: F,
    pub p2: F,
    pub p3: F,
    /// Multipliers of `C2^3`, `C2C3`, `C3C2`, `C4`.
    pub o1: F,
    pub o2: F,
    pub o3: F,
    pub o4: F,
    pub t1: F,
    pub t2: F,
    pub t3: F,
    pub t4: F,
    pub t5: F,
    pub t6: F,
    pub t7: F,
    /// `P2` with the published `-6 beta S` term inside the bracket instead
    /// of `-3 S`, and the `T2` it leads to. Reported for comparison only.
    pub p2_as_published: F,
    pub t2_as_published: F,
    pub satisfied_order: AchievedOrder,
}

impl<F: OrderField> OrderConditionReport<F> {
    /// Names of the order-four conditions that do not vanish.
    pub fn failing_conditions(&self) -> Vec<&'static str> {
        [("1-sum(a)", &self.a_sum_minus_one), ("T1", &self.t1), ("T2", &self.t2), ("T3", &self.t3)]
            .into_iter()
            .filter(|(_, v)| !v.is_negligible())
            .map(|(name, _)| name)
            .collect()
    }

    /// Coefficient tuples of the fourth-order error term, keyed by monomial.
    pub fn fourth_order_terms(&self) -> [(&'static str, &F); 4] {
        [("C2^3", &self.t4), ("C2C3", &self.t5), ("C3C2", &self.t6), ("C4", &self.t7)]
    }
}

/// Evaluates the expansion coefficients for `params` and classifies the order
/// they guarantee.
pub fn order_conditions<F: OrderField>(params: &MethodParams<F>) -> OrderConditionReport<F> {
    let c = |n: i64| F::from_ratio(n, 1);
    let b = params.beta.clone();
    let (a1, a2, a3) = (params.a1.clone(), params.a2.clone(), params.a3.clone());
    let s = a1 + a2.clone() + a3.clone();
    let b2 = b.clone() * b.clone();
    let b3 = b2.clone() * b.clone();
    let one_minus_b = F::one() - b.clone();
    let cube = one_minus_b.clone() * one_minus_b.clone() * one_minus_b;
    let b2_minus_2b = b2.clone() - c(2) * b.clone();
    // -2 beta a2 - 4 beta a3, shared by several coefficients
    let q = -(c(2) * b.clone() * a2.clone()) - c(4) * b.clone() * a3.clone();

    let p1 = c(2) * b.clone() * s.clone() + c(2) * q.clone();
    let p2_head = c(12) * b.clone() * a2.clone() + (c(24) * b.clone() + c(8) * b2.clone()) * a3.clone();
    let p2 = p2_head.clone() + c(2) * b.clone() * (q.clone() - c(3) * s.clone());
    let p2_as_published = p2_head + c(2) * b.clone() * (q.clone() - c(6) * b.clone() * s.clone());
    let p3 = c(6) * b2_minus_2b.clone() * a2.clone() + c(12) * b2_minus_2b.clone() * a3.clone() - c(3) * b2_minus_2b.clone() * s.clone();

    let o1 = -(c(32) * b.clone() * a2.clone())
        + c(2) * (-(c(32) * b.clone()) - c(24) * b2.clone()) * a3.clone()
        + c(2) * b.clone() * (c(6) * b.clone() * a2.clone() + (c(12) * b.clone() + c(4) * b2.clone()) * a3.clone())
        + (-(c(6) * b.clone() * q.clone()) + c(16) * b.clone() * s.clone());
    let o2 = c(2) * (-(c(6) * b2.clone()) + c(16) * b.clone()) * a2.clone()
        + c(2) * (-(c(6) * b3) + c(32) * b.clone()) * a3.clone()
        + c(2) * b.clone() * (c(3) * b2_minus_2b.clone() * a2.clone() + c(6) * b2_minus_2b.clone() * a3.clone())
        + s.clone() * (c(6) * b2.clone() - c(16) * b.clone());
    let two_minus_b = c(2) - b.clone();
    let o3 = c(12) * b.clone() * two_minus_b.clone() * a2.clone()
        + c(2) * (-(c(6) * b2) + c(24) * b.clone()) * a3.clone()
        - c(3) * b2_minus_2b * q
        + s.clone() * (-(c(6) * b.clone() * two_minus_b));
    let k = c(4) * cube - c(4);
    let o4 = c(2) * k.clone() * a2 + c(4) * k.clone() * a3 - s.clone() * k;

    let t1 = p1.clone() - c(2) * s.clone();
    let t2 = p2.clone() - p1.clone() + c(4) * s.clone();
    let t2_as_published = p2_as_published.clone() - p1.clone() + c(4) * s.clone();
    let t3 = p3.clone() - c(4) * s.clone();
    let t4 = o1.clone() - c(8) * s.clone() + c(2) * p1.clone() - p2.clone();
    let t5 = o2.clone() + c(8) * s.clone() - c(2) * p1.clone();
    let t6 = o3.clone() + c(6) * s.clone() - p3.clone();
    let t7 = o4.clone() - c(6) * s.clone();
    let a_sum_minus_one = F::one() - s;

    let satisfied_order = if !a_sum_minus_one.is_negligible() || !t1.is_negligible() {
        AchievedOrder::AtMostTwo
    } else if !t2.is_negligible() || !t3.is_negligible() {
        AchievedOrder::Three
    } else {
        AchievedOrder::Four
    };

    OrderConditionReport {
        a_sum_minus_one,
        p1,
        p2,
        p3,
        o1,
        o2,
        o3,
        o4,
        t1,
        t2,
        t3,
        t4,
        t5,
        t6,
        t7,
        p2_as_published,
        t2_as_published,
        satisfied_order,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CocBasis {
    Residual,
    Error,
}

#[derive(Debug, Clone)]
pub struct CocEstimate<T> {
    pub rho: T,
    pub basis: CocBasis,
    pub iterations_used: usize,
}

/// `ln(q3/q2) / ln(q2/q1)` over the last three norms above ten times the
/// noise floor; smaller norms are dominated by rounding.
pub fn coc_from_norms<T: Scalar>(norms: &[T]) -> Result<T> {
    let floor = T::from_u32(10).expect("10") * T::noise_floor();
    let usable: Vec<&T> = norms.iter().filter(|q| q.is_finite() && **q > floor).collect();
    if usable.len() < 3 {
        return Err(NlError::InsufficientData {
            needed: 3,
            found: usable.len(),
        });
    }
    let [q1, q2, q3] = [usable[usable.len() - 3], usable[usable.len() - 2], usable[usable.len() - 1]];
    let den = (q2.clone() / q1.clone()).ln();
    if den.is_zero() {
        return Err(NlError::DegenerateSequence("consecutive norms are equal"));
    }
    let rho = (q3.clone() / q2.clone()).ln() / den;
    if !rho.is_finite() {
        return Err(NlError::DegenerateSequence("order estimate is not finite"));
    }
    Ok(rho)
}

/// Order estimate from a solver trace. The error basis measures
/// `|x_k - root|` against `root`, or the trace's own error norms.
pub fn coc<T: Scalar>(trace: &IterationTrace<T>, basis: CocBasis, root: Option<&Vector<T>>) -> Result<CocEstimate<T>> {
    let norms: Vec<T> = match basis {
        CocBasis::Residual => trace.records.iter().map(|r| r.residual_norm.clone()).collect(),
        CocBasis::Error => match root {
            Some(root) => trace
                .records
                .iter()
                .map(|r| r.x.sub(root).map(|e| norm(&e, NormKind::Two)))
                .collect::<Result<_>>()?,
            None => trace
                .records
                .iter()
                .map(|r| r.error_norm.clone())
                .collect::<Option<_>>()
                .ok_or_else(|| NlError::InvalidConfig("error basis requires a reference root".into()))?,
        },
    };
    Ok(CocEstimate {
        rho: coc_from_norms(&norms)?,
        basis,
        iterations_used: 3,
    })
}

/// A scalar equation `f(x) = 0` with simple root `alpha` and normalized
/// derivatives `C2 = f''/(2f')`, `C3 = f'''/(6f')` at the root.
#[derive(Debug, Clone, Copy)]
pub struct ScalarFamily {
    pub name: &'static str,
    pub f: fn(&Real) -> Real,
    pub df: fn(&Real) -> Real,
    pub root: fn() -> Real,
    pub c2: (i64, i64),
    pub c3: (i64, i64),
}

impl ScalarFamily {
    /// `x^2 - 1` at `alpha = 1`: `C2 = 1/2`, `C3 = 0`.
    pub fn quadratic() -> Self {
        Self {
            name: "x^2-1",
            f: |x| x.clone() * x.clone() - Real::one(),
            df: |x| x.clone() + x.clone(),
            root: Real::one,
            c2: (1, 2),
            c3: (0, 1),
        }
    }

    /// `x^3 - x` at `alpha = 1`: `C2 = 3/2`, `C3 = 1/2`.
    pub fn cubic() -> Self {
        Self {
            name: "x^3-x",
            f: |x| x.clone() * x.clone() * x.clone() - x.clone(),
            df: |x| Real::ratio(3, 1) * x.clone() * x.clone() - Real::one(),
            root: Real::one,
            c2: (3, 2),
            c3: (1, 2),
        }
    }

    /// `f(x) = x`; every method lands on the root in one step.
    pub fn linear() -> Self {
        Self {
            name: "x",
            f: Real::clone,
            df: |_| Real::one(),
            root: Real::zero,
            c2: (0, 1),
            c3: (0, 1),
        }
    }

    fn c(ratio: (i64, i64)) -> f64 {
        ratio.0 as f64 / ratio.1 as f64
    }

    /// `2 C2^2 + C3/3`, the constant quoted for the third-order method.
    pub fn published_constant(&self) -> f64 {
        2.0 * Self::c(self.c2).powi(2) + Self::c(self.c3) / 3.0
    }

    /// `2 C2^2 + C3/2`, from re-expanding the scalar iteration.
    pub fn derived_constant(&self) -> f64 {
        2.0 * Self::c(self.c2).powi(2) + Self::c(self.c3) / 2.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorCoefficientReport {
    pub family: &'static str,
    pub precision_bits: u32,
    pub iterations: usize,
    /// Signed `E_{k+1} / E_k^3` for each step whose new error is resolvable.
    pub ratios: Vec<f64>,
    /// The last usable ratio; `None` when the iteration hit the root exactly.
    pub measured: Option<f64>,
    /// Relative change between the last two usable ratios.
    pub fluctuation: Option<f64>,
    pub published: f64,
    pub derived: f64,
}

/// Runs the third-order method on a scalar equation at `bits` of precision
/// from `alpha + offset` and measures `lim E_{k+1} / E_k^3`.
pub fn scalar_error_coefficient(family: &ScalarFamily, offset: f64, bits: u32) -> Result<ErrorCoefficientReport> {
    let _guard = PrecisionGuard::new(bits)?;
    let alpha = (family.root)();
    let start = alpha.clone() + Real::from_f64(offset).ok_or(NlError::NonFinite("offset"))?;
    let (f, df) = (family.f, family.df);
    let system = FnSystem::new(family.name, Vector::from_vec(vec![start.clone()]), move |x: &Vector<Real>| {
        Vector::from_vec(vec![f(&x[0])])
    })
    .with_jacobian(move |x: &Vector<Real>| Matrix::from_row_major(1, 1, vec![df(&x[0])]).expect("1x1"));

    let floor = Real::ratio(10, 1) * Real::noise_floor();
    let mut counter = FlopCounter::new();
    let mut errors = vec![start.clone() - alpha.clone()];
    let mut x = Vector::from_vec(vec![start]);
    let max_steps = 64;
    loop {
        let e = errors.last().expect("nonempty").abs();
        if e.is_zero() || e < floor {
            break;
        }
        if errors.len() > max_steps {
            return Err(NlError::NoConvergence(format!("{} after {max_steps} steps", family.name)));
        }
        x = m3_step(&system, &x, &mut counter)?;
        errors.push(x[0].clone() - alpha.clone());
    }

    let ratios: Vec<Real> = errors
        .windows(2)
        .filter(|w| !w[0].is_zero() && w[1].abs() > floor)
        .map(|w| w[1].clone() / (w[0].clone() * w[0].clone() * w[0].clone()))
        .collect();
    let fluctuation = match ratios.as_slice() {
        [.., a, b] => Some(((b.clone() - a.clone()) / b.clone()).abs().to_f64()),
        _ => None,
    };
    Ok(ErrorCoefficientReport {
        family: family.name,
        precision_bits: bits,
        iterations: errors.len() - 1,
        measured: ratios.last().map(Scalar::to_f64),
        ratios: ratios.iter().map(Scalar::to_f64).collect(),
        fluctuation,
        published: family.published_constant(),
        derived: family.derived_constant(),
    })
}

impl MethodParams<BigRational> {
    /// Exact parameters from decimal or fractional strings.
    pub fn parse_exact(beta: &str, a1: &str, a2: &str, a3: &str) -> Option<Self> {
        Some(Self::new(parse_rational(beta)?, parse_rational(a1)?, parse_rational(a2)?, parse_rational(a3)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn theorem_parameters_are_exactly_fourth_order() {
        let r = order_conditions(&MethodParams::<BigRational>::fourth_order());
        assert!(r.a_sum_minus_one.is_zero());
        assert!(r.t1.is_zero() && r.t2.is_zero() && r.t3.is_zero());
        assert_eq!(r.satisfied_order, AchievedOrder::Four);
        assert!(r.failing_conditions().is_empty());
        // the published P2 leaves T2 = -4/3 here
        assert_eq!(r.t2_as_published, q(-4, 3));
    }

    #[test]
    fn third_order_reduction() {
        let r = order_conditions(&MethodParams::<BigRational>::third_order());
        assert_eq!(r.p1, q(2, 1));
        assert!(r.t1.is_zero());
        assert_eq!((r.p2.clone(), r.t2.clone()), (q(-6, 1), q(-4, 1)));
        assert_eq!((r.p2_as_published.clone(), r.t2_as_published.clone()), (q(-12, 1), q(-10, 1)));
        assert_eq!(r.satisfied_order, AchievedOrder::Three);
        assert_eq!(r.t3, q(-1, 1));
        assert_eq!(r.failing_conditions(), ["T2", "T3"]);
        // -1/2 (T2 C2^2 + T3 C3) is the third-order constant 2 C2^2 + C3/2
        assert_eq!(-r.t2 / q(2, 1), q(2, 1));
        assert_eq!(-r.t3 / q(2, 1), q(1, 2));
    }

    #[test]
    fn non_consistent_weights() {
        let p = MethodParams::new(q(1, 1), q(0, 1), q(0, 1), q(0, 1));
        let r = order_conditions(&p);
        assert_eq!(r.a_sum_minus_one, q(1, 1));
        assert_eq!(r.satisfied_order, AchievedOrder::AtMostTwo);
    }

    #[test]
    fn floating_evaluation_agrees() {
        let r = order_conditions(&MethodParams::<f64>::fourth_order());
        assert_eq!(r.satisfied_order, AchievedOrder::Four);
        let r = order_conditions(&MethodParams::<Real>::fourth_order());
        assert_eq!(r.satisfied_order, AchievedOrder::Four);
        let exact = order_conditions(&MethodParams::new(q(1, 1), q(1, 2), q(1, 2), q(0, 1)));
        let float = order_conditions(&MethodParams::new(1.0, 0.5, 0.5, 0.0));
        for (a, b) in [(&exact.t2, float.t2), (&exact.t4, float.t4), (&exact.t7, float.t7)] {
            assert!((a.approx_f64() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn t1_identity_holds() {
        for (b, a1, a2, a3) in [(1, 2, 3, 4), (-2, 5, 0, 7), (3, -1, -1, 2)] {
            let p = MethodParams::new(q(b, 3), q(a1, 5), q(a2, 7), q(a3, 2));
            let r = order_conditions(&p);
            let s = p.a1 + p.a2 + p.a3;
            assert_eq!(r.t1, r.p1 - q(2, 1) * s);
        }
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("2/3"), Some(q(2, 3)));
        assert_eq!(parse_rational("-9/4"), Some(q(-9, 4)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-2.5e-1"), Some(q(-1, 4)));
        assert_eq!(parse_rational("1e2"), Some(q(100, 1)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn coc_on_exact_exponent_sequence() {
        let _g = PrecisionGuard::new(512).unwrap();
        let norms: Vec<Real> = (1..5).map(|k| Real::pow10(-(3i32.pow(k)))).collect();
        let rho = coc_from_norms(&norms).unwrap();
        assert!((rho - Real::ratio(3, 1)).abs() < Real::pow10(-100));
    }

    #[test]
    fn coc_needs_three_points() {
        let norms = [1e-1, 1e-3];
        assert!(matches!(coc_from_norms(&norms), Err(NlError::InsufficientData { needed: 3, found: 2 })));
        assert!(matches!(coc_from_norms(&[1e-1, 1e-1, 1e-1]), Err(NlError::DegenerateSequence(_))));
    }

    #[test]
    fn quadratic_error_constant() {
        let r = scalar_error_coefficient(&ScalarFamily::quadratic(), 0.1, 4096).unwrap();
        let m = r.measured.unwrap();
        assert!((m - 0.5).abs() < 1e-9, "{r:?}");
        assert!(r.fluctuation.unwrap() < 1e-3);
    }

    #[test]
    fn linear_family_needs_one_step() {
        let r = scalar_error_coefficient(&ScalarFamily::linear(), 0.3, 256).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.measured.is_none());
    }
}
