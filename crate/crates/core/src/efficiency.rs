//! Per-iteration cost models and efficiency indices for four fourth- and
//! third-order schemes on an `n`-dimensional system.
//!
//! Costs count scalar function evaluations (`n` per residual, `n^2` per
//! Jacobian) and linear-algebra flops: `2n^3/3` per LU factorization, `2n^2`
//! for the pair of triangular solves with one right-hand side, and `n^3` for
//! a matrix right-hand side.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{NlError, Result};
use crate::scalar::Scalar;

pub const MAX_TABLE_DIM: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CostMethod {
    SH4,
    MN4,
    M3,
    M4,
}

impl CostMethod {
    /// Column order used by the tables.
    pub const ALL: [CostMethod; 4] = [Self::SH4, Self::MN4, Self::M3, Self::M4];

    pub fn name(self) -> &'static str {
        match self {
            Self::SH4 => "SH4",
            Self::MN4 => "MN4",
            Self::M3 => "M3",
            Self::M4 => "M4",
        }
    }
}

impl fmt::Display for CostMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostMethod {
    type Err = NlError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| NlError::InvalidConfig(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MethodCostModel {
    pub method: CostMethod,
    pub order: u32,
    pub lu_per_iter: u32,
    /// `k` in the linear-solve cost `k n^3 / 3 + 2 n^2`.
    cubic_thirds: u32,
}

impl MethodCostModel {
    pub const fn new(method: CostMethod) -> Self {
        let (order, lu_per_iter, cubic_thirds) = match method {
            CostMethod::SH4 => (4, 2, 10),
            CostMethod::MN4 => (4, 2, 7),
            CostMethod::M3 => (3, 1, 5),
            CostMethod::M4 => (4, 1, 5),
        };
        Self {
            method,
            order,
            lu_per_iter,
            cubic_thirds,
        }
    }

    pub fn all() -> [MethodCostModel; 4] {
        CostMethod::ALL.map(Self::new)
    }

    /// Scalar function evaluations per iteration, `n + 2n^2`.
    pub fn fe_count(&self, n: u64) -> u64 {
        n + 2 * n * n
    }

    /// `lu_per_iter * 2n^3/3`.
    pub fn lu_cost(&self, n: u64) -> BigRational {
        let n3 = cube(n);
        BigRational::new((2 * u64::from(self.lu_per_iter)).into(), 3u32.into()) * n3
    }

    /// Linear-algebra flops per iteration, factorizations included.
    pub fn linsys_cost(&self, n: u64) -> BigRational {
        BigRational::new(u64::from(self.cubic_thirds).into(), 3u32.into()) * cube(n) + BigRational::from_integer((2 * n * n).into())
    }

    /// `linsys_cost + fe_count`, the denominator of the flops-like index.
    pub fn flops_like_cost(&self, n: u64) -> BigRational {
        self.linsys_cost(n) + BigRational::from_integer(self.fe_count(n).into())
    }

    pub fn classical_index<T: Scalar>(&self, n: u64) -> T {
        let exponent = T::one() / from_u64::<T>(self.fe_count(n));
        T::from_u32(self.order).expect("small order").powf(&exponent)
    }

    pub fn flops_like_index<T: Scalar>(&self, n: u64) -> T {
        let cost = rational_to_scalar::<T>(&self.flops_like_cost(n));
        T::from_u32(self.order).expect("small order").powf(&(T::one() / cost))
    }
}

fn cube(n: u64) -> BigRational {
    let n = num_bigint::BigInt::from(n);
    BigRational::from_integer(&n * &n * &n)
}

fn from_u64<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("representable")
}

fn rational_to_scalar<T: Scalar>(r: &BigRational) -> T {
    let num = T::parse_decimal(&r.numer().to_string()).expect("integer literal");
    let den = T::parse_decimal(&r.denom().to_string()).expect("integer literal");
    num / den
}

pub fn classical_index<T: Scalar>(method: CostMethod, n: u64) -> T {
    MethodCostModel::new(method).classical_index(n)
}

pub fn flops_like_index<T: Scalar>(method: CostMethod, n: u64) -> T {
    MethodCostModel::new(method).flops_like_index(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Classical,
    Flops,
}

impl FromStr for IndexKind {
    type Err = NlError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" => Ok(Self::Classical),
            "flops" | "flops-like" => Ok(Self::Flops),
            other => Err(NlError::InvalidConfig(format!("unknown index kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IndexRow<T> {
    pub n: u64,
    /// One value per model, in the order the models were given.
    pub values: Vec<T>,
}

/// Index values for every `n` in `n_from..=n_to`, rows ordered by `n`.
pub fn index_table<T: Scalar>(models: &[MethodCostModel], n_from: u64, n_to: u64, kind: IndexKind) -> Result<Vec<IndexRow<T>>> {
    validate_range(n_from, n_to)?;
    Ok((n_from..=n_to).map(|n| index_row(models, n, kind)).collect())
}

pub fn index_row<T: Scalar>(models: &[MethodCostModel], n: u64, kind: IndexKind) -> IndexRow<T> {
    let values = models
        .iter()
        .map(|m| match kind {
            IndexKind::Classical => m.classical_index(n),
            IndexKind::Flops => m.flops_like_index(n),
        })
        .collect();
    IndexRow { n, values }
}

pub fn validate_range(n_from: u64, n_to: u64) -> Result<()> {
    if n_from < 2 || n_to < n_from || n_to > MAX_TABLE_DIM {
        return Err(NlError::InvalidConfig(format!(
            "dimension range {n_from}..={n_to} must satisfy 2 <= from <= to <= {MAX_TABLE_DIM}"
        )));
    }
    Ok(())
}

/// Model flops for one iteration of the third- or fourth-order scheme of this
/// crate, split as (LU, triangular solves). The matrix right-hand side is
/// charged `n^3`, whereas the solve actually performs about `2n^3`.
pub fn model_iteration_flops(n: u64) -> (f64, f64) {
    let n = n as f64;
    (2.0 * n.powi(3) / 3.0, n.powi(3) + 2.0 * n * n)
}

/// Convenience for reports: the rational cost as a float.
pub fn cost_f64(cost: &BigRational) -> f64 {
    cost.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{PrecisionGuard, Real};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cost_rows() {
        let [sh4, mn4, m3, m4] = MethodCostModel::all();
        assert_eq!(sh4.flops_like_cost(2), r(80, 3) + r(18, 1));
        assert_eq!(mn4.flops_like_cost(3), r(7 * 27, 3) + r(36 + 3, 1));
        assert_eq!(m3.flops_like_cost(3), r(45, 1) + r(39, 1));
        assert_eq!(m4.lu_cost(3), r(18, 1));
        assert_eq!(sh4.lu_cost(3), r(36, 1));
        assert_eq!(m4.fe_count(4), 36);
        assert_eq!((m3.order, m4.order), (3, 4));
    }

    #[test]
    fn two_dimensional_values() {
        let m4: f64 = flops_like_index(CostMethod::M4, 2);
        assert!((m4 - 4f64.powf(1.0 / (40.0 / 3.0 + 18.0))).abs() < 1e-15);
        let c4: f64 = classical_index(CostMethod::M4, 2);
        let c3: f64 = classical_index(CostMethod::M3, 2);
        assert!((c4 - 1.148698).abs() < 1e-6);
        assert!((c3 - 1.116123).abs() < 1e-6);
    }

    #[test]
    fn high_precision_agrees_with_f64() {
        let _g = PrecisionGuard::new(256).unwrap();
        for m in CostMethod::ALL {
            for n in [2, 17, 80, 1000] {
                let hi: Real = flops_like_index(m, n);
                let lo: f64 = flops_like_index(m, n);
                assert!((hi.to_f64() - lo).abs() < 1e-14, "{m} {n}");
            }
        }
    }

    #[test]
    fn range_validation() {
        assert!(validate_range(2, 2).is_ok());
        assert!(validate_range(1, 5).is_err());
        assert!(validate_range(5, 4).is_err());
        assert!(validate_range(2, MAX_TABLE_DIM + 1).is_err());
        let rows = index_table::<f64>(&MethodCostModel::all(), 2, 80, IndexKind::Flops).unwrap();
        assert_eq!(rows.len(), 79);
        assert_eq!(rows[0].n, 2);
    }

    #[test]
    fn parse_names() {
        assert_eq!("mn4".parse::<CostMethod>().unwrap(), CostMethod::MN4);
        assert!("x".parse::<CostMethod>().is_err());
        assert_eq!("flops".parse::<IndexKind>().unwrap(), IndexKind::Flops);
    }
}
