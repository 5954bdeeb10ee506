use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FlopCounter;
use crate::error::{NlError, Result};
use crate::scalar::Scalar;

/// Dense column vector, `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T> {
    data: Vec<T>,
}

impl<T: Scalar> Vector<T> {
    /// Panics on an empty vector.
    pub fn from_vec(data: Vec<T>) -> Self {
        assert!(!data.is_empty(), "vector dimension must be at least 1");
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_vec(vec![T::zero(); n])
    }

    pub fn filled(n: usize, value: T) -> Self {
        Self::from_vec(vec![value; n])
    }

    pub fn from_f64s(values: &[f64]) -> Self {
        Self::from_vec(values.iter().map(|&v| T::from_f64(v).expect("finite literal")).collect())
    }

    /// Parses decimal literals at working precision, so `"5.1"` is the
    /// correctly rounded 5.1 rather than the nearest double.
    pub fn from_decimals(values: &[&str]) -> Self {
        Self::from_vec(
            values
                .iter()
                .map(|s| T::parse_decimal(s).unwrap_or_else(|| panic!("bad decimal literal `{s}`")))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.data.iter()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Scalar::is_finite)
    }

    /// `self - other`, uncounted.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.len(), other.len())?;
        Ok(Self::from_vec(
            self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        ))
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        check_dim(self.len(), other.len())?;
        let mut acc = T::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            acc.mul_add_assign(a, b);
        }
        Ok(acc)
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.data[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[i]
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NlError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            check_dim(m, row.len())?;
            data.extend(row);
        }
        Self::from_row_major(n, m, data)
    }

    pub fn from_f64_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_f64(v).expect("finite literal")).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector::from_vec((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &Vector<T>) {
        for i in 0..self.rows {
            self[(i, j)] = v[i].clone();
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Scalar::is_finite)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Largest elementwise `|self - other| / max(|other|, 1)`.
    pub fn max_relative_deviation(&self, other: &Self) -> Result<T> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        let mut worst = T::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let scale = if b.abs() > T::one() { b.abs() } else { T::one() };
            let dev = (a.clone() - b.clone()).abs() / scale;
            if dev > worst {
                worst = dev;
            }
        }
        Ok(worst)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(NlError::DimensionMismatch { expected, found })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Two,
    Inf,
}

impl FromStr for NormKind {
    type Err = NlError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "2" => Ok(Self::Two),
            "inf" | "max" => Ok(Self::Inf),
            other => Err(NlError::InvalidConfig(format!("unknown norm `{other}`"))),
        }
    }
}

pub fn norm<T: Scalar>(v: &Vector<T>, kind: NormKind) -> T {
    match kind {
        NormKind::Two => {
            let mut acc = T::zero();
            for x in v.iter() {
                acc.mul_add_assign(x, x);
            }
            acc.sqrt()
        }
        NormKind::Inf => v.iter().map(Scalar::abs).fold(T::zero(), |m, x| if x > m { x } else { m }),
    }
}

/// `A x`; counts `2 rows cols` flops.
pub fn mat_vec<T: Scalar>(a: &Matrix<T>, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    check_dim(a.cols, x.len())?;
    let out = (0..a.rows)
        .map(|i| {
            let mut acc = T::zero();
            for (aij, xj) in a.row(i).iter().zip(x.iter()) {
                acc.mul_add_assign(aij, xj);
            }
            acc
        })
        .collect();
    counter.add_flops(2 * a.rows * a.cols);
    Ok(Vector::from_vec(out))
}

/// `A B`; counts `2 n m p` flops.
pub fn mat_mat<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, counter: &mut FlopCounter) -> Result<Matrix<T>> {
    check_dim(a.cols, b.rows)?;
    let mut out: Matrix<T> = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = &a[(i, k)];
            for j in 0..b.cols {
                let bkj = &b[(k, j)];
                out[(i, j)].mul_add_assign(aik, bkj);
            }
        }
    }
    counter.add_flops(2 * a.rows * a.cols * b.cols);
    Ok(out)
}

/// `y + alpha x`; counts `2n` flops.
pub fn vec_axpy<T: Scalar>(alpha: &T, x: &Vector<T>, y: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    check_dim(y.len(), x.len())?;
    let mut out = y.clone();
    for (o, xi) in out.data.iter_mut().zip(x.iter()) {
        o.mul_add_assign(alpha, xi);
    }
    counter.add_flops(2 * x.len());
    Ok(out)
}

/// `alpha x + beta y`; counts `3n` flops.
pub fn vec_lincomb<T: Scalar>(
    alpha: &T,
    x: &Vector<T>,
    beta: &T,
    y: &Vector<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    check_dim(x.len(), y.len())?;
    let out = x
        .iter()
        .zip(y.iter())
        .map(|(xi, yi)| {
            let mut acc = alpha.clone() * xi.clone();
            acc.mul_add_assign(beta, yi);
            acc
        })
        .collect();
    counter.add_flops(3 * x.len());
    Ok(Vector::from_vec(out))
}

/// `alpha A + beta B`; counts `3 rows cols` flops.
pub fn mat_lincomb<T: Scalar>(
    alpha: &T,
    a: &Matrix<T>,
    beta: &T,
    b: &Matrix<T>,
    counter: &mut FlopCounter,
) -> Result<Matrix<T>> {
    check_dim(a.rows, b.rows)?;
    check_dim(a.cols, b.cols)?;
    let data = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| {
            let mut acc = alpha.clone() * x.clone();
            acc.mul_add_assign(beta, y);
            acc
        })
        .collect();
    counter.add_flops(3 * a.data.len());
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}
