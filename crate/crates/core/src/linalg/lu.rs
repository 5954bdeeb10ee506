//! Partial-pivoting LU factorization and triangular solves.

use super::dense::check_dim;
use super::{FlopCounter, Matrix, Vector};
use crate::error::{NlError, Result};
use crate::scalar::Scalar;

/// `P A = L U` with unit-diagonal `L` stored below the diagonal of `lu` and
/// `U` on and above it. Row `i` of `P A` is row `perm[i]` of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

/// Decimal exponent of the pivot floor: a pivot below `10^-(digits - 5)` is
/// treated as zero.
pub fn pivot_floor_digits<T: Scalar>() -> u32 {
    T::decimal_digits().saturating_sub(5).max(1)
}

pub fn lu_decompose<T: Scalar>(a: &Matrix<T>, counter: &mut FlopCounter) -> Result<LuFactors<T>> {
    if !a.is_square() {
        return Err(NlError::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(NlError::NonFinite("matrix passed to lu_decompose"));
    }
    let n = a.rows();
    let floor_digits = pivot_floor_digits::<T>();
    let floor = T::pow10(-(floor_digits as i32));
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut flops = 0usize;

    for k in 0..n {
        let (p, pivot_mag) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, T::zero()), |best, cand| if cand.1 > best.1 { cand } else { best });
        if pivot_mag < floor {
            return Err(NlError::SingularMatrix { index: k, floor_digits });
        }
        lu.swap_rows(k, p);
        perm.swap(k, p);

        let pivot = lu[(k, k)].clone();
        for i in k + 1..n {
            let l = lu[(i, k)].clone() / pivot.clone();
            for j in k + 1..n {
                let ukj = lu[(k, j)].clone();
                lu[(i, j)].sub_mul_assign(&l, &ukj);
            }
            lu[(i, k)] = l;
        }
        let m = n - k - 1;
        flops += m + 2 * m * m;
    }

    counter.lu_count += 1;
    counter.lu_flops += flops as u64;
    counter.add_flops(flops);
    Ok(LuFactors { lu, perm })
}

impl<T: Scalar> LuFactors<T> {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn packed(&self) -> &Matrix<T> {
        &self.lu
    }

    pub fn lower(&self) -> Matrix<T> {
        let n = self.dim();
        let mut l = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)].clone();
            }
        }
        l
    }

    pub fn upper(&self) -> Matrix<T> {
        let n = self.dim();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)].clone();
            }
        }
        u
    }

    /// Rows of `a` reordered as `P a`.
    pub fn permute_rows(&self, a: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(a.rows(), a.cols());
        for (i, &src) in self.perm.iter().enumerate() {
            for j in 0..a.cols() {
                out[(i, j)] = a[(src, j)].clone();
            }
        }
        out
    }

    /// Solves `A x = b`; counts `2n^2 - n` flops.
    pub fn solve_vec(&self, b: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
        let n = self.dim();
        check_dim(n, b.len())?;
        let lu = &self.lu;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 1..n {
            let (done, rest) = x.split_at_mut(i);
            let xi = &mut rest[0];
            for (j, xj) in done.iter().enumerate() {
                xi.sub_mul_assign(&lu[(i, j)], xj);
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut(i + 1);
            let xi = &mut head[i];
            for (off, xj) in tail.iter().enumerate() {
                xi.sub_mul_assign(&lu[(i, i + 1 + off)], xj);
            }
            *xi = xi.clone() / lu[(i, i)].clone();
        }
        counter.vec_solve_count += 1;
        counter.solve_flops += (2 * n * n - n) as u64;
        counter.add_flops(2 * n * n - n);
        Ok(Vector::from_vec(x))
    }

    /// Solves `A X = B` for a matrix right-hand side; counts `(2n^2 - n) m`
    /// flops for `m` columns.
    pub fn solve_mat(&self, b: &Matrix<T>, counter: &mut FlopCounter) -> Result<Matrix<T>> {
        let n = self.dim();
        check_dim(n, b.rows())?;
        let m = b.cols();
        let lu = &self.lu;
        let mut x = self.permute_rows(b);
        for i in 1..n {
            for j in 0..i {
                let lij = lu[(i, j)].clone();
                for c in 0..m {
                    let xjc = x[(j, c)].clone();
                    x[(i, c)].sub_mul_assign(&lij, &xjc);
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let uij = lu[(i, j)].clone();
                for c in 0..m {
                    let xjc = x[(j, c)].clone();
                    x[(i, c)].sub_mul_assign(&uij, &xjc);
                }
            }
            let d = lu[(i, i)].clone();
            for c in 0..m {
                x[(i, c)] = x[(i, c)].clone() / d.clone();
            }
        }
        counter.mat_solve_count += 1;
        counter.solve_flops += ((2 * n * n - n) * m) as u64;
        counter.add_flops((2 * n * n - n) * m);
        Ok(x)
    }
}
