//! Newton, the third-order Chun-type extension and the weighted fourth-order
//! family. Every method factors `F'(x)` once per iteration; the correction
//! `s` and the matrix `t = F'(x)^{-1} F'(y)` reuse that factorization.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::convergence::OrderField;
use crate::error::{NlError, Result};
use crate::linalg::{lu_decompose, mat_lincomb, mat_mat, mat_vec, norm, vec_lincomb, FlopCounter, LuFactors, Matrix, NormKind, Vector};
use crate::problems::NonlinearSystem;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_ITER: usize = 100;

/// Residual norms above `10^DIVERGENCE_EXPONENT` mark a run as diverged.
pub const DIVERGENCE_EXPONENT: i32 = 150;

/// Parameters of the weighted scheme
/// `y = x - beta s`,
/// `x+ = x - 1/2 (3I - t)(a1 I + a2 t + a3 t^2) s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodParams<T> {
    pub beta: T,
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

impl<T: OrderField> MethodParams<T> {
    pub fn new(beta: T, a1: T, a2: T, a3: T) -> Self {
        Self { beta, a1, a2, a3 }
    }

    /// `beta = 1, a = (1, 0, 0)`: reduces the family to the third-order method.
    pub fn third_order() -> Self {
        Self::new(T::one(), T::one(), T::zero(), T::zero())
    }

    /// `beta = 2/3, a = (9/4, -9/4, 1)`: the fourth-order member.
    pub fn fourth_order() -> Self {
        Self::new(T::from_ratio(2, 3), T::from_ratio(9, 4), T::from_ratio(-9, 4), T::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method<T> {
    Newton,
    M3,
    M4,
    M4General(MethodParams<T>),
}

impl<T> Method<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Newton => "newton",
            Self::M3 => "m3",
            Self::M4 => "m4",
            Self::M4General(_) => "m4-general",
        }
    }

    /// Display label as used in result tables.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Newton => "Newton",
            Self::M3 => "M3",
            Self::M4 => "M4",
            Self::M4General(_) => "M4(general)",
        }
    }
}

impl<T> fmt::Display for Method<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses the parameter-free methods; `m4-general` needs explicit parameters.
impl<T> FromStr for Method<T> {
    type Err = NlError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "newton" => Ok(Self::Newton),
            "m3" => Ok(Self::M3),
            "m4" => Ok(Self::M4),
            "m4-general" | "m4_general" => Err(NlError::InvalidConfig("m4-general requires beta, a1, a2, a3".into())),
            other => Err(NlError::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    method: Method<T>,
    tol: T,
    max_iter: usize,
    norm: NormKind,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(method: Method<T>, tol: T, max_iter: usize, norm: NormKind) -> Result<Self> {
        if !tol.is_finite() || tol <= T::zero() {
            return Err(NlError::InvalidConfig("tolerance must be positive and finite".into()));
        }
        if max_iter == 0 {
            return Err(NlError::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(Self {
            method,
            tol,
            max_iter,
            norm,
        })
    }

    /// Tolerance `1e-150`, 100 iterations, 2-norm.
    pub fn with_method(method: Method<T>) -> Self {
        Self::new(method, T::pow10(-150), DEFAULT_MAX_ITER, NormKind::Two).expect("default configuration is valid")
    }

    pub fn method(&self) -> &Method<T> {
        &self.method
    }

    pub fn tol(&self) -> &T {
        &self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterReached,
    SingularJacobian,
    DomainError,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIterReached => "max_iter_reached",
            Self::SingularJacobian => "singular_jacobian",
            Self::DomainError => "domain_error",
            Self::Diverged => "diverged",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct IterationRecord<T> {
    pub k: usize,
    pub x: Vector<T>,
    /// `|F(x_k)|` in the configured norm.
    pub residual_norm: T,
    /// `|x_k - root|` when the system knows its root.
    pub error_norm: Option<T>,
    pub counters: FlopCounter,
}

#[derive(Debug, Clone)]
pub struct IterationTrace<T> {
    /// Record 0 is the initial guess; record `k` follows `k` full steps.
    pub records: Vec<IterationRecord<T>>,
    pub status: Status,
    pub final_x: Vector<T>,
    /// The error that ended the run, for the failure statuses.
    pub failure: Option<NlError>,
}

impl<T: Scalar> IterationTrace<T> {
    /// Number of full steps taken.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    /// `|F(x_k)|` for `k = 1, 2, ...`.
    pub fn step_residuals(&self) -> impl Iterator<Item = &T> {
        self.records.iter().skip(1).map(|r| &r.residual_norm)
    }

    pub fn final_residual(&self) -> Option<&T> {
        self.records.last().map(|r| &r.residual_norm)
    }
}

fn eval_residual<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    let fx = system.residual(x)?;
    counter.add_fn_evals(system.dim());
    Ok(fx)
}

fn eval_jacobian<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Matrix<T>> {
    let j = system.jacobian(x)?;
    counter.add_fn_evals(system.dim() * system.dim());
    if !j.is_finite() {
        return Err(NlError::NonFinite("Jacobian"));
    }
    Ok(j)
}

fn factor<T: Scalar>(jac: &Matrix<T>, counter: &mut FlopCounter) -> Result<LuFactors<T>> {
    lu_decompose(jac, counter).map_err(|e| match e {
        NlError::SingularMatrix { index, .. } => NlError::SingularJacobian { index },
        other => other,
    })
}

/// `x - 1/2 w`; counts `2n` flops.
fn half_step<T: Scalar>(x: &Vector<T>, w: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    let minus_half = -T::ratio(1, 2);
    crate::linalg::vec_axpy(&minus_half, w, x, counter)
}

/// Factorization, Newton correction `s` and `t = F'(x)^{-1} F'(y)` with
/// `y = x - beta s`.
struct Stage<T> {
    s: Vector<T>,
    t: Matrix<T>,
}

fn first_stage<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &Vector<T>,
    fx: &Vector<T>,
    beta: &T,
    counter: &mut FlopCounter,
) -> Result<Stage<T>> {
    let jx = eval_jacobian(system, x, counter)?;
    let lu = factor(&jx, counter)?;
    let s = lu.solve_vec(fx, counter)?;
    let y = crate::linalg::vec_axpy(&-beta.clone(), &s, x, counter)?;
    if !system.in_domain(&y) {
        return Err(NlError::DomainError {
            problem: system.name().to_string(),
            reason: "intermediate point y left the domain".into(),
        });
    }
    let jy = eval_jacobian(system, &y, counter)?;
    let t = lu.solve_mat(&jy, counter)?;
    Ok(Stage { s, t })
}

fn newton_advance<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &Vector<T>,
    fx: &Vector<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    let jx = eval_jacobian(system, x, counter)?;
    let lu = factor(&jx, counter)?;
    let s = lu.solve_vec(fx, counter)?;
    crate::linalg::vec_axpy(&-T::one(), &s, x, counter)
}

fn m3_advance<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &Vector<T>,
    fx: &Vector<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    let Stage { s, t } = first_stage(system, x, fx, &T::one(), counter)?;
    // (3I - t) s
    let ts = mat_vec(&t, &s, counter)?;
    let w = vec_lincomb(&T::from_u32(3).expect("3"), &s, &-T::one(), &ts, counter)?;
    half_step(x, &w, counter)
}

fn weighted_advance<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &Vector<T>,
    fx: &Vector<T>,
    params: &MethodParams<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    let Stage { s, t } = first_stage(system, x, fx, &params.beta, counter)?;
    // (a1 I + a2 t + a3 t^2) s applied as matrix-vector products
    let u = mat_vec(&t, &s, counter)?;
    let u2 = mat_vec(&t, &u, counter)?;
    let v = vec_lincomb(&params.a1, &s, &params.a2, &u, counter)?;
    let v = crate::linalg::vec_axpy(&params.a3, &u2, &v, counter)?;
    // (3I - t) v
    let tv = mat_vec(&t, &v, counter)?;
    let w = vec_lincomb(&T::from_u32(3).expect("3"), &v, &-T::one(), &tv, counter)?;
    half_step(x, &w, counter)
}

fn advance<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    method: &Method<T>,
    system: &S,
    x: &Vector<T>,
    fx: &Vector<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    match method {
        Method::Newton => newton_advance(system, x, fx, counter),
        Method::M3 => m3_advance(system, x, fx, counter),
        Method::M4 => weighted_advance(system, x, fx, &MethodParams::fourth_order(), counter),
        Method::M4General(params) => weighted_advance(system, x, fx, params, counter),
    }
}

/// `x - F'(x)^{-1} F(x)`.
pub fn newton_step<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    let fx = eval_residual(system, x, counter)?;
    newton_advance(system, x, &fx, counter)
}

/// Third-order step `x - 1/2 (3I - t) s` with `y = x - s`.
pub fn m3_step<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    let fx = eval_residual(system, x, counter)?;
    m3_advance(system, x, &fx, counter)
}

pub fn m4_general_step<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &Vector<T>,
    params: &MethodParams<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    let fx = eval_residual(system, x, counter)?;
    weighted_advance(system, x, &fx, params, counter)
}

pub fn m4_step<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x: &Vector<T>, counter: &mut FlopCounter) -> Result<Vector<T>> {
    m4_general_step(system, x, &MethodParams::fourth_order(), counter)
}

/// One step of `method` from `x`.
pub fn step<T: Scalar, S: NonlinearSystem<T> + ?Sized>(
    method: &Method<T>,
    system: &S,
    x: &Vector<T>,
    counter: &mut FlopCounter,
) -> Result<Vector<T>> {
    let fx = eval_residual(system, x, counter)?;
    advance(method, system, x, &fx, counter)
}

/// The iteration matrix `(3I - t)(a1 I + a2 t + a3 t^2)`, assembled with the
/// quadratic in Horner form `a1 I + t (a2 I + a3 t)`. The solvers apply the
/// same operator to `s` through matrix-vector products instead.
pub fn weight_matrix<T: Scalar>(t: &Matrix<T>, params: &MethodParams<T>, counter: &mut FlopCounter) -> Result<Matrix<T>> {
    let n = t.rows();
    let eye = Matrix::identity(n);
    let inner = mat_lincomb(&params.a2, &eye, &params.a3, t, counter)?;
    let t_inner = mat_mat(t, &inner, counter)?;
    let poly = mat_lincomb(&params.a1, &eye, &T::one(), &t_inner, counter)?;
    let three_minus_t = mat_lincomb(&T::from_u32(3).expect("3"), &eye, &-T::one(), t, counter)?;
    mat_mat(&three_minus_t, &poly, counter)
}

fn failure_status(err: &NlError) -> Status {
    match err {
        NlError::SingularJacobian { .. } | NlError::SingularMatrix { .. } => Status::SingularJacobian,
        NlError::DomainError { .. } => Status::DomainError,
        _ => Status::Diverged,
    }
}

/// Iterates from the system's initial guess until `|F(x_k)| < tol`, the
/// iteration cap, or a failure. Failures end the run with a status; the
/// trace up to that point is kept.
pub fn solve<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, config: &SolverConfig<T>) -> IterationTrace<T> {
    solve_from(system, system.initial_guess(), config)
}

pub fn solve_from<T: Scalar, S: NonlinearSystem<T> + ?Sized>(system: &S, x0: Vector<T>, config: &SolverConfig<T>) -> IterationTrace<T> {
    let root = system.root();
    let mut counter = FlopCounter::new();
    let mut records = Vec::new();
    let blowup = T::pow10(DIVERGENCE_EXPONENT);

    let record = |k: usize, x: &Vector<T>, fx: &Vector<T>, counter: &FlopCounter| IterationRecord {
        k,
        x: x.clone(),
        residual_norm: norm(fx, config.norm),
        error_norm: root.as_ref().and_then(|r| x.sub(r).ok()).map(|e| norm(&e, config.norm)),
        counters: *counter,
    };

    let mut x = x0;
    let mut fx = match eval_residual(system, &x, &mut counter) {
        Ok(fx) => fx,
        Err(e) => {
            return IterationTrace {
                records,
                status: failure_status(&e),
                final_x: x,
                failure: Some(e),
            }
        }
    };
    records.push(record(0, &x, &fx, &counter));

    let mut k = 0;
    let (status, failure) = loop {
        let resid = &records.last().expect("at least one record").residual_norm;
        if resid < &config.tol {
            break (Status::Converged, None);
        }
        if !resid.is_finite() || resid > &blowup {
            break (Status::Diverged, None);
        }
        if k == config.max_iter {
            break (Status::MaxIterReached, None);
        }
        let next = advance(&config.method, system, &x, &fx, &mut counter)
            .and_then(|xn| if xn.is_finite() { Ok(xn) } else { Err(NlError::NonFinite("iterate")) })
            .and_then(|xn| eval_residual(system, &xn, &mut counter).map(|fxn| (xn, fxn)));
        match next {
            Ok((xn, fxn)) => {
                k += 1;
                x = xn;
                fx = fxn;
                records.push(record(k, &x, &fx, &counter));
            }
            Err(e) => break (failure_status(&e), Some(e)),
        }
    };

    IterationTrace {
        records,
        status,
        final_x: x,
        failure,
    }
}
